"""Seeded random measures for property checks."""

from __future__ import annotations

import numpy as np

from .core import DiscreteMeasure, NevanlinnaData, make_measure


def random_atoms(
    rng: np.random.Generator,
    m: int,
    low: float = -5.0,
    high: float = 5.0,
    min_gap: float = 0.1,
) -> np.ndarray:
    """``m`` sorted uniform atoms with pairwise gaps above ``min_gap`` (rejection)."""
    while True:
        b = np.sort(rng.uniform(low, high, m))
        if m < 2 or np.min(np.diff(b)) > min_gap:
            return b


def random_probability(
    rng: np.random.Generator, min_atoms: int = 2, max_atoms: int = 6
) -> DiscreteMeasure:
    m = int(rng.integers(min_atoms, max_atoms + 1))
    w = rng.uniform(0.2, 1.0, m)
    return make_measure(random_atoms(rng, m), w / w.sum())


def random_nevanlinna(rng: np.random.Generator, max_atoms: int = 6) -> NevanlinnaData:
    m = int(rng.integers(1, max_atoms + 1))
    atoms = random_atoms(rng, m)
    # masses in (0, 2]
    masses = 2.0 - rng.uniform(0.0, 2.0, m)
    return NevanlinnaData(float(rng.uniform(-3.0, 3.0)), make_measure(atoms, masses))


def measure_distance(a: DiscreteMeasure, b: DiscreteMeasure) -> float:
    """Max atom-wise difference in position and weight; ``inf`` if sizes differ."""
    if a.size != b.size:
        return float("inf")
    da = np.max(np.abs(np.subtract(a.atoms, b.atoms)))
    dw = np.max(np.abs(np.subtract(a.weights, b.weights)))
    return float(max(da, dw))
