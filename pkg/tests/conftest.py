from __future__ import annotations

import os
import sys
import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from nevlab.core import make_measure

# NEVLAB_HYPOTHESIS=thorough raises the example budget for soak runs
settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("NEVLAB_HYPOTHESIS", "default"))


@st.composite
def separated_atoms(draw, min_size=2, max_size=6, low=-5.0, high=5.0, min_gap=0.1):
    n = draw(st.integers(min_size, max_size))
    raw = draw(
        st.lists(st.floats(low, high, allow_nan=False), min_size=n, max_size=n)
    )
    b = np.sort(np.asarray(raw))
    if n >= 2:
        # spread out clustered draws deterministically instead of rejecting
        b = b + min_gap * 1.5 * np.arange(n)
    return [float(x) for x in b]


@st.composite
def probability_measures(draw, min_size=2, max_size=6):
    atoms = draw(separated_atoms(min_size, max_size))
    w = draw(st.lists(st.floats(0.2, 1.0), min_size=len(atoms), max_size=len(atoms)))
    w = np.asarray(w) / np.sum(w)
    return make_measure(atoms, w)


@pytest.fixture
def bernoulli():
    return make_measure([-1.0, 1.0], [0.5, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
