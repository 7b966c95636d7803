"""Numeric kernel: discrete measures, complex polynomials, rational functions.

Everything here is immutable.  Polynomials store coefficients in ascending
degree order (``coeffs[k]`` multiplies ``z**k``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    InvalidMeasure,
    MultiplePole,
    NonPositiveWeight,
    NotAPole,
    PoleEvaluation,
)

PROBABILITY_TOL = 1e-12
REAL_SNAP_TOL = 1e-9
ROOT_TOL = 1e-12
ROOT_MAX_ITER = 500


# --------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite positive measure with finitely many atoms, in canonical form.

    Build instances with :func:`make_measure`; the constructor only validates.
    """

    atoms: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.atoms) == 0 or len(self.atoms) != len(self.weights):
            raise InvalidMeasure("atoms and weights must be non-empty and of equal length")
        if any(w <= 0 for w in self.weights):
            raise NonPositiveWeight("weights must be strictly positive")
        if any(b >= c for b, c in zip(self.atoms, self.atoms[1:])):
            raise InvalidMeasure("atoms must be strictly increasing; use make_measure")

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def is_probability(self) -> bool:
        return abs(self.total_mass - 1.0) <= PROBABILITY_TOL

    @property
    def size(self) -> int:
        return len(self.atoms)

    @property
    def mean(self) -> float:
        return math.fsum(w * b for b, w in zip(self.atoms, self.weights)) / self.total_mass

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.atoms, dtype=float), np.asarray(self.weights, dtype=float)

    def shifted(self, c: float) -> DiscreteMeasure:
        return make_measure([b + c for b in self.atoms], self.weights)

    def scaled_mass(self, s: float) -> DiscreteMeasure:
        return make_measure(self.atoms, [s * w for w in self.weights])


@dataclass(frozen=True)
class NevanlinnaData:
    """The constant ``a`` and measure ``rho`` of ``a + int (1+zx)/(z-x) rho(dx)``."""

    a: float
    rho: DiscreteMeasure

    def __post_init__(self) -> None:
        if not math.isfinite(self.a):
            raise InvalidMeasure("a must be finite")


def make_measure(atoms: Iterable[float], weights: Iterable[float]) -> DiscreteMeasure:
    """Canonicalize: sort atoms and merge exact duplicates by summing weights."""
    atoms = [float(b) for b in atoms]
    weights = [float(w) for w in weights]
    if not atoms or len(atoms) != len(weights):
        raise InvalidMeasure("atoms and weights must be non-empty and of equal length")
    if not all(math.isfinite(x) for x in atoms + weights):
        raise InvalidMeasure("non-finite atom or weight")
    if any(w <= 0 for w in weights):
        raise NonPositiveWeight("weights must be strictly positive")
    merged: dict[float, list[float]] = {}
    for b, w in zip(atoms, weights):
        merged.setdefault(b + 0.0, []).append(w)
    keys = sorted(merged)
    return DiscreteMeasure(tuple(keys), tuple(math.fsum(merged[k]) for k in keys))


def uniform_measure(atoms: Iterable[float]) -> DiscreteMeasure:
    atoms = list(atoms)
    return make_measure(atoms, [1.0 / len(atoms)] * len(atoms))


# --------------------------------------------------------------------------
# polynomials


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class Polynomial:
    coeffs: tuple[complex, ...]
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        c = _trim(np.asarray(self.coeffs, dtype=complex).ravel())
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coeffs", tuple(complex(x) for x in c))
        object.__setattr__(self, "_c", c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> Polynomial:
        c = np.array([lead], dtype=complex)
        for r in roots:
            # multiply by (z - r)
            c = np.concatenate(([0.0], c)) - r * np.concatenate((c, [0.0]))
        return cls(tuple(c))

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self._c) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 1 and self._c[0] == 0

    @property
    def lead(self) -> complex:
        return complex(self._c[-1])

    @property
    def array(self) -> np.ndarray:
        return self._c.copy()

    @property
    def is_real(self) -> bool:
        return bool(np.all(self._c.imag == 0))

    def norm(self) -> float:
        return float(np.max(np.abs(self._c)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, dtype=complex)
        a[: len(self._c)] += self._c
        a[: len(other._c)] += other._c
        return Polynomial(tuple(a))

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-self._c))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial | complex | float) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(tuple(np.convolve(self._c, other._c)))
        return Polynomial(tuple(self._c * complex(other)))

    __rmul__ = __mul__

    def derivative(self) -> Polynomial:
        if len(self._c) == 1:
            return Polynomial((0.0,))
        return Polynomial(tuple(self._c[1:] * np.arange(1, len(self._c))))

    def __call__(self, z):
        return poly_eval(self, z)

    def abs_eval(self, z):
        """Sum of |c_k| |z|^k: the rounding-error scale of evaluation at ``z``."""
        return _horner(np.abs(self._c), np.abs(np.asarray(z)))

    def roots(self, **kw) -> np.ndarray:
        return poly_roots(self, **kw)


def _horner(c: np.ndarray, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex)) + c[-1]
    for coef in c[-2::-1]:
        acc = acc * z + coef
    return acc


def poly_eval(p: Polynomial, z):
    out = _horner(p._c, np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def poly_arith(p: Polynomial, q: Polynomial | None, op: str) -> Polynomial:
    if op == "add":
        return p + q
    if op == "mul":
        return p * q
    if op == "derivative":
        return p.derivative()
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_roots(
    p: Polynomial,
    *,
    tol: float = ROOT_TOL,
    max_iter: int = ROOT_MAX_ITER,
    real_snap: float | None = None,
) -> np.ndarray:
    """All roots of ``p`` (with multiplicity) by Aberth-Ehrlich iteration.

    Starting points sit on a circle of radius ``1 + max|c_k|/|c_n|`` that
    bounds every root.  With ``real_snap`` set, roots whose imaginary part is
    below ``real_snap * max(1, |root|)`` are made exactly real.
    """
    if p.is_zero:
        raise DomainError("the zero polynomial has no well-defined roots")
    n = p.degree
    if n < 1:
        raise DomainError("constant polynomial has no roots")
    c = p.array
    # exact zero roots are peeled off first
    k0 = int(np.flatnonzero(c)[0])
    c = c[k0:]
    m = len(c) - 1
    roots = np.zeros(k0, dtype=complex)
    if m > 0:
        roots = np.concatenate((roots, _aberth(c / c[-1], tol, max_iter)))
    if p.is_real:
        roots = _conjugate_close(roots, REAL_SNAP_TOL if real_snap is None else real_snap)
    if real_snap is not None:
        small = np.abs(roots.imag) <= real_snap * np.maximum(1.0, np.abs(roots))
        roots = np.where(small, roots.real + 0j, roots)
    return roots[np.lexsort((roots.imag, roots.real))]


def _aberth(a: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    m = len(a) - 1
    if m == 1:
        return np.array([-a[0]], dtype=complex)
    da = a[1:] * np.arange(1, m + 1)
    radius = 1.0 + float(np.max(np.abs(a[:-1])))
    # angular offset keeps starts off the real axis for real polynomials
    z = radius * np.exp(1j * (2 * np.pi * np.arange(m) / m + 0.4))
    converged = False
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_iter):
            pz = _horner(a, z)
            dz = _horner(da, z)
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
            step = np.where(np.isfinite(step), step, 0.0)
            z = z - step
            if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
                converged = True
                break
    if not converged:
        # multiple roots converge only linearly; accept if backward-stable
        # values below the normal range carry no relative accuracy
        scale = np.maximum(_horner(np.abs(a), np.abs(z)).real, np.finfo(float).tiny)
        berr = np.abs(_horner(a, z)) / scale
        if not np.all(berr <= 1e-10):
            raise ConvergenceError(f"Aberth iteration did not converge in {max_iter} steps")
    return z


def _conjugate_close(roots: np.ndarray, tol: float) -> np.ndarray:
    out = roots.copy()
    scale = np.maximum(1.0, np.abs(out))
    real = np.abs(out.imag) <= tol * scale
    out[real] = out[real].real
    upper = [i for i in range(len(out)) if not real[i] and out[i].imag > 0]
    lower = [i for i in range(len(out)) if not real[i] and out[i].imag < 0]
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda k: abs(out[k] - np.conj(out[i])))
        avg = 0.5 * (out[i] + np.conj(out[j]))
        out[i], out[j] = avg, np.conj(avg)
        lower.remove(j)
    return out


def snap_real(roots: np.ndarray, tol: float = REAL_SNAP_TOL) -> np.ndarray:
    """Return real parts, raising if any root is genuinely complex."""
    roots = np.asarray(roots, dtype=complex)
    bad = np.abs(roots.imag) > tol * np.maximum(1.0, np.abs(roots))
    if np.any(bad):
        raise ConvergenceError(
            f"expected real roots, got imaginary parts up to {np.max(np.abs(roots.imag)):.3e}"
        )
    return np.sort(roots.real)


# --------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """``num / den``, kept unreduced."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self) -> None:
        if self.den.is_zero:
            raise DomainError("denominator is the zero polynomial")

    def __call__(self, z):
        return rational_eval(self, z)

    def __add__(self, other: RationalFunction) -> RationalFunction:
        return rational_add(self, other)


def rational_eval(r: RationalFunction, z):
    z = np.asarray(z, dtype=complex)
    d = _horner(r.den._c, z)
    if np.any(d == 0):
        raise PoleEvaluation("evaluation at a root of the denominator")
    out = _horner(r.num._c, z) / d
    return complex(out) if np.ndim(out) == 0 else out


def rational_add(r1: RationalFunction, r2: RationalFunction) -> RationalFunction:
    return RationalFunction(r1.num * r2.den + r2.num * r1.den, r1.den * r2.den)


def residue_simple_pole(r: RationalFunction, pole: complex, tol: float = 1e-9) -> complex:
    """Residue ``num(pole)/den'(pole)``; zero when the pole is cancelled."""
    pole = complex(pole)
    dprime = r.den.derivative()
    d1 = dprime(pole)
    # a pole within roundoff of a tiny root has a tiny abs_eval; allow an
    # absolute displacement of about 1e3 ulps as well
    slack = 1e3 * np.finfo(float).eps * max(1.0, abs(pole)) * abs(d1)
    if abs(r.den(pole)) > tol * max(r.den.abs_eval(pole), 1e-300) + slack:
        raise NotAPole(f"{pole} is not a root of the denominator")
    if abs(r.num(pole)) < tol * max(r.num.abs_eval(pole), 1e-300):
        return 0j
    if abs(d1) <= tol * max(dprime.abs_eval(pole), 1e-300):
        raise MultiplePole(f"{pole} is not a simple root of the denominator")
    return r.num(pole) / d1


# --------------------------------------------------------------------------
# sampled functions


@dataclass(frozen=True)
class ComplexGrid:
    """Values of a function sampled at points ``t`` of the punctured imaginary axis."""

    points: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(self.values):
            raise ValueError("points and values must have equal length")
        if any(t == 0 for t in self.points):
            raise DomainError("t = 0 is not in the punctured imaginary axis")

    @classmethod
    def sample(cls, func, points: Sequence[float]) -> ComplexGrid:
        pts = tuple(float(t) for t in points)
        if any(t == 0 for t in pts):
            raise DomainError("t = 0 is not in the punctured imaginary axis")
        vals = np.asarray(func(np.asarray(pts)), dtype=complex).ravel()
        return cls(pts, tuple(complex(v) for v in vals))
