"""Recovering ``a`` and ``rho`` from imaginary-axis values of the transforms.

The Laplace transform of the characteristic function of ``rho`` is a rational
expression in the restricted Nevanlinna transform::

    L[rho_hat; w] = (i k(-iw) - i Re k(i) - w Im k(i)) / (w^2 - 1),   w > 0,

with ``k(i) = a - i rho(R)``.  The ``verify_*`` functions sample both sides of
this and of the related identities and return a :class:`CorollaryReport`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .core import (
    ComplexGrid,
    DiscreteMeasure,
    NevanlinnaData,
    Polynomial,
    make_measure,
    poly_roots,
)
from .decomposition import self_energy_data
from .errors import (
    ConsistencyError,
    DomainError,
    NotAPositiveMeasure,
    NotAProbability,
    RankDeficient,
    ResidualTooLarge,
)
from .report import CorollaryReport
from .transforms import (
    cauchy_transform,
    char_fn,
    laplace_charfn,
    laplace_charfn_quad,
    laplace_quad,
    restricted_cauchy,
    restricted_nevanlinna,
    self_energy,
)

__all__ = [
    "CorollaryReport",
    "RecoveredConstants",
    "corollary3_quantities",
    "recover_constants",
    "recover_measure",
    "sample_cauchy",
    "theorem1_rhs",
    "verify_cauchy_scaling",
    "verify_corollary1",
    "verify_corollary2",
    "verify_corollary3",
    "verify_theorem1",
]

SINGULAR_GAP = 1e-3
CROSS_CHECK_TOL = 1e-9


@dataclass(frozen=True)
class RecoveredConstants:
    a: float
    total_mass: float


def recover_constants(k_at_i: complex) -> RecoveredConstants:
    """Read ``a`` and ``rho(R)`` off ``k(i) = a - i rho(R)``."""
    k_at_i = complex(k_at_i)
    mass = -k_at_i.imag
    if mass <= 0:
        raise NotAPositiveMeasure(f"-Im k(i) = {mass!r} is not positive")
    return RecoveredConstants(a=k_at_i.real, total_mass=mass)


def _check_w(w: float) -> None:
    if not w > 0 or abs(w - 1.0) <= SINGULAR_GAP:
        raise DomainError(f"w = {w!r} must be positive and away from the removable point 1")


def theorem1_rhs(d: NevanlinnaData, w: float) -> complex:
    _check_w(w)
    k_i = restricted_nevanlinna(d, 1.0)
    k_w = restricted_nevanlinna(d, -w)
    return (1j * k_w - 1j * k_i.real - w * k_i.imag) / (w * w - 1.0)


def verify_theorem1(d: NevanlinnaData, w_grid: Sequence[float]) -> CorollaryReport:
    lhs = [laplace_charfn(d.rho, w, "closed") for w in w_grid]
    rhs = [theorem1_rhs(d, w) for w in w_grid]
    return CorollaryReport.build("theorem1", w_grid, lhs, rhs)


def verify_corollary1(d: NevanlinnaData, w_grid: Sequence[float]) -> CorollaryReport:
    """Laplace transform of ``rho_hat`` minus two exponentials, ``w > 1``.

    The ``rho_hat`` part is integrated numerically; the subtracted exponentials
    ``e^{-r}`` and ``e^{r}`` contribute ``1/(w+1)`` and ``1/(w-1)``.
    """
    if any(not w > 1 for w in w_grid):
        raise DomainError("the exponential terms need w > 1")
    c = 1j * restricted_nevanlinna(d, 1.0)
    lhs, rhs = [], []
    for w in w_grid:
        quad, _ = laplace_charfn_quad(d.rho, w)
        lhs.append(quad - 0.5 * (c / (w + 1.0) + np.conj(c) / (w - 1.0)))
        rhs.append(1j * restricted_nevanlinna(d, -w) / (w * w - 1.0))
    return CorollaryReport.build("corollary1", w_grid, lhs, rhs)


def verify_corollary2(m: DiscreteMeasure, w_grid: Sequence[float]) -> CorollaryReport:
    if any(not w > 0 for w in w_grid):
        raise DomainError("the Laplace integral of a bounded function needs w > 0")
    lhs = [laplace_charfn(m, w, "closed") for w in w_grid]
    rhs = [np.conj(1j * restricted_cauchy(m, w)) for w in w_grid]
    return CorollaryReport.build("corollary2", w_grid, lhs, rhs)


def verify_cauchy_scaling(m: DiscreteMeasure, t_grid: Sequence[float]) -> CorollaryReport:
    """``int_0^inf rho_hat(t s) e^{-s} ds = G(1/(it)) / (it)``, by quadrature."""
    freq = max(abs(b) for b in m.atoms)
    lhs, rhs = [], []
    for t in t_grid:
        if t == 0:
            raise DomainError("t = 0 is outside the punctured axis")
        lhs.append(laplace_quad(lambda s: char_fn(m, t * s), 1.0, m.total_mass, abs(t) * freq)[0])
        z = 1.0 / (1j * t)
        rhs.append(z * cauchy_transform(m, z))
    return CorollaryReport.build("cauchy_scaling", t_grid, lhs, rhs)


def corollary3_quantities(m: DiscreteMeasure) -> tuple[complex, float, float]:
    """``(z_mu, a, rho(R))`` for the Nevanlinna data of the self-energy of ``m``.

    ``z_mu = -g_mu(i) = c + i d``; then ``a = c/|z|^2`` and
    ``rho(R) = d/|z|^2 - 1``.  Both are cross-checked against ``e_mu(i)``.
    """
    if not m.is_probability:
        raise NotAProbability("self-energy needs a probability measure")
    z = -restricted_cauchy(m, 1.0)
    n2 = abs(z) ** 2
    a = z.real / n2
    mass = z.imag / n2 - 1.0
    e_i = self_energy(m, 1.0)
    if abs(a - e_i.real) > CROSS_CHECK_TOL or abs(mass + e_i.imag) > CROSS_CHECK_TOL:
        raise ConsistencyError("constants disagree with the self-energy at i")
    if mass < -CROSS_CHECK_TOL:
        raise ConsistencyError(f"negative mass {mass!r}")
    return z, a, max(mass, 0.0)


def verify_corollary3(m: DiscreteMeasure, w_grid: Sequence[float]) -> CorollaryReport:
    """``L[|z|^2 rho_hat - (i/2)(conj(z) e^{-r} - z e^{r}); w] = |z|^2 / ((w^2-1) i g(-iw))``.

    ``rho`` is the measure with ``e_mu = k_{a,rho}``; its characteristic
    function is integrated numerically.
    """
    if any(not w > 1 for w in w_grid):
        raise DomainError("the exponential terms need w > 1")
    z, _, _ = corollary3_quantities(m)
    n2 = abs(z) ** 2
    rho = self_energy_data(m).rho if m.size > 1 else None
    lhs, rhs = [], []
    for w in w_grid:
        lap = laplace_charfn_quad(rho, w)[0] if rho is not None else 0j
        lhs.append(n2 * lap - 0.5j * (np.conj(z) / (w + 1.0) - z / (w - 1.0)))
        rhs.append(n2 / ((w * w - 1.0) * 1j * restricted_cauchy(m, -w)))
    return CorollaryReport.build("corollary3", w_grid, lhs, rhs)


def sample_cauchy(m: DiscreteMeasure, t_points: Sequence[float]) -> ComplexGrid:
    return ComplexGrid.sample(lambda t: restricted_cauchy(m, t), t_points)


def _refine_fit(
    t: np.ndarray, g: np.ndarray, atoms: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Levenberg-Marquardt on ``sum w/(it - b) - g`` from the linearized estimate.

    The linearized system squares the conditioning; the nonlinear fit does
    not.  The refined fit is kept only if it lowers the residual.
    """
    n = atoms.size
    z = 1j * t[:, None]

    def resid(x):
        r = (1.0 / (z - x[None, :n])) @ x[n:] - g
        return np.concatenate([r.real, r.imag])

    def jac(x):
        inv = 1.0 / (z - x[None, :n])
        jc = np.hstack([x[None, n:] * inv**2, inv])
        return np.vstack([jc.real, jc.imag])

    x0 = np.concatenate([atoms, weights])
    sol = least_squares(resid, x0, jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    if np.linalg.norm(resid(sol.x)) > np.linalg.norm(resid(x0)) or np.any(sol.x[n:] <= 0):
        return atoms, weights
    return sol.x[:n], sol.x[n:]


def recover_measure(
    samples: ComplexGrid,
    degree_hint: int,
    *,
    rank_tol: float = 1e-11,
    residual_tol: float = 1e-6,
) -> DiscreteMeasure:
    """Fit ``sum_j w_j/(it - b_j)`` with ``degree_hint`` atoms to Cauchy samples.

    Linearized: ``g(z) D(z) = N(z)`` with ``D`` monic of degree ``n`` and
    ``deg N = n - 1``, solved in real arithmetic for the real coefficients.
    The atoms are the roots of ``D``; weights come from a second least-squares
    solve with the atoms fixed.
    """
    n = int(degree_hint)
    t = np.asarray(samples.points, dtype=float)
    g = np.asarray(samples.values, dtype=complex)
    if n < 1:
        raise DomainError("degree_hint must be positive")
    if t.size < 2 * n or np.unique(t).size != t.size:
        raise DomainError(f"need at least {2 * n} distinct sample points")

    scale = float(np.max(np.abs(t)))
    u = 1j * t / scale
    powers = u[:, None] ** np.arange(n + 1)[None, :]
    # unknowns: d_0..d_{n-1} (of D in u) then c_0..c_{n-1} (of N in u)
    a_c = np.hstack([g[:, None] * powers[:, :n], -powers[:, :n]])
    rhs_c = -g * powers[:, n]
    a_r = np.vstack([a_c.real, a_c.imag])
    rhs_r = np.concatenate([rhs_c.real, rhs_c.imag])
    col = np.linalg.norm(a_r, axis=0)
    col[col == 0] = 1.0
    sv = np.linalg.svd(a_r / col, compute_uv=False)
    if sv[-1] <= rank_tol * sv[0]:
        raise RankDeficient(f"degree_hint={n} over-parameterizes the samples")
    coef = np.linalg.lstsq(a_r / col, rhs_r, rcond=None)[0] / col

    den = Polynomial(tuple(coef[:n]) + (1.0,))
    roots = poly_roots(den)
    if np.any(np.abs(roots.imag) > 1e-6 * np.maximum(1.0, np.abs(roots))):
        raise ResidualTooLarge("denominator has non-real roots; data is not a discrete measure")
    atoms = np.sort(roots.real) * scale

    basis = 1.0 / (1j * t[:, None] - atoms[None, :])
    b_r = np.vstack([basis.real, basis.imag])
    g_r = np.concatenate([g.real, g.imag])
    weights = np.linalg.lstsq(b_r, g_r, rcond=None)[0]
    if np.any(weights < -1e-8):
        raise ResidualTooLarge("recovered weights are negative")
    keep = weights > 0
    atoms, weights = _refine_fit(t, g, atoms[keep], weights[keep])

    fit = (1.0 / (1j * t[:, None] - atoms[None, :])) @ weights
    resid = float(np.max(np.abs(fit - g)) / max(np.max(np.abs(g)), 1e-300))
    if resid > residual_tol:
        raise ResidualTooLarge(f"relative residual {resid:.2e} exceeds {residual_tol:.0e}")
    return make_measure(atoms, weights)
