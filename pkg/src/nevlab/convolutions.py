"""Boolean and free additive convolution of discrete probability measures.

Boolean convolution adds self-energies ``E(z) = z - F(z)``, so the result of
convolving discrete measures is again discrete: its atoms are the real zeros
of ``F`` (the poles of ``G = 1/F``) and its weights the residues ``1/F'``.  Free convolution is handled through the
subordination functions ``omega_1, omega_2`` with

    F_{mu1}(omega_1(z)) = F_{mu2}(omega_2(z)) = F_{mu1 (+) mu2}(z),
    omega_1(z) + omega_2(z) = z + F_{mu1 (+) mu2}(z),

evaluated pointwise in the upper half-plane and never turned into a measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    ComplexGrid,
    DiscreteMeasure,
    Polynomial,
    RationalFunction,
    make_measure,
)
from .decomposition import self_energy_poles
from .errors import ConvergenceError, DomainError, NotAProbability
from .report import CorollaryReport
from .transforms import cauchy_transform, f_transform, f_transform_derivative

POLE_MERGE = 1e-12
MASS_TOL = 1e-9
PICARD_TOL = 1e-13
PICARD_MAX_ITER = 10_000
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 100

# F-transform as a callable returning (F(w), F'(w))
FPair = Callable[[complex], "tuple[complex, complex]"]


def _require_probability(*mus: DiscreteMeasure) -> None:
    for mu in mus:
        if not mu.is_probability:
            raise NotAProbability(f"total mass {mu.total_mass!r} is not 1")


# --------------------------------------------------------------------------
# boolean convolution


def cauchy_rational(m: DiscreteMeasure) -> RationalFunction:
    """``G_m`` as ``sum_j w_j prod_{k!=j}(z-b_k) / prod_k (z-b_k)``."""
    atoms, weights = m.as_arrays()
    den = Polynomial.from_roots(atoms)
    num = Polynomial((0.0,))
    for j in range(atoms.size):
        num = num + Polynomial.from_roots(np.delete(atoms, j), lead=weights[j])
    return RationalFunction(num, den)


# self-energy in pole form: (c, xi, beta) meaning E(x) = c + sum beta/(x - xi)
PoleForm = "tuple[float, np.ndarray, np.ndarray]"


def _pole_form(mu: DiscreteMeasure, s: float = 1.0) -> PoleForm:
    mean, xis, alpha = self_energy_poles(mu)
    return s * mean, xis, s * alpha


def _merge_poles(forms: Sequence[PoleForm]) -> PoleForm:
    """Sum of self-energies; poles equal to ``POLE_MERGE`` relative are combined."""
    c = float(sum(f[0] for f in forms))
    xis = np.concatenate([f[1] for f in forms])
    betas = np.concatenate([f[2] for f in forms])
    order = np.argsort(xis, kind="stable")
    merged_x: list[float] = []
    merged_b: list[float] = []
    for x, beta in zip(xis[order], betas[order]):
        if merged_x and x - merged_x[-1] <= POLE_MERGE * max(1.0, abs(x)):
            merged_b[-1] += beta
        else:
            merged_x.append(float(x))
            merged_b.append(float(beta))
    return c, np.asarray(merged_x), np.asarray(merged_b)


def _bracket(f: Callable[[float], float], pole: float, toward: float) -> float:
    """A point between ``pole`` and ``toward`` where ``f`` has the sign it takes next to ``pole``."""
    want = -1.0 if toward > pole else 1.0
    step = toward - pole
    for _ in range(2000):
        step /= 2.0
        x = pole + step
        if x == pole:
            break
        if np.sign(f(x)) == want:
            return x
    raise ConvergenceError(f"no sign change next to the pole {pole!r}")


def _measure_from_poles(form: PoleForm) -> DiscreteMeasure:
    """The probability measure with self-energy ``c + sum beta/(x - xi)``.

    ``F(x) = x - E(x)`` increases strictly from -inf to +inf on each gap
    between consecutive poles and on the two outer half-lines, so every gap
    holds exactly one atom, found by bracketing.  Weights are ``1/F'``.
    """
    c, xis, betas = form
    if xis.size == 0:
        return make_measure([c], [1.0])

    def f(x: float) -> float:
        return x - c - float(np.sum(betas / (x - xis)))

    def fprime(x: float) -> float:
        return 1.0 + float(np.sum(betas / (x - xis) ** 2))

    # F(x) ~ x - c - sum(beta)/x far out, so this reach puts both tails past the last root
    reach = 2.0 + abs(c) + float(np.sum(betas)) + float(np.max(np.abs(xis)))
    edges = [xis[0] - reach] + list(xis) + [xis[-1] + reach]
    atoms, weights = [], []
    for k in range(len(edges) - 1):
        lo, hi = edges[k], edges[k + 1]
        if k > 0:
            lo = _bracket(f, lo, hi)
        if k < len(edges) - 2:
            hi = _bracket(f, hi, lo)
        x = brentq(f, lo, hi, xtol=4e-16 * max(1.0, abs(lo)), rtol=4 * np.finfo(float).eps, maxiter=500)
        atoms.append(x)
        weights.append(1.0 / fprime(x))
    w = np.asarray(weights)
    if abs(w.sum() - 1.0) > MASS_TOL:
        raise ConvergenceError(f"output mass {w.sum()!r} differs from 1")
    return make_measure(atoms, w / w.sum())


def boolean_convolve(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    """The measure whose self-energy is ``E_mu + E_nu``."""
    return boolean_convolve_all([mu, nu])


def boolean_power(mu: DiscreteMeasure, s: float) -> DiscreteMeasure:
    """The measure whose self-energy is ``s * E_mu`` for ``s > 0``."""
    _require_probability(mu)
    if not s > 0:
        raise DomainError("boolean powers need s > 0")
    return _measure_from_poles(_pole_form(mu, s))


def boolean_convolve_all(mus: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    """Boolean convolution of all ``mus`` at once."""
    if not mus:
        raise DomainError("need at least one measure")
    _require_probability(*mus)
    return _measure_from_poles(_merge_poles([_pole_form(mu) for mu in mus]))


# --------------------------------------------------------------------------
# free convolution via subordination


@dataclass(frozen=True)
class SubordinationResult:
    z: complex
    omega1: complex
    omega2: complex
    f_value: complex
    iterations: int
    residual: float


def measure_f(mu: DiscreteMeasure) -> FPair:
    def pair(w: complex) -> tuple[complex, complex]:
        return complex(f_transform(mu, w)), complex(f_transform_derivative(mu, w))

    return pair


def _check_upper(z: complex) -> complex:
    z = complex(z)
    if not z.imag > 0:
        raise DomainError("subordination is defined on the upper half-plane")
    return z


def _subordinate(f1: FPair, f2: FPair, z: complex) -> SubordinationResult:
    """Picard iteration ``w <- z + h2(z + h1(w))`` with ``h(w) = F(w) - w``."""
    z = _check_upper(z)
    omega = z
    tol = PICARD_TOL * max(1.0, abs(z))
    for it in range(1, PICARD_MAX_ITER + 1):
        f1w = f1(omega)[0]
        omega2 = z + f1w - omega
        new = z + f2(omega2)[0] - omega2
        step = abs(new - omega)
        omega = new
        if step <= tol:
            break
    else:
        raise ConvergenceError(
            f"subordination did not converge at z={z} (last step {step:.2e})"
        )
    f_value = f1(omega)[0]
    omega2 = z + f_value - omega
    residual = abs(f2(omega2)[0] - f_value)
    return SubordinationResult(z, omega, omega2, f_value, it, residual)


def subordination(mu1: DiscreteMeasure, mu2: DiscreteMeasure, z: complex) -> SubordinationResult:
    _require_probability(mu1, mu2)
    return _subordinate(measure_f(mu1), measure_f(mu2), z)


def free_sum_f(f1: FPair, f2: FPair) -> FPair:
    """``F`` of the free convolution, with its derivative by implicit differentiation."""

    def pair(z: complex) -> tuple[complex, complex]:
        res = _subordinate(f1, f2, z)
        _, f1d = f1(res.omega1)
        _, f2d = f2(res.omega2)
        h1d, h2d = f1d - 1.0, f2d - 1.0
        omega1_d = (1.0 + h2d) / (1.0 - h2d * h1d)
        return res.f_value, f1d * omega1_d

    return pair


def free_f(mus: Sequence[DiscreteMeasure]) -> FPair:
    """Left fold of binary free convolution over ``mus``."""
    _require_probability(*mus)
    pair = measure_f(mus[0])
    for mu in mus[1:]:
        pair = free_sum_f(pair, measure_f(mu))
    return pair


def free_subordinators(mus: Sequence[DiscreteMeasure], z: complex) -> tuple[complex, list[complex]]:
    """``F(z)`` of the n-fold free convolution and every ``omega_j(z)``.

    Subordination composes along the fold: the functions of the inner pair
    are evaluated at the outer ``omega`` of the partial sum.
    """
    z = _check_upper(z)
    if len(mus) == 1:
        return measure_f(mus[0])(z)[0], [z]
    res = _subordinate(free_f(mus[:-1]), measure_f(mus[-1]), z)
    _, inner = free_subordinators(mus[:-1], res.omega1)
    return res.f_value, inner + [res.omega2]


def free_f_grid(mu1: DiscreteMeasure, mu2: DiscreteMeasure, t_grid: Sequence[float]) -> ComplexGrid:
    """``F_{mu1 (+) mu2}(it)`` for ``t > 0``; values at ``-t`` are the conjugates."""
    if any(not t > 0 for t in t_grid):
        raise DomainError("free_f_grid samples the upper imaginary axis, t > 0")
    vals = [subordination(mu1, mu2, 1j * t).f_value for t in t_grid]
    return ComplexGrid(tuple(float(t) for t in t_grid), tuple(vals))


def invert_f(pair: FPair, target: complex, start: complex | None = None) -> complex:
    """Solve ``F(w) = target`` by Newton's method from ``start`` (default ``target``)."""
    target = _check_upper(target)
    w = target if start is None else complex(start)
    tol = NEWTON_TOL * max(1.0, abs(target))
    for _ in range(NEWTON_MAX_ITER):
        f, fd = pair(w)
        w = w - (f - target) / fd
        if not w.imag > 0:
            raise ConvergenceError("Newton step left the upper half-plane")
        if abs(pair(w)[0] - target) <= tol:
            return w
    raise ConvergenceError(f"Newton inversion of F did not converge at {target}")


def v_transform(mu: DiscreteMeasure, z: complex) -> complex:
    """``F^{-1}(z) - z``; reliable for ``z = it`` with ``t > 2 max|atom|``."""
    _require_probability(mu)
    z = complex(z)
    return invert_f(measure_f(mu), z) - z


def free_v_transform(mus: Sequence[DiscreteMeasure], z: complex) -> complex:
    z = complex(z)
    return invert_f(free_f(mus), z) - z


# --------------------------------------------------------------------------
# identities


def verify_proposition1(
    mu1: DiscreteMeasure, mu2: DiscreteMeasure, t_grid: Sequence[float]
) -> CorollaryReport:
    """``E_{nu1} + E_{nu2} = E_{mu1 (+) mu2}`` where ``F_{nu_j} = omega_j``."""
    lhs, rhs = [], []
    for t in t_grid:
        res = subordination(mu1, mu2, 1j * t)
        z = res.z
        lhs.append((z - res.omega1) + (z - res.omega2))
        rhs.append(z - res.f_value)
    return CorollaryReport.build("proposition1", t_grid, lhs, rhs)


def verify_corollary4(mus: Sequence[DiscreteMeasure], t_grid: Sequence[float]) -> CorollaryReport:
    """``(1/(n-1)) sum_j (z - omega_j) = z - F_{mu1 (+) ... (+) mun}(z)``.

    ``omega_j`` solves ``F_{mu_j}(omega_j) = F(z)``; Newton's method is started
    from the composed subordination function so it lands on the right preimage.
    """
    n = len(mus)
    if n < 2:
        raise DomainError("need at least two measures")
    lhs, rhs = [], []
    for t in t_grid:
        z = 1j * t
        f, starts = free_subordinators(mus, z)
        omegas = [invert_f(measure_f(mu), f, start=s) for mu, s in zip(mus, starts)]
        if any(om.imag < z.imag * (1 - 1e-12) for om in omegas):
            raise ConvergenceError("Newton found a non-subordinate preimage")
        lhs.append(sum(z - om for om in omegas) / (n - 1))
        rhs.append(z - f)
    return CorollaryReport.build("corollary4", t_grid, lhs, rhs)


def _boolean_side(mu: DiscreteMeasure, t: float) -> complex:
    """``1/int 1/(1-itx) mu(dx) - 1``; zero at ``t = 0``."""
    b, w = mu.as_arrays()
    return 1.0 / np.sum(w / (1.0 - 1j * t * b)) - 1.0


def verify_remark2a(mu: DiscreteMeasure, nu: DiscreteMeasure, t_grid: Sequence[float]) -> CorollaryReport:
    gamma = boolean_convolve(mu, nu)
    lhs = [_boolean_side(mu, t) + _boolean_side(nu, t) for t in t_grid]
    rhs = [_boolean_side(gamma, t) for t in t_grid]
    return CorollaryReport.build("remark2a", t_grid, lhs, rhs)


def verify_remark2b(mu1: DiscreteMeasure, mu2: DiscreteMeasure, t_grid: Sequence[float]) -> CorollaryReport:
    """Both ``g_{nu_j}(it) int 1/(1 - x g_{nu_j}(it)) mu_j(dx)`` against ``g_{mu1 (+) mu2}(it)``.

    The report stacks the two comparisons: first ``j = 1``, then ``j = 2``.
    """
    grid, lhs, rhs = [], [], []
    results = [subordination(mu1, mu2, 1j * t) for t in t_grid]
    for j, mu in ((1, mu1), (2, mu2)):
        b, w = mu.as_arrays()
        for t, res in zip(t_grid, results):
            g_nu = 1.0 / (res.omega1 if j == 1 else res.omega2)
            grid.append(t)
            lhs.append(g_nu * np.sum(w / (1.0 - b * g_nu)))
            rhs.append(1.0 / res.f_value)
    return CorollaryReport.build("remark2b", grid, lhs, rhs)


def verify_remark2(mu1: DiscreteMeasure, mu2: DiscreteMeasure, t_grid: Sequence[float]) -> CorollaryReport:
    a = verify_remark2a(mu1, mu2, t_grid)
    b = verify_remark2b(mu1, mu2, [t for t in t_grid if t > 0])
    return CorollaryReport(
        "remark2",
        a.grid + b.grid,
        a.lhs + b.lhs,
        a.rhs + b.rhs,
        max(a.max_abs_err, b.max_abs_err),
    )


def shift_identity_error(mu: DiscreteMeasure, c: float, t_grid: Sequence[float]) -> float:
    """``max |G_{mu (+) delta_c}(it) - G_{mu shifted by c}(it)|``."""
    delta = make_measure([c], [1.0])
    shifted = mu.shifted(c)
    err = 0.0
    for t in t_grid:
        res = subordination(mu, delta, 1j * t)
        err = max(err, abs(1.0 / res.f_value - cauchy_transform(shifted, 1j * t)))
    return err
