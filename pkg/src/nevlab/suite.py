"""Registered numerical checks behind ``nevlab verify``.

Every check draws from its own generator, seeded from the suite seed and the
check name, so a single check reproduces without running the others.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import convolutions as conv
from . import decomposition as dec
from . import inversion as inv
from .core import NevanlinnaData, make_measure
from .sampling import measure_distance, random_atoms, random_nevanlinna, random_probability
from .transforms import (
    laplace_charfn,
    laplace_charfn_quad,
    restricted_nevanlinna,
)

SUITES = ("theorem1", "corollaries", "example", "boolean", "free", "remark2")

THEOREM1_W = (0.3, 0.7, 1.5, 2.0, 4.0, 8.0)
FREE_T = (0.5, 1.0, 2.0, 4.0, 8.0)
BERNOULLI = make_measure([-1.0, 1.0], [0.5, 0.5])


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    tolerance: float
    run: Callable[[np.random.Generator], float]


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    suite: str
    passed: bool
    max_error: float
    tolerance: float
    elapsed: float
    message: str = ""


REGISTRY: list[Check] = []


def check(suite: str, tolerance: float):
    def register(fn: Callable[[np.random.Generator], float]):
        REGISTRY.append(Check(fn.__name__, suite, tolerance, fn))
        return fn

    return register


# ---------------------------------------------------------------- theorem1


@check("theorem1", 1e-9)
def theorem1_random(rng):
    return max(
        inv.verify_theorem1(random_nevanlinna(rng), THEOREM1_W).max_abs_err for _ in range(100)
    )


@check("theorem1", 1e-13)
def theorem1_delta0(rng):
    d = NevanlinnaData(0.0, make_measure([0.0], [1.0]))
    rep = inv.verify_theorem1(d, THEOREM1_W)
    exact = np.array([1.0 / w for w in THEOREM1_W])
    return float(max(np.max(np.abs(np.array(rep.lhs) - exact)), np.max(np.abs(np.array(rep.rhs) - exact))))


@check("theorem1", 1e-12)
def constant_recovery(rng):
    err = 0.0
    for _ in range(100):
        d = random_nevanlinna(rng)
        rec = inv.recover_constants(restricted_nevanlinna(d, 1.0))
        err = max(err, abs(rec.a - d.a), abs(rec.total_mass - d.rho.total_mass))
    return err


# ------------------------------------------------------------- corollaries


@check("corollaries", 1e-6)
def corollary1_quadrature(rng):
    return max(
        inv.verify_corollary1(random_nevanlinna(rng), (1.5, 2.0, 4.0, 8.0)).max_abs_err
        for _ in range(10)
    )


@check("corollaries", 1e-13)
def corollary2_closed(rng):
    err = 0.0
    ws = (0.3, 0.5, 1.0, 2.0, 5.0, 10.0)
    for _ in range(50):
        m = random_nevanlinna(rng).rho
        rep = inv.verify_corollary2(m, ws)
        b, wt = m.as_arrays()
        exact = np.array([np.sum(wt / (w - 1j * b)) for w in ws])
        err = max(err, rep.max_abs_err, float(np.max(np.abs(np.array(rep.rhs) - exact))))
    return err


@check("corollaries", 1e-6)
def corollary2_quadrature(rng):
    err = 0.0
    for _ in range(5):
        m = random_nevanlinna(rng).rho
        for w in (0.5, 1.0, 3.0, 10.0):
            err = max(err, abs(laplace_charfn_quad(m, w)[0] - laplace_charfn(m, w)))
    return err


@check("corollaries", 1e-9)
def corollary3_constants(rng):
    err = 0.0
    for _ in range(50):
        m = random_probability(rng)
        _, a, mass = inv.corollary3_quantities(m)
        data = dec.self_energy_data(m)
        err = max(err, abs(a - data.a), abs(mass - data.rho.total_mass))
    return err


@check("corollaries", 1e-6)
def corollary3_identity(rng):
    return max(
        inv.verify_corollary3(random_probability(rng), (1.5, 2.0, 4.0)).max_abs_err
        for _ in range(5)
    )


@check("corollaries", 1e-6)
def cauchy_scaling(rng):
    return max(
        inv.verify_cauchy_scaling(random_nevanlinna(rng).rho, (-2.0, -0.5, 0.5, 1.0, 2.0)).max_abs_err
        for _ in range(5)
    )


@check("corollaries", 1e-7)
def measure_recovery(rng):
    err = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 6))
        w = rng.uniform(0.2, 1.0, n)
        m = make_measure(random_atoms(rng, n, min_gap=0.5), w)
        grid = inv.sample_cauchy(m, np.linspace(0.5, 5.0, 4 * n))
        err = max(err, measure_distance(inv.recover_measure(grid, n), m))
    return err


# ----------------------------------------------------------------- example


def _example_sets(rng):
    for m in range(2, 9):
        for _ in range(5):
            yield random_atoms(rng, m)


@check("example", 1e-9)
def example_identity(rng):
    t = np.concatenate([-np.geomspace(0.1, 10, 10), np.geomspace(0.1, 10, 10)])
    return max(dec.verify_example_identity(b, t).max_abs_err for b in _example_sets(rng))


@check("example", 1e-8)
def alpha_formulas(rng):
    err = 0.0
    for b in _example_sets(rng):
        res = dec.decompose(b)
        xi = np.array(res.xis)
        alt = np.array([-len(b) * dec._p_over_p2(x, np.sort(b)) for x in xi])
        err = max(err, float(np.max(np.abs(alt - res.alphas) / np.array(res.alphas))))
    return err


@check("example", 0.0)
def alpha_positive_interlacing(rng):
    """Counts violations: non-positive alphas or roots outside their gap."""
    bad = 0
    for b in _example_sets(rng):
        res = dec.decompose(b)
        bs = np.sort(b)
        bad += sum(a <= 0 for a in res.alphas)
        bad += sum(not (bs[k] < x < bs[k + 1]) for k, x in enumerate(res.xis))
    return float(bad)


@check("example", 1e-10)
def example_m3(rng):
    res = dec.decompose([0.0, 1.0, 2.0])
    return float(max(abs(a - 1.0 / 3.0) for a in res.alphas))


@check("example", 1e-10)
def lemma1a(rng):
    err = 0.0
    for b in _example_sets(rng):
        z = rng.uniform(-6, 6, 10) + 1j * rng.uniform(0.5, 3, 10)
        err = max(err, *dec.lemma1a_residuals(b, z))
    return err


@check("example", 1e-9)
def partial_fractions(rng):
    err = 0.0
    for b in _example_sets(rng):
        res = dec.decompose(b)
        z = rng.uniform(-6, 6, 10) + 1j * rng.uniform(0.5, 3, 10)
        xi, al = np.array(res.xis), np.array(res.alphas)
        pf = res.mean + (al / (z[:, None] - xi[None, :])).sum(axis=1)
        wz = dec.w_function(b, z)
        err = max(err, float(np.max(np.abs(wz - pf) / np.abs(pf))))
    return err


@check("example", 1e-9)
def example_iteration(rng):
    steps = dec.iterate_decomposition([0.0, 1.0, 2.0], 2)
    err = abs(steps[1].xis[0] - 1.0)
    b = random_atoms(rng, 6)
    support = list(b)
    for res in dec.iterate_decomposition(b, 4):
        err = max(err, dec.verify_example_identity(support, (0.5, 1.0, 2.0)).max_abs_err)
        support = list(res.xis)
    return err


# ----------------------------------------------------------------- boolean


@check("boolean", 1e-10)
def boolean_bernoulli(rng):
    target = make_measure([-math.sqrt(2), math.sqrt(2)], [0.5, 0.5])
    return measure_distance(conv.boolean_convolve(BERNOULLI, BERNOULLI), target)


@check("boolean", 1e-8)
def boolean_commutative(rng):
    err = 0.0
    for _ in range(50):
        mu, nu = random_probability(rng), random_probability(rng)
        err = max(err, measure_distance(conv.boolean_convolve(mu, nu), conv.boolean_convolve(nu, mu)))
    return err


@check("boolean", 1e-8)
def boolean_associative(rng):
    err = 0.0
    for _ in range(50):
        a, b, c = (random_probability(rng) for _ in range(3))
        left = conv.boolean_convolve(conv.boolean_convolve(a, b), c)
        right = conv.boolean_convolve(a, conv.boolean_convolve(b, c))
        err = max(err, measure_distance(left, right))
    return err


@check("boolean", 1e-8)
def boolean_power_two(rng):
    err = 0.0
    for _ in range(50):
        mu = random_probability(rng)
        err = max(err, measure_distance(conv.boolean_power(mu, 2.0), conv.boolean_convolve(mu, mu)))
    return err


@check("boolean", 1e-8)
def boolean_power_inverse(rng):
    err = 0.0
    for _ in range(20):
        mu = random_probability(rng)
        s = float(rng.uniform(0.3, 3.0))
        err = max(err, measure_distance(conv.boolean_power(conv.boolean_power(mu, s), 1.0 / s), mu))
    return err


@check("boolean", 1e-9)
def boolean_self_energy(rng):
    """Self-energies add pointwise and output mass is one."""
    from .transforms import self_energy

    err = 0.0
    t = np.array([-3.0, -0.5, 0.5, 1.0, 3.0])
    for _ in range(20):
        mu, nu = random_probability(rng), random_probability(rng)
        g = conv.boolean_convolve(mu, nu)
        err = max(
            err,
            abs(g.total_mass - 1.0),
            float(np.max(np.abs(self_energy(g, t) - self_energy(mu, t) - self_energy(nu, t)))),
        )
    return err


# -------------------------------------------------------------------- free


@check("free", 1e-9)
def proposition1(rng):
    err = 0.0
    for _ in range(50):
        res = conv.verify_proposition1(random_probability(rng), random_probability(rng), FREE_T)
        err = max(err, res.max_abs_err)
    return err


@check("free", 1e-10)
def free_bernoulli_closed_form(rng):
    res = conv.subordination(BERNOULLI, BERNOULLI, 2j)
    return max(
        abs(res.f_value - 2j * math.sqrt(2)),
        abs(res.omega1 - 1j * (1 + math.sqrt(2))),
        abs(res.omega2 - 1j * (1 + math.sqrt(2))),
    )


@check("free", 1e-12)
def subordination_invariants(rng):
    """Residual, upper half-plane preservation and the three-term identity."""
    err = 0.0
    for _ in range(20):
        mu1, mu2 = random_probability(rng), random_probability(rng)
        for t in FREE_T:
            r = conv.subordination(mu1, mu2, 1j * t)
            below = max(0.0, t - r.omega1.imag, t - r.omega2.imag)
            err = max(err, r.residual, below, abs(r.z - (r.omega1 + r.omega2 - r.f_value)))
    return err


@check("free", 1e-8)
def corollary4(rng):
    err = 0.0
    for _ in range(10):
        mus = [random_probability(rng) for _ in range(3)]
        err = max(err, conv.verify_corollary4(mus, FREE_T).max_abs_err)
    return err


@check("free", 1e-8)
def v_additivity(rng):
    err = 0.0
    for _ in range(10):
        mu1, mu2 = random_probability(rng), random_probability(rng)
        big = 1.0 + max(max(abs(b) for b in m.atoms) for m in (mu1, mu2))
        for f in (3.0, 5.0, 10.0):
            z = 1j * f * big
            v = conv.free_v_transform([mu1, mu2], z)
            err = max(err, abs(v - conv.v_transform(mu1, z) - conv.v_transform(mu2, z)))
    return err


@check("free", 1e-12)
def v_delta(rng):
    err = 0.0
    for b in rng.uniform(-5, 5, 5):
        d = make_measure([b], [1.0])
        for t in (3.0, 10.0, 30.0):
            err = max(err, abs(conv.v_transform(d, 1j * t * (1 + abs(b))) - b))
    return err


@check("free", 1e-9)
def free_shift(rng):
    return max(
        conv.shift_identity_error(random_probability(rng), float(rng.uniform(-3, 3)), FREE_T)
        for _ in range(10)
    )


# ----------------------------------------------------------------- remark2


@check("remark2", 1e-9)
def remark2a(rng):
    t = (-2.0, -0.5, 0.0, 0.5, 1.0, 2.0)
    return max(
        conv.verify_remark2a(random_probability(rng), random_probability(rng), t).max_abs_err
        for _ in range(20)
    )


@check("remark2", 1e-9)
def remark2b(rng):
    return max(
        conv.verify_remark2b(random_probability(rng), random_probability(rng), FREE_T).max_abs_err
        for _ in range(20)
    )


# -------------------------------------------------------------------------


def _rng_for(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def select(suite: str) -> list[Check]:
    if suite == "all":
        return list(REGISTRY)
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from all, {', '.join(SUITES)}")
    return [c for c in REGISTRY if c.suite == suite]


def run_check(c: Check, seed: int) -> CheckOutcome:
    start = time.perf_counter()
    try:
        err = float(c.run(_rng_for(seed, c.name)))
        msg = ""
    except Exception as exc:  # a raised error is a failed check, not a crash
        err, msg = math.inf, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    return CheckOutcome(c.name, c.suite, err <= c.tolerance, err, c.tolerance, elapsed, msg)


def run_suite(suite: str = "all", seed: int = 7) -> list[CheckOutcome]:
    return [run_check(c, seed) for c in select(suite)]


def format_table(outcomes: list[CheckOutcome]) -> str:
    lines = [f"{'check':<28} {'suite':<12} {'status':<6} {'max_err':>10} {'tol':>8} {'time_s':>7}"]
    for o in outcomes:
        lines.append(
            f"{o.name:<28} {o.suite:<12} {'pass' if o.passed else 'FAIL':<6} "
            f"{o.max_error:>10.2e} {o.tolerance:>8.0e} {o.elapsed:>7.2f}"
            + (f"  {o.message}" if o.message else "")
        )
    n_fail = sum(not o.passed for o in outcomes)
    lines.append(f"{len(outcomes) - n_fail}/{len(outcomes)} checks passed")
    return "\n".join(lines)
