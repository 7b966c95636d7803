import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nevlab.core import (
    ComplexGrid,
    Polynomial,
    RationalFunction,
    make_measure,
    poly_arith,
    poly_eval,
    poly_roots,
    rational_add,
    rational_eval,
    residue_simple_pole,
)
from nevlab.errors import (
    DomainError,
    InvalidMeasure,
    MultiplePole,
    NonPositiveWeight,
    NotAPole,
    PoleEvaluation,
)

from conftest import separated_atoms

P = Polynomial


def test_make_measure_sorts():
    m = make_measure([1, -1], [0.5, 0.5])
    assert m.atoms == (-1.0, 1.0)
    assert m.weights == (0.5, 0.5)
    assert m.is_probability


def test_make_measure_merges_duplicates():
    m = make_measure([0, 0], [0.3, 0.7])
    assert m.atoms == (0.0,)
    assert m.weights == (1.0,)


@pytest.mark.parametrize(
    "atoms, weights, exc",
    [
        ([2], [-1], NonPositiveWeight),
        ([2], [0], NonPositiveWeight),
        ([], [], InvalidMeasure),
        ([1, 2], [1], InvalidMeasure),
        ([math.inf], [1], InvalidMeasure),
        ([1], [math.nan], InvalidMeasure),
    ],
)
def test_make_measure_rejects(atoms, weights, exc):
    with pytest.raises(exc):
        make_measure(atoms, weights)


def test_probability_tolerance():
    assert make_measure([0, 1], [0.5, 0.5 + 5e-13]).is_probability
    assert not make_measure([0, 1], [0.5, 0.5 + 1e-11]).is_probability


def test_poly_arith():
    assert poly_arith(P((-1, 0, 1)), None, "derivative") == P((0, 2))
    assert poly_arith(P((-1, 1)), P((1, 1)), "mul") == P((-1, 0, 1))
    assert poly_arith(P((1, 2)), P((0, 0, 3)), "add") == P((1, 2, 3))
    # z^3 - 3z^2 + 2z -> 3z^2 - 6z + 2
    assert P((0, 2, -3, 1)).derivative() == P((2, -6, 3))


def test_degree_and_trimming():
    assert P((1, 2, 0, 0)).degree == 1
    assert P((0,)).is_zero and P((0,)).degree == -1
    assert P((5,)).derivative().is_zero


def test_poly_eval():
    assert poly_eval(P((-1, 0, 1)), 1j) == -2
    assert poly_eval(P((-1, 0, 1)), 1) == 0
    assert poly_eval(P((0, 2, -3, 1)), 3) == 6


def test_poly_roots_examples():
    np.testing.assert_allclose(poly_roots(P((-1, 0, 1))), [-1, 1], atol=1e-14)
    np.testing.assert_allclose(
        poly_roots(P((2, -6, 3)), real_snap=1e-9),
        [1 - 1 / math.sqrt(3), 1 + 1 / math.sqrt(3)],
        atol=1e-14,
    )
    np.testing.assert_allclose(poly_roots(P((1, 0, 1))), [-1j, 1j], atol=1e-14)


def test_poly_roots_quadratic_formula_oracle(rng):
    for _ in range(20):
        a, b, c = rng.normal(size=3) + 1j * rng.normal(size=3)
        disc = cmath.sqrt(b * b - 4 * a * c)
        expected = sorted([(-b + disc) / (2 * a), (-b - disc) / (2 * a)], key=lambda z: (z.real, z.imag))
        got = poly_roots(P((c, b, a)))
        np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12)


def test_poly_roots_errors():
    with pytest.raises(DomainError):
        poly_roots(P((0,)))
    with pytest.raises(DomainError):
        poly_roots(P((3,)))


def test_poly_roots_zero_and_multiple_roots():
    r = poly_roots(P.from_roots([0, 0, 2]))
    np.testing.assert_allclose(r, [0, 0, 2], atol=1e-12)
    r = poly_roots(P.from_roots([1, 1, -2]))
    np.testing.assert_allclose(np.sort(r.real), [-2, 1, 1], atol=1e-6)


def test_conjugate_closed_for_real_coefficients():
    r = poly_roots(P.from_roots([1 + 2j, 1 - 2j, -3 + 1j, -3 - 1j, 0.5]))
    upper = sorted(z for z in r if z.imag > 0)
    lower = sorted(np.conj(z) for z in r if z.imag < 0)
    assert upper == lower


@settings(deadline=None)
@given(separated_atoms(1, 12, low=-3, high=3, min_gap=0.3))
def test_root_coefficient_round_trip(atoms):
    p = P.from_roots(atoms)
    q = P.from_roots(poly_roots(p))
    a, b = p.array, q.array
    assert np.max(np.abs(a - b)) <= 1e-8 * np.max(np.abs(a))


@settings(deadline=None)
@given(separated_atoms(2, 12, low=-10, high=10, min_gap=0.05))
def test_derivative_roots_real_and_interlacing(atoms):
    b = np.sort(atoms)
    xi = poly_roots(P.from_roots(b).derivative(), real_snap=1e-9)
    assert np.all(xi.imag == 0)
    assert np.all((b[:-1] < xi.real) & (xi.real < b[1:]))


@settings(deadline=None)
@given(separated_atoms(1, 12, low=-5, high=5, min_gap=0.2))
def test_root_backward_error(atoms):
    p = P.from_roots(atoms)
    for r in poly_roots(p):
        assert abs(p(r)) <= 1e-10 * max(p.abs_eval(r), p.norm())


def test_residue_examples():
    r = RationalFunction(P((1,)), P((-1, 0, 1)))
    assert residue_simple_pole(r, 1) == pytest.approx(0.5, abs=1e-15)
    r2 = RationalFunction(P((0, 1)), P((-2, 0, 1)))
    assert residue_simple_pole(r2, math.sqrt(2)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(NotAPole):
        residue_simple_pole(r, 2)


def test_residue_removable_and_multiple():
    # z^2 / (z (z^2 - 2)): the pole at 0 cancels
    r = RationalFunction(P((0, 0, 1)), P((0, -2, 0, 1)))
    assert residue_simple_pole(r, 0) == 0
    with pytest.raises(MultiplePole):
        residue_simple_pole(RationalFunction(P((1,)), P((0, 0, 1))), 0)


def test_residue_matches_limit_definition(rng):
    for _ in range(20):
        poles = rng.uniform(-3, 3, 4) + 1j * rng.uniform(-1, 1, 4)
        num = P(tuple(rng.normal(size=3)))
        r = RationalFunction(num, P.from_roots(poles))
        for pole in poles:
            h = 1e-6
            limit = h * r(pole + h)
            res = residue_simple_pole(r, pole)
            assert abs(res - limit) <= 1e-5 * abs(res)


def test_rational_add_and_eval():
    inv_z = RationalFunction(P((1,)), P((0, 1)))
    s = rational_add(inv_z, inv_z)
    assert s.num == P((0, 2)) and s.den == P((0, 0, 1))
    r = RationalFunction(P((0, 1)), P((-1, 0, 1)))
    assert rational_eval(r, 2j) == pytest.approx(2j / -5, abs=1e-15)
    with pytest.raises(PoleEvaluation):
        rational_eval(inv_z, 0)


def test_complex_grid_rejects_zero():
    with pytest.raises(DomainError):
        ComplexGrid((0.0, 1.0), (1j, 1j))
    with pytest.raises(ValueError):
        ComplexGrid((1.0,), ())


def test_residue_at_roundoff_displaced_tiny_pole():
    r = RationalFunction(Polynomial((1.0,)), Polynomial((2e-100, -1.7, 2.0)))
    assert residue_simple_pole(r, 0.0) == pytest.approx(1 / -1.7)
