"""Imaginary-axis functionals of discrete measures.

All functions accept a scalar or an array of evaluation points and return a
complex scalar or a complex array of the same shape.  ``t = 0`` is rejected
wherever the functional is only defined on the punctured axis.
"""

from __future__ import annotations

import enum
import math

import numpy as np
from scipy.integrate import quad_vec

from .core import DiscreteMeasure, NevanlinnaData
from .errors import DomainError, NotAProbability

QUAD_TOL = 1e-9


class TransformKind(str, enum.Enum):
    CAUCHY = "cauchy"
    NEVANLINNA = "nevanlinna"
    CHARFN = "charfn"
    SELFENERGY = "selfenergy"
    FRECIPROCAL = "freciprocal"


def _out(x):
    return complex(x) if np.ndim(x) == 0 else x


def _nonzero_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise DomainError("t = 0 is outside the punctured imaginary axis")
    return t


def _require_probability(m: DiscreteMeasure) -> None:
    if not m.is_probability:
        raise NotAProbability(f"total mass {m.total_mass!r} is not 1")


def char_fn(m: DiscreteMeasure, t):
    """Fourier transform ``sum_j w_j exp(i t b_j)``."""
    b, w = m.as_arrays()
    t = np.asarray(t, dtype=float)
    return _out(np.exp(1j * np.multiply.outer(t, b)) @ w)


def cauchy_transform(m: DiscreteMeasure, z):
    """``G(z) = sum_j w_j / (z - b_j)`` at arbitrary non-real ``z``."""
    b, w = m.as_arrays()
    z = np.asarray(z, dtype=complex)
    return _out((1.0 / np.subtract.outer(z, b)) @ w)


def cauchy_derivative(m: DiscreteMeasure, z):
    b, w = m.as_arrays()
    z = np.asarray(z, dtype=complex)
    return _out(-(1.0 / np.subtract.outer(z, b) ** 2) @ w)


def restricted_cauchy(m: DiscreteMeasure, t):
    t = _nonzero_t(t)
    return cauchy_transform(m, 1j * t)


def nevanlinna_transform(d: NevanlinnaData, z):
    b, w = d.rho.as_arrays()
    z = np.asarray(z, dtype=complex)
    kernel = (1.0 + np.multiply.outer(z, b)) / np.subtract.outer(z, b)
    return _out(d.a + kernel @ w)


def restricted_nevanlinna(d: NevanlinnaData, t):
    t = _nonzero_t(t)
    return nevanlinna_transform(d, 1j * t)


def self_energy(m: DiscreteMeasure, t):
    """Restricted self-energy ``it - 1/g(it)`` of a probability measure."""
    _require_probability(m)
    t = _nonzero_t(t)
    z = 1j * t
    return _out(z - 1.0 / np.asarray(cauchy_transform(m, z)))


def f_transform(m: DiscreteMeasure, z):
    """Reciprocal Cauchy transform ``1/G(z)`` off the real axis."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag == 0):
        raise DomainError("F-transform is evaluated off the real axis only")
    return _out(1.0 / np.asarray(cauchy_transform(m, z)))


def f_transform_derivative(m: DiscreteMeasure, z):
    g = np.asarray(cauchy_transform(m, z))
    return _out(-np.asarray(cauchy_derivative(m, z)) / g**2)


def laplace_charfn(m: DiscreteMeasure, w: float, method: str = "closed") -> complex:
    """Laplace transform of the characteristic function at ``w > 0``."""
    if method == "closed":
        if not w > 0:
            raise DomainError("Laplace transform of a bounded function needs w > 0")
        b, wt = m.as_arrays()
        return complex(np.sum(wt / (w - 1j * b)))
    if method == "quadrature":
        return laplace_charfn_quad(m, w)[0]
    raise ValueError(f"unknown method {method!r}")


def laplace_charfn_quad(m: DiscreteMeasure, w: float) -> tuple[complex, float]:
    """Adaptive Gauss-Kronrod estimate of ``int_0^inf charfn(r) e^{-wr} dr``.

    Returns ``(value, error_bound)``; the bound includes the truncation tail.
    """
    freq = max(abs(b) for b in m.atoms)
    return laplace_quad(lambda r: char_fn(m, r), w, m.total_mass, freq)


def laplace_quad(func, w: float, bound: float, freq: float = 0.0) -> tuple[complex, float]:
    """Integrate ``func(r) exp(-w r)`` over ``[0, inf)`` for ``|func| <= bound``.

    The integral is truncated at ``R = max(50/w, 50)``; the tail is at most
    ``bound * exp(-w R) / w``.  Break points every half period of the fastest
    oscillation keep the adaptive subdivision from missing cycles.
    """
    if not w > 0:
        raise DomainError("Laplace transform of a bounded function needs w > 0")
    upper = max(50.0 / w, 50.0)
    n_pieces = max(1, int(math.ceil(upper * max(freq, 1.0) / math.pi)))
    points = np.linspace(0.0, upper, n_pieces + 1)[1:-1]

    def integrand(r):
        v = complex(func(r)) * math.exp(-w * r)
        return np.array([v.real, v.imag])

    value, err = quad_vec(
        integrand, 0.0, upper, epsabs=QUAD_TOL, epsrel=0.0, limit=20000, points=points
    )
    tail = bound * math.exp(-w * upper) / w
    return complex(value[0], value[1]), float(err) + tail


def evaluate(kind: TransformKind | str, obj, t):
    """Dispatch a :class:`TransformKind` on a measure (or NevanlinnaData)."""
    kind = TransformKind(kind)
    if kind is TransformKind.NEVANLINNA:
        if not isinstance(obj, NevanlinnaData):
            obj = NevanlinnaData(0.0, obj)
        return restricted_nevanlinna(obj, t)
    m = obj.rho if isinstance(obj, NevanlinnaData) else obj
    if kind is TransformKind.CAUCHY:
        return restricted_cauchy(m, t)
    if kind is TransformKind.CHARFN:
        return char_fn(m, t)
    if kind is TransformKind.SELFENERGY:
        return self_energy(m, t)
    t = _nonzero_t(t)
    return f_transform(m, 1j * t)
