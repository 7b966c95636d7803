"""Restricted Cauchy/Nevanlinna transforms, self-energies and boolean/free
convolution for finitely supported measures."""

from .convolutions import (
    SubordinationResult,
    boolean_convolve,
    boolean_power,
    cauchy_rational,
    free_f_grid,
    subordination,
    v_transform,
)
from .core import (
    ComplexGrid,
    DiscreteMeasure,
    NevanlinnaData,
    Polynomial,
    RationalFunction,
    make_measure,
    poly_eval,
    poly_roots,
    residue_simple_pole,
    uniform_measure,
)
from .decomposition import DecompositionResult, canonical_poly, decompose, iterate_decomposition
from .inversion import RecoveredConstants, recover_constants, recover_measure
from .report import CorollaryReport
from .transforms import (
    TransformKind,
    char_fn,
    f_transform,
    laplace_charfn,
    restricted_cauchy,
    restricted_nevanlinna,
    self_energy,
)

__version__ = "0.1.0"
