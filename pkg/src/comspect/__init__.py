"""Spectral functionals, sequence transforms and commutator-subspace
membership for operator ideals, evaluated on finite matrices and symbolic
decay-law sequences."""

from .sequences import (
    ScalarSequence,
    PowerTail,
    GeometricTail,
    FactorialPowerTail,
    frac_index,
    merge_decreasing,
)
from .spectral import (
    EigenSequence,
    eigenvalue_sequence,
    singular_sequence,
    hermitian_split,
    pencil,
    abs_operator,
    direct_sum,
)
from .cutoffs import (
    CutoffPair,
    make_phi,
    make_psi,
    c1_constant,
    make_cutoff_pair,
    default_cutoff_pair,
    eval_g,
    eval_h,
    laplacian_grid_check,
)

__version__ = "0.1.0"
