from .linalg import (
    Subspace,
    bareiss_determinant,
    column_space,
    exact_rank_kernel,
    kernel,
    rank,
    rref,
    subspace_intersection,
)
from .numbers import I, ONE, ZERO, GaussianRational, fraction_to_str, rationalize_complex, to_fraction
from .poly import INHOMOGENEOUS, NEG_INF, MultiPoly, homogeneity_degree, multi_indices, poly_eval, variables
from .polymatrix import CompiledPolyMatrix, PolyMatrix
from .resultant import sylvester_matrix, sylvester_resultant

__all__ = [
    "CompiledPolyMatrix",
    "GaussianRational",
    "I",
    "INHOMOGENEOUS",
    "MultiPoly",
    "NEG_INF",
    "ONE",
    "PolyMatrix",
    "Subspace",
    "ZERO",
    "bareiss_determinant",
    "column_space",
    "exact_rank_kernel",
    "fraction_to_str",
    "homogeneity_degree",
    "kernel",
    "multi_indices",
    "poly_eval",
    "rank",
    "rationalize_complex",
    "rref",
    "subspace_intersection",
    "sylvester_matrix",
    "sylvester_resultant",
    "to_fraction",
    "variables",
]
