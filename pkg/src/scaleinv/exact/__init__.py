"""Exact rational linear algebra, polynomials, root location and LP feasibility."""

from .linalg import (
    DimensionError,
    Matrix,
    as_fraction,
    coords_in,
    in_span,
    primitive_integer_vector,
    row_space,
    smith_form,
    vec,
)
from .lp import InfeasibilityCertificate, LPResult, positive_lp_feasible
from .poly import (
    Polynomial,
    RootLocation,
    charpoly,
    count_real_roots,
    cyclotomic,
    square_free_decomposition,
    unit_disk_root_analysis,
)

__all__ = [
    "DimensionError",
    "InfeasibilityCertificate",
    "LPResult",
    "Matrix",
    "Polynomial",
    "RootLocation",
    "as_fraction",
    "charpoly",
    "coords_in",
    "count_real_roots",
    "cyclotomic",
    "in_span",
    "positive_lp_feasible",
    "primitive_integer_vector",
    "row_space",
    "smith_form",
    "square_free_decomposition",
    "unit_disk_root_analysis",
    "vec",
]
