"""Exact computations around strongly scale-invariant nilpotent and virtually nilpotent groups."""

from __future__ import annotations

from .liealg import (
    Grading,
    NilpotentLieAlgebra,
    all_derivations_nilpotent,
    derivation_space,
    find_positive_grading,
    lower_central_series,
    validate,
    verify_grading,
)
from .malcev import INFINITE, Lattice, bch, inverse, lattice_membership, power, sublattice_index
from .morphisms import (
    LieMorphism,
    Verdict,
    bounded_intersection,
    classify,
    coboundary_solve,
    image_membership,
    layer_maps,
    validate_morphism,
)
from .reidemeister import (
    reidemeister_abelian,
    reidemeister_nilpotent,
    reidemeister_sequence,
    zeta_certificate,
)
from .vngroups import (
    Action,
    FiniteGroup,
    SemidirectElement,
    VNGroup,
    build_expanding_endo,
    centralizer_of_lattice,
    conjugator_search,
    construct_ssi,
    max_finite_normal,
    semidirect_mul,
)

__version__ = "0.1.0"

__all__ = [
    "INFINITE",
    "Action",
    "FiniteGroup",
    "Grading",
    "Lattice",
    "LieMorphism",
    "NilpotentLieAlgebra",
    "SemidirectElement",
    "VNGroup",
    "Verdict",
    "all_derivations_nilpotent",
    "bch",
    "bounded_intersection",
    "build_expanding_endo",
    "centralizer_of_lattice",
    "classify",
    "coboundary_solve",
    "conjugator_search",
    "construct_ssi",
    "derivation_space",
    "find_positive_grading",
    "image_membership",
    "inverse",
    "lattice_membership",
    "layer_maps",
    "lower_central_series",
    "max_finite_normal",
    "power",
    "reidemeister_abelian",
    "reidemeister_nilpotent",
    "reidemeister_sequence",
    "semidirect_mul",
    "sublattice_index",
    "validate",
    "validate_morphism",
    "verify_grading",
    "zeta_certificate",
]
