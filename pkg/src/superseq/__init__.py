"""Exact spectral sequences for filtered cochain complexes, with a
Cech-cohomology front end for locally free sheaves on split super
projective lines."""

from .linalg import QuotientPresentation, RationalMatrix, Subspace
from .spectral import FilteredCohomology, FilteredComplex, Page, page_via_homology
from .supercech import (
    SheafModel,
    build_cech_complex,
    build_section_space,
    cech_realization,
    retract_graded,
    stabilization_check,
)
from .deformation import (
    QuasiAutomorphism,
    QuasiDerivation,
    cocycle_order,
    degree_symbol,
    exponential,
    logarithm,
    normalize_cocycle,
    twisted_differential,
    verify_degeneracy,
)

__version__ = "0.1.0"

__all__ = [
    "FilteredCohomology",
    "FilteredComplex",
    "Page",
    "QuasiAutomorphism",
    "QuasiDerivation",
    "QuotientPresentation",
    "RationalMatrix",
    "SheafModel",
    "Subspace",
    "build_cech_complex",
    "build_section_space",
    "cech_realization",
    "cocycle_order",
    "degree_symbol",
    "exponential",
    "logarithm",
    "normalize_cocycle",
    "page_via_homology",
    "retract_graded",
    "stabilization_check",
    "twisted_differential",
    "verify_degeneracy",
]
