"""Germs of great-circle fibrations of odd spheres and their contact condition."""

from .contact_analyzer import ContactReport, analyze, contact_defect
from .fibration_germ import (
    GermSpec,
    Polynomial,
    counterexample_germ,
    hopf_germ,
    is_local_fibration,
    linear_germ,
    twisting_matrix,
)
from .matrix_core import (
    determinant,
    has_real_eigenvalue,
    pfaffian,
    pfaffian_combinatorial,
    pfaffian_normal_form,
    skew_normal_form,
)

__all__ = [
    "ContactReport",
    "GermSpec",
    "Polynomial",
    "analyze",
    "contact_defect",
    "counterexample_germ",
    "determinant",
    "has_real_eigenvalue",
    "hopf_germ",
    "is_local_fibration",
    "linear_germ",
    "pfaffian",
    "pfaffian_combinatorial",
    "pfaffian_normal_form",
    "skew_normal_form",
    "twisting_matrix",
]
