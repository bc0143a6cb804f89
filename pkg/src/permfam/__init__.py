"""Permutation tests for f(x) = x^r * h_k(x^v)^t over finite fields."""

from .criteria import CriterionReport, InvariantViolation, Path, decide
from .family import FamilyParams, derive, family_is_permutation
from .field import Field, FieldError, FieldSpec, build_field

__all__ = [
    "CriterionReport",
    "FamilyParams",
    "Field",
    "FieldError",
    "FieldSpec",
    "InvariantViolation",
    "Path",
    "build_field",
    "decide",
    "derive",
    "family_is_permutation",
]

__version__ = "0.1.0"
