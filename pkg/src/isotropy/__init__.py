"""Exact centralizers of H-skew matrices and their group normal forms."""

from .errors import DomainError, ParityError, ResourceLimitError, SpecError
from .exact import ExactMatrix, GaussianRational, gq
from .shapes import ShapeSpec, load_spec_document, parse_spec_document

__all__ = [
    "DomainError",
    "ExactMatrix",
    "GaussianRational",
    "ParityError",
    "ResourceLimitError",
    "ShapeSpec",
    "SpecError",
    "gq",
    "load_spec_document",
    "parse_spec_document",
]
__version__ = "0.1.0"
