"""Exact coefficient arithmetic and the graded sparse linear-algebra kernel."""

from .field import FieldError, FiniteFieldCtx, build_field
from .linalg import (
    CochainComplex,
    ComplexError,
    Echelon,
    GradedMatrix,
    HomologyGroup,
    image_echelon,
    KernelCokernel,
    ShapeError,
    SmithResult,
    SpanCoordinates,
    SparseMatrix,
    complex_homology,
    kernel_basis,
    rank,
    rank_kernel_cokernel,
    rref,
    smith_witt,
)
from .witt import WittError, WittRingCtx, build_witt, galois_norm

__all__ = [
    "CochainComplex",
    "ComplexError",
    "Echelon",
    "FieldError",
    "FiniteFieldCtx",
    "GradedMatrix",
    "HomologyGroup",
    "KernelCokernel",
    "ShapeError",
    "SmithResult",
    "SpanCoordinates",
    "SparseMatrix",
    "WittError",
    "WittRingCtx",
    "build_field",
    "build_witt",
    "complex_homology",
    "galois_norm",
    "image_echelon",
    "kernel_basis",
    "rank",
    "rank_kernel_cokernel",
    "rref",
    "smith_witt",
]
