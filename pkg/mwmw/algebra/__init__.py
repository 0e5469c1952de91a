"""Finite-volume operator algebra."""

from mwmw.algebra.linalg import (
    NormEstimate,
    commutator,
    conjugate_unitary,
    hermitian_eig,
    hermitian_exp,
    is_diagonal,
    is_hermitian,
    matrix_log_psd,
    op_norm,
    op_norm_sparse,
    unitarity_defect,
)
from mwmw.algebra.operators import LocalOperator, Volume, embed, embed_diagonal, local_sum, partial_trace

__all__ = [
    "LocalOperator",
    "NormEstimate",
    "Volume",
    "commutator",
    "conjugate_unitary",
    "embed",
    "embed_diagonal",
    "hermitian_eig",
    "hermitian_exp",
    "is_diagonal",
    "is_hermitian",
    "local_sum",
    "matrix_log_psd",
    "op_norm",
    "op_norm_sparse",
    "partial_trace",
    "unitarity_defect",
]
