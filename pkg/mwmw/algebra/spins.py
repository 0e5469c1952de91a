"""Single-site spin-1/2 operators in the basis (|up>, |down>)."""

from __future__ import annotations

from functools import reduce

import numpy as np


IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# S+ raises the charge n = diag(1, 0) by one.
S_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
S_MINUS = S_PLUS.conj().T.copy()
N_UP = np.diag([1.0, 0.0]).astype(complex)

for _op in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, S_PLUS, S_MINUS, N_UP):
    _op.setflags(write=False)


def kron_all(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product in argument order (first argument is the first factor)."""
    return reduce(np.kron, ops)
