"""Partial-pivot elimination for very small dense systems."""

from __future__ import annotations

import numpy as np

from ..errors import SingularSystem

#: Systems solved here come from pairs of stationarity equations; anything
#: larger indicates a caller bug.
MAX_DIM = 8


def solve_linear(A, b, sing_tol: float | None = None) -> np.ndarray:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`SingularSystem` when the best available pivot falls below
    ``sing_tol`` (default ``1e-10`` times the matrix max-norm); callers treat
    that as a signal to perturb the data, not as a crash.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    k = A.shape[0]
    if A.shape != (k, k) or b.shape != (k,):
        raise ValueError(f"expected square system, got A {A.shape}, b {b.shape}")
    if k > MAX_DIM:
        raise ValueError(f"system of size {k} exceeds the small-system cap {MAX_DIM}")
    if sing_tol is None:
        sing_tol = 1e-10 * max(1.0, float(np.abs(A).max()))

    for col in range(k):
        pivot_row = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[pivot_row, col]) < sing_tol:
            raise SingularSystem(f"pivot {A[pivot_row, col]:.3e} below {sing_tol:.3e}")
        if pivot_row != col:
            A[[col, pivot_row]] = A[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        factors = A[col + 1 :, col] / A[col, col]
        A[col + 1 :, col:] -= np.outer(factors, A[col, col:])
        b[col + 1 :] -= factors * b[col]

    x = np.zeros(k)
    for row in range(k - 1, -1, -1):
        x[row] = (b[row] - A[row, row + 1 :] @ x[row + 1 :]) / A[row, row]
    return x
