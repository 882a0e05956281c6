"""Small dense linear-algebra helpers shared by the operator and symmetry code."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import svd

from ..utils.logging import get_logger

logger = get_logger("Linalg")

GS_DROP_TOL = 1e-10


@dataclass(frozen=True)
class Nullspace:
    """Result of a thresholded SVD nullspace computation."""
    singular_values: np.ndarray   # padded to the number of columns, nonincreasing
    threshold: float
    basis: np.ndarray             # (n_cols, nullity), orthonormal columns
    residuals: np.ndarray         # ||A v|| for each basis column

    @property
    def nullity(self) -> int:
        return int(self.basis.shape[1])


def svd_nullspace(matrix: np.ndarray, tau: float = 1e-8,
                  reference: Optional[float] = None,
                  cutoff: Optional[float] = None) -> Nullspace:
    """
    Right nullspace of `matrix` from its full SVD.

    A direction is null when its singular value is <= threshold, where the
    threshold is `cutoff` if given, otherwise tau * reference (reference
    defaults to the largest singular value). A zero reference makes every
    direction null.
    """
    A = np.atleast_2d(np.asarray(matrix, dtype=float))
    n_cols = A.shape[1]
    if n_cols == 0:
        return Nullspace(np.zeros(0), 0.0, np.zeros((0, 0)), np.zeros(0))

    if A.shape[0] == 0:
        s = np.zeros(0)
        vt = np.eye(n_cols)
    else:
        _, s, vt = svd(A, full_matrices=True, lapack_driver="gesvd")

    padded = np.zeros(n_cols)
    padded[:s.size] = s[:n_cols]

    ref = float(padded[0]) if reference is None else float(reference)
    threshold = float(cutoff) if cutoff is not None else tau * ref

    null_mask = padded <= threshold
    basis = vt[null_mask].T
    residuals = np.linalg.norm(A @ basis, axis=0) if A.shape[0] else np.zeros(basis.shape[1])
    return Nullspace(padded, threshold, basis, residuals)


def gram_schmidt(columns: np.ndarray, drop_tol: float = GS_DROP_TOL) -> tuple[np.ndarray, int]:
    """
    Orthonormal basis of the column span by Gram-Schmidt with one
    reorthogonalization pass per column.

    A column is dropped when its residual after projection falls below
    drop_tol times its original norm. Returns (Q, dropped_count).
    """
    C = np.asarray(columns, dtype=float)
    n_rows, n_cols = C.shape
    Q = np.zeros((n_rows, min(n_rows, n_cols)))
    rank = 0
    dropped = 0

    for j in range(n_cols):
        v = C[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0 or rank >= n_rows:
            dropped += 1
            continue

        basis = Q[:, :rank]
        for _ in range(2):
            v -= basis @ (basis.T @ v)

        norm1 = np.linalg.norm(v)
        if norm1 < drop_tol * norm0:
            dropped += 1
            continue

        Q[:, rank] = v / norm1
        rank += 1

    logger.debug(f"Gram-Schmidt kept {rank} of {n_cols} columns")
    return Q[:, :rank], dropped


def orthonormal_columns(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    M = np.asarray(matrix, dtype=float)
    if M.size == 0:
        return True
    return bool(np.allclose(M.T @ M, np.eye(M.shape[1]), atol=tol))
