from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.linalg import eigh

from .penalties import nuclear_norm, singular_value_threshold
from ..errors import DimensionMismatchError, InvalidParameterError
from ...utils.logging import get_logger

logger = get_logger("ADMM")

PINV_RELATIVE_TOL = 1e-12


@dataclass
class ADMMResult:
    z: np.ndarray
    Z: np.ndarray
    objective: List[float]
    primal_residual: float
    dual_residual: float
    converged: bool
    iterations: int
    history: Dict[str, List[float]] = field(default_factory=dict)


class NuclearNormADMM:
    """
    Alternating Direction Method of Multipliers for

        min_z  1/2 z^T Q z - q^T z + const + gamma ||mat(A z + a0)||_*

    with the splitting Z = mat(A z + a0). The z-update solves (Q + rho A^T A) z = q + rho A^T (Z - U - a0)
    with one eigendecomposition; the Z-update is singular-value soft-thresholding at gamma / rho.
    """

    def __init__(self, rho: float = 1.0, max_iter: int = 5000, abs_tol: float = 1e-8,
                 rel_tol: float = 1e-8, monotone: bool = False):
        if rho <= 0:
            raise InvalidParameterError(f"rho must be positive, got {rho}")
        if max_iter < 1:
            raise InvalidParameterError(f"max_iter must be at least 1, got {max_iter}")
        self.rho = float(rho)
        self.max_iter = int(max_iter)
        self.abs_tol = float(abs_tol)
        self.rel_tol = float(rel_tol)
        self.monotone = bool(monotone)

    def _factor(self, Q: np.ndarray, A: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
        H = Q + self.rho * (A.T @ A)
        w, V = eigh(H)
        cut = PINV_RELATIVE_TOL * max(float(np.abs(w).max(initial=0.0)), 1e-300)
        inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
        return lambda rhs: V @ (inv * (V.T @ rhs))

    def solve(self, A: np.ndarray, a0: np.ndarray, shape: tuple, gamma: float,
              Q: Optional[np.ndarray] = None, q: Optional[np.ndarray] = None,
              smooth: Optional[Callable[[np.ndarray], float]] = None,
              z0: Optional[np.ndarray] = None) -> ADMMResult:
        if gamma < 0:
            raise InvalidParameterError(f"gamma must be nonnegative, got {gamma}")
        p, n = A.shape
        if p != int(np.prod(shape)) or a0.shape != (p,):
            raise DimensionMismatchError(f"operator rows {p} do not match matrix shape {shape}")
        Q = np.zeros((n, n)) if Q is None else Q
        q = np.zeros(n) if q is None else q
        smooth = smooth if smooth is not None else (lambda z: 0.0)

        solve_z = self._factor(Q, A)
        rho = self.rho

        def objective(z: np.ndarray) -> float:
            return float(smooth(z) + gamma * nuclear_norm((A @ z + a0).reshape(shape)))

        z = np.zeros(n) if z0 is None else np.asarray(z0, dtype=float).copy()
        Z = A @ z + a0
        U = np.zeros(p)

        history: Dict[str, List[float]] = {"primal_residual": [], "dual_residual": [], "objective": []}
        best_z, best_obj = z.copy(), objective(z)
        trace: List[float] = []
        converged = False
        primal = dual = float("inf")
        iterations = 0

        for it in range(1, self.max_iter + 1):
            iterations = it
            z = solve_z(q + rho * (A.T @ (Z - U - a0)))
            Az = A @ z + a0

            Z_old = Z
            Z = singular_value_threshold((Az + U).reshape(shape), gamma / rho).ravel()
            U = U + Az - Z

            primal = float(np.linalg.norm(Az - Z))
            dual = float(rho * np.linalg.norm(A.T @ (Z - Z_old)))
            eps_primal = np.sqrt(p) * self.abs_tol + self.rel_tol * max(np.linalg.norm(Az), np.linalg.norm(Z))
            eps_dual = np.sqrt(n) * self.abs_tol + self.rel_tol * rho * np.linalg.norm(A.T @ U)

            value = objective(z)
            if value < best_obj:
                best_z, best_obj = z.copy(), value
            trace.append(best_obj if self.monotone else value)

            history["primal_residual"].append(primal)
            history["dual_residual"].append(dual)
            history["objective"].append(value)

            if primal <= eps_primal and dual <= eps_dual:
                converged = True
                break

        if self.monotone:
            z = best_z
            Z = A @ z + a0

        if converged:
            logger.info(f"ADMM converged in {iterations} iterations (primal {primal:.2e}, dual {dual:.2e})")
        else:
            logger.warning(
                f"ADMM stopped after {iterations} iterations without converging "
                f"(primal {primal:.2e}, dual {dual:.2e})"
            )
        return ADMMResult(z, Z.reshape(shape), trace, primal, dual, converged, iterations, history)
