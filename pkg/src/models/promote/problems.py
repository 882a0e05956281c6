"""Symmetry-regularized regression, interpolation-constrained recovery and the L1 baseline."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import lstsq, null_space
from sklearn.linear_model import Lasso

from .admm import NuclearNormADMM
from .penalties import nuclear_penalty
from ..discover.functions import function_symmetries
from ..discover.report import SymmetryReport
from ..errors import (
    DimensionMismatchError,
    InfeasibleError,
    InvalidParameterError,
    NonFiniteInputError,
)
from ..fnspace.dictionary import FeatureDictionary, FunctionDictionary, evaluate_model
from ..operators.action import ActionPair
from ..operators.lie_tensor import LieOperatorTensor
from ...utils.logging import get_logger

logger = get_logger("Promote")

RECOVERY_TOLERANCE = 5e-3
CONSISTENCY_TOL = 1e-8


@dataclass(frozen=True)
class SolverOptions:
    rho: float = 1.0
    max_iter: int = 5000
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    monotone: bool = False

    def make_solver(self) -> NuclearNormADMM:
        return NuclearNormADMM(self.rho, self.max_iter, self.abs_tol, self.rel_tol, self.monotone)


@dataclass(frozen=True, eq=False)
class PromoteProblem:
    """min_c (1/M) sum_j |y_j - F_c(x_j)|^2 + gamma |L_F|_*"""
    tensor: LieOperatorTensor
    dictionary: FunctionDictionary
    X: np.ndarray             # (M, m)
    Y: np.ndarray             # (M, n)
    gamma: float = 0.0
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.asarray(self.Y, dtype=float).reshape(X.shape[0], -1)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if self.gamma < 0:
            raise InvalidParameterError(f"gamma must be nonnegative, got {self.gamma}")
        if X.shape[0] == 0:
            raise DimensionMismatchError("need at least one data pair")
        if X.shape[1] != self.dictionary.input_dim or Y.shape[1] != self.dictionary.output_dim:
            raise DimensionMismatchError(
                f"data pairs in R^{X.shape[1]} x R^{Y.shape[1]} do not match the dictionary "
                f"R^{self.dictionary.input_dim} -> R^{self.dictionary.output_dim}"
            )
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise NonFiniteInputError("training data contains non-finite values")
        if self.tensor.size != self.dictionary.size:
            raise DimensionMismatchError(
                f"tensor has {self.tensor.size} entries, dictionary has {self.dictionary.size}"
            )

    @property
    def count(self) -> int:
        return int(self.X.shape[0])

    def with_gamma(self, gamma: float) -> "PromoteProblem":
        return PromoteProblem(self.tensor, self.dictionary, self.X, self.Y, gamma, self.solver)


@dataclass
class FitResult:
    coeffs: np.ndarray
    gamma: float
    objective: List[float]
    primal_residual: float
    dual_residual: float
    converged: bool
    iterations: int
    mse: float = float("nan")
    penalty: float = float("nan")
    report: Optional[SymmetryReport] = None
    success: Optional[bool] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "coefficients": self.coeffs.tolist(),
            "objective": self.objective,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "converged": self.converged,
            "iterations": self.iterations,
            "mse": self.mse,
            "penalty": self.penalty,
            "success": self.success,
            "report": self.report.to_dict() if self.report is not None else None,
        }


def training_mse(dictionary: FunctionDictionary, coeffs, X: np.ndarray, Y: np.ndarray) -> float:
    """Mean over every entry of (F(x_j) - y_j)^2."""
    pred = evaluate_model(dictionary, coeffs, np.atleast_2d(X))
    return float(np.mean((pred - np.asarray(Y, dtype=float).reshape(pred.shape)) ** 2))


def regression_objective(problem: PromoteProblem, coeffs) -> float:
    pred = evaluate_model(problem.dictionary, coeffs, problem.X)
    data = float(np.sum((pred - problem.Y) ** 2) / problem.count)
    if problem.gamma == 0.0:
        return data
    value, _ = nuclear_penalty(problem.tensor, coeffs)
    return data + problem.gamma * value


def _finish(problem_tensor: LieOperatorTensor, coeffs: np.ndarray, with_report: bool,
            tau: float) -> tuple[float, Optional[SymmetryReport]]:
    penalty, _ = nuclear_penalty(problem_tensor, coeffs)
    report = function_symmetries(problem_tensor, coeffs, tau=tau) if with_report else None
    return penalty, report


def fit_regularized(problem: PromoteProblem, with_report: bool = True, tau: float = 1e-8,
                    z0: Optional[np.ndarray] = None) -> FitResult:
    """gamma = 0 is ordinary least squares; otherwise ADMM on the nuclear-norm splitting."""
    E = problem.dictionary.evaluation_matrix(problem.X)
    y = problem.Y.ravel()
    M = problem.count

    if problem.gamma == 0.0 or problem.tensor.algebra_dim == 0:
        coeffs, *_ = lstsq(E, y)
        value = float(np.sum((E @ coeffs - y) ** 2) / M)
        penalty, report = _finish(problem.tensor, coeffs, with_report, tau)
        logger.info(f"Least-squares fit on {M} pairs (N={problem.dictionary.size})")
        return FitResult(coeffs, problem.gamma, [value], 0.0, 0.0, True, 0,
                         training_mse(problem.dictionary, coeffs, problem.X, problem.Y),
                         penalty, report)

    A = problem.tensor.flattened()
    shape = (problem.tensor.range_dim, problem.tensor.algebra_dim)
    Q = 2.0 / M * (E.T @ E)
    q = 2.0 / M * (E.T @ y)

    def data_term(z: np.ndarray) -> float:
        return float(np.sum((E @ z - y) ** 2) / M)

    solver = problem.solver.make_solver()
    out = solver.solve(A, np.zeros(A.shape[0]), shape, problem.gamma, Q=Q, q=q, smooth=data_term, z0=z0)
    penalty, report = _finish(problem.tensor, out.z, with_report, tau)
    mse = training_mse(problem.dictionary, out.z, problem.X, problem.Y)
    logger.info(f"Regularized fit gamma={problem.gamma:g}: mse {mse:.3e}, penalty {penalty:.3e}")
    return FitResult(out.z, problem.gamma, out.objective, out.primal_residual, out.dual_residual,
                     out.converged, out.iterations, mse, penalty, report)


def recover_interpolating(tensor: LieOperatorTensor, dictionary: FunctionDictionary,
                          X: np.ndarray, Y: np.ndarray, pair: Optional[ActionPair] = None,
                          solver: Optional[SolverOptions] = None, gamma: float = 1.0,
                          truth: Optional[np.ndarray] = None,
                          consistency_tol: float = CONSISTENCY_TOL) -> FitResult:
    """
    min |L_F|_* subject to F(x_j) = y_j. The feasible set is c_p + span(N_b) with c_p a
    particular solution and N_b a basis of the evaluation matrix nullspace; ADMM runs over
    the reduced variable, so every iterate interpolates the samples.
    """
    if pair is not None:
        pair.check(dictionary)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
    E = dictionary.evaluation_matrix(X)
    y = Y.ravel()

    c_p, *_ = lstsq(E, y)
    misfit = float(np.linalg.norm(E @ c_p - y))
    if misfit > consistency_tol * max(1.0, float(np.linalg.norm(y))):
        raise InfeasibleError(f"interpolation conditions are inconsistent (residual {misfit:.3e})")

    N_b = null_space(E) if E.size else np.eye(dictionary.size)
    if N_b.shape[1] == 0 or tensor.algebra_dim == 0 or gamma == 0.0:
        coeffs = c_p
        result = FitResult(coeffs, gamma, [nuclear_penalty(tensor, coeffs)[0]], 0.0, 0.0, True, 0)
    else:
        A_full = tensor.flattened()
        A = A_full @ N_b
        a0 = A_full @ c_p
        shape = (tensor.range_dim, tensor.algebra_dim)
        out = (solver or SolverOptions()).make_solver().solve(A, a0, shape, gamma)
        coeffs = c_p + N_b @ out.z
        result = FitResult(coeffs, gamma, out.objective, out.primal_residual, out.dual_residual,
                           out.converged, out.iterations)

    result.penalty = nuclear_penalty(tensor, coeffs)[0]
    result.mse = training_mse(dictionary, coeffs, X, Y)
    if truth is not None:
        result.success = recovery_success(coeffs, truth)
    logger.debug(f"Recovery with {X.shape[0]} samples: free dimension {N_b.shape[1]}, success {result.success}")
    return result


def recovery_success(fitted, truth, rel_tol: float = RECOVERY_TOLERANCE) -> bool:
    """max_i |c_i - c*_i| <= rel_tol * max_i |c*_i|."""
    fitted = np.asarray(fitted, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if fitted.shape != truth.shape:
        raise DimensionMismatchError(f"coefficient vectors differ in size: {fitted.size} vs {truth.size}")
    return bool(np.max(np.abs(fitted - truth), initial=0.0) <= rel_tol * np.max(np.abs(truth), initial=0.0))


def fit_l1(dictionary: FeatureDictionary, X: np.ndarray, Y: np.ndarray, gamma: float,
           max_iter: int = 100_000, tol: float = 1e-10) -> FitResult:
    """Elementwise sparse baseline: min (1/M) sum |y_j - W phi(x_j)|^2 + gamma |W|_1."""
    if gamma < 0:
        raise InvalidParameterError(f"gamma must be nonnegative, got {gamma}")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
    phi = dictionary.features(dictionary.check_points(X))

    if gamma == 0.0:
        W_T, *_ = lstsq(phi, Y)
        W = W_T.T
        iterations = 0
        converged = True
    else:
        # sklearn scales the squared loss by 1 / (2 M)
        model = Lasso(alpha=gamma / 2.0, fit_intercept=False, max_iter=max_iter, tol=tol)
        model.fit(phi, Y)
        W = np.atleast_2d(model.coef_).reshape(dictionary.output_dim, dictionary.feature_count)
        iterations = int(np.max(np.atleast_1d(model.n_iter_)))
        converged = iterations < max_iter
        if not converged:
            logger.warning(f"L1 fit gamma={gamma:g} stopped after {iterations} iterations without converging")

    coeffs = W.ravel()
    mse = training_mse(dictionary, coeffs, X, Y)
    value = float(np.sum((phi @ W.T - Y) ** 2) / X.shape[0] + gamma * np.abs(W).sum())
    logger.info(f"L1 fit gamma={gamma:g}: mse {mse:.3e}, nonzeros {int(np.count_nonzero(W))}")
    return FitResult(coeffs, gamma, [value], 0.0, 0.0, converged, iterations, mse, float(np.abs(W).sum()))


def select_gamma(results: Sequence[FitResult], threshold: float) -> FitResult:
    """Largest gamma whose training MSE stays below the threshold (smallest gamma if none does)."""
    if not results:
        raise InvalidParameterError("select_gamma needs at least one fit")
    admissible = [r for r in results if r.mse < threshold]
    if not admissible:
        logger.warning(f"No gamma keeps the training MSE below {threshold:g}; using the smallest")
        return min(results, key=lambda r: r.gamma)
    return max(admissible, key=lambda r: r.gamma)
