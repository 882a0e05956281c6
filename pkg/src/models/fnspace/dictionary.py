from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from ..errors import DimensionMismatchError


class FunctionDictionary(ABC):
    """
    Ordered basis functions F_i : R^m -> R^n with analytic Jacobians.
    Batched: points are arrays of shape (M, m).
    """

    def __init__(self, input_dim: int, output_dim: int):
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)

    @property
    @abstractmethod
    def size(self) -> int:
        pass

    @abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Returns entry values, shape (M, N, n)."""
        pass

    @abstractmethod
    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """Returns entry Jacobians, shape (M, N, n, m)."""
        pass

    @abstractmethod
    def descriptor(self) -> Dict[str, Any]:
        """
        JSON-ready description, e.g.
        {"type": "poly", "m": 2, "n": 1, "d": 2} or {"type": "named", "id": "fourier-r2-k1"}
        """
        pass

    def directional_derivative(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """(dF_i/dx)(x_j) v_j for every entry, shape (M, N, n)."""
        return np.einsum("jinl,jl->jin", self.jacobian(x), v)

    def model_values(self, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.einsum("jin,i->jn", self.evaluate(x), coeffs)

    def model_jacobian(self, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
        return np.einsum("jinl,i->jnl", self.jacobian(x), coeffs)

    def evaluation_matrix(self, x: np.ndarray) -> np.ndarray:
        """Rows (point, component), columns entries: F(x_j) = E c."""
        vals = self.evaluate(self.check_points(x))
        return vals.transpose(0, 2, 1).reshape(-1, self.size)

    def check_points(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[-1] != self.input_dim:
            raise DimensionMismatchError(
                f"dictionary expects points in R^{self.input_dim}, got shape {x.shape}"
            )
        return x

    def check_coeffs(self, coeffs: np.ndarray) -> np.ndarray:
        c = np.asarray(coeffs, dtype=float).ravel()
        if c.size != self.size:
            raise DimensionMismatchError(
                f"expected {self.size} coefficients, got {c.size}"
            )
        return c


class FeatureDictionary(FunctionDictionary):
    """
    Scalar features phi_b times output unit vectors e_a.
    Entry a * C + b is x -> phi_b(x) e_a, so coefficients are W.ravel() for F(x) = W phi(x).
    """

    @property
    @abstractmethod
    def feature_count(self) -> int:
        pass

    @abstractmethod
    def features(self, x: np.ndarray) -> np.ndarray:
        """Scalar features, shape (M, C)."""
        pass

    @abstractmethod
    def feature_gradients(self, x: np.ndarray) -> np.ndarray:
        """Feature gradients, shape (M, C, m)."""
        pass

    @property
    def size(self) -> int:
        return self.output_dim * self.feature_count

    def coefficient_matrix(self, coeffs: np.ndarray) -> np.ndarray:
        """W with F(x) = W phi(x), shape (n, C)."""
        return self.check_coeffs(coeffs).reshape(self.output_dim, self.feature_count)

    def _spread(self, per_feature: np.ndarray) -> np.ndarray:
        # (M, C, ...) -> (M, n*C, n, ...)
        eye = np.eye(self.output_dim)
        M = per_feature.shape[0]
        if per_feature.ndim == 2:
            out = np.einsum("jc,ab->jacb", per_feature, eye)
            return out.reshape(M, self.size, self.output_dim)
        out = np.einsum("jcl,ab->jacbl", per_feature, eye)
        return out.reshape(M, self.size, self.output_dim, self.input_dim)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self._spread(self.features(self.check_points(x)))

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        return self._spread(self.feature_gradients(self.check_points(x)))

    def directional_derivative(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        grads = self.feature_gradients(self.check_points(x))
        return self._spread(np.einsum("jcl,jl->jc", grads, v))

    def model_values(self, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
        W = self.coefficient_matrix(coeffs)
        return self.features(x) @ W.T

    def model_jacobian(self, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
        W = self.coefficient_matrix(coeffs)
        return np.einsum("ac,jcl->jal", W, self.feature_gradients(x))

    def evaluation_matrix(self, x: np.ndarray) -> np.ndarray:
        # kron structure: row (j, a), column (a', c) is phi_c(x_j) delta_{a a'}
        phi = self.features(self.check_points(x))
        M, C = phi.shape
        n = self.output_dim
        out = np.einsum("jc,ab->jabc", phi, np.eye(n))
        return out.reshape(M * n, n * C)


def evaluate_model(dictionary: FunctionDictionary, coeffs, x) -> np.ndarray:
    """sum_i c_i F_i(x). A single point gives shape (n,), a batch (M, n)."""
    single = np.ndim(x) == 1
    pts = dictionary.check_points(x)
    c = dictionary.check_coeffs(coeffs)
    out = dictionary.model_values(c, pts)
    return out[0] if single else out


def jacobian_model(dictionary: FunctionDictionary, coeffs, x) -> np.ndarray:
    """sum_i c_i dF_i/dx. A single point gives shape (n, m), a batch (M, n, m)."""
    single = np.ndim(x) == 1
    pts = dictionary.check_points(x)
    c = dictionary.check_coeffs(coeffs)
    out = dictionary.model_jacobian(c, pts)
    return out[0] if single else out
