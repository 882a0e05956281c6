"""Monte-Carlo inner products on spaces of sampled functions."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from scipy.linalg import svd

from ..errors import DimensionMismatchError, SingularGramError
from ..fnspace.dictionary import FunctionDictionary
from ...utils.logging import get_logger
from ...utils.seeding import make_rng

logger = get_logger("InnerProduct")

DEFAULT_DOMAIN = (-1.0, 1.0)
PD_RELATIVE_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class SampledInnerProduct:
    """
    <f, g> = (1/M) sum_i w_i f(x_i) . g(x_i) over points drawn uniformly from a cube.
    """
    points: np.ndarray            # (M, m)
    weights: np.ndarray           # (M,)
    lower: np.ndarray             # cube bounds per coordinate
    upper: np.ndarray
    seed: int
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def row_scale(self) -> np.ndarray:
        """sqrt(w_i / M): scaling that turns sampled values into Euclidean coordinates."""
        return np.sqrt(self.weights / self.count)

    def weighted_columns(self, values: np.ndarray) -> np.ndarray:
        """(M, N, n) sampled values -> (M*n, N) matrix whose column inner products are <F_i, F_j>."""
        scaled = values * self.row_scale[:, None, None]
        return scaled.transpose(0, 2, 1).reshape(-1, values.shape[1])

    def norm(self, values: np.ndarray) -> float:
        """Sampled norm of one function given its values, shape (M, n) or (M,)."""
        v = np.asarray(values, dtype=float).reshape(self.count, -1)
        return float(np.sqrt(np.sum(self.weights[:, None] * v ** 2) / self.count))

    def gram(self, values: np.ndarray) -> np.ndarray:
        C = self.weighted_columns(values)
        return C.T @ C

    def gram_spectrum(self, dictionary: FunctionDictionary) -> np.ndarray:
        """Gram eigenvalues on the dictionary span, nonincreasing, from an SVD of the sampled columns."""
        C = self.weighted_columns(dictionary.evaluate(self.points))
        s = svd(C, compute_uv=False) if C.size else np.zeros(0)
        padded = np.zeros(dictionary.size)
        padded[:min(s.size, padded.size)] = s[:padded.size]
        return padded ** 2

    def condition_number(self, dictionary: FunctionDictionary) -> float:
        spectrum = self.gram_spectrum(dictionary)
        if spectrum.size == 0 or spectrum[-1] <= 0.0:
            return float("inf")
        return float(spectrum[0] / spectrum[-1])

    def check_positive_definite(self, dictionary: FunctionDictionary,
                                rel_tol: float = PD_RELATIVE_TOL) -> float:
        """Raises SingularGramError unless the Gram matrix on the dictionary span is positive definite."""
        spectrum = self.gram_spectrum(dictionary)
        if spectrum.size == 0:
            return float("inf")
        if spectrum[-1] <= rel_tol * spectrum[0] or spectrum[0] == 0.0:
            raise SingularGramError(
                f"sampled Gram matrix is singular on the dictionary span "
                f"(M={self.count}, N={dictionary.size}, min eigenvalue {spectrum[-1]:.3e})"
            )
        return float(spectrum[0] / spectrum[-1])

    def describe(self) -> Dict[str, Any]:
        return {
            "samples": self.count,
            "seed": self.seed,
            "domain": [self.lower.tolist(), self.upper.tolist()],
            "unit_weights": bool(np.all(self.weights == 1.0)),
        }


DomainLike = Union[Sequence[float], Sequence[Sequence[float]]]


def _cube_bounds(domain: Optional[DomainLike], m: int) -> tuple[np.ndarray, np.ndarray]:
    if domain is None:
        domain = DEFAULT_DOMAIN
    arr = np.asarray(domain, dtype=float)
    if arr.shape == (2,):
        lower, upper = np.full(m, arr[0]), np.full(m, arr[1])
    elif arr.shape == (m, 2):
        lower, upper = arr[:, 0], arr[:, 1]
    else:
        raise DimensionMismatchError(f"domain must be [lo, hi] or an (m, 2) array, got shape {arr.shape}")
    if np.any(upper <= lower):
        raise DimensionMismatchError("empty sampling cube: every upper bound must exceed its lower bound")
    return lower, upper


def build_inner_product(domain: Optional[DomainLike], M: int, seed: int,
                        weights: Optional[Sequence[float]] = None,
                        m: Optional[int] = None,
                        target: Optional[FunctionDictionary] = None) -> SampledInnerProduct:
    """
    Draws M points uniformly from the cube with the given seed.
    The dimension comes from `m`, the target dictionary, or an (m, 2) domain.
    If a target dictionary is given, its Gram matrix must be positive definite.
    """
    if m is None:
        if target is not None:
            m = target.input_dim
        elif domain is not None and np.ndim(domain) == 2:
            m = len(domain)
        else:
            raise DimensionMismatchError("cannot infer the sampling dimension; pass m=")
    if M < 1:
        raise DimensionMismatchError(f"need at least one sample point, got M={M}")
    lower, upper = _cube_bounds(domain, m)

    rng = make_rng(seed, "inner-product")
    points = lower + (upper - lower) * rng.random((M, m))

    if weights is None:
        w = np.ones(M)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (M,) or np.any(w <= 0):
            raise DimensionMismatchError("weights must be M positive numbers")

    inner = SampledInnerProduct(points, w, lower, upper, int(seed))
    if target is not None:
        cond = inner.check_positive_definite(target)
        inner.meta["gram_condition"] = cond
        logger.info(f"Inner product with M={M} is positive definite on {target.size} entries (cond {cond:.3e})")
    return inner


def inner_product_convergence(dictionary: FunctionDictionary, M: int, seed: int,
                              domain: Optional[DomainLike] = None) -> Dict[str, Any]:
    """
    Compares the normalized Gram matrices at M and 2M samples.
    Reported, not asserted: the change should be of order 1/sqrt(M).
    """
    m = dictionary.input_dim
    small = build_inner_product(domain, M, seed, m=m)
    large = build_inner_product(domain, 2 * M, seed + 1, m=m)
    G1 = small.gram(dictionary.evaluate(small.points))
    G2 = large.gram(dictionary.evaluate(large.points))
    scale = max(np.abs(G2).max(), 1e-300)
    change = float(np.abs(G1 - G2).max() / scale)
    return {
        "samples": M,
        "max_relative_change": change,
        "statistical_scale": float(1.0 / np.sqrt(M)),
        "within_scale": bool(change <= 5.0 / np.sqrt(M)),
    }
