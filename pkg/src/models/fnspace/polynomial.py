from math import comb
from typing import Any, Dict, Optional, Sequence

import numpy as np
from sklearn.preprocessing import PolynomialFeatures

from .dictionary import FeatureDictionary
from ..errors import DictionarySizeError, DimensionMismatchError
from ...utils.logging import get_logger

logger = get_logger("PolyDictionary")


def monomial_count(m: int, degree: int, min_degree: int = 0) -> int:
    """Number of monomials in m variables with min_degree <= |alpha| <= degree."""
    if degree < min_degree:
        return 0
    return sum(comb(k + m - 1, m - 1) for k in range(max(min_degree, 0), degree + 1))


def graded_multi_indices(m: int, degree: int) -> np.ndarray:
    """Exponents of every monomial of degree <= `degree`, graded lexicographic order."""
    if degree == 0:
        return np.zeros((1, m), dtype=int)
    features = PolynomialFeatures(degree=degree, include_bias=True)
    features.fit(np.zeros((1, m)))
    return np.asarray(features.powers_, dtype=int)


class PolynomialDictionary(FeatureDictionary):
    """Monomials x^alpha (min_degree <= |alpha| <= degree) times output unit vectors."""

    MAX_DICTIONARY_SIZE = 50_000

    def __init__(self, m: int, n: int, degree: int, min_degree: int = 0,
                 max_size: Optional[int] = None):
        if m < 1 or n < 1:
            raise DimensionMismatchError(f"polynomial dictionary needs m, n >= 1 (got m={m}, n={n})")
        if degree < 0 or min_degree < 0 or min_degree > degree:
            raise DimensionMismatchError(
                f"invalid degree range [{min_degree}, {degree}] for a polynomial dictionary"
            )

        cap = self.MAX_DICTIONARY_SIZE if max_size is None else int(max_size)
        total = n * monomial_count(m, degree, min_degree)
        if total > cap:
            raise DictionarySizeError(
                f"polynomial dictionary of size {total} (m={m}, n={n}, d={degree}) exceeds the cap {cap}"
            )

        super().__init__(m, n)
        self.degree = int(degree)
        self.min_degree = int(min_degree)

        powers = graded_multi_indices(m, degree)
        self._powers = powers[powers.sum(axis=1) >= min_degree]
        self._index = {tuple(p): i for i, p in enumerate(self._powers)}

        # exponents of d/dx_l x^alpha, clipped so that alpha_l = 0 gives 0 * x^0
        eye = np.eye(m, dtype=int)
        self._grad_powers = np.maximum(self._powers[None, :, :] - eye[:, None, :], 0)

        logger.debug(f"Built P_{degree}(R^{m}) -> R^{n} dictionary with {self.size} entries")

    @property
    def powers(self) -> np.ndarray:
        return self._powers

    @property
    def feature_count(self) -> int:
        return int(self._powers.shape[0])

    def index_of(self, alpha: Sequence[int], output: int = 0) -> int:
        """Entry index of x^alpha e_output."""
        key = tuple(int(a) for a in alpha)
        if key not in self._index:
            raise KeyError(f"monomial {key} is not in the dictionary")
        return output * self.feature_count + self._index[key]

    def features(self, x: np.ndarray) -> np.ndarray:
        return np.prod(x[:, None, :] ** self._powers[None, :, :], axis=2)

    def feature_gradients(self, x: np.ndarray) -> np.ndarray:
        # (M, m, C): prod over variables of x ** grad_powers, scaled by alpha_l
        pw = np.prod(x[:, None, None, :] ** self._grad_powers[None], axis=3)
        grads = pw * self._powers.T[None, :, :]
        return grads.transpose(0, 2, 1)

    def descriptor(self) -> Dict[str, Any]:
        desc: Dict[str, Any] = {"type": "poly", "m": self.input_dim, "n": self.output_dim, "d": self.degree}
        if self.min_degree:
            desc["min_degree"] = self.min_degree
        return desc


def polynomial_dictionary(m: int, n: int, d: int, min_degree: int = 0,
                          max_size: Optional[int] = None) -> PolynomialDictionary:
    return PolynomialDictionary(m, n, d, min_degree=min_degree, max_size=max_size)
