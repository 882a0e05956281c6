from itertools import product as cartesian
from typing import Any, Callable, Dict, Optional

import numpy as np

from .dictionary import FeatureDictionary, FunctionDictionary
from .polynomial import PolynomialDictionary
from ..errors import DimensionMismatchError
from ...utils.logging import get_logger

logger = get_logger("DictionaryRegistry")


class FourierDictionary(FeatureDictionary):
    """
    Trigonometric features: 1, cos(w.x), sin(w.x) for integer frequency
    vectors w with |w_l| <= k, keeping one of each +/- pair.
    """

    def __init__(self, m: int, n: int, max_frequency: int):
        if m < 1 or n < 1 or max_frequency < 0:
            raise DimensionMismatchError("Fourier dictionary needs m, n >= 1 and k >= 0")
        super().__init__(m, n)
        self.max_frequency = int(max_frequency)
        self.named_id: Optional[str] = None

        freqs = []
        for w in cartesian(range(-max_frequency, max_frequency + 1), repeat=m):
            nonzero = [c for c in w if c != 0]
            if nonzero and nonzero[0] > 0:
                freqs.append(w)
        self._freqs = np.asarray(freqs, dtype=float).reshape(-1, m)

    @property
    def feature_count(self) -> int:
        return 1 + 2 * self._freqs.shape[0]

    def features(self, x: np.ndarray) -> np.ndarray:
        phase = x @ self._freqs.T
        return np.concatenate([np.ones((x.shape[0], 1)), np.cos(phase), np.sin(phase)], axis=1)

    def feature_gradients(self, x: np.ndarray) -> np.ndarray:
        phase = x @ self._freqs.T
        d_cos = -np.sin(phase)[:, :, None] * self._freqs[None]
        d_sin = np.cos(phase)[:, :, None] * self._freqs[None]
        zero = np.zeros((x.shape[0], 1, self.input_dim))
        return np.concatenate([zero, d_cos, d_sin], axis=1)

    def descriptor(self) -> Dict[str, Any]:
        if self.named_id:
            return {"type": "named", "id": self.named_id}
        return {"type": "fourier", "m": self.input_dim, "n": self.output_dim, "k": self.max_frequency}


_REGISTRY: Dict[str, Callable[[], FunctionDictionary]] = {}


def register_dictionary(name: str, factory: Callable[[], FunctionDictionary],
                        overwrite: bool = False) -> None:
    """Registers a named dictionary family. Entries must supply analytic Jacobians."""
    if name in _REGISTRY and not overwrite:
        raise KeyError(f"dictionary '{name}' is already registered")
    _REGISTRY[name] = factory
    logger.debug(f"Registered dictionary '{name}'")


def registered_names() -> list:
    return sorted(_REGISTRY)


def named_dictionary(name: str) -> FunctionDictionary:
    if name not in _REGISTRY:
        raise KeyError(f"unknown dictionary '{name}' (known: {', '.join(registered_names())})")
    dictionary = _REGISTRY[name]()
    dictionary.named_id = name
    return dictionary


def dictionary_from_descriptor(desc: Dict[str, Any],
                               max_size: Optional[int] = None) -> FunctionDictionary:
    kind = desc.get("type")
    if kind == "poly":
        return PolynomialDictionary(int(desc["m"]), int(desc["n"]), int(desc["d"]),
                                    min_degree=int(desc.get("min_degree", 0)), max_size=max_size)
    if kind == "named":
        return named_dictionary(str(desc["id"]))
    if kind == "fourier":
        return FourierDictionary(int(desc["m"]), int(desc["n"]), int(desc["k"]))
    raise KeyError(f"unknown dictionary type '{kind}'")


register_dictionary("fourier-r1-k2", lambda: FourierDictionary(1, 1, 2))
register_dictionary("fourier-r2-k1", lambda: FourierDictionary(2, 1, 1))
