"""
Discretized Lie-derivative tensor L[i, j, k] = <u_j, L_{xi_k} F_i>, where u_j is an
orthonormal basis (under the sampled inner product) of the span of every L_{xi_k} F_i.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .action import ActionPair, lie_derivative_columns
from .inner_product import SampledInnerProduct
from ..errors import DimensionMismatchError, InsufficientSamplesError
from ..fnspace.dictionary import FunctionDictionary
from ..fnspace.polynomial import PolynomialDictionary, monomial_count
from ..linalg import GS_DROP_TOL, gram_schmidt
from ...utils.logging import get_logger

logger = get_logger("LieTensor")

NON_POLYNOMIAL_OVERSAMPLING = 4


@dataclass(frozen=True, eq=False)
class LieOperatorTensor:
    tensor: np.ndarray                        # (N, N', K)
    group_descriptor: Dict[str, Any]
    dictionary_descriptor: Dict[str, Any]
    sampling: Dict[str, Any]                  # SampledInnerProduct.describe()
    dropped: int = 0
    operator_norm: float = 0.0                # spectral norm of c -> vec(L_F)
    gram_condition: Optional[float] = None
    inner: Optional[SampledInnerProduct] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.tensor.shape[0])

    @property
    def range_dim(self) -> int:
        return int(self.tensor.shape[1])

    @property
    def algebra_dim(self) -> int:
        return int(self.tensor.shape[2])

    @property
    def seed(self) -> int:
        return int(self.sampling.get("seed", 0))

    def operator_matrix(self, coeffs) -> np.ndarray:
        """L_F = sum_i c_i L[i], shape (N', dim G)."""
        c = np.asarray(coeffs, dtype=float).ravel()
        if c.size != self.size:
            raise DimensionMismatchError(f"tensor has {self.size} entries, got {c.size} coefficients")
        return np.tensordot(c, self.tensor, axes=1)

    def flattened(self) -> np.ndarray:
        """Matrix of c -> vec(L_F) (row-major vec), shape (N' * dim G, N)."""
        return self.tensor.reshape(self.size, -1).T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dims": list(self.tensor.shape),
            "group": self.group_descriptor,
            "dictionary": self.dictionary_descriptor,
            "sampling": self.sampling,
            "seed": self.seed,
            "dropped": self.dropped,
            "operator_norm": self.operator_norm,
            "gram_condition": self.gram_condition,
            "tensor": self.tensor.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LieOperatorTensor":
        dims = tuple(int(d) for d in data["dims"])
        tensor = np.asarray(data["tensor"], dtype=float).reshape(dims)
        return cls(tensor, data["group"], data["dictionary"], data.get("sampling", {}),
                   int(data.get("dropped", 0)), float(data.get("operator_norm", 0.0)),
                   data.get("gram_condition"))

    def save(self, path: Union[str, Path]) -> Path:
        """Writes .npz (binary) or .json depending on the suffix."""
        path = Path(path)
        payload = self.to_dict()
        if path.suffix == ".npz":
            meta = {k: v for k, v in payload.items() if k != "tensor"}
            np.savez_compressed(path, tensor=self.tensor, meta=json.dumps(meta, sort_keys=True))
        else:
            path.write_text(json.dumps(payload, sort_keys=True))
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LieOperatorTensor":
        path = Path(path)
        if path.suffix == ".npz":
            with np.load(path, allow_pickle=False) as data:
                meta = json.loads(str(data["meta"]))
                meta["tensor"] = data["tensor"]
            return cls.from_dict(meta)
        return cls.from_dict(json.loads(path.read_text()))


def certified_sample_count(dictionary: FunctionDictionary, pair: ActionPair) -> Optional[int]:
    """
    Number of uniform samples that almost surely gives an inner product on the
    span of every L_xi F_i, for polynomial dictionaries. None otherwise.
    """
    if not isinstance(dictionary, PolynomialDictionary):
        return None

    m, d, lo = dictionary.input_dim, dictionary.degree, dictionary.min_degree
    if pair.rep_in.affine:
        lo = max(0, lo - 1)
    hi = d
    if pair.is_pure_translation():
        hi = d - 1
    if hi < lo:
        return 1
    return max(1, monomial_count(m, hi, lo))


def default_sample_count(dictionary: FunctionDictionary, pair: ActionPair) -> int:
    certified = certified_sample_count(dictionary, pair)
    if certified is not None:
        return certified
    return NON_POLYNOMIAL_OVERSAMPLING * dictionary.size * max(1, pair.group.dim)


def assemble_lie_tensor(pair: ActionPair, dictionary: FunctionDictionary,
                        inner: SampledInnerProduct, drop_tol: float = GS_DROP_TOL,
                        workers: int = 1) -> LieOperatorTensor:
    pair.check(dictionary)
    if inner.dim != dictionary.input_dim:
        raise DimensionMismatchError(
            f"inner product samples R^{inner.dim}, dictionary is on R^{dictionary.input_dim}"
        )

    gram_condition = None
    certified = certified_sample_count(dictionary, pair)
    if certified is not None:
        if inner.count < certified:
            raise InsufficientSamplesError(
                f"{inner.count} sample points cannot certify an inner product for "
                f"{dictionary.descriptor()} under {pair.group.name}; use M >= {certified}"
            )
    else:
        gram_condition = inner.condition_number(dictionary)
        if not np.isfinite(gram_condition):
            logger.warning(f"Gram matrix is singular on the dictionary span with M={inner.count}; increase M")
        else:
            logger.info(f"Gram condition number {gram_condition:.3e} at M={inner.count}")

    N, K = dictionary.size, pair.group.dim
    if K == 0:
        return LieOperatorTensor(np.zeros((N, 0, 0)), pair.group.descriptor(), dictionary.descriptor(),
                                 inner.describe(), 0, 0.0, gram_condition, inner)

    def block(k: int) -> np.ndarray:
        values = lie_derivative_columns(pair, dictionary, pair.group.basis[k], inner.points)
        return inner.weighted_columns(values)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(block, range(K)))
    else:
        blocks = [block(k) for k in range(K)]

    # column i * K + k holds L_{xi_k} F_i
    columns = np.stack(blocks, axis=2).reshape(-1, N * K)
    Q, dropped = gram_schmidt(columns, drop_tol)
    tensor = (Q.T @ columns).reshape(Q.shape[1], N, K).transpose(1, 0, 2)

    flat = tensor.reshape(N, -1).T
    op_norm = float(np.linalg.norm(flat, 2)) if flat.size else 0.0

    logger.info(
        f"Assembled Lie tensor {tensor.shape} for {pair.group.name} "
        f"(M={inner.count}, dropped {dropped} directions)"
    )
    return LieOperatorTensor(tensor, pair.group.descriptor(), dictionary.descriptor(),
                             inner.describe(), dropped, op_norm, gram_condition, inner)
