"""
Matrix Lie groups, their Lie algebras and the exponential map.

Canonical algebra bases (orthonormal under <A, B> = Tr(A^T B)):
  so(n)  (E_ij - E_ji)/sqrt(2) for i < j, lexicographic
  se(n)  so(n) block first, then translations E_{i,n}, i = 0..n-1
  t(n)   E_{i,n}
  gl(n)  E_ij in row-major order
  product  factor bases in factor order, embedded block-diagonally
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import product as cartesian
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import block_diag, expm

from ..errors import (
    AlgebraClosureError,
    DimensionMismatchError,
    GroupMismatchError,
    NonFiniteInputError,
    UnsupportedGroupError,
)
from ...utils.logging import get_logger

logger = get_logger("LieGroup")

CLOSURE_TOL = 1e-10


class GroupKind(str, Enum):
    SO = "SO"
    O = "O"
    SE = "SE"
    T = "T"
    GL = "GL"
    TRIVIAL = "trivial"
    PRODUCT = "product"


AFFINE_KINDS = (GroupKind.SE, GroupKind.T)


@dataclass(frozen=True, eq=False)
class MatrixLieGroup:
    """A matrix Lie group with an orthonormal algebra basis and component representatives."""
    kind: GroupKind
    n: int
    ambient_dim: int
    basis: np.ndarray                      # (dim, ambient, ambient)
    component_reps: tuple = ()             # group matrices, one per non-identity component
    factors: tuple = ()                    # for PRODUCT groups
    blocks: tuple = field(default=())      # (start, stop) of each factor block

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def algebra_basis(self) -> List[np.ndarray]:
        return [b for b in self.basis]

    @property
    def is_affine(self) -> bool:
        return self.kind in AFFINE_KINDS

    @property
    def name(self) -> str:
        if self.kind == GroupKind.PRODUCT:
            return " x ".join(f.name for f in self.factors)
        if self.kind == GroupKind.TRIVIAL:
            return f"trivial({self.n})"
        return f"{self.kind.value}({self.n})"

    def descriptor(self) -> Dict[str, Any]:
        if self.kind == GroupKind.PRODUCT:
            return {"kind": "product", "n": self.ambient_dim,
                    "factors": [f.descriptor() for f in self.factors]}
        return {"kind": self.kind.value, "n": self.n}

    def same_as(self, other: "MatrixLieGroup") -> bool:
        return self is other or self.descriptor() == other.descriptor()

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim)

    def element(self, coeffs: Sequence[float]) -> "LieAlgebraElement":
        return LieAlgebraElement(self, np.asarray(coeffs, dtype=float))

    def basis_element(self, k: int) -> "LieAlgebraElement":
        coeffs = np.zeros(self.dim)
        coeffs[k] = 1.0
        return self.element(coeffs)

    def coefficients(self, matrix: np.ndarray) -> np.ndarray:
        """Frobenius coordinates of an ambient matrix against the basis."""
        A = np.asarray(matrix, dtype=float)
        if A.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatchError(
                f"expected a {self.ambient_dim}x{self.ambient_dim} matrix, got {A.shape}"
            )
        if self.dim == 0:
            return np.zeros(0)
        return np.einsum("kij,ij->k", self.basis, A)

    def random_algebra_element(self, rng: np.random.Generator, scale: float = 1.0) -> "LieAlgebraElement":
        return self.element(scale * rng.standard_normal(self.dim))

    def random_element(self, rng: np.random.Generator, scale: float = 1.0,
                       include_components: bool = True) -> np.ndarray:
        """exp of a random algebra element, times a random component representative."""
        g = exp_map(self.random_algebra_element(rng, scale))
        if include_components and self.component_reps:
            pick = int(rng.integers(0, len(self.component_reps) + 1))
            if pick > 0:
                g = self.component_reps[pick - 1] @ g
        return g

    def contains(self, g: np.ndarray, tol: float = 1e-8) -> bool:
        """Membership test for the defining conditions of the group."""
        g = np.asarray(g, dtype=float)
        if g.shape != (self.ambient_dim, self.ambient_dim) or not np.all(np.isfinite(g)):
            return False
        if self.kind == GroupKind.PRODUCT:
            off = g.copy()
            for (a, b) in self.blocks:
                off[a:b, a:b] = 0.0
            if np.abs(off).max(initial=0.0) > tol:
                return False
            return all(f.contains(g[a:b, a:b], tol) for f, (a, b) in zip(self.factors, self.blocks))

        n = self.n
        if self.kind == GroupKind.TRIVIAL:
            return bool(np.allclose(g, np.eye(n), atol=tol))
        if self.kind == GroupKind.GL:
            return abs(np.linalg.det(g)) > tol
        if self.kind in (GroupKind.SO, GroupKind.O):
            orth = np.allclose(g.T @ g, np.eye(n), atol=tol)
            if self.kind == GroupKind.SO:
                return orth and abs(np.linalg.det(g) - 1.0) < tol
            return orth

        # affine kinds
        bottom = np.zeros(n + 1)
        bottom[-1] = 1.0
        if not np.allclose(g[n], bottom, atol=tol):
            return False
        R = g[:n, :n]
        if self.kind == GroupKind.T:
            return bool(np.allclose(R, np.eye(n), atol=tol))
        return bool(np.allclose(R.T @ R, np.eye(n), atol=tol) and abs(np.linalg.det(R) - 1.0) < tol)


@dataclass(frozen=True, eq=False)
class LieAlgebraElement:
    """Element of a group's Lie algebra, stored by its basis coefficients."""
    group: MatrixLieGroup
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.group.dim,):
            raise DimensionMismatchError(
                f"{self.group.name} algebra has dimension {self.group.dim}, got {self.coeffs.shape}"
            )

    @property
    def matrix(self) -> np.ndarray:
        if self.group.dim == 0:
            return np.zeros((self.group.ambient_dim, self.group.ambient_dim))
        return np.tensordot(self.coeffs, self.group.basis, axes=1)

    def __add__(self, other: "LieAlgebraElement") -> "LieAlgebraElement":
        _check_same_group(self.group, other.group)
        return LieAlgebraElement(self.group, self.coeffs + other.coeffs)

    def __rmul__(self, scalar: float) -> "LieAlgebraElement":
        return LieAlgebraElement(self.group, float(scalar) * self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


AlgebraLike = Union[LieAlgebraElement, np.ndarray]


def as_matrix(xi: AlgebraLike) -> np.ndarray:
    if isinstance(xi, LieAlgebraElement):
        return xi.matrix
    return np.asarray(xi, dtype=float)


# --- Bases ---

def _unit(n: int, i: int, j: int) -> np.ndarray:
    E = np.zeros((n, n))
    E[i, j] = 1.0
    return E


def _so_basis(n: int, ambient: int) -> List[np.ndarray]:
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            B = np.zeros((ambient, ambient))
            B[i, j] = 1.0 / np.sqrt(2.0)
            B[j, i] = -1.0 / np.sqrt(2.0)
            basis.append(B)
    return basis


def _translation_basis(n: int) -> List[np.ndarray]:
    return [_unit(n + 1, i, n) for i in range(n)]


def _stack(basis: List[np.ndarray], ambient: int) -> np.ndarray:
    if not basis:
        return np.zeros((0, ambient, ambient))
    return np.stack(basis)


def _reflection(n: int) -> np.ndarray:
    D = np.eye(n)
    D[0, 0] = -1.0
    return D


def make_group(kind: Union[str, GroupKind], n: int) -> MatrixLieGroup:
    """Builds one of the supported matrix groups acting on R^n."""
    try:
        kind = GroupKind(kind)
    except ValueError:
        raise UnsupportedGroupError(f"unknown group kind '{kind}'")

    if n < 1:
        raise UnsupportedGroupError(f"{kind.value}({n}): n must be >= 1")

    if kind == GroupKind.SO:
        return MatrixLieGroup(kind, n, n, _stack(_so_basis(n, n), n))
    if kind == GroupKind.O:
        return MatrixLieGroup(kind, n, n, _stack(_so_basis(n, n), n), (_reflection(n),))
    if kind == GroupKind.SE:
        basis = _so_basis(n, n + 1) + _translation_basis(n)
        return MatrixLieGroup(kind, n, n + 1, _stack(basis, n + 1))
    if kind == GroupKind.T:
        return MatrixLieGroup(kind, n, n + 1, _stack(_translation_basis(n), n + 1))
    if kind == GroupKind.GL:
        basis = [_unit(n, i, j) for i in range(n) for j in range(n)]
        return MatrixLieGroup(kind, n, n, _stack(basis, n), (_reflection(n),))
    if kind == GroupKind.TRIVIAL:
        return MatrixLieGroup(kind, n, n, np.zeros((0, n, n)))

    raise UnsupportedGroupError("product groups are built with make_product(...)")


def make_product(*groups: MatrixLieGroup) -> MatrixLieGroup:
    """Direct product, embedded block-diagonally."""
    if len(groups) < 2:
        raise UnsupportedGroupError("a direct product needs at least two factors")

    sizes = [g.ambient_dim for g in groups]
    ambient = int(sum(sizes))
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    blocks = tuple((int(offsets[i]), int(offsets[i + 1])) for i in range(len(groups)))

    basis = []
    for g, (a, b) in zip(groups, blocks):
        for B in g.basis:
            E = np.zeros((ambient, ambient))
            E[a:b, a:b] = B
            basis.append(E)

    # every combination of factor components except the identity component
    options = [[None] + list(g.component_reps) for g in groups]
    components = []
    for choice in cartesian(*options):
        if all(c is None for c in choice):
            continue
        mats = [np.eye(g.ambient_dim) if c is None else c for g, c in zip(groups, choice)]
        components.append(block_diag(*mats))

    return MatrixLieGroup(GroupKind.PRODUCT, ambient, ambient, _stack(basis, ambient),
                          tuple(components), tuple(groups), blocks)


def group_from_descriptor(desc: Dict[str, Any]) -> MatrixLieGroup:
    """Inverse of MatrixLieGroup.descriptor()."""
    kind = desc.get("kind")
    if kind == GroupKind.PRODUCT.value:
        factors = desc.get("factors") or []
        return make_product(*[group_from_descriptor(f) for f in factors])
    return make_group(kind, int(desc.get("n", 0)))


# --- Algebra operations ---

def _check_same_group(a: MatrixLieGroup, b: MatrixLieGroup) -> None:
    if not a.same_as(b):
        raise GroupMismatchError(f"elements belong to different groups: {a.name} vs {b.name}")


def exp_map(xi: AlgebraLike, t: float = 1.0) -> np.ndarray:
    """exp(t xi) by scaling and squaring (Pade order 13)."""
    A = as_matrix(xi) * float(t)
    if not np.all(np.isfinite(A)):
        raise NonFiniteInputError("exp_map received non-finite entries")
    return expm(A)


def bracket(xi: LieAlgebraElement, eta: LieAlgebraElement) -> LieAlgebraElement:
    """[xi, eta] = xi eta - eta xi, re-expressed in the algebra basis."""
    _check_same_group(xi.group, eta.group)
    X, Y = xi.matrix, eta.matrix
    C = X @ Y - Y @ X
    result = xi.group.element(xi.group.coefficients(C))
    residual = np.linalg.norm(C - result.matrix)
    if residual > CLOSURE_TOL * max(1.0, np.linalg.norm(C)):
        raise AlgebraClosureError(
            f"bracket left the {xi.group.name} algebra (residual {residual:.3e})"
        )
    return result


def algebra_projection(group: MatrixLieGroup, A: np.ndarray) -> LieAlgebraElement:
    """Frobenius-orthogonal projection of an ambient matrix onto the algebra."""
    return group.element(group.coefficients(A))


def structure_constants(group: MatrixLieGroup) -> np.ndarray:
    """c[i, j, k] with [xi_i, xi_j] = sum_k c[i, j, k] xi_k."""
    K = group.dim
    c = np.zeros((K, K, K))
    for i in range(K):
        for j in range(K):
            c[i, j] = bracket(group.basis_element(i), group.basis_element(j)).coeffs
    return c
