"""
Representations (Phi, phi) of matrix Lie groups on concrete vector spaces.

A representation is either linear (Phi(g) is dim x dim) or affine. Affine
representations act on R^dim through a homogeneous (dim+1) x (dim+1) matrix:
v -> A[:dim, :dim] v + A[:dim, dim]. They model SE(n) and T(n) acting on points
of R^n without lifting the points themselves.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Union

import numpy as np
from scipy.linalg import block_diag

from .group import AlgebraLike, GroupKind, MatrixLieGroup, as_matrix
from ..errors import DimensionMismatchError, GroupMismatchError, RepresentationError


@dataclass(frozen=True, eq=False)
class Representation:
    group: MatrixLieGroup
    dim: int
    group_map: Callable[[np.ndarray], np.ndarray]
    algebra_map: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    affine: bool = False

    @property
    def matrix_size(self) -> int:
        return self.dim + 1 if self.affine else self.dim

    def matrix(self, g: np.ndarray) -> np.ndarray:
        return np.asarray(self.group_map(np.asarray(g, dtype=float)), dtype=float)

    def algebra_matrix(self, xi: AlgebraLike) -> np.ndarray:
        return np.asarray(self.algebra_map(as_matrix(xi)), dtype=float)

    # --- affine decomposition ---

    def group_parts(self, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(linear part, translation) of Phi(g)."""
        A = self.matrix(g)
        if self.affine:
            return A[:self.dim, :self.dim], A[:self.dim, self.dim]
        return A, np.zeros(self.dim)

    def algebra_parts(self, xi: AlgebraLike) -> tuple[np.ndarray, np.ndarray]:
        a = self.algebra_matrix(xi)
        if self.affine:
            return a[:self.dim, :self.dim], a[:self.dim, self.dim]
        return a, np.zeros(self.dim)

    # --- actions on vectors; v has shape (..., dim) ---

    def _check_vectors(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"representation '{self.name}' acts on R^{self.dim}, got vectors of size {v.shape[-1]}"
            )
        return v

    def apply_group(self, g: np.ndarray, v: np.ndarray) -> np.ndarray:
        v = self._check_vectors(v)
        L, t = self.group_parts(g)
        return v @ L.T + t

    def apply_inverse(self, g: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Phi(g)^{-1} v."""
        v = self._check_vectors(v)
        L, t = self.group_parts(g)
        return np.linalg.solve(L, (v - t).T).T

    def apply_algebra(self, xi: AlgebraLike, v: np.ndarray) -> np.ndarray:
        v = self._check_vectors(v)
        l, t = self.algebra_parts(xi)
        return v @ l.T + t

    def linear_part(self) -> "Representation":
        """The linear representation g -> d/dv of the action (identity for linear reps)."""
        if not self.affine:
            return self
        return Representation(
            self.group, self.dim,
            lambda g: self.group_parts(g)[0],
            lambda xi: self.algebra_parts(xi)[0],
            name=f"linear({self.name})",
        )

    def is_zero_on_algebra(self, tol: float = 0.0) -> bool:
        return all(np.abs(self.algebra_matrix(b)).max(initial=0.0) <= tol for b in self.group.basis)


# --- Constructors ---

def standard_rep(group: MatrixLieGroup) -> Representation:
    """Defining action: affine on R^n for SE(n)/T(n), matrix multiplication otherwise."""
    if group.kind == GroupKind.PRODUCT:
        factor_reps = [_pullback(group, i, standard_rep(f)) for i, f in enumerate(group.factors)]
        rep = direct_sum(*factor_reps)
        return Representation(group, rep.dim, rep.group_map, rep.algebra_map,
                               name="standard", affine=rep.affine)
    if group.is_affine:
        return Representation(group, group.n, _identity_map, _identity_map,
                              name="standard", affine=True)
    return Representation(group, group.ambient_dim, _identity_map, _identity_map, name="standard")


def homogeneous_rep(group: MatrixLieGroup) -> Representation:
    """Linear action of the group matrices on R^{ambient_dim}; points are lifted as (x, 1)."""
    return Representation(group, group.ambient_dim, _identity_map, _identity_map, name="homogeneous")


def trivial_rep(group: MatrixLieGroup, dim: int = 1) -> Representation:
    if dim < 1:
        raise RepresentationError(f"trivial representation needs dim >= 1, got {dim}")
    return Representation(group, dim, lambda g: np.eye(dim), lambda xi: np.zeros((dim, dim)),
                          name="trivial")


def particle_rep(group: MatrixLieGroup, n_particles: int) -> Representation:
    """
    Simultaneous action on x = (q^1, p^1, ..., q^np, p^np, 1).
    Rotations act on every q and p block, translations on the q blocks only.
    """
    if group.kind not in (GroupKind.SE, GroupKind.SO, GroupKind.O, GroupKind.T):
        raise RepresentationError(f"particle representation is not defined for {group.name}")
    if n_particles < 1:
        raise RepresentationError("particle representation needs at least one particle")

    d = group.n
    affine = group.is_affine
    size = 2 * d * n_particles + 1

    def split(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if affine:
            return A[:d, :d], A[:d, d]
        return A, np.zeros(d)

    def assemble(A: np.ndarray, corner: float) -> np.ndarray:
        R, b = split(A)
        out = np.zeros((size, size))
        for i in range(n_particles):
            q = slice(2 * d * i, 2 * d * i + d)
            p = slice(2 * d * i + d, 2 * d * (i + 1))
            out[q, q] = R
            out[p, p] = R
            out[q, size - 1] = b
        out[size - 1, size - 1] = corner
        return out

    return Representation(group, size, lambda g: assemble(g, 1.0), lambda xi: assemble(xi, 0.0),
                          name=f"particles({n_particles})")


def direct_sum(*reps: Representation) -> Representation:
    """Block-diagonal sum. Affine if any summand is affine; translations are stacked."""
    if not reps:
        raise RepresentationError("direct_sum needs at least one representation")
    group = reps[0].group
    for r in reps[1:]:
        if not r.group.same_as(group):
            raise GroupMismatchError("direct_sum of representations of different groups")

    dim = sum(r.dim for r in reps)
    affine = any(r.affine for r in reps)
    if not affine:
        return Representation(
            group, dim,
            lambda g: block_diag(*[r.matrix(g) for r in reps]),
            lambda xi: block_diag(*[r.algebra_matrix(xi) for r in reps]),
            name="+".join(r.name for r in reps),
        )

    def homogeneous(parts, corner: float) -> np.ndarray:
        out = np.zeros((dim + 1, dim + 1))
        out[:dim, :dim] = block_diag(*[p[0] for p in parts])
        out[:dim, dim] = np.concatenate([p[1] for p in parts])
        out[dim, dim] = corner
        return out

    return Representation(
        group, dim,
        lambda g: homogeneous([r.group_parts(g) for r in reps], 1.0),
        lambda xi: homogeneous([r.algebra_parts(xi) for r in reps], 0.0),
        name="+".join(r.name for r in reps),
        affine=True,
    )


def kernel_value_rep(rep_V: Representation, rep_W: Representation,
                     rep_Rm: Representation) -> Representation:
    """
    Action on kernel values K in W (x) V*, stored as row-major vec of a dim W x dim V matrix:
      K -> det(Phi_Rm(g))^{-1} Psi_W(g) K Phi_V(g)^{-1}
    with differential psi_W (x) I - I (x) phi_V^T - tr(phi_Rm) I.
    """
    for r in (rep_V, rep_W):
        if r.affine:
            raise RepresentationError("kernel value spaces need linear representations")
    if not (rep_V.group.same_as(rep_W.group) and rep_V.group.same_as(rep_Rm.group)):
        raise GroupMismatchError("kernel representations must share one group")

    nV, nW = rep_V.dim, rep_W.dim
    eye_V, eye_W = np.eye(nV), np.eye(nW)

    def group_map(g: np.ndarray) -> np.ndarray:
        L_in, _ = rep_Rm.group_parts(g)
        scale = 1.0 / np.linalg.det(L_in)
        return scale * np.kron(rep_W.matrix(g), np.linalg.inv(rep_V.matrix(g)).T)

    def algebra_map(xi: np.ndarray) -> np.ndarray:
        l_in, _ = rep_Rm.algebra_parts(xi)
        return (np.kron(rep_W.algebra_matrix(xi), eye_V)
                - np.kron(eye_W, rep_V.algebra_matrix(xi).T)
                - np.trace(l_in) * np.eye(nW * nV))

    return Representation(rep_V.group, nW * nV, group_map, algebra_map,
                          name=f"kernel({rep_W.name},{rep_V.name})")


def representation_from_descriptor(group: MatrixLieGroup,
                                   desc: Union[str, Dict[str, Any], None]) -> Representation:
    """
    Builds a representation from a config value: "standard", "homogeneous",
    "trivial", {"kind": "trivial", "dim": k} or {"kind": "particles", "n_particles": k}.
    """
    if desc is None:
        desc = "standard"
    if isinstance(desc, str):
        desc = {"kind": desc}

    kind = desc.get("kind")
    if kind == "standard":
        return standard_rep(group)
    if kind == "homogeneous":
        return homogeneous_rep(group)
    if kind == "trivial":
        return trivial_rep(group, int(desc.get("dim", 1)))
    if kind == "particles":
        return particle_rep(group, int(desc["n_particles"]))
    raise RepresentationError(f"unknown representation kind '{kind}'")


# --- helpers ---

def _identity_map(A: np.ndarray) -> np.ndarray:
    return A


def _pullback(group: MatrixLieGroup, index: int, rep: Representation) -> Representation:
    """A factor representation viewed as a representation of the product group."""
    a, b = group.blocks[index]
    return Representation(
        group, rep.dim,
        lambda g: rep.group_map(g[a:b, a:b]),
        lambda xi: rep.algebra_map(xi[a:b, a:b]),
        name=rep.name,
        affine=rep.affine,
    )
