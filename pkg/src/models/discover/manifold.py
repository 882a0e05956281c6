"""
Symmetries of sampled submanifolds: point clouds with tangent frames and graphs
of input-output maps.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Union

import numpy as np
from scipy.linalg import svd
from scipy.spatial.distance import cdist

from .report import SymmetryReport, nullspace_report
from ..errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    MissingFramesError,
    RepresentationError,
    SingularFrameError,
)
from ..linalg import orthonormal_columns
from ..liegroup.group import MatrixLieGroup, algebra_projection
from ..liegroup.representation import Representation, standard_rep
from ..operators.action import ActionPair
from ...utils.logging import get_logger

logger = get_logger("Manifold")

DEFAULT_TAU = 1e-8
FRAME_TOL = 1e-10
FRAME_CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray                    # (M, d)
    intrinsic_dim: int
    frames: Optional[np.ndarray] = None   # (M, d, m), orthonormal columns

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        M, d = pts.shape
        if not 0 <= self.intrinsic_dim <= d:
            raise DimensionMismatchError(f"intrinsic dimension {self.intrinsic_dim} outside [0, {d}]")
        if self.frames is not None:
            frames = np.asarray(self.frames, dtype=float)
            if frames.shape != (M, d, self.intrinsic_dim):
                raise DimensionMismatchError(
                    f"frames must have shape {(M, d, self.intrinsic_dim)}, got {frames.shape}"
                )
            for i in range(M):
                if not orthonormal_columns(frames[i], FRAME_TOL):
                    raise DimensionMismatchError(f"frame {i} does not have orthonormal columns")
            object.__setattr__(self, "frames", frames)

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    @property
    def ambient_dim(self) -> int:
        return int(self.points.shape[1])

    def subset(self, index) -> "PointCloud":
        frames = None if self.frames is None else self.frames[index]
        return PointCloud(self.points[index], self.intrinsic_dim, frames)


def default_neighbor_count(intrinsic_dim: int) -> int:
    return max(2 * intrinsic_dim + 2, 10)


def estimate_tangent_frames(cloud: PointCloud, k_neighbors: Optional[int] = None) -> PointCloud:
    """Top principal directions of each point together with its k nearest neighbours."""
    m = cloud.intrinsic_dim
    k = default_neighbor_count(m) if k_neighbors is None else int(k_neighbors)
    if k < m:
        raise DimensionMismatchError(f"need k_neighbors >= intrinsic dimension ({k} < {m})")
    if cloud.count < k + 1:
        raise InsufficientSamplesError(f"{cloud.count} points cannot supply {k} neighbours each")

    pts = cloud.points
    dist = cdist(pts, pts)
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k]

    frames = np.empty((cloud.count, cloud.ambient_dim, m))
    for i in range(cloud.count):
        local = pts[np.concatenate(([i], neighbors[i]))]
        centered = local - local.mean(axis=0)
        _, _, vt = svd(centered, full_matrices=False)
        frames[i] = vt[:m].T

    logger.info(f"Estimated {m}-dimensional tangent frames at {cloud.count} points (k={k})")
    return replace(cloud, frames=frames)


def _lift(cloud: PointCloud, rep: Representation) -> tuple[np.ndarray, np.ndarray]:
    """Points and frames in the coordinates the action works in; (x, 1) for homogeneous actions."""
    if cloud.frames is None:
        raise MissingFramesError("point cloud has no tangent frames; estimate or supply them")
    d = cloud.ambient_dim
    if rep.dim == d:
        return cloud.points, cloud.frames
    if rep.dim == d + 1 and not rep.affine:
        ones = np.ones((cloud.count, 1))
        pad = np.zeros((cloud.count, 1, cloud.intrinsic_dim))
        return np.hstack([cloud.points, ones]), np.concatenate([cloud.frames, pad], axis=1)
    raise DimensionMismatchError(f"action on R^{rep.dim} does not fit points in R^{d}")


def _normal_generators(points: np.ndarray, frames: np.ndarray, rep: Representation,
                       group: MatrixLieGroup) -> tuple[np.ndarray, np.ndarray]:
    """Stacked (I - P) theta(xi_k) and theta(xi_k), columns over k, scaled by 1/sqrt(M)."""
    M = points.shape[0]
    normal, full = [], []
    for xi in group.basis:
        theta = -rep.apply_algebra(xi, points)
        tangential = np.einsum("jdm,jm->jd", frames, np.einsum("jdm,jd->jm", frames, theta))
        normal.append((theta - tangential).ravel())
        full.append(theta.ravel())
    scale = 1.0 / np.sqrt(M)
    return scale * np.stack(normal, axis=1), scale * np.stack(full, axis=1)


def _half_sample_heuristic(cloud: PointCloud, group: MatrixLieGroup, rep: Representation,
                           tau: float, cutoff: Optional[float], nullity: int) -> Dict[str, Any]:
    half = cloud.subset(slice(0, max(1, cloud.count // 2)))
    pts, frames = _lift(half, rep)
    B, T = _normal_generators(pts, frames, rep, group)
    report = nullspace_report(B, group, tau, cutoff=cutoff, reference=np.linalg.norm(T, 2))
    return {
        "kind": "heuristic",
        "half_sample_nullity": report.nullity,
        "stable": report.nullity == nullity,
    }


def pointcloud_symmetries(cloud: PointCloud, group: MatrixLieGroup,
                          action_rep: Optional[Representation] = None,
                          tau: float = DEFAULT_TAU, cutoff: Optional[float] = None,
                          stability_check: bool = True) -> SymmetryReport:
    """
    Nullspace of S with <eta, S xi> = (1/M) sum theta(eta)^T (I - P) theta(xi),
    P = U U^T the tangent projection at each sample. Reported singular values are
    sqrt of the eigenvalues of S. The relative cutoff is measured against the
    unprojected generators, so a cloud filling its ambient space reports the whole algebra.
    """
    rep = action_rep if action_rep is not None else standard_rep(group)
    if not rep.group.same_as(group):
        raise RepresentationError("action representation is over a different group")

    pts, frames = _lift(cloud, rep)
    if group.dim == 0:
        return nullspace_report(np.zeros((0, 0)), group, tau)
    B, T = _normal_generators(pts, frames, rep, group)
    heuristics: Dict[str, Any] = {}
    report = nullspace_report(B, group, tau, cutoff=cutoff, reference=np.linalg.norm(T, 2))
    if stability_check and cloud.count >= 2:
        heuristics = _half_sample_heuristic(cloud, group, rep, tau, cutoff, report.nullity)
        if not heuristics["stable"]:
            logger.warning(
                f"Point-cloud nullity changed from {heuristics['half_sample_nullity']} (half sample) "
                f"to {report.nullity}; sample density may be too low"
            )

    logger.info(f"Point-cloud symmetries under {group.name}: nullity {report.nullity} of {group.dim}")
    return replace(report, heuristics=heuristics,
                   provenance={"source": "pointcloud", "samples": cloud.count,
                               "intrinsic_dim": cloud.intrinsic_dim, "action": rep.name})


def symmetry_operator(cloud: PointCloud, group: MatrixLieGroup,
                      action_rep: Optional[Representation] = None,
                      form: str = "auto") -> np.ndarray:
    """
    The dim G x dim G matrix of S. The projection form computes
    S(xi) = proj_g((1/M) sum (I - P_z) xi z z^T) and needs an action by the group
    matrices themselves; the generic form is B^T B from the stacked normal generators.
    """
    rep = action_rep if action_rep is not None else standard_rep(group)
    pts, frames = _lift(cloud, rep)

    acts_by_matrices = (not rep.affine and rep.dim == group.ambient_dim
                        and all(np.allclose(rep.algebra_matrix(b), b) for b in group.basis))
    if form == "auto":
        form = "projection" if acts_by_matrices else "generic"

    if form == "generic":
        B, _ = _normal_generators(pts, frames, rep, group)
        return B.T @ B
    if form != "projection":
        raise ValueError(f"unknown symmetry operator form '{form}'")
    if not acts_by_matrices:
        raise RepresentationError("projection form needs the group matrices to act on the lifted points")

    M, D = pts.shape
    normal = np.eye(D)[None] - np.einsum("jdm,jem->jde", frames, frames)
    S = np.zeros((group.dim, group.dim))
    for k, xi in enumerate(group.basis):
        A = np.einsum("jde,ef,jf,jg->dg", normal, xi, pts, pts) / M
        S[:, k] = algebra_projection(group, A).coeffs
    return S


FrameSource = Union[str, np.ndarray]


def graph_frames(X: np.ndarray, Y: np.ndarray, frame_source: FrameSource,
                 k_neighbors: Optional[int] = None) -> np.ndarray:
    """
    Tangent frames (M, m + n, m) of the graph {(x, F(x))}: "estimate" (local PCA),
    Jacobians (M, n, m) giving U = [I; J], or explicit frames.
    """
    M, m = X.shape
    n = Y.shape[1]
    if isinstance(frame_source, str):
        if frame_source != "estimate":
            raise ValueError(f"unknown frame source '{frame_source}'")
        cloud = estimate_tangent_frames(PointCloud(np.hstack([X, Y]), m), k_neighbors)
        return cloud.frames

    arr = np.asarray(frame_source, dtype=float)
    if arr.shape == (M, n, m):
        eye = np.broadcast_to(np.eye(m), (M, m, m))
        return np.concatenate([eye, arr], axis=1)
    if arr.shape == (M, m + n, m):
        return arr
    raise DimensionMismatchError(
        f"frames must be Jacobians {(M, n, m)} or graph frames {(M, m + n, m)}, got {arr.shape}"
    )


def graph_symmetries(X: np.ndarray, Y: np.ndarray, pair: ActionPair,
                     frame_source: FrameSource = "estimate", k_neighbors: Optional[int] = None,
                     tau: float = DEFAULT_TAU, cutoff: Optional[float] = None) -> SymmetryReport:
    """
    Symmetries of a map known only through samples (x_j, y_j = F(x_j)).
    Uses the graph projection P = U (E U)^{-1} E with E the projection onto the inputs,
    so (I - P) theta(xi) at (x, F(x)) equals -(L_xi F)(x).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[0] != Y.shape[0]:
        raise DimensionMismatchError(f"{X.shape[0]} inputs but {Y.shape[0]} outputs")
    M, m = X.shape
    if m != pair.rep_in.dim or Y.shape[1] != pair.rep_out.dim:
        raise DimensionMismatchError(
            f"pairs live in R^{m} x R^{Y.shape[1]}, action pair expects "
            f"R^{pair.rep_in.dim} x R^{pair.rep_out.dim}"
        )

    frames = graph_frames(X, Y, frame_source, k_neighbors)
    group = pair.group
    if group.dim == 0:
        return nullspace_report(np.zeros((0, 0)), group, tau)

    EU = frames[:, :m, :]
    conds = np.linalg.cond(EU)
    if not np.all(np.isfinite(conds)) or conds.max() > FRAME_CONDITION_LIMIT:
        worst = int(np.argmax(np.where(np.isfinite(conds), conds, np.inf)))
        raise SingularFrameError(f"tangent frame at sample {worst} is not a graph over the inputs")

    normal, full = [], []
    for xi in group.basis:
        theta = np.hstack([-pair.rep_in.apply_algebra(xi, X), -pair.rep_out.apply_algebra(xi, Y)])
        coords = np.linalg.solve(EU, theta[:, :m, None])
        projected = np.einsum("jdm,jmo->jd", frames, coords)
        normal.append((theta - projected).ravel())
        full.append(theta.ravel())

    scale = 1.0 / np.sqrt(M)
    B = scale * np.stack(normal, axis=1)
    T = scale * np.stack(full, axis=1)
    source = frame_source if isinstance(frame_source, str) else "given"
    report = nullspace_report(
        B, group, tau, cutoff=cutoff, reference=float(np.linalg.norm(T, 2)),
        provenance={"source": "graph", "samples": M, "frames": source},
    )
    logger.info(f"Graph symmetries under {group.name}: nullity {report.nullity} of {group.dim}")
    return report
