"""Bases of exactly equivariant models: L_xi F = 0 on a generating set and K_g F = F on each component."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..errors import DimensionMismatchError, DictionarySizeError, RepresentationError
from ..fnspace.dictionary import FunctionDictionary, evaluate_model
from ..fnspace.polynomial import PolynomialDictionary
from ..linalg import svd_nullspace
from ..liegroup.representation import Representation, direct_sum, kernel_value_rep
from ..operators.action import ActionPair, finite_transform_columns, finite_transform_eval
from ..operators.inner_product import SampledInnerProduct, build_inner_product
from ..operators.lie_tensor import LieOperatorTensor, assemble_lie_tensor, default_sample_count
from ...utils.logging import get_logger

logger = get_logger("Enforce")

DEFAULT_TAU = 1e-8
MAX_KERNEL_DEGREE = 6


@dataclass(frozen=True, eq=False)
class EquivariantBasis:
    columns: np.ndarray                      # (N, r), orthonormal
    singular_values: np.ndarray
    threshold: float
    lie_residuals: np.ndarray                # per column
    component_residuals: np.ndarray          # (n_components, r)
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return int(self.columns.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "provenance": self.provenance,
            "dim": self.dim,
            "threshold": self.threshold,
            "singular_values": self.singular_values.tolist(),
            "columns": self.columns.T.tolist(),
            "residuals": {
                "lie": self.lie_residuals.tolist(),
                "components": self.component_residuals.tolist(),
            },
        }


@dataclass(frozen=True, eq=False)
class LayerBasis:
    weights: np.ndarray          # (r, n_next, n_prev)
    biases: np.ndarray           # (r, n_next)
    singular_values: np.ndarray
    threshold: float

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "threshold": self.threshold,
            "singular_values": self.singular_values.tolist(),
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
        }


@dataclass(frozen=True, eq=False)
class KernelBasis(EquivariantBasis):
    dictionary: Optional[FunctionDictionary] = None
    pair: Optional[ActionPair] = None
    value_shape: tuple = (1, 1)


def _component_block(pair: ActionPair, dictionary: FunctionDictionary,
                     inner: SampledInnerProduct, g: np.ndarray) -> np.ndarray:
    moved = finite_transform_columns(pair, dictionary, g, inner.points)
    return inner.weighted_columns(moved - dictionary.evaluate(inner.points))


def equivariant_function_basis(tensor: LieOperatorTensor, pair: ActionPair,
                               dictionary: FunctionDictionary, inner: SampledInnerProduct,
                               tau: float = DEFAULT_TAU) -> EquivariantBasis:
    """Joint nullspace of the Lie tensor rows and the sampled (K_g - I) rows of every component."""
    pair.check(dictionary)
    N = dictionary.size
    if N == 0:
        raise DimensionMismatchError("cannot enforce symmetry on an empty dictionary")
    if tensor.size != N:
        raise DimensionMismatchError(f"tensor has {tensor.size} entries, dictionary has {N}")

    lie_rows = tensor.flattened()
    comp_blocks = [_component_block(pair, dictionary, inner, g) for g in pair.group.component_reps]
    stacked = np.vstack([lie_rows] + comp_blocks) if comp_blocks else lie_rows

    null = svd_nullspace(stacked, tau=tau)
    cols = null.basis
    lie_res = np.linalg.norm(lie_rows @ cols, axis=0) if lie_rows.size else np.zeros(cols.shape[1])
    comp_res = np.array([np.linalg.norm(B @ cols, axis=0) for B in comp_blocks]) if comp_blocks \
        else np.zeros((0, cols.shape[1]))

    logger.info(
        f"Equivariant basis for {pair.group.name}: {cols.shape[1]} of {N} directions "
        f"({len(comp_blocks)} component constraints)"
    )
    provenance = {
        "group": pair.group.descriptor(),
        "dictionary": dictionary.descriptor(),
        "sampling": tensor.sampling,
        "tau": tau,
        "actions": [pair.rep_in.name, pair.rep_out.name],
    }
    return EquivariantBasis(cols, null.singular_values, null.threshold, lie_res, comp_res, provenance)


def verify_equivariance(pair: ActionPair, dictionary: FunctionDictionary, coeffs,
                        points: np.ndarray, elements: Sequence[np.ndarray]) -> float:
    """max over elements and points of |K_g F(x) - F(x)|."""
    F = evaluate_model(dictionary, coeffs, points)
    worst = 0.0
    for g in elements:
        diff = finite_transform_eval(pair, dictionary, coeffs, g, points) - F
        worst = max(worst, float(np.abs(diff).max(initial=0.0)))
    return worst


def equivariant_layer_basis(rep_prev: Representation, rep_next: Representation,
                            tau: float = DEFAULT_TAU) -> LayerBasis:
    """
    Solutions (W, b) of phi_next W = W phi_prev, phi_next b = 0 on the algebra basis and
    Phi_next W = W Phi_prev, Phi_next b = b on each component representative.
    """
    if not rep_prev.group.same_as(rep_next.group):
        raise RepresentationError("layer representations must share one group")
    if rep_prev.affine or rep_next.affine:
        raise RepresentationError("layer representations must be linear; use homogeneous_rep for SE(n)")

    p, q = rep_prev.dim, rep_next.dim
    I_p, I_q = np.eye(p), np.eye(q)
    group = rep_prev.group

    rows: List[np.ndarray] = []
    for xi in group.basis:
        a_next, a_prev = rep_next.algebra_matrix(xi), rep_prev.algebra_matrix(xi)
        W_rows = np.kron(a_next, I_p) - np.kron(I_q, a_prev.T)
        rows.append(np.hstack([W_rows, np.zeros((q * p, q))]))
        rows.append(np.hstack([np.zeros((q, q * p)), a_next]))
    for g in group.component_reps:
        G_next, G_prev = rep_next.matrix(g), rep_prev.matrix(g)
        W_rows = np.kron(G_next, I_p) - np.kron(I_q, G_prev.T)
        rows.append(np.hstack([W_rows, np.zeros((q * p, q))]))
        rows.append(np.hstack([np.zeros((q, q * p)), G_next - I_q]))

    system = np.vstack(rows) if rows else np.zeros((0, q * p + q))
    null = svd_nullspace(system, tau=tau)
    sol = null.basis.T
    weights = sol[:, :q * p].reshape(-1, q, p)
    biases = sol[:, q * p:]
    logger.info(f"Layer basis {rep_prev.name} -> {rep_next.name}: {sol.shape[0]} directions")
    return LayerBasis(weights, biases, null.singular_values, null.threshold)


def equivariant_kernel_basis(rep_Rm: Representation, rep_Rn: Representation,
                             rep_V: Representation, rep_W: Representation, degree: int,
                             seed: int = 0, samples: Optional[int] = None,
                             domain=None, tau: float = DEFAULT_TAU) -> KernelBasis:
    """
    Polynomial kernels K(x, y), x in R^n, y in R^m, with values W (x) V*, satisfying
    L_xi K = 0 and K_g K = K for the action
      K -> det(Phi_Rm(g))^{-1} Psi_W(g) K(Phi_Rn(g)^{-1} x, Phi_Rm(g)^{-1} y) Phi_V(g)^{-1}.
    """
    if degree < 0 or degree > MAX_KERNEL_DEGREE:
        raise DictionarySizeError(f"kernel degree {degree} outside [0, {MAX_KERNEL_DEGREE}]")

    pair = ActionPair(direct_sum(rep_Rn, rep_Rm), kernel_value_rep(rep_V, rep_W, rep_Rm))
    dictionary = PolynomialDictionary(rep_Rn.dim + rep_Rm.dim, rep_W.dim * rep_V.dim, degree)

    M = samples if samples is not None else default_sample_count(dictionary, pair)
    # component constraints are sampled on the same points and need a full inner product on P_d
    M = max(M, dictionary.feature_count) if pair.group.component_reps else M
    inner = build_inner_product(domain, M, seed, m=dictionary.input_dim)
    tensor = assemble_lie_tensor(pair, dictionary, inner)
    base = equivariant_function_basis(tensor, pair, dictionary, inner, tau=tau)

    provenance = dict(base.provenance)
    provenance["kernel"] = {"degree": degree, "x_dim": rep_Rn.dim, "y_dim": rep_Rm.dim,
                            "value_shape": [rep_W.dim, rep_V.dim]}
    return KernelBasis(base.columns, base.singular_values, base.threshold, base.lie_residuals,
                       base.component_residuals, provenance, dictionary, pair, (rep_W.dim, rep_V.dim))


def kernel_evaluation_table(basis: KernelBasis, x_grid: np.ndarray, y_grid: np.ndarray) -> np.ndarray:
    """
    Rows (x, y, K_1 values..., K_r values...) for every pair of grid points.
    Each kernel contributes dim W * dim V columns.
    """
    x_grid = np.atleast_2d(np.asarray(x_grid, dtype=float))
    y_grid = np.atleast_2d(np.asarray(y_grid, dtype=float))
    xs = np.repeat(x_grid, len(y_grid), axis=0)
    ys = np.tile(y_grid, (len(x_grid), 1))
    z = np.hstack([xs, ys])
    values = [basis.dictionary.model_values(basis.columns[:, k], z) for k in range(basis.dim)]
    return np.hstack([z] + values) if values else z
