"""Symmetries of dictionary models, layer stacks and vector fields, and conserved quantities."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .report import SymmetryReport, nullspace_report
from ..errors import DimensionMismatchError, GroupMismatchError, RepresentationError
from ..fnspace.dictionary import FunctionDictionary, evaluate_model, jacobian_model
from ..linalg import svd_nullspace
from ..liegroup.group import MatrixLieGroup, group_from_descriptor
from ..liegroup.representation import Representation, standard_rep
from ..operators.inner_product import SampledInnerProduct
from ..operators.lie_tensor import LieOperatorTensor
from ...utils.logging import get_logger, summarize_array

logger = get_logger("Discover")

DEFAULT_TAU = 1e-8


def _spectral_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix, 2)) if matrix.size else 0.0


def function_symmetries(tensor: LieOperatorTensor, coeffs, tau: float = DEFAULT_TAU,
                        cutoff: Optional[float] = None) -> SymmetryReport:
    """
    Nullspace of L_F = sum_i c_i L[i]. The relative cutoff is measured against
    |c| * |L|, so F = 0 reports the whole algebra.
    """
    group = group_from_descriptor(tensor.group_descriptor)
    c = np.asarray(coeffs, dtype=float).ravel()
    L_F = tensor.operator_matrix(c)
    reference = float(np.linalg.norm(c)) * tensor.operator_norm

    report = nullspace_report(
        L_F, group, tau, cutoff=cutoff, reference=reference,
        provenance={"source": "function", "dictionary": tensor.dictionary_descriptor,
                    "sampling": tensor.sampling},
    )
    logger.info(f"Function symmetries under {group.name}: nullity {report.nullity} of {group.dim}")
    logger.debug(f"Singular values of L_F: {summarize_array(report.singular_values)}")
    return report


def shared_symmetries(tensors: Sequence[LieOperatorTensor], coeffs: Sequence,
                      tau: float = DEFAULT_TAU, cutoff: Optional[float] = None) -> SymmetryReport:
    """Intersection of the symmetry algebras of several models: nullspace of the stacked L_F."""
    if len(tensors) == 0 or len(tensors) != len(coeffs):
        raise DimensionMismatchError("need one coefficient vector per tensor, and at least one tensor")

    groups = [group_from_descriptor(t.group_descriptor) for t in tensors]
    for g in groups[1:]:
        if not g.same_as(groups[0]):
            raise GroupMismatchError(f"tensors over different groups: {groups[0].name} vs {g.name}")

    blocks, scales = [], []
    for t, c in zip(tensors, coeffs):
        c = np.asarray(c, dtype=float).ravel()
        blocks.append(t.operator_matrix(c))
        scales.append(float(np.linalg.norm(c)) * t.operator_norm)

    stacked = np.vstack(blocks)
    report = nullspace_report(
        stacked, groups[0], tau, cutoff=cutoff, reference=float(np.linalg.norm(scales)),
        provenance={"source": "shared", "models": len(tensors),
                    "dictionaries": [t.dictionary_descriptor for t in tensors]},
    )
    logger.info(f"Shared symmetries of {len(tensors)} models: nullity {report.nullity}")
    return report


def layer_operator(weights: Sequence[np.ndarray], biases: Sequence[np.ndarray],
                   reps: Sequence[Representation]) -> tuple[np.ndarray, np.ndarray]:
    """
    The stacked layer operator xi -> (phi_l(xi) W_l - W_l phi_{l-1}(xi), phi_l(xi) b_l), l = 1..L,
    as its two terms: columns over the algebra basis, rows over every layer entry.
    reps[0] acts on the input, reps[l] on the output of layer l.
    """
    if len(weights) != len(biases) or len(reps) != len(weights) + 1:
        raise DimensionMismatchError("need L weights, L biases and L + 1 representations")
    group = reps[0].group
    for r in reps:
        if not r.group.same_as(group):
            raise GroupMismatchError("layer representations must share one group")
        if r.affine:
            raise RepresentationError("layer representations must be linear")

    Ws = [np.asarray(W, dtype=float) for W in weights]
    bs = [np.asarray(b, dtype=float).ravel() for b in biases]
    for l, (W, b) in enumerate(zip(Ws, bs)):
        if W.shape != (reps[l + 1].dim, reps[l].dim) or b.shape != (reps[l + 1].dim,):
            raise DimensionMismatchError(
                f"layer {l + 1}: expected W {(reps[l + 1].dim, reps[l].dim)} and b {(reps[l + 1].dim,)}, "
                f"got {W.shape} and {b.shape}"
            )

    rows = sum(W.size + b.size for W, b in zip(Ws, bs))
    left = np.zeros((rows, group.dim))
    right = np.zeros((rows, group.dim))
    for k, xi in enumerate(group.basis):
        phis = [r.algebra_matrix(xi) for r in reps]
        left[:, k] = np.concatenate([np.concatenate([(phis[l + 1] @ W).ravel(), phis[l + 1] @ b])
                                     for l, (W, b) in enumerate(zip(Ws, bs))])
        right[:, k] = np.concatenate([np.concatenate([(W @ phis[l]).ravel(), np.zeros_like(b)])
                                      for l, (W, b) in enumerate(zip(Ws, bs))])
    return left, right


def layer_symmetries(weights: Sequence[np.ndarray], biases: Sequence[np.ndarray],
                     reps: Sequence[Representation], tau: float = DEFAULT_TAU,
                     cutoff: Optional[float] = None) -> SymmetryReport:
    """Symmetries shared by every layer of a perceptron: nullspace of the stacked layer operator."""
    left, right = layer_operator(weights, biases, reps)
    group = reps[0].group
    reference = _spectral_norm(left) + _spectral_norm(right)
    report = nullspace_report(left - right, group, tau, cutoff=cutoff, reference=reference,
                              provenance={"source": "layers", "layers": len(weights)})
    logger.info(f"Layer-stack symmetries over {len(weights)} layers: nullity {report.nullity}")
    return report


def vectorfield_symmetries(field_dict: FunctionDictionary, field_coeffs, group: MatrixLieGroup,
                           action_rep: Optional[Representation] = None,
                           inner: Optional[SampledInnerProduct] = None,
                           tau: float = DEFAULT_TAU, cutoff: Optional[float] = None) -> SymmetryReport:
    """
    Symmetries of the flow of dx/dt = F(x): nullspace of xi -> [theta(xi), F]
    = phi(xi) F - (dF/dx) phi(xi) x, with phi the linear part on the field values.
    """
    rep = action_rep if action_rep is not None else standard_rep(group)
    if not rep.group.same_as(group):
        raise GroupMismatchError("action representation is over a different group")
    n = rep.dim
    if field_dict.input_dim != n or field_dict.output_dim != n:
        raise DimensionMismatchError(
            f"vector field must map R^{n} -> R^{n}, dictionary maps "
            f"R^{field_dict.input_dim} -> R^{field_dict.output_dim}"
        )
    if inner is None:
        raise DimensionMismatchError("vectorfield_symmetries needs sample points (inner)")

    pts = inner.points
    F = evaluate_model(field_dict, field_coeffs, pts)
    J = jacobian_model(field_dict, field_coeffs, pts)
    scale = inner.row_scale[:, None]
    lin = rep.linear_part()

    pushed, transported = [], []
    for xi in group.basis:
        pushed.append((scale * (F @ lin.algebra_matrix(xi).T)).ravel())
        flow = rep.apply_algebra(xi, pts)
        transported.append((scale * np.einsum("jnl,jl->jn", J, flow)).ravel())

    if group.dim == 0:
        return nullspace_report(np.zeros((0, 0)), group, tau)
    P, Q = np.stack(pushed, axis=1), np.stack(transported, axis=1)
    report = nullspace_report(
        P - Q, group, tau, cutoff=cutoff, reference=_spectral_norm(P) + _spectral_norm(Q),
        provenance={"source": "vectorfield", "dictionary": field_dict.descriptor(),
                    "sampling": inner.describe(), "action": rep.name},
    )
    logger.info(f"Vector-field symmetries under {group.name}: nullity {report.nullity} of {group.dim}")
    return report


@dataclass(frozen=True, eq=False)
class ConservedQuantities:
    dictionary: FunctionDictionary
    basis: np.ndarray                 # (N_candidates, r), orthonormal
    singular_values: np.ndarray
    threshold: float
    residuals: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    @property
    def nullity(self) -> int:
        return int(self.basis.shape[1])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dictionary": self.dictionary.descriptor(),
            "nullity": self.nullity,
            "threshold": self.threshold,
            "singular_values": self.singular_values.tolist(),
            "basis": self.basis.T.tolist(),
            "residuals": self.residuals.tolist(),
            "provenance": self.provenance,
        }


def conserved_quantities(field_dict: FunctionDictionary, field_coeffs,
                         candidate_dict: FunctionDictionary, inner: SampledInnerProduct,
                         tau: float = DEFAULT_TAU, cutoff: Optional[float] = None) -> ConservedQuantities:
    """Scalar candidates f with (df/dx) F = 0 at the sample points."""
    if candidate_dict.output_dim != 1:
        raise DimensionMismatchError("conserved-quantity candidates must be scalar functions")
    if candidate_dict.input_dim != field_dict.input_dim or field_dict.output_dim != field_dict.input_dim:
        raise DimensionMismatchError("candidates and the vector field must live on the same R^n")

    F = evaluate_model(field_dict, field_coeffs, inner.points)
    rates = candidate_dict.directional_derivative(inner.points, F)
    matrix = inner.weighted_columns(rates)
    null = svd_nullspace(matrix, tau=tau, cutoff=cutoff)

    logger.info(f"Conserved quantities: {null.nullity} of {candidate_dict.size} candidates")
    return ConservedQuantities(
        candidate_dict, null.basis, null.singular_values, null.threshold, null.residuals,
        {"field": field_dict.descriptor(), "sampling": inner.describe(), "tau": tau},
    )
