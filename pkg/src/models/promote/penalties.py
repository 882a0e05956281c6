"""Convex symmetry-promoting penalties."""

from typing import Sequence

import numpy as np
from scipy.linalg import svd

from ..discover.functions import layer_operator
from ..fnspace.dictionary import FunctionDictionary, evaluate_model
from ..liegroup.representation import Representation
from ..operators.action import ActionPair, finite_transform_eval
from ..operators.inner_product import SampledInnerProduct
from ..operators.lie_tensor import LieOperatorTensor

RANK_TOL = 1e-12


def nuclear_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(svd(matrix, compute_uv=False).sum())


def singular_value_threshold(matrix: np.ndarray, threshold: float) -> np.ndarray:
    """Proximal operator of threshold * nuclear norm."""
    if matrix.size == 0:
        return matrix.copy()
    U, s, Vt = svd(matrix, full_matrices=False)
    return (U * np.maximum(s - threshold, 0.0)) @ Vt


def nuclear_penalty(tensor: LieOperatorTensor, coeffs) -> tuple[float, np.ndarray]:
    """
    Sum of singular values of L_F = sum_i c_i L[i], and the subgradient
    obtained by applying the adjoint of c -> L_F to U V^T.
    """
    L_F = tensor.operator_matrix(coeffs)
    if L_F.size == 0:
        return 0.0, np.zeros(tensor.size)
    U, s, Vt = svd(L_F, full_matrices=False)
    keep = s > RANK_TOL * max(1.0, s[0] if s.size else 0.0)
    direction = U[:, keep] @ Vt[keep]
    subgradient = tensor.flattened().T @ direction.ravel()
    return float(s.sum()), subgradient


def discrete_penalty(dictionary: FunctionDictionary, coeffs, group_elements: Sequence[np.ndarray],
                     pair: ActionPair, inner: SampledInnerProduct) -> float:
    """sum_g |K_g F - F| in the sampled norm."""
    F = evaluate_model(dictionary, coeffs, inner.points)
    total = 0.0
    for g in group_elements:
        total += inner.norm(finite_transform_eval(pair, dictionary, coeffs, g, inner.points) - F)
    return total


def layer_nuclear_penalty(weights: Sequence[np.ndarray], biases: Sequence[np.ndarray],
                          reps: Sequence[Representation]) -> float:
    left, right = layer_operator(weights, biases, reps)
    return nuclear_norm(left - right)


def layer_discrete_penalty(weights: Sequence[np.ndarray], biases: Sequence[np.ndarray],
                           reps: Sequence[Representation],
                           group_elements: Sequence[np.ndarray]) -> float:
    """
    sum_g sqrt(sum_l |Phi_l(g) W_l - W_l Phi_{l-1}(g)|^2 + |Phi_l(g) b_l - b_l|^2):
    one group-sparsity term per element, grouped over every layer.
    """
    total = 0.0
    for g in group_elements:
        squared = 0.0
        for l, (W, b) in enumerate(zip(weights, biases)):
            G_in, G_out = reps[l].matrix(g), reps[l + 1].matrix(g)
            W = np.asarray(W, dtype=float)
            b = np.asarray(b, dtype=float).ravel()
            squared += np.sum((G_out @ W - W @ G_in) ** 2) + np.sum((G_out @ b - b) ** 2)
        total += float(np.sqrt(squared))
    return total
