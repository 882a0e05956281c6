"""Fundamental operators K_g and L_xi for maps between representation spaces."""

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError, GroupMismatchError, RepresentationError
from ..fnspace.dictionary import FunctionDictionary, evaluate_model, jacobian_model
from ..liegroup.group import AlgebraLike, MatrixLieGroup
from ..liegroup.representation import Representation


@dataclass(frozen=True, eq=False)
class ActionPair:
    """Input action on R^m and output action on R^n, over one group."""
    rep_in: Representation
    rep_out: Representation

    def __post_init__(self):
        if not self.rep_in.group.same_as(self.rep_out.group):
            raise GroupMismatchError("input and output representations must share one group")
        if self.rep_out.affine:
            raise RepresentationError("the output action must be linear")

    @property
    def group(self) -> MatrixLieGroup:
        return self.rep_in.group

    def check(self, dictionary: FunctionDictionary) -> None:
        if dictionary.input_dim != self.rep_in.dim or dictionary.output_dim != self.rep_out.dim:
            raise DimensionMismatchError(
                f"dictionary maps R^{dictionary.input_dim} -> R^{dictionary.output_dim}, "
                f"action pair expects R^{self.rep_in.dim} -> R^{self.rep_out.dim}"
            )

    def is_pure_translation(self) -> bool:
        """True when no algebra element acts linearly on inputs or at all on outputs."""
        for b in self.group.basis:
            lin, _ = self.rep_in.algebra_parts(b)
            if np.abs(lin).max(initial=0.0) > 0 or np.abs(self.rep_out.algebra_matrix(b)).max(initial=0.0) > 0:
                return False
        return True


def generator_vector(pair: ActionPair, xi: AlgebraLike, x: np.ndarray) -> np.ndarray:
    """Infinitesimal generator -phi(xi) x of the input action."""
    return -pair.rep_in.apply_algebra(xi, x)


def lie_derivative_eval(pair: ActionPair, dictionary: FunctionDictionary, coeffs,
                        xi: AlgebraLike, x: np.ndarray) -> np.ndarray:
    """(L_xi F)(x) = psi(xi) F(x) - (dF/dx)(x) phi(xi) x."""
    pair.check(dictionary)
    single = np.ndim(x) == 1
    pts = dictionary.check_points(x)
    F = evaluate_model(dictionary, coeffs, pts)
    J = jacobian_model(dictionary, coeffs, pts)
    flow = pair.rep_in.apply_algebra(xi, pts)
    out = F @ pair.rep_out.algebra_matrix(xi).T - np.einsum("jnl,jl->jn", J, flow)
    return out[0] if single else out


def finite_transform_eval(pair: ActionPair, dictionary: FunctionDictionary, coeffs,
                          g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(K_g F)(x) = Psi(g) F(Phi(g)^{-1} x)."""
    pair.check(dictionary)
    single = np.ndim(x) == 1
    pts = dictionary.check_points(x)
    moved = pair.rep_in.apply_inverse(g, pts)
    out = evaluate_model(dictionary, coeffs, moved) @ pair.rep_out.matrix(g).T
    return out[0] if single else out


def lie_derivative_columns(pair: ActionPair, dictionary: FunctionDictionary,
                           xi: AlgebraLike, x: np.ndarray) -> np.ndarray:
    """L_xi F_i at every point for every entry, shape (M, N, n)."""
    pts = dictionary.check_points(x)
    flow = pair.rep_in.apply_algebra(xi, pts)
    values = dictionary.evaluate(pts)
    return values @ pair.rep_out.algebra_matrix(xi).T - dictionary.directional_derivative(pts, flow)


def finite_transform_columns(pair: ActionPair, dictionary: FunctionDictionary,
                             g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """K_g F_i at every point for every entry, shape (M, N, n)."""
    pts = dictionary.check_points(x)
    moved = pair.rep_in.apply_inverse(g, pts)
    return dictionary.evaluate(moved) @ pair.rep_out.matrix(g).T


def lie_derivative_matrix(pair: ActionPair, dictionary: FunctionDictionary,
                          xi: AlgebraLike, points: np.ndarray,
                          closure_tol: float = 1e-8) -> np.ndarray:
    """
    Matrix of L_xi on a dictionary span closed under it: column i holds the
    coefficients of L_xi F_i. Solved by least squares on the given points.
    """
    pair.check(dictionary)
    E = dictionary.evaluation_matrix(points)
    cols = lie_derivative_columns(pair, dictionary, xi, points)
    rhs = cols.transpose(0, 2, 1).reshape(-1, dictionary.size)
    coeffs, *_ = np.linalg.lstsq(E, rhs, rcond=None)
    residual = np.linalg.norm(E @ coeffs - rhs)
    if residual > closure_tol * max(1.0, np.linalg.norm(rhs)):
        raise DimensionMismatchError(
            f"dictionary span is not closed under L_xi (residual {residual:.3e})"
        )
    return coeffs
