"""Random structured polynomials used by the recovery experiments."""

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .polynomial import PolynomialDictionary, graded_multi_indices
from ..errors import DimensionMismatchError


@dataclass(frozen=True)
class StructuredTarget:
    family: str                 # "lin" or "rad"
    dictionary: PolynomialDictionary
    coeffs: np.ndarray
    directions: np.ndarray      # u_k as columns (lin) or centers c_k as rows (rad)
    phi_coeffs: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.directions.shape[1] if self.family == "lin" else self.directions.shape[0])


def _expand(dictionary: PolynomialDictionary, features, phi_degree: int,
            phi_coeffs: np.ndarray) -> np.ndarray:
    xs = sp.symbols(f"x0:{dictionary.input_dim}")
    feats = [f(xs) for f in features]
    powers = graded_multi_indices(len(feats), phi_degree)

    expr = sp.Integer(0)
    for a, beta in zip(phi_coeffs, powers):
        term = sp.Float(float(a))
        for f, b in zip(feats, beta):
            term = term * f ** int(b)
        expr += term

    coeffs = np.zeros(dictionary.size)
    poly = sp.Poly(sp.expand(expr), *xs)
    for monom, value in poly.terms():
        coeffs[dictionary.index_of(monom)] = float(value)
    return coeffs


def linear_features_target(n: int, r: int, degree: int, rng: np.random.Generator) -> StructuredTarget:
    """F(x) = phi(u_1.x, ..., u_r.x) with orthonormal u_k and phi coefficients in U[0, 1]."""
    if not 1 <= r <= n:
        raise DimensionMismatchError(f"need 1 <= r <= n, got r={r}, n={n}")
    U, _, _ = np.linalg.svd(rng.standard_normal((n, r)), full_matrices=False)
    phi = rng.uniform(0.0, 1.0, len(graded_multi_indices(r, degree)))

    dictionary = PolynomialDictionary(n, 1, degree)
    features = [lambda xs, k=k: sum(float(U[i, k]) * xs[i] for i in range(n)) for k in range(r)]
    coeffs = _expand(dictionary, features, degree, phi)
    return StructuredTarget("lin", dictionary, coeffs, U, phi)


def radial_features_target(n: int, r: int, phi_degree: int, rng: np.random.Generator) -> StructuredTarget:
    """F(x) = phi(|x - c_1|^2, ..., |x - c_r|^2) with c_k in U[-1, 1]^n; degree 2 * phi_degree."""
    if not 1 <= r <= n:
        raise DimensionMismatchError(f"need 1 <= r <= n, got r={r}, n={n}")
    centers = rng.uniform(-1.0, 1.0, (r, n))
    phi = rng.uniform(0.0, 1.0, len(graded_multi_indices(r, phi_degree)))

    dictionary = PolynomialDictionary(n, 1, 2 * phi_degree)
    features = [
        lambda xs, k=k: sum((xs[i] - float(centers[k, i])) ** 2 for i in range(n))
        for k in range(r)
    ]
    coeffs = _expand(dictionary, features, phi_degree, phi)
    return StructuredTarget("rad", dictionary, coeffs, centers, phi)
