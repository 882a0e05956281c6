"""
Multi-spring-mass system under gravity, written as the linear system dx/dt = A x on the
homogeneous state x = (q^1, p^1, ..., q^np, p^np, 1).
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..errors import DimensionMismatchError
from ..fnspace.polynomial import PolynomialDictionary
from ...utils.logging import get_logger
from ...utils.seeding import make_rng

logger = get_logger("SpringMass")

STIFFNESS_RANGE = (0.1, 1.0)
GRAVITY = (0.0, 0.0, -1.0)

PLANAR_POSITION_VARIANCE = (1.0, 0.0, 1.0)
PLANAR_MOMENTUM_VARIANCE = (0.01, 0.0, 0.01)
GENERAL_POSITION_VARIANCE = 1.0
GENERAL_MOMENTUM_VARIANCE = 0.1


def position_slice(i: int, dim: int = 3) -> slice:
    return slice(2 * dim * i, 2 * dim * i + dim)


def momentum_slice(i: int, dim: int = 3) -> slice:
    return slice(2 * dim * i + dim, 2 * dim * (i + 1))


@dataclass(frozen=True, eq=False)
class SpringMassSystem:
    n_particles: int
    stiffness: np.ndarray          # (np, np), symmetric, zero diagonal
    masses: np.ndarray
    gravity: np.ndarray
    state_matrix: np.ndarray       # A, (state_dim, state_dim)
    seed: Optional[int] = None
    couplings: Optional[np.ndarray] = field(default=None, repr=False)   # B

    @property
    def dim(self) -> int:
        return int(self.gravity.size)

    @property
    def state_dim(self) -> int:
        return 2 * self.dim * self.n_particles + 1

    def derivatives(self, states: np.ndarray) -> np.ndarray:
        return np.atleast_2d(states) @ self.state_matrix.T

    def dictionary(self) -> PolynomialDictionary:
        """Linear state dictionary x -> x_b e_a, so the coefficients of A are A.ravel()."""
        return PolynomialDictionary(self.state_dim, self.state_dim, 1, min_degree=1)

    @property
    def coeffs(self) -> np.ndarray:
        return self.state_matrix.ravel()

    def describe(self) -> Dict[str, Any]:
        return {
            "n_particles": self.n_particles,
            "seed": self.seed,
            "masses": self.masses.tolist(),
            "gravity": self.gravity.tolist(),
            "stiffness": self.stiffness.tolist(),
        }


def assemble_state_matrix(stiffness: np.ndarray, masses: np.ndarray, gravity: np.ndarray) -> np.ndarray:
    K = np.asarray(stiffness, dtype=float)
    n_p = K.shape[0]
    d = gravity.size
    size = 2 * d * n_p + 1
    eye = np.eye(d)
    A = np.zeros((size, size))
    row_sums = K.sum(axis=1)
    for i in range(n_p):
        qi, pi = position_slice(i, d), momentum_slice(i, d)
        A[qi, pi] = eye / masses[i]
        for j in range(n_p):
            coupling = K[i, j] - (row_sums[i] if i == j else 0.0)
            A[pi, position_slice(j, d)] = coupling * eye
        A[pi, size - 1] = gravity
    return A


def make_spring_mass(n_particles: int, seed: int = 0, dim: int = 3) -> SpringMassSystem:
    """K_ij = sum_k (1 - delta_ij) B_ik B_jk with B_ik ~ U[0.1, 1]; unit masses."""
    if n_particles < 2:
        raise DimensionMismatchError(f"spring-mass system needs at least 2 particles, got {n_particles}")
    if dim != len(GRAVITY):
        raise DimensionMismatchError(f"gravity is defined in R^{len(GRAVITY)}, got dim={dim}")

    rng = make_rng(seed, "spring-mass")
    B = rng.uniform(*STIFFNESS_RANGE, size=(n_particles, n_particles))
    K = B @ B.T
    np.fill_diagonal(K, 0.0)

    masses = np.ones(n_particles)
    gravity = np.asarray(GRAVITY, dtype=float)
    A = assemble_state_matrix(K, masses, gravity)
    logger.info(f"Spring-mass system with {n_particles} particles (state dim {A.shape[0]}, seed {seed})")
    return SpringMassSystem(n_particles, K, masses, gravity, A, seed, B)


def _particle_state(positions: np.ndarray, momenta: np.ndarray) -> np.ndarray:
    n_p, d = positions.shape
    x = np.zeros(2 * d * n_p + 1)
    for i in range(n_p):
        x[position_slice(i, d)] = positions[i]
        x[momentum_slice(i, d)] = momenta[i]
    x[-1] = 1.0
    return x


def _draw(rng: np.random.Generator, n_particles: int, q_var: np.ndarray, p_var: np.ndarray,
          centers: Optional[Tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    d = q_var.size
    if centers is None:
        q0 = rng.standard_normal(d) * np.sqrt(q_var)
        p0 = rng.standard_normal(d) * np.sqrt(p_var)
    else:
        q0, p0 = (np.asarray(c, dtype=float) for c in centers)
    q = q0 + rng.standard_normal((n_particles, d)) * np.sqrt(q_var)
    p = p0 + rng.standard_normal((n_particles, d)) * np.sqrt(p_var)
    return _particle_state(q, p)


def planar_initial_conditions(n_particles: int, seed, *streams,
                              centers: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> np.ndarray:
    """
    q^i ~ N(q0, diag[1, 0, 1]), p^i ~ N(p0, diag[.01, 0, .01]) with fresh centers
    q0 ~ N(0, diag[1, 0, 1]), p0 ~ N(0, diag[.01, 0, .01]) unless `centers` is given.
    Every y-position and y-momentum is exactly zero.
    """
    rng = make_rng(seed, "planar-ic", *streams)
    return _draw(rng, n_particles, np.asarray(PLANAR_POSITION_VARIANCE),
                 np.asarray(PLANAR_MOMENTUM_VARIANCE), centers)


def general_initial_conditions(n_particles: int, seed, *streams,
                               centers: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> np.ndarray:
    """q^i ~ N(q0, I), p^i ~ N(p0, 0.1 I), q0 ~ N(0, I), p0 ~ N(0, 0.1 I)."""
    rng = make_rng(seed, "general-ic", *streams)
    d = len(GRAVITY)
    return _draw(rng, n_particles, np.full(d, GENERAL_POSITION_VARIANCE),
                 np.full(d, GENERAL_MOMENTUM_VARIANCE), centers)
