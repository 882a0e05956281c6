"""Fixed-step RK4 integration and trajectory containers."""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from .spring_mass import SpringMassSystem
from ..errors import DimensionMismatchError, InvalidParameterError, NonFiniteInputError
from ..fnspace.dictionary import FunctionDictionary, evaluate_model
from ...utils.logging import get_logger

logger = get_logger("Simulate")

DIVERGENCE_NORM = 1e12

VectorField = Callable[[np.ndarray], np.ndarray]
FieldLike = Union[SpringMassSystem, VectorField, Tuple[FunctionDictionary, np.ndarray]]


def linear_field(A: np.ndarray) -> VectorField:
    A = np.asarray(A, dtype=float)
    return lambda x: A @ x


def model_field(dictionary: FunctionDictionary, coeffs) -> VectorField:
    c = dictionary.check_coeffs(coeffs)
    return lambda x: evaluate_model(dictionary, c, x)


def as_field(source: FieldLike) -> VectorField:
    if isinstance(source, SpringMassSystem):
        return linear_field(source.state_matrix)
    if isinstance(source, tuple):
        return model_field(*source)
    if callable(source):
        return source
    raise InvalidParameterError(f"cannot build a vector field from {type(source).__name__}")


@dataclass
class TrajectoryData:
    times: np.ndarray            # (S,)
    states: np.ndarray           # (S, n)
    derivatives: np.ndarray      # (S, n), the field evaluated at each state
    diverged: bool = False
    meta: Dict[str, Any] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return int(self.times.size)

    def pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.states, self.derivatives

    def to_frame(self) -> pd.DataFrame:
        n = self.states.shape[1]
        frame = pd.DataFrame(self.states, columns=[f"x{i}" for i in range(n)])
        frame.insert(0, "t", self.times)
        for i in range(n):
            frame[f"dx{i}"] = self.derivatives[:, i]
        return frame


def stack_pairs(trajectories: Sequence[TrajectoryData]) -> Tuple[np.ndarray, np.ndarray]:
    X = np.vstack([t.states for t in trajectories])
    Y = np.vstack([t.derivatives for t in trajectories])
    return X, Y


def rk4_step(f: VectorField, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(source: FieldLike, x0, duration: float, dt: float, record_every: int = 1,
             homogeneous: bool = False) -> TrajectoryData:
    """
    Integrates dx/dt = F(x) from x0 over [0, duration] with fixed RK4 steps of size dt,
    recording every `record_every` steps. With `homogeneous`, the last state coordinate
    is held at its initial value. A state that overflows stops the run and flags it.
    """
    if dt <= 0 or duration < 0 or record_every < 1:
        raise InvalidParameterError("need dt > 0, duration >= 0 and record_every >= 1")
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1:
        raise DimensionMismatchError(f"initial state must be a vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("initial state contains non-finite values")

    base = as_field(source)
    if homogeneous:
        def f(v: np.ndarray) -> np.ndarray:
            out = np.array(base(v), dtype=float)
            out[-1] = 0.0
            return out
    else:
        f = base

    if np.asarray(f(x)).shape != x.shape:
        raise DimensionMismatchError("vector field output does not match the state dimension")

    steps = int(round(duration / dt))
    times: List[float] = [0.0]
    states: List[np.ndarray] = [x.copy()]
    diverged = False
    for step in range(1, steps + 1):
        x = rk4_step(f, x, dt)
        if not np.all(np.isfinite(x)) or np.linalg.norm(x) > DIVERGENCE_NORM:
            diverged = True
            logger.warning(f"Trajectory diverged at t={step * dt:.4g}; truncating")
            break
        if step % record_every == 0:
            times.append(step * dt)
            states.append(x.copy())

    S = np.array(states)
    D = np.array([f(s) for s in S])
    meta = {"dt": dt, "record_every": record_every, "duration": duration, "homogeneous": homogeneous}
    return TrajectoryData(np.array(times), S, D, diverged, meta)


def integrated_relative_error(reference: TrajectoryData, prediction: TrajectoryData) -> float:
    """
    int |x_pred - x_ref| dt / int |x_ref| dt over the common recorded times (trapezoid rule).
    A diverged prediction counts as infinitely wrong.
    """
    if prediction.diverged:
        return float("inf")
    S = min(reference.count, prediction.count)
    if S < 2:
        return float("nan")
    t = reference.times[:S]
    err = np.linalg.norm(prediction.states[:S] - reference.states[:S], axis=1)
    ref = np.linalg.norm(reference.states[:S], axis=1)
    denom = trapezoid(ref, t)
    return float(trapezoid(err, t) / denom) if denom > 0 else float("nan")


def error_curve(reference: TrajectoryData, prediction: TrajectoryData) -> np.ndarray:
    """Relative state error at every common recorded time."""
    S = min(reference.count, prediction.count)
    err = np.linalg.norm(prediction.states[:S] - reference.states[:S], axis=1)
    ref = np.maximum(np.linalg.norm(reference.states[:S], axis=1), 1e-300)
    return err / ref
