"""Turns a validated run configuration into model objects."""

from typing import List, Optional, Sequence

from ..models.errors import ConfigError, LiesymError
from ..models.fnspace.dictionary import FunctionDictionary
from ..models.fnspace.registry import dictionary_from_descriptor
from ..models.liegroup.group import MatrixLieGroup, group_from_descriptor
from ..models.liegroup.representation import Representation, representation_from_descriptor
from ..models.operators.action import ActionPair
from ..models.operators.inner_product import SampledInnerProduct, build_inner_product
from ..models.operators.lie_tensor import LieOperatorTensor, assemble_lie_tensor, default_sample_count
from ..models.promote.problems import SolverOptions
from ..utils.config import ExperimentConfig, SolverConfig


def build_group(config: ExperimentConfig) -> MatrixLieGroup:
    try:
        return group_from_descriptor(config.group)
    except (KeyError, TypeError, LiesymError) as e:
        raise ConfigError(f"group: {e}") from e


def build_dictionary(config: ExperimentConfig) -> FunctionDictionary:
    if config.dictionary is None:
        raise ConfigError(f"command '{config.command}' needs a 'dictionary' section")
    try:
        return dictionary_from_descriptor(config.dictionary)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"dictionary: {e}") from e


def build_rep(group: MatrixLieGroup, descriptor, what: str) -> Representation:
    try:
        return representation_from_descriptor(group, descriptor)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{what}: {e}") from e


def build_pair(config: ExperimentConfig, group: MatrixLieGroup) -> ActionPair:
    rep_in = build_rep(group, config.action.input, "action.input")
    rep_out = build_rep(group, config.action.output, "action.output")
    try:
        return ActionPair(rep_in, rep_out)
    except LiesymError as e:
        raise ConfigError(f"action: {e}") from e


def build_inner(config: ExperimentConfig, dictionary: FunctionDictionary, pair: ActionPair,
                samples: Optional[int] = None, stream: int = 0) -> SampledInnerProduct:
    M = samples or config.sampling.samples or default_sample_count(dictionary, pair)
    weights = list(config.sampling.weights) if config.sampling.weights is not None else None
    return build_inner_product(list(config.sampling.domain), M, config.seed + stream,
                               weights=weights, m=dictionary.input_dim)


def build_tensor(config: ExperimentConfig, dictionary: FunctionDictionary, pair: ActionPair,
                 inner: SampledInnerProduct) -> LieOperatorTensor:
    pair.check(dictionary)
    return assemble_lie_tensor(pair, dictionary, inner, workers=config.workers)


def solver_options(solver: SolverConfig) -> SolverOptions:
    return SolverOptions(solver.rho, solver.max_iter, solver.abs_tol, solver.rel_tol, solver.monotone)


def target_value(config: ExperimentConfig, key: str, default=None, required: bool = False):
    if key not in config.target:
        if required:
            raise ConfigError(f"target.{key} is required for '{config.command}'")
        return default
    return config.target[key]


def target_int(config: ExperimentConfig, key: str, default: Optional[int] = None,
               minimum: int = 0, required: bool = False) -> Optional[int]:
    value = target_value(config, key, default, required)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"target.{key} must be an integer >= {minimum}, got {value!r}")
    return value


def target_floats(config: ExperimentConfig, key: str, default: Sequence[float]) -> List[float]:
    value = target_value(config, key, list(default))
    if not isinstance(value, list) or not value or \
            not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise ConfigError(f"target.{key} must be a non-empty list of numbers, got {value!r}")
    if any(v < 0 for v in value):
        raise ConfigError(f"target.{key} must be nonnegative")
    return [float(v) for v in value]


def target_float(config: ExperimentConfig, key: str, default: float, positive: bool = True) -> float:
    value = target_value(config, key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or (positive and value <= 0):
        raise ConfigError(f"target.{key} must be a {'positive ' if positive else ''}number, got {value!r}")
    return float(value)
