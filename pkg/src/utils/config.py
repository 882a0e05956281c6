"""
Run configuration: one JSON document per run, validated into frozen dataclasses
before any computation starts.
"""

import hashlib
import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

from ..models.errors import ConfigError
from .logging import get_logger

logger = get_logger("Config")

COMMANDS = ("discover", "enforce", "fit", "exp-polyrec", "exp-springmass")

TOP_KEYS = {"command", "seed", "group", "dictionary", "sampling", "solver",
            "tau", "cutoff", "workers", "action", "target"}
GROUP_KEYS = {"kind", "n", "factors"}
DICTIONARY_KEYS = {"type", "m", "n", "d", "min_degree", "id", "k"}
SAMPLING_KEYS = {"domain", "samples", "weights"}
SOLVER_KEYS = {"rho", "max_iter", "abs_tol", "rel_tol", "monotone"}
ACTION_KEYS = {"input", "output"}

TARGET_KEYS: Dict[str, Dict[Optional[str], set]] = {
    "discover": {
        "model": {"kind", "coefficients"},
        "pointcloud": {"kind", "points", "frames", "intrinsic_dim", "k_neighbors"},
        "graph": {"kind", "pairs", "input_dim", "k_neighbors", "jacobians"},
        "vectorfield": {"kind", "matrix", "conserved_degree"},
    },
    "enforce": {
        "function": {"kind", "verify_elements"},
        "layer": {"kind", "rep_prev", "rep_next"},
        "kernel": {"kind", "rep_x", "rep_y", "rep_v", "rep_w", "degree", "grid"},
    },
    "fit": {None: {"data", "input_dim", "gammas"}},
    "exp-polyrec": {None: {"family", "n", "ranks", "degree", "trials"}},
    "exp-springmass": {None: {"n_particles", "gammas", "l1_gammas", "trajectories",
                              "samples_per_trajectory", "dt", "substeps", "test_trajectories",
                              "test_duration", "mse_threshold"}},
}

Descriptor = Union[str, Dict[str, Any]]


@dataclass(frozen=True)
class SamplingConfig:
    domain: Tuple[float, float] = (-1.0, 1.0)
    samples: Optional[int] = None
    weights: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class SolverConfig:
    rho: float = 1.0
    max_iter: int = 5000
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    monotone: bool = False


@dataclass(frozen=True)
class ActionConfig:
    input: Descriptor = "standard"
    output: Descriptor = "trivial"


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    seed: int = 0
    group: Dict[str, Any] = field(default_factory=lambda: {"kind": "trivial", "n": 1})
    dictionary: Optional[Dict[str, Any]] = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    tau: float = 1e-8
    cutoff: Optional[float] = None
    workers: int = 4
    action: ActionConfig = field(default_factory=ActionConfig)
    target: Dict[str, Any] = field(default_factory=dict)
    base_dir: Path = field(default=Path("."), compare=False)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop("base_dir")
        return data

    def resolve(self, value: str) -> Path:
        """Paths inside a config are relative to the config file."""
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path


class _Locator:
    """Maps key paths back to line numbers of the source text."""

    def __init__(self, text: str, path: Optional[str]):
        self.text = text
        self.path = path

    def line_of(self, keys: Sequence[Union[str, int]]) -> Optional[int]:
        pos = 0
        found = False
        for key in keys:
            if isinstance(key, int):
                continue
            match = re.compile(r'"' + re.escape(key) + r'"\s*:').search(self.text, pos)
            if match is None:
                break
            pos, found = match.start(), True
        return self.text.count("\n", 0, pos) + 1 if found else None

    def error(self, message: str, keys: Sequence[Union[str, int]]) -> ConfigError:
        dotted = ".".join(str(k) for k in keys)
        text = f"{dotted}: {message}" if dotted else message
        return ConfigError(text, line=self.line_of(keys), path=self.path)


def _check_keys(data: Dict[str, Any], allowed: Iterable[str], keys: Tuple, loc: _Locator) -> None:
    for key in data:
        if key not in allowed:
            raise loc.error(f"unknown key '{key}'", keys + (key,))


def _expect(value: Any, kinds: Tuple[type, ...], keys: Tuple, loc: _Locator, what: str) -> Any:
    # bool is an int subclass; reject it wherever a number is expected
    if isinstance(value, bool) and bool not in kinds:
        raise loc.error(f"expected {what}, got {value!r}", keys)
    if not isinstance(value, kinds):
        raise loc.error(f"expected {what}, got {type(value).__name__}", keys)
    return value


def _number(data: Dict[str, Any], key: str, default: Any, keys: Tuple, loc: _Locator,
            minimum: Optional[float] = None, integer: bool = False, strict: bool = False) -> Any:
    if key not in data:
        return default
    kinds = (int,) if integer else (int, float)
    value = _expect(data[key], kinds, keys + (key,), loc, "an integer" if integer else "a number")
    if minimum is not None and (value < minimum or (strict and value == minimum)):
        bound = f"> {minimum}" if strict else f">= {minimum}"
        raise loc.error(f"must be {bound}, got {value}", keys + (key,))
    return int(value) if integer else float(value)


def _section(data: Dict[str, Any], key: str, loc: _Locator) -> Dict[str, Any]:
    value = data.get(key, {})
    return _expect(value, (dict,), (key,), loc, "an object")


def _group(value: Any, keys: Tuple, loc: _Locator) -> Dict[str, Any]:
    _expect(value, (dict,), keys, loc, "an object")
    _check_keys(value, GROUP_KEYS, keys, loc)
    kind = _expect(value.get("kind"), (str,), keys + ("kind",), loc, "a group kind")
    if kind == "product":
        factors = _expect(value.get("factors"), (list,), keys + ("factors",), loc, "a list of groups")
        return {"kind": kind, "factors": [_group(f, keys + ("factors", i), loc) for i, f in enumerate(factors)]}
    n = _number(value, "n", None, keys, loc, minimum=1, integer=True)
    if n is None:
        raise loc.error("missing key 'n'", keys)
    return {"kind": kind, "n": n}


def _descriptor(value: Any, keys: Tuple, loc: _Locator) -> Descriptor:
    return _expect(value, (str, dict), keys, loc, "a representation name or object")


def _target(command: str, data: Dict[str, Any], loc: _Locator) -> Dict[str, Any]:
    target = _expect(data.get("target", {}), (dict,), ("target",), loc, "an object")
    variants = TARGET_KEYS[command]
    if None in variants:
        _check_keys(target, variants[None], ("target",), loc)
        return dict(target)
    kind = target.get("kind")
    if kind not in variants:
        raise loc.error(f"kind must be one of {sorted(variants)}, got {kind!r}", ("target", "kind"))
    _check_keys(target, variants[kind], ("target",), loc)
    return dict(target)


def parse_config(text: str, path: Optional[str] = None, base_dir: Optional[Path] = None) -> ExperimentConfig:
    loc = _Locator(text, path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at column {e.colno}: {e.msg}", line=e.lineno, path=path) from e

    _expect(data, (dict,), (), loc, "a JSON object at the top level")
    _check_keys(data, TOP_KEYS, (), loc)

    command = data.get("command")
    if command not in COMMANDS:
        raise loc.error(f"command must be one of {list(COMMANDS)}, got {command!r}", ("command",))

    sampling = _section(data, "sampling", loc)
    _check_keys(sampling, SAMPLING_KEYS, ("sampling",), loc)
    domain = sampling.get("domain", [-1.0, 1.0])
    _expect(domain, (list,), ("sampling", "domain"), loc, "[lo, hi]")
    if len(domain) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in domain) \
            or domain[1] <= domain[0]:
        raise loc.error(f"domain must be [lo, hi] with lo < hi, got {domain}", ("sampling", "domain"))
    weights = sampling.get("weights")
    if weights is not None:
        _expect(weights, (list,), ("sampling", "weights"), loc, "a list of positive numbers")
        weights = tuple(float(w) for w in weights)

    solver = _section(data, "solver", loc)
    _check_keys(solver, SOLVER_KEYS, ("solver",), loc)
    monotone = solver.get("monotone", False)
    _expect(monotone, (bool,), ("solver", "monotone"), loc, "true or false")

    action = _section(data, "action", loc)
    _check_keys(action, ACTION_KEYS, ("action",), loc)

    dictionary = data.get("dictionary")
    if dictionary is not None:
        _expect(dictionary, (dict,), ("dictionary",), loc, "an object")
        _check_keys(dictionary, DICTIONARY_KEYS, ("dictionary",), loc)
        if dictionary.get("type") not in ("poly", "named", "fourier"):
            raise loc.error(f"type must be poly, named or fourier, got {dictionary.get('type')!r}",
                            ("dictionary", "type"))

    cutoff = data.get("cutoff")
    if cutoff is not None:
        cutoff = _number(data, "cutoff", None, (), loc, minimum=0.0)

    config = ExperimentConfig(
        command=command,
        seed=_number(data, "seed", 0, (), loc, minimum=0, integer=True),
        group=_group(data["group"], ("group",), loc) if "group" in data else {"kind": "trivial", "n": 1},
        dictionary=dict(dictionary) if dictionary is not None else None,
        sampling=SamplingConfig(
            domain=(float(domain[0]), float(domain[1])),
            samples=_number(sampling, "samples", None, ("sampling",), loc, minimum=1, integer=True),
            weights=weights,
        ),
        solver=SolverConfig(
            rho=_number(solver, "rho", 1.0, ("solver",), loc, minimum=0.0, strict=True),
            max_iter=_number(solver, "max_iter", 5000, ("solver",), loc, minimum=1, integer=True),
            abs_tol=_number(solver, "abs_tol", 1e-8, ("solver",), loc, minimum=0.0),
            rel_tol=_number(solver, "rel_tol", 1e-8, ("solver",), loc, minimum=0.0),
            monotone=monotone,
        ),
        tau=_number(data, "tau", 1e-8, (), loc, minimum=0.0),
        cutoff=cutoff,
        workers=_number(data, "workers", 4, (), loc, minimum=1, integer=True),
        action=ActionConfig(
            input=_descriptor(action.get("input", "standard"), ("action", "input"), loc),
            output=_descriptor(action.get("output", "trivial"), ("action", "output"), loc),
        ),
        target=_target(command, data, loc),
        base_dir=base_dir if base_dir is not None else Path("."),
    )
    logger.info(f"Parsed '{command}' config (seed {config.seed}, hash {config_hash(config)[:12]})")
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", path=str(path)) from e
    return parse_config(text, path=str(path), base_dir=path.parent)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON of the parsed config."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"), default=list)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
