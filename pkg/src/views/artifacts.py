"""Run directories, artifact writers and tabular input loaders."""

import json
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import __version__
from ..models.errors import ConfigError
from ..utils.config import ExperimentConfig, config_hash
from ..utils.logging import get_logger

logger = get_logger("Artifacts")

TRACKED_PACKAGES = ("numpy", "scipy", "scikit-learn", "sympy", "pandas")
CSV_FLOAT_FORMAT = "%.12g"


def package_versions() -> Dict[str, str]:
    versions = {"liesym": __version__}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def provenance(config: ExperimentConfig) -> Dict[str, Any]:
    return {
        "command": config.command,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "versions": package_versions(),
    }


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


class RunDirectory:
    """<out>/<command>-<hash[:12]>; every JSON artifact carries the run provenance."""

    def __init__(self, out_dir: Union[str, Path], config: ExperimentConfig):
        self.config = config
        self.provenance = provenance(config)
        self.path = Path(out_dir) / f"{config.command}-{self.provenance['config_hash'][:12]}"
        self.path.mkdir(parents=True, exist_ok=True)
        self._logger = get_logger("RunDirectory")

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        target = self.path / name
        body = dict(payload)
        body["provenance"] = {**self.provenance, **payload.get("provenance", {})}
        target.write_text(json.dumps(body, sort_keys=True, indent=2, default=_json_default) + "\n")
        self._logger.info(f"Wrote {target}")
        return target

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        target = self.path / name
        frame.to_csv(target, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        self._logger.info(f"Wrote {target} ({len(frame)} rows)")
        return target

    def write_matrix(self, name: str, matrix: np.ndarray) -> Path:
        matrix = np.atleast_2d(matrix)
        frame = pd.DataFrame(matrix, columns=[f"c{j}" for j in range(matrix.shape[1])])
        return self.write_csv(name, frame)


def spectrum_frame(singular_values: Sequence[float], threshold: float) -> pd.DataFrame:
    s = np.asarray(singular_values, dtype=float)
    return pd.DataFrame({
        "index": np.arange(s.size),
        "singular_value": s,
        "null": s <= threshold,
    })


def load_table(config: ExperimentConfig, value: Any, what: str,
               columns: Optional[int] = None) -> np.ndarray:
    """
    A numeric table given inline (list of rows) or as a CSV path relative to the config.
    CSV files have one row per record and no header.
    """
    if isinstance(value, str):
        path = config.resolve(value)
        try:
            frame = pd.read_csv(path, header=None, comment="#")
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ConfigError(f"cannot read {what} from {path}: {e}") from e
        try:
            table = frame.to_numpy(dtype=float)
        except ValueError as e:
            raise ConfigError(f"{what} file {path} has non-numeric entries") from e
    elif isinstance(value, list):
        try:
            table = np.atleast_2d(np.asarray(value, dtype=float))
        except ValueError as e:
            raise ConfigError(f"{what} must be a rectangular list of numbers") from e
    else:
        raise ConfigError(f"{what} must be a CSV path or an inline list")

    if columns is not None and table.shape[1] != columns:
        raise ConfigError(f"{what} needs {columns} columns, got {table.shape[1]}")
    if not np.all(np.isfinite(table)):
        raise ConfigError(f"{what} contains non-finite values")
    return table
