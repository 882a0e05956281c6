import json

import numpy as np
import pandas as pd
import pytest

from src.models.errors import ConfigError, DimensionMismatchError, SingularFrameError, SingularGramError
from src.models.fnspace import PolynomialDictionary
from src.utils.config import config_hash, load_config
from src.views.cli import build_parser, exit_code_for, main


def _write(tmp_path, body):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(body))
    return path


def _fit_config():
    dictionary = PolynomialDictionary(2, 1, 2)
    rng = np.random.default_rng(5)
    X = rng.uniform(-1.0, 1.0, (20, 2))
    y = 1.0 + np.sum(X ** 2, axis=1)
    return {
        "command": "fit",
        "group": {"kind": "SO", "n": 2},
        "dictionary": dictionary.descriptor(),
        "workers": 1,
        "target": {"data": np.column_stack([X, y]).tolist(), "gammas": [0.0]},
    }


def test_parser_requires_config_and_out():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["fit"])
    args = build_parser().parse_args(["discover", "--config", "a.json", "--out", "runs"])
    assert args.command == "discover"


def test_exit_codes_by_error_kind():
    assert exit_code_for(ConfigError("bad")) == 2
    assert exit_code_for(DimensionMismatchError("bad")) == 2
    assert exit_code_for(SingularGramError("bad")) == 3
    assert exit_code_for(SingularFrameError("bad")) == 3


def test_fit_run_writes_artifacts(tmp_path, capsys):
    path = _write(tmp_path, _fit_config())
    out = tmp_path / "runs"
    assert main(["fit", "--config", str(path), "--out", str(out)]) == 0

    run_dir = out / f"fit-{config_hash(load_config(path))[:12]}"
    assert capsys.readouterr().out.strip() == str(run_dir)
    body = json.loads((run_dir / "fit.json").read_text())
    assert body["provenance"]["config_hash"] == config_hash(load_config(path))
    assert body["samples"] == 20
    assert body["fits"][0]["report"]["nullity"] == 1
    sweep = pd.read_csv(run_dir / "sweep.csv")
    assert list(sweep.columns) == ["gamma", "mse", "penalty", "converged", "iterations", "nullity"]
    assert (run_dir / "run.log").exists()


def test_command_must_match_config(tmp_path):
    path = _write(tmp_path, _fit_config())
    assert main(["discover", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_invalid_config_exits_with_two(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text('{"command": "fit", "seed": "zero"}')
    assert main(["fit", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


def test_missing_dictionary_exits_with_two(tmp_path):
    body = _fit_config()
    del body["dictionary"]
    assert main(["fit", "--config", str(_write(tmp_path, body)), "--out", str(tmp_path)]) == 2


def test_numerical_failure_exits_with_three(tmp_path):
    # every sample sits above x = 0, so the estimated tangent lines are vertical
    pairs = [[0.0, float(k)] for k in range(6)]
    body = {
        "command": "discover",
        "group": {"kind": "T", "n": 1},
        "workers": 1,
        "target": {"kind": "graph", "pairs": pairs, "input_dim": 1, "k_neighbors": 3},
    }
    assert main(["discover", "--config", str(_write(tmp_path, body)), "--out", str(tmp_path)]) == 3
