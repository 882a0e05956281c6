import json

import pytest

from src.models.errors import ConfigError
from src.utils.config import ExperimentConfig, config_hash, load_config, parse_config


def test_defaults():
    config = parse_config('{"command": "fit"}')
    assert config.seed == 0
    assert config.group == {"kind": "trivial", "n": 1}
    assert config.sampling.domain == (-1.0, 1.0)
    assert config.sampling.samples is None
    assert config.solver.rho == 1.0 and config.solver.max_iter == 5000
    assert config.tau == 1e-8 and config.cutoff is None
    assert config.action.input == "standard" and config.action.output == "trivial"


def test_full_document():
    text = json.dumps({
        "command": "discover",
        "seed": 3,
        "group": {"kind": "product", "factors": [{"kind": "SO", "n": 2}, {"kind": "T", "n": 1}]},
        "dictionary": {"type": "poly", "m": 3, "n": 1, "d": 2},
        "sampling": {"domain": [0, 2], "samples": 40},
        "solver": {"rho": 0.5, "monotone": True},
        "cutoff": 1e-6,
        "target": {"kind": "model", "coefficients": [1.0]},
    })
    config = parse_config(text)
    assert config.group["factors"][1] == {"kind": "T", "n": 1}
    assert config.sampling.domain == (0.0, 2.0)
    assert config.solver.monotone is True
    assert config.cutoff == 1e-6


def test_unknown_key_points_at_its_line():
    text = '{\n  "command": "fit",\n  "bogus": 1\n}'
    with pytest.raises(ConfigError) as info:
        parse_config(text, path="run.json")
    assert info.value.line == 3
    assert "unknown key 'bogus'" in str(info.value)
    assert str(info.value).startswith("run.json:3:")


def test_nested_value_points_at_its_line():
    text = '{\n  "command": "fit",\n  "solver": {\n    "rho": 0\n  }\n}'
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == 4
    assert "solver.rho" in info.value.message


def test_invalid_json():
    with pytest.raises(ConfigError) as info:
        parse_config('{\n  "command": "fit",\n}')
    assert info.value.line == 3


@pytest.mark.parametrize("text", [
    '{"command": "train"}',
    '{"command": "fit", "seed": true}',
    '{"command": "fit", "seed": -1}',
    '{"command": "fit", "workers": 0}',
    '{"command": "fit", "sampling": {"domain": [1, -1]}}',
    '{"command": "fit", "solver": {"monotone": "yes"}}',
    '{"command": "fit", "dictionary": {"type": "spline"}}',
    '{"command": "fit", "group": {"kind": "SO"}}',
    '{"command": "discover", "target": {"kind": "picture"}}',
    '{"command": "enforce", "target": {"kind": "layer", "rep_x": "standard"}}',
    '[1, 2]',
])
def test_rejected_documents(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_hash_ignores_layout():
    a = parse_config('{"command": "fit", "seed": 1, "tau": 1e-6}')
    b = parse_config('{\n  "tau": 0.000001,\n  "seed": 1,\n  "command": "fit"\n}')
    c = parse_config('{"command": "fit", "seed": 2, "tau": 1e-6}')
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)
    assert len(config_hash(a)) == 64


def test_load_config_resolves_relative_paths(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"command": "fit", "target": {"data": "pairs.csv"}}')
    config = load_config(path)
    assert isinstance(config, ExperimentConfig)
    assert config.resolve("pairs.csv") == tmp_path / "pairs.csv"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")
