from pathlib import Path

import pytest
import yaml

from fp_testing.config import SimConfig, load_sim_config, parse_sim_config
from fp_testing.errors import ConfigError
from fp_testing.measure import ExactReal

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


def test_load_sim_config_with_optional_fields(tmp_path: Path):
    """Test loading a config file with optional fields specified."""
    sample = {
        "pair": 5,
        "epsilon": "1/5",
        "test": {
            "name": "bl_separated",
            "alpha": 0.01,
            "gamma": 0.15,
            "N": 20,
            "merge_into": 0,
        },
        "true_param": "sqrt2/2",
        "n_grid": [10, 100, 1000],
        "reps": 200,
        "seed": 11,
        "out": "results/pair5.csv",
        "workers": 4,
    }

    config_path = tmp_path / "pair5.yaml"
    config_path.write_text(yaml.safe_dump(sample))

    config = load_sim_config(config_path)

    # Check required fields
    assert config.pair == 5
    assert config.test.name == "bl_separated"
    assert config.n_grid == [10, 100, 1000]
    assert config.parameter == ExactReal.parse("sqrt2/2")

    # Check optional fields are loaded correctly
    assert config.test.alpha == 0.01
    assert config.test.gamma == 0.15
    assert config.test.N == 20
    assert config.test.merge_into == 0
    assert config.out == Path("results/pair5.csv")
    assert config.workers == 4

    assert isinstance(config, SimConfig)


def test_load_sim_config_with_defaults(tmp_path: Path):
    """Test loading a config file with only the required fields."""
    sample = {
        "pair": 3,
        "test": {"name": "subbasis"},
        "true_param": 0.75,
        "n_grid": [10],
    }

    config_path = tmp_path / "minimal.yaml"
    config_path.write_text(yaml.safe_dump(sample))

    config = load_sim_config(config_path)

    assert config.test.alpha == 0.05  # default
    assert config.test.max_pieces == 32  # default
    assert config.reps == 1000  # default
    assert config.seed == 0  # default
    assert config.workers == 1  # default
    assert config.out is None  # default
    assert config.parameter == ExactReal.parse("3/4")


def test_load_sim_config_missing_file(tmp_path: Path):
    with pytest.raises(FileNotFoundError, match="Config file not found"):
        load_sim_config(tmp_path / "missing.yaml")


def test_load_sim_config_invalid_yaml(tmp_path: Path):
    config_path = tmp_path / "broken.yaml"
    config_path.write_text("pair: [3\n")
    with pytest.raises(ConfigError, match="Error parsing YAML"):
        load_sim_config(config_path)


@pytest.mark.parametrize(
    "overrides,field",
    [
        ({"n_grid": [100, 10]}, "n_grid"),
        ({"reps": 0}, "reps"),
        ({"true_param": "3/2"}, "true_param"),
        ({"true_param": "half"}, "true_param"),
        ({"test": {"name": "likelihood_ratio"}}, "test.name"),
        ({"test": {"name": "subbasis", "alpha": 0}}, "test.alpha"),
        ({"pair": 7}, "pair"),
        ({"colour": "blue"}, "colour"),
    ],
)
def test_invalid_fields_are_reported(overrides, field):
    data = {"pair": 3, "test": {"name": "subbasis"}, "true_param": "1/2", "n_grid": [10]}
    data.update(overrides)
    with pytest.raises(ConfigError) as e:
        parse_sim_config(data)
    assert e.value.field == field


def test_pair_selection_rules():
    base = {"test": {"name": "bl_separated"}, "true_param": "1/2", "n_grid": [10]}
    with pytest.raises(ConfigError, match="exactly one"):
        parse_sim_config(base)
    with pytest.raises(ConfigError, match="pair 5 needs epsilon"):
        parse_sim_config({**base, "pair": 5})
    with pytest.raises(ConfigError):
        parse_sim_config({**base, "pair": 5, "epsilon": "1/2"})


def test_custom_intervals():
    config = parse_sim_config(
        {
            "custom": {
                "h0": [{"lo": 0, "hi": "1/4"}],
                "h1": [{"lo": "1/2", "hi": 1, "lo_closed": False}],
            },
            "test": {"name": "bl_separated"},
            "true_param": "0.9",
            "n_grid": [10],
        }
    )
    assert config.pair is None
    assert config.custom.h1[0].lo_closed is False

    with pytest.raises(ConfigError):
        parse_sim_config(
            {
                "custom": {"h0": [{"lo": "3/4", "hi": "1/4"}], "h1": [{"lo": "1/2", "hi": 1}]},
                "test": {"name": "bl_separated"},
                "true_param": "0.9",
                "n_grid": [10],
            }
        )


def test_config_must_be_a_mapping():
    with pytest.raises(ConfigError, match="mapping"):
        parse_sim_config(["pair", 3])


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.rglob("*.yaml")), ids=lambda p: p.name)
def test_shipped_configs_load(path: Path):
    config = load_sim_config(path)
    assert config.n_grid
