import math
from unittest.mock import patch

import pytest

from fp_testing.config import parse_sim_config
from fp_testing.errors import ConfigError
from fp_testing.fptest import separated_error_bound, subbasis_error_bound
from fp_testing.harness import (
    build_pair,
    build_test,
    mc_standard_error,
    membership,
    non_monotone,
    run_simulation,
    sweep_consistency,
)
from fp_testing.hypotheses import Membership


def make_config(**overrides):
    data = {
        "pair": 3,
        "test": {"name": "subbasis", "alpha": 0.05},
        "true_param": "0.9",
        "n_grid": [10, 100],
        "reps": 50,
        "seed": 3,
    }
    data.update(overrides)
    return parse_sim_config(data)


def test_mc_standard_error():
    assert mc_standard_error((0.5, 0.5, 0.0), 100) == pytest.approx(0.05)
    assert mc_standard_error((1.0, 0.0, 0.0), 10) == 0.0


def test_subbasis_rows_and_bounds():
    result = run_simulation(make_config())
    assert [row.n for row in result.rows] == [10, 100]
    for row in result.rows:
        assert row.pair == "3"
        assert row.test == "subbasis"
        assert row.true_param == "9/10"
        assert row.freq0 + row.freq1 + row.freq2 == pytest.approx(1.0)
        assert row.bound == pytest.approx(subbasis_error_bound(row.n, 0.05))
    # at n = 100 every sample with at least 76 ones is rejected
    assert result.rows[-1].freq1 > 0.9
    assert result.provenance["pair"]["topology"] == ["closed", "open"]
    assert "workers" not in result.provenance["config"]


def test_single_replicate_gives_indicator_frequencies():
    result = run_simulation(make_config(reps=1))
    for row in result.rows:
        assert {row.freq0, row.freq1, row.freq2} <= {0.0, 1.0}
        assert row.mc_se == 0.0


def test_results_do_not_depend_on_worker_count():
    # more than one chunk of replicates
    serial = run_simulation(make_config(reps=300, workers=1))
    threaded = run_simulation(make_config(reps=300, workers=4))
    assert serial.rows == threaded.rows
    assert serial.provenance == threaded.provenance


def test_bl_separated_bound_is_flagged():
    cfg = make_config(pair=5, epsilon="1/5", test={"name": "bl_separated", "gamma": 0.15}, n_grid=[50])
    result = run_simulation(cfg)
    assert "bound-exponent-flagged" in result.flags
    assert result.rows[0].bound == pytest.approx(separated_error_bound(50, 0.15))
    assert result.rows[0].freq1 > 0.9


def test_untestable_pair_is_flagged():
    cfg = make_config(pair=1, test={"name": "fsigma", "max_pieces": 3}, n_grid=[20], reps=5)
    result = run_simulation(cfg)
    assert "untestable" in result.flags
    assert result.rows[0].freq1 == 0.0
    assert result.rows[0].bound is None


def test_amplify_bound_needs_epsilon():
    with_eps = make_config(test={"name": "amplify", "epsilon": 0.1}, n_grid=[100], reps=5)
    without = make_config(test={"name": "amplify"}, n_grid=[100], reps=5)
    assert run_simulation(with_eps).rows[0].bound == pytest.approx(2 * math.exp(-2 * 25 * 0.01))
    assert run_simulation(without).rows[0].bound is None


def test_shift_and_binary_wrappers():
    cfg = make_config(test={"name": "subbasis", "N": 50, "merge_into": 1}, n_grid=[10, 100], reps=20)
    result = run_simulation(cfg)
    assert result.rows[0].freq0 == 1.0
    assert result.rows[0].bound is None
    assert all(row.freq2 == 0.0 for row in result.rows)
    assert result.provenance["test"]["test"] == "to_binary"


def test_clopen_on_pair_4():
    cfg = make_config(pair=4, test={"name": "clopen"}, true_param="0.1", n_grid=[200], reps=20)
    assert run_simulation(cfg).rows[0].freq0 == 1.0


def test_missing_open_representation_is_a_config_error():
    cfg = make_config(pair=5, epsilon="1/5", test={"name": "subbasis"})
    with pytest.raises(ConfigError, match="open representation") as e:
        build_test(build_pair(cfg), cfg.test)
    assert e.value.field == "test.name"


def test_custom_pair():
    cfg = make_config(
        pair=None,
        custom={"h0": [{"lo": 0, "hi": "1/4"}], "h1": [{"lo": "3/4", "hi": 1}]},
        test={"name": "bl_separated"},
        n_grid=[100],
        reps=20,
    )
    pair = build_pair(cfg)
    assert pair.pair_id is None
    assert membership(pair, cfg.parameter) is Membership.H1
    result = run_simulation(cfg)
    assert result.rows[0].pair == "custom"
    assert result.rows[0].freq1 == 1.0


def test_overlapping_custom_pair_is_a_config_error():
    cfg = make_config(
        pair=None,
        custom={"h0": [{"lo": 0, "hi": "1/2"}], "h1": [{"lo": "1/4", "hi": 1}]},
        test={"name": "bl_separated"},
    )
    with pytest.raises(ConfigError, match="overlap") as e:
        build_pair(cfg)
    assert e.value.field == "custom"


def test_non_monotone():
    assert not non_monotone([0.1, 0.5, 0.9, 0.95], 1000)
    assert not non_monotone([0.9, 0.89], 1000)
    assert non_monotone([0.9, 0.1], 1000)


def test_sweep_consistency_curve():
    result = sweep_consistency(make_config(n_grid=[10, 100, 400], reps=100))
    assert result.correct_verdict == 1
    assert result.curve == [row.freq1 for row in result.rows]
    assert result.curve[-1] == 1.0
    assert result.provenance["membership"] == "H1"


@pytest.fixture
def neither_config():
    # p = 1/2 lies on the boundary between the two clopen halves of pair 4
    return make_config(pair=4, test={"name": "clopen"}, true_param="1/2", n_grid=[100], reps=20)


@patch("fp_testing.harness.simulation.logger")
def test_sweep_flags_parameters_outside_both_hypotheses(mock_logger, neither_config):
    result = sweep_consistency(neither_config)
    assert "neither" in result.flags
    assert result.correct_verdict == 2
    warnings = [c.args[0] for c in mock_logger.warning.call_args_list]
    assert "True distribution lies in neither hypothesis" in warnings


@patch("fp_testing.harness.simulation.non_monotone", return_value=True)
@patch("fp_testing.harness.simulation.logger")
def test_sweep_warns_on_non_monotone_curve(mock_logger, _non_monotone):
    result = sweep_consistency(make_config(n_grid=[10, 100], reps=20))
    assert "non-monotone" in result.flags
    assert "neither" not in result.flags
    mock_logger.warning.assert_called_once_with("Consistency curve is not monotone beyond noise", curve=result.curve)


@pytest.mark.parametrize("p,expected", [("0.1", 0), ("0.5", 2), ("0.8", 1)])
def test_pair_5_converges_to_each_region(p, expected):
    # gamma 0.1 leaves a margin of 0.1 around the gap between H0 and H1
    gamma, reps = 0.1, 200
    cfg = make_config(
        pair=5,
        epsilon="1/5",
        test={"name": "bl_separated", "gamma": gamma},
        true_param=p,
        n_grid=[50, 200, 800],
        reps=reps,
    )
    result = sweep_consistency(cfg)
    assert result.correct_verdict == expected
    for row, hit in zip(result.rows, result.curve):
        bound = separated_error_bound(row.n, gamma)
        assert row.bound == pytest.approx(bound)
        assert 1.0 - hit <= bound + 3.0 * math.sqrt(bound * (1.0 - bound) / reps)
    assert result.curve[-1] == 1.0
    assert "non-monotone" not in result.flags
