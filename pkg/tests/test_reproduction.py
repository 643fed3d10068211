"""Desk-scale directional reproductions. Each run is 60k steps; enable with --runslow."""

from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

from src.analyzers.saturation import empirical_collapse_from_training
from src.network.activations import ActivationKind
from src.parsers.config_parser import load_config, parse_config
from src.rl.dqn import train_run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SEEDS = [0, 1, 2]

pytestmark = pytest.mark.slow


def _suite(name, **experiment):
    config = load_config(CONFIGS / name)
    data = config.model_dump(mode="json")
    data["experiment"].update(seeds=SEEDS, **experiment)
    return parse_config(data)


def _train_grid(config):
    records = defaultdict(list)
    for run_config in config.run_configs():
        records[(run_config.variant.value, run_config.activation)].append(train_run(run_config))
    return records


def _final_mean(records, field):
    return float(np.mean([getattr(r.checkpoints[-1], field) for r in records]))


def test_hr_shifts_dormancy_by_activation():
    records = _train_grid(_suite("dormancy_shift.toml"))
    shifts = empirical_collapse_from_training(records)

    # plain tanh has to reach saturation in this regime
    assert shifts[ActivationKind.TANH].baseline_fraction > 0
    assert shifts[ActivationKind.TANH].absolute < 0
    assert shifts[ActivationKind.RELU].absolute > 0
    assert all(shift.matches_prediction for shift in shifts.values())

    tanh_rank = _final_mean(records[("baseline", ActivationKind.TANH)], "effective_rank")
    tanh_hr_rank = _final_mean(records[("hr", ActivationKind.TANH)], "effective_rank")
    assert tanh_hr_rank >= tanh_rank


def test_hr_matches_or_beats_parameter_matched_widening():
    records = _train_grid(_suite("widen_ablation.toml", variants=["widen", "hr"]))
    widen = _final_mean(records[("widen", ActivationKind.TANH)], "eval_return")
    hadamard = _final_mean(records[("hr", ActivationKind.TANH)], "eval_return")
    assert hadamard >= widen
