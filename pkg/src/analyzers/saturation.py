"""
Saturation Model
Per-neuron collapse probability of a Hadamard neuron when each branch
saturates independently with probability p:

    tanh: the product is constant only if both branches saturate  -> p²
    relu: the product is zero as soon as either branch is zero    -> 2p − p²

Includes a Monte-Carlo check of the closed forms and the comparison against
dormant fractions measured in training runs.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from src.errors import InvalidInputError
from src.network.activations import ActivationKind
from src.numerics.rng import Rng, make_rng, spawn_rngs

logger = logging.getLogger(__name__)

MC_CHUNK = 1_000_000


@dataclass
class CollapseModel:
    activation: ActivationKind
    p: float

    def __post_init__(self):
        self.activation = ActivationKind(self.activation)
        if self.activation is ActivationKind.IDENTITY:
            raise InvalidInputError("Collapse model needs a tanh or relu activation")
        if not (0.0 <= self.p <= 1.0) or math.isnan(self.p):
            raise InvalidInputError(f"Saturation probability must lie in [0, 1], got {self.p}")


@dataclass
class PredictedShift:
    baseline: float
    hadamard: float

    @property
    def absolute(self) -> float:
        return self.hadamard - self.baseline

    @property
    def relative(self) -> float:
        return relative_change(self.baseline, self.hadamard)


def relative_change(before: float, after: float) -> float:
    if before == 0.0:
        return 0.0 if after == 0.0 else math.copysign(math.inf, after)
    return (after - before) / before


def collapse_probability(model: CollapseModel) -> float:
    p = model.p
    if model.activation is ActivationKind.TANH:
        return p * p
    return 2.0 * p - p * p


def predicted_shift(model: CollapseModel) -> PredictedShift:
    return PredictedShift(baseline=model.p, hadamard=collapse_probability(model))


def _count_collapses(model: CollapseModel, trials: int, rng: Rng) -> int:
    collapsed = 0
    remaining = trials
    while remaining > 0:
        size = min(remaining, MC_CHUNK)
        saturated = rng.random((size, 2)) < model.p
        if model.activation is ActivationKind.TANH:
            collapsed += int(np.count_nonzero(saturated.all(axis=1)))
        else:
            collapsed += int(np.count_nonzero(saturated.any(axis=1)))
        remaining -= size
    return collapsed


def monte_carlo_collapse(model: CollapseModel, trials: int, rng: Rng, workers: int = 1) -> float:
    """Empirical collapse frequency of two independently saturating branches.

    With workers > 1 the trials are split over sub-streams spawned from `rng`,
    and the counts are summed, so the result does not depend on completion order.
    """
    if trials < 1:
        raise InvalidInputError(f"Monte-Carlo needs at least one trial, got {trials}")
    if workers <= 1:
        return _count_collapses(model, trials, rng) / trials

    seed = int(rng.integers(0, 2**63 - 1))
    streams = spawn_rngs(seed, workers)
    shares = [trials // workers + (1 if i < trials % workers else 0) for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        counts = list(pool.map(lambda job: _count_collapses(model, job[0], job[1]), zip(shares, streams)))
    return sum(counts) / trials


# ─────────────────────────────────────────────
# MEASURED SHIFTS FROM TRAINING RUNS
# ─────────────────────────────────────────────

@dataclass
class DormancyShift:
    activation: ActivationKind
    baseline_fraction: float
    hadamard_fraction: float
    predicted: PredictedShift

    @property
    def absolute(self) -> float:
        return self.hadamard_fraction - self.baseline_fraction

    @property
    def relative(self) -> float:
        return relative_change(self.baseline_fraction, self.hadamard_fraction)

    @property
    def matches_prediction(self) -> bool:
        return bool(np.sign(self.absolute) == np.sign(self.predicted.absolute))


def _final_dormant_fraction(records) -> float:
    finals = [record.checkpoints[-1].dormant_fraction for record in records if record.checkpoints]
    if not finals:
        raise InvalidInputError("Runs have no checkpoints")
    return float(np.mean(finals))


def empirical_collapse_from_training(
    records: Mapping[Tuple[str, ActivationKind], Sequence],
    activations: Sequence[ActivationKind] = (ActivationKind.TANH, ActivationKind.RELU),
) -> Dict[ActivationKind, DormancyShift]:
    """Seed-averaged final dormant fraction of `hr` runs against `baseline` runs.

    `records` maps (variant, activation) to the TrainRunRecords of every seed.
    """
    shifts = {}
    for activation in activations:
        activation = ActivationKind(activation)
        base = records.get(("baseline", activation)) or []
        hadamard = records.get(("hr", activation)) or []
        if not base or not hadamard:
            raise InvalidInputError(f"Need completed baseline and hr runs for {activation.value}")
        base_fraction = _final_dormant_fraction(base)
        shifts[activation] = DormancyShift(
            activation=activation,
            baseline_fraction=base_fraction,
            hadamard_fraction=_final_dormant_fraction(hadamard),
            predicted=predicted_shift(CollapseModel(activation, base_fraction)),
        )
    return shifts


def saturation_sweep(p_grid: Sequence[float], trials: int, seed: int, workers: int = 1) -> List[dict]:
    """Rows of the simulate-saturation CSV, one per (p, activation)."""
    rows = []
    for index, p in enumerate(p_grid):
        for activation in (ActivationKind.TANH, ActivationKind.RELU):
            model = CollapseModel(activation, float(p))
            shift = predicted_shift(model)
            rng = make_rng(seed, index, 0 if activation is ActivationKind.TANH else 1)
            rows.append({
                "p": float(p),
                "activation": activation.value,
                "closed_form": collapse_probability(model),
                "monte_carlo": monte_carlo_collapse(model, trials, rng, workers),
                "trials": trials,
                "delta_absolute": shift.absolute,
                "delta_relative": shift.relative,
            })
        logger.debug("p=%.3f done", p)
    return rows
