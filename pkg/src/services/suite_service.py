"""
Experiment Suite Service
Ties together: config file → variant × activation × seed grid → train_run per
cell → per-run CSVs, final networks and diagnostic observations, combined
metrics.csv and manifest.json.

A failing run is logged and recorded in the manifest; the remaining runs still
execute and their CSVs are kept.
"""

import logging
import os
import time
from collections import OrderedDict
from dataclasses import dataclass
from multiprocessing import Pool
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from src.analyzers.saturation import empirical_collapse_from_training
from src.models.config import SuiteConfig, TrainConfig
from src.models.records import RunManifest, RunStatus, ShiftSummary, TrainRunRecord, VariantAggregate
from src.network.activations import ActivationKind
from src.parsers.checkpoint import atomic_write_text
from src.parsers.config_parser import config_hash, load_config
from src.parsers.run_csv import write_run_csv
from src.parsers.tables import dump_features
from src.rl.dqn import train_run

logger = logging.getLogger(__name__)

OUT_ENV_VAR = "HR_LAB_OUT"


@dataclass
class RunOutcome:
    config: TrainConfig
    record: Optional[TrainRunRecord] = None
    error: Optional[str] = None


def resolve_output_dir(config: SuiteConfig, override: Optional[Union[str, Path]] = None) -> Path:
    """Explicit argument, then $HR_LAB_OUT, then `[output] dir`."""
    return Path(override or os.getenv(OUT_ENV_VAR) or config.output.dir)


def _execute(config: TrainConfig) -> RunOutcome:
    logger.info("Run %s started", config.run_id)
    try:
        record = train_run(config)
    except Exception as e:
        logger.exception("Run %s failed", config.run_id)
        return RunOutcome(config=config, error=f"{type(e).__name__}: {e}")
    logger.info("Run %s finished (%d checkpoints)", config.run_id, len(record.checkpoints))
    return RunOutcome(config=config, record=record)


def _aggregate(records: List[TrainRunRecord]) -> List[VariantAggregate]:
    groups: Dict[Tuple[str, str], List[TrainRunRecord]] = OrderedDict()
    for record in records:
        if record.final is not None:
            groups.setdefault((record.variant, record.activation), []).append(record)

    aggregates = []
    for (variant, activation), group in groups.items():
        finals = [r.final for r in group]
        aggregates.append(VariantAggregate(
            variant=variant,
            activation=activation,
            runs=len(group),
            final_eval_return=float(np.mean([c.eval_return for c in finals])),
            final_return_normalized=float(np.mean([c.return_normalized for c in finals])),
            final_dormant_fraction=float(np.mean([c.dormant_fraction for c in finals])),
            final_effective_rank=float(np.mean([c.effective_rank for c in finals])),
            final_live_contrib=float(np.mean([c.live_contrib for c in finals])),
            final_dormant_contrib=float(np.mean([c.dormant_contrib for c in finals])),
        ))
    return aggregates


def _dormancy_shifts(records: List[TrainRunRecord]) -> List[ShiftSummary]:
    """Baseline → hr shift per activation, for activations where both variants completed."""
    by_key: Dict[Tuple[str, ActivationKind], List[TrainRunRecord]] = {}
    for record in records:
        if record.checkpoints:
            by_key.setdefault((record.variant, ActivationKind(record.activation)), []).append(record)

    activations = [
        act for act in (ActivationKind.TANH, ActivationKind.RELU)
        if ("baseline", act) in by_key and ("hr", act) in by_key
    ]
    if not activations:
        return []
    shifts = empirical_collapse_from_training(by_key, activations)
    return [
        ShiftSummary(
            activation=act.value,
            baseline_fraction=shift.baseline_fraction,
            hadamard_fraction=shift.hadamard_fraction,
            delta_absolute=shift.absolute,
            delta_relative=shift.relative,
            predicted_absolute=shift.predicted.absolute,
            predicted_relative=shift.predicted.relative,
            matches_prediction=shift.matches_prediction,
        )
        for act, shift in shifts.items()
    ]


def _outcomes(configs: List[TrainConfig], workers: int) -> Iterator[RunOutcome]:
    """Outcomes in grid order, each yielded as soon as it and its predecessors finish."""
    workers = min(workers, max(len(configs), 1))
    if workers <= 1:
        for config in configs:
            yield _execute(config)
        return
    with Pool(workers) as pool:
        yield from pool.imap(_execute, configs)


def run_suite(
    config: SuiteConfig,
    out_dir: Optional[Union[str, Path]] = None,
    variant: Optional[str] = None,
    seed: Optional[int] = None,
) -> RunManifest:
    started = time.perf_counter()
    out = resolve_output_dir(config, out_dir)
    configs = config.run_configs(variant=variant, seed=seed)
    logger.info("Suite '%s': %d runs -> %s", config.experiment.name, len(configs), out)

    statuses, completed = [], []
    for outcome in _outcomes(configs, config.experiment.workers):
        cfg = outcome.config
        status = RunStatus(
            run_id=cfg.run_id, variant=cfg.variant.value, activation=cfg.activation.value,
            seed=cfg.seed, status="ok" if outcome.record is not None else "failed", error=outcome.error,
        )
        if outcome.record is not None:
            csv_path = out / "runs" / f"{cfg.run_id}.csv"
            write_run_csv([outcome.record], csv_path)
            status.csv = str(csv_path.relative_to(out))
            if outcome.record.network is not None:
                network_path = out / "networks" / f"{cfg.run_id}.hrck"
                atomic_write_text(network_path, outcome.record.network)
                status.network = str(network_path.relative_to(out))
            if outcome.record.observations is not None:
                observations_path = out / "observations" / f"{cfg.run_id}.csv"
                atomic_write_text(observations_path, dump_features(outcome.record.observations))
                status.observations = str(observations_path.relative_to(out))
            completed.append(outcome.record)
        statuses.append(status)

    write_run_csv(completed, out / "metrics.csv")
    manifest = RunManifest(
        name=config.experiment.name,
        config=config.model_dump(mode="json"),
        config_hash=config_hash(config),
        seeds=list(config.experiment.seeds),
        runs=statuses,
        aggregates=_aggregate(completed),
        dormancy_shifts=_dormancy_shifts(completed),
        duration_seconds=time.perf_counter() - started,
    )
    atomic_write_text(out / "manifest.json", manifest.model_dump_json(indent=2) + "\n")
    logger.info("Suite '%s' done: %d ok, %d failed", manifest.name, len(completed), len(manifest.failed))
    return manifest


def run_experiment_suite(
    config_path: Union[str, Path],
    out_dir: Optional[Union[str, Path]] = None,
    variant: Optional[str] = None,
    seed: Optional[int] = None,
) -> RunManifest:
    return run_suite(load_config(config_path), out_dir=out_dir, variant=variant, seed=seed)
