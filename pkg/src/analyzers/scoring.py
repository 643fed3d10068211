"""
Score Normalization & Aggregation
Per-task normalizations (baseline min/max, human/random, success target) and
the suite-level aggregates (median of seed-averaged task scores, interquartile
mean of (task, seed) scores).
"""

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import trim_mean

from src.errors import InvalidInputError, InvalidReferenceError

METHODS = ("baseline", "human", "success")
AGGREGATES = ("median", "iqm")


@dataclass
class TaskScore:
    task: str
    score: float
    seed: int = 0
    random: Optional[float] = None
    human: Optional[float] = None
    target: Optional[float] = None
    baseline_min: Optional[float] = None
    baseline_max: Optional[float] = None


def _require(value: Optional[float], name: str, task: str = "") -> float:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        where = f" for task '{task}'" if task else ""
        raise InvalidReferenceError(f"Missing {name} reference{where}")
    return float(value)


def baseline_normalized(score: float, min_score: float, max_score: float) -> float:
    if not max_score > min_score:
        raise InvalidReferenceError(f"Baseline max ({max_score}) must exceed min ({min_score})")
    return (score - min_score) / (max_score - min_score)


def human_normalized(score: float, random_score: float, human_score: float) -> float:
    if human_score == random_score:
        raise InvalidReferenceError("Human and random reference scores are equal")
    return (score - random_score) / (human_score - random_score)


def success_normalized(score: float, random_ref: float, target_ref: float) -> float:
    if target_ref == random_ref:
        raise InvalidReferenceError("Target and random reference scores are equal")
    return (score - random_ref) / (target_ref - random_ref)


def normalize(row: TaskScore, method: str) -> float:
    if method == "baseline":
        return baseline_normalized(row.score, _require(row.baseline_min, "baseline_min", row.task),
                                   _require(row.baseline_max, "baseline_max", row.task))
    if method == "human":
        return human_normalized(row.score, _require(row.random, "random", row.task),
                                _require(row.human, "human", row.task))
    if method == "success":
        return success_normalized(row.score, _require(row.random, "random", row.task),
                                  _require(row.target, "target", row.task))
    raise InvalidInputError(f"Unknown normalization method '{method}'; expected one of {METHODS}")


def median_aggregate(task_scores: Mapping[str, Sequence[float]]) -> float:
    """Seed-average each task first, then take the median across tasks.

    An even number of tasks gives the mean of the two middle values.
    """
    if not task_scores:
        raise InvalidInputError("Median aggregate needs at least one task")
    means = []
    for task, scores in task_scores.items():
        if len(scores) == 0:
            raise InvalidInputError(f"Task '{task}' has no scores")
        means.append(float(np.mean(scores)))
    return float(np.median(means))


def iqm(values: Iterable[float]) -> float:
    """Mean after dropping floor(n/4) values from each end of the sorted scores."""
    scores = np.asarray(list(values), dtype=np.float64)
    if scores.size == 0:
        raise InvalidInputError("IQM needs at least one value")
    return float(trim_mean(scores, 0.25))


def group_by_task(rows: Iterable[TaskScore], method: str) -> Dict[str, List[float]]:
    grouped: Dict[str, List[float]] = OrderedDict()
    for row in rows:
        grouped.setdefault(row.task, []).append(normalize(row, method))
    return grouped


def aggregate_scores(rows: Sequence[TaskScore], method: str, aggregate: str) -> float:
    """
    Normalize per-task scores and aggregate them over the suite.

    Args:
        rows: One TaskScore per (task, seed) result.
        method: Normalization, one of METHODS.
        aggregate: "median" of seed-averaged tasks or "iqm" over every run.

    Returns:
        The aggregate normalized score.
    """
    grouped = group_by_task(rows, method)
    if aggregate == "median":
        return median_aggregate(grouped)
    if aggregate == "iqm":
        return iqm(v for scores in grouped.values() for v in scores)
    raise InvalidInputError(f"Unknown aggregate '{aggregate}'; expected one of {AGGREGATES}")
