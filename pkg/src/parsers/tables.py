"""
Table Parsers - score tables, reference scores and observation batches

Score table columns: task, score, and optionally seed, random, human, target,
baseline_min, baseline_max. Empty cells mean "not given".
Features CSV: one observation per row, comma-separated numbers; a first row
that is not numeric is taken as a header and skipped.
"""

import csv
import io
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from src.analyzers.scoring import TaskScore
from src.errors import InvalidInputError
from src.numerics.linalg import Matrix, as_matrix
from src.parsers.checkpoint import format_float

PathLike = Union[str, Path]

REFERENCE_FILE = Path(__file__).resolve().parents[2] / "data" / "humanoidbench_reference.csv"
OPTIONAL_REFERENCES = ("random", "human", "target", "baseline_min", "baseline_max")


def _optional_float(value: Optional[str], column: str, line_no: int) -> Optional[float]:
    if value is None or value.strip() == "":
        return None
    try:
        return float(value)
    except ValueError:
        raise InvalidInputError(f"Row {line_no}: column '{column}' is not a number: {value!r}")


def parse_score_table(text: str) -> List[TaskScore]:
    reader = csv.DictReader(io.StringIO(text))
    fields = reader.fieldnames or []
    missing = [c for c in ("task", "score") if c not in fields]
    if missing:
        raise InvalidInputError(f"Score table is missing columns {missing}")

    rows = []
    for line_no, row in enumerate(reader, start=2):
        score = _optional_float(row["score"], "score", line_no)
        if score is None or not row["task"]:
            raise InvalidInputError(f"Row {line_no}: task and score are required")
        seed = row.get("seed") or "0"
        try:
            seed = int(seed)
        except ValueError:
            raise InvalidInputError(f"Row {line_no}: seed is not an integer: {seed!r}")
        refs = {c: _optional_float(row.get(c), c, line_no) for c in OPTIONAL_REFERENCES}
        rows.append(TaskScore(task=row["task"].strip(), score=score, seed=seed, **refs))
    if not rows:
        raise InvalidInputError("Score table has no rows")
    return rows


def read_score_table(path: PathLike) -> List[TaskScore]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return parse_score_table(handle.read())


def load_reference_scores(path: PathLike = REFERENCE_FILE) -> Dict[str, Tuple[float, float]]:
    """task -> (random, target) from the bundled reference table."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return {
            row["task"]: (float(row["random"]), float(row["target"]))
            for row in csv.DictReader(handle)
        }


def fill_references(rows: List[TaskScore], references: Dict[str, Tuple[float, float]]) -> List[TaskScore]:
    """Fill missing random/target values by task name; given values win."""
    for row in rows:
        if row.task not in references:
            continue
        random_ref, target_ref = references[row.task]
        if row.random is None or math.isnan(row.random):
            row.random = random_ref
        if row.target is None or math.isnan(row.target):
            row.target = target_ref
    return rows


def parse_features(text: str) -> Matrix:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise InvalidInputError("Features CSV is empty")
    try:
        [float(v) for v in lines[0].split(",")]
        header = 0
    except ValueError:
        header = 1
    if len(lines) == header:
        raise InvalidInputError("Features CSV has a header but no rows")
    try:
        data = np.loadtxt(io.StringIO("\n".join(lines[header:])), delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise InvalidInputError(f"Features CSV is malformed: {e}") from e
    return as_matrix(data, "features")


def read_features(path: PathLike) -> Matrix:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_features(handle.read())


def dump_features(observations) -> str:
    data = as_matrix(observations, "features")
    return "".join(",".join(format_float(v) for v in row) + "\n" for row in data)
