"""
Run CSV Parser - per-checkpoint training metrics

One row per checkpoint, header mandatory, UTF-8, `\\n` line endings, floats
with 17 significant digits so a read-back reproduces the written values.
Several runs may share one file (metrics.csv); rows of a run stay contiguous.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Iterable, List, Union

from src.errors import InvalidInputError
from src.models.records import Checkpoint, TrainRunRecord
from src.parsers.checkpoint import atomic_write_text, format_float

logger = logging.getLogger(__name__)

COLUMNS = [
    "run_id", "variant", "activation", "seed", "step", "eval_return",
    "return_normalized", "dormant_fraction", "effective_rank",
    "live_contrib", "dormant_contrib", "loss",
]
FLOAT_COLUMNS = ("eval_return", "return_normalized", "dormant_fraction", "live_contrib", "dormant_contrib", "loss")

PathLike = Union[str, Path]


def _row(record: TrainRunRecord, cp: Checkpoint) -> List[str]:
    return [
        record.run_id, record.variant, record.activation, str(record.seed), str(cp.step),
        format_float(cp.eval_return), format_float(cp.return_normalized),
        format_float(cp.dormant_fraction), str(cp.effective_rank),
        format_float(cp.live_contrib), format_float(cp.dormant_contrib), format_float(cp.loss),
    ]


def dump_run_csv(records: Iterable[TrainRunRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(COLUMNS)
    for record in records:
        for cp in record.checkpoints:
            writer.writerow(_row(record, cp))
    return buffer.getvalue()


def write_run_csv(records: Iterable[TrainRunRecord], path: PathLike) -> None:
    atomic_write_text(path, dump_run_csv(records))
    logger.debug("Wrote %s", path)


def parse_run_csv(text: str) -> List[TrainRunRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != COLUMNS:
        raise InvalidInputError(f"Run CSV header must be {','.join(COLUMNS)}, got {reader.fieldnames}")

    records: List[TrainRunRecord] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            checkpoint = Checkpoint(
                step=int(row["step"]),
                effective_rank=int(row["effective_rank"]),
                **{name: float(row[name]) for name in FLOAT_COLUMNS},
            )
            seed = int(row["seed"])
        except (TypeError, ValueError) as e:
            raise InvalidInputError(f"Malformed run CSV row {line_no}: {e}") from e

        if not records or records[-1].run_id != row["run_id"]:
            records.append(TrainRunRecord(
                run_id=row["run_id"], variant=row["variant"], activation=row["activation"], seed=seed,
            ))
        records[-1].append(checkpoint)
    return records


def read_run_csv(path: PathLike) -> List[TrainRunRecord]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return parse_run_csv(handle.read())
