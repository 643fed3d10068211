"""Saturation sweep: p-grid parsing, closed form vs Monte-Carlo table, CSV output."""

import csv
import io
import logging
from typing import List

import numpy as np

from src.analyzers.saturation import saturation_sweep
from src.errors import InvalidInputError

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["p", "activation", "closed_form", "monte_carlo", "trials", "delta_absolute", "delta_relative"]


def parse_p_grid(spec: str) -> List[float]:
    """`start:stop:step` (stop inclusive) or a comma-separated list."""
    try:
        if ":" in spec:
            start, stop, step = (float(part) for part in spec.split(":"))
            if step <= 0 or stop < start:
                raise InvalidInputError(f"p-grid '{spec}' needs step > 0 and stop >= start")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            grid = [round(start + i * step, 12) for i in range(count)]
        else:
            grid = [float(part) for part in spec.split(",") if part.strip()]
    except ValueError:
        raise InvalidInputError(f"Malformed p-grid '{spec}'")
    if not grid:
        raise InvalidInputError("p-grid is empty")
    bad = [p for p in grid if not 0.0 <= p <= 1.0]
    if bad:
        raise InvalidInputError(f"Saturation probabilities must lie in [0, 1], got {bad}")
    return grid


def run_saturation_sweep(p_grid: List[float], trials: int, seed: int = 0, workers: int = 1) -> List[dict]:
    logger.info("Saturation sweep: %d probabilities x %d trials", len(p_grid), trials)
    return saturation_sweep(p_grid, trials, seed, workers)


def dump_sweep_csv(rows: List[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (format(row[k], ".17g") if isinstance(row[k], float) else row[k]) for k in SWEEP_COLUMNS})
    return buffer.getvalue()
