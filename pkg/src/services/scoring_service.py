"""
Scoring Service
Score table → per-row normalized scores → suite aggregate. Missing random /
target references are filled from the bundled reference table by task name.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

from src.analyzers.scoring import AGGREGATES, METHODS, TaskScore, aggregate_scores, normalize
from src.errors import InvalidInputError
from src.parsers.tables import fill_references, load_reference_scores

logger = logging.getLogger(__name__)


def score_table(
    rows: List[TaskScore],
    method: str,
    aggregate: str,
    references: Optional[Dict[str, Tuple[float, float]]] = None,
) -> Dict[str, Any]:
    if method not in METHODS:
        raise InvalidInputError(f"Unknown normalization method '{method}'; expected one of {METHODS}")
    if aggregate not in AGGREGATES:
        raise InvalidInputError(f"Unknown aggregate '{aggregate}'; expected one of {AGGREGATES}")
    if not rows:
        raise InvalidInputError("Score table has no rows")

    if method == "success":
        fill_references(rows, references if references is not None else load_reference_scores())

    value = aggregate_scores(rows, method, aggregate)
    logger.info("Scored %d rows: %s %s = %.6g", len(rows), method, aggregate, value)
    return {
        "method": method,
        "aggregate": aggregate,
        "value": value,
        "rows": [
            {"task": row.task, "seed": row.seed, "score": row.score, "normalized": normalize(row, method)}
            for row in rows
        ],
    }
