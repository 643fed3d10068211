"""
Score Routes
POST /api/score - normalize a score table and aggregate it
"""

from typing import List, Literal, Optional

from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from src.analyzers.scoring import TaskScore
from src.errors import HrLabError
from src.services.scoring_service import score_table

router = APIRouter()

MAX_ROWS = 10_000


class ScoreRow(BaseModel):
    task: str
    score: float
    seed: int = 0
    random: Optional[float] = None
    human: Optional[float] = None
    target: Optional[float] = None
    baseline_min: Optional[float] = None
    baseline_max: Optional[float] = None


class ScoreRequest(BaseModel):
    rows: List[ScoreRow] = Field(..., min_length=1, max_length=MAX_ROWS)
    method: Literal["baseline", "human", "success"] = "success"
    aggregate: Literal["median", "iqm"] = "iqm"


@router.post("/score", summary="Normalize and aggregate per-task scores")
async def score(request: ScoreRequest):
    """
    **Score aggregation**

    Rows without `random` / `target` references are filled from the bundled
    HumanoidBench reference table when `method` is `success`.
    """
    rows = [TaskScore(**row.model_dump()) for row in request.rows]
    try:
        return score_table(rows, request.method, request.aggregate)
    except HrLabError as e:
        raise HTTPException(status_code=400, detail=str(e))
