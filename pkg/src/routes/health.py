"""Health check routes."""
from fastapi import APIRouter
from datetime import datetime, timezone

from src.analyzers.scoring import AGGREGATES, METHODS
from src.models.config import Variant

router = APIRouter()

SERVICE_NAME = "HR Lab API"
VERSION = "1.0.0"


@router.get("/health", summary="Health check")
async def health():
    return {
        "status": "healthy",
        "service": SERVICE_NAME,
        "version": VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "variants": [v.value for v in Variant],
        "activations": ["tanh", "relu"],
        "score_methods": list(METHODS),
        "score_aggregates": list(AGGREGATES),
    }
