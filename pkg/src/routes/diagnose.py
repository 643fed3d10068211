"""
Diagnose Routes
POST /api/diagnose - representational-health report for an uploaded checkpoint
"""

import logging

from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from fastapi.responses import JSONResponse

from src.errors import HrLabError
from src.parsers.checkpoint import parse_checkpoint
from src.parsers.tables import parse_features
from src.services.diagnose_service import diagnose_network

logger = logging.getLogger(__name__)

router = APIRouter()

MAX_FILE_SIZE = 20 * 1024 * 1024  # 20 MB


async def _read_text(upload: UploadFile, what: str) -> str:
    content_bytes = await upload.read()
    if len(content_bytes) > MAX_FILE_SIZE:
        raise HTTPException(status_code=413, detail=f"{what} exceeds 20MB limit.")
    try:
        return content_bytes.decode("utf-8")
    except UnicodeDecodeError:
        raise HTTPException(status_code=400, detail=f"{what} must be UTF-8 encoded.")


@router.post("/diagnose", summary="Diagnose the final hidden layer of a checkpoint")
async def diagnose(
    checkpoint: UploadFile = File(..., description="HRCK v1 checkpoint"),
    features: UploadFile = File(..., description="CSV observation batch, one observation per row"),
    seed: int = Form(0, description="Seed of the KDE jitter stream"),
):
    """
    **Diagnose Endpoint**

    Returns dormant fraction, dormant neurons, effective rank, the dormant bias
    injected into the Q-head and the live/dormant contribution split.
    """
    checkpoint_text = await _read_text(checkpoint, "Checkpoint")
    features_text = await _read_text(features, "Features CSV")

    try:
        net = parse_checkpoint(checkpoint_text)
        observations = parse_features(features_text)
        report = diagnose_network(net, observations, seed=seed)
    except HrLabError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        logger.exception("Diagnosis failed")
        raise HTTPException(status_code=500, detail=f"Diagnosis failed: {str(e)}")

    return JSONResponse(content=report)
