"""
Saturation Routes
GET /api/saturation - closed-form collapse probability, optional Monte-Carlo check
"""

from fastapi import APIRouter, HTTPException, Query

from src.analyzers.saturation import CollapseModel, collapse_probability, monte_carlo_collapse, predicted_shift
from src.errors import HrLabError
from src.numerics.rng import make_rng

router = APIRouter()

MAX_TRIALS = 2_000_000


@router.get("/saturation", summary="Collapse probability of a Hadamard neuron")
async def saturation(
    activation: str = Query("tanh", description="tanh or relu"),
    p: float = Query(..., description="Per-branch saturation probability in [0, 1]"),
    trials: int = Query(0, ge=0, le=MAX_TRIALS, description="Monte-Carlo trials; 0 skips the simulation"),
    seed: int = Query(0, ge=0),
):
    """
    **Saturation model**

    tanh collapses with probability p², ReLU with 2p − p². With `trials > 0`
    the closed form is checked against a seeded simulation.
    """
    try:
        model = CollapseModel(activation, p)
        shift = predicted_shift(model)
        result = {
            "activation": model.activation.value,
            "p": p,
            "closed_form": collapse_probability(model),
            "delta_absolute": shift.absolute,
            "delta_relative": shift.relative,
        }
        if trials:
            result["trials"] = trials
            result["monte_carlo"] = monte_carlo_collapse(model, trials, make_rng(seed))
    except (HrLabError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    return result
