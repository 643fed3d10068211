"""
Run records
TrainRunRecord is the time series a training run produces; RunManifest is the
suite-level summary written once after every run has finished.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from src.errors import ContractError


@dataclass
class Checkpoint:
    step: int
    eval_return: float
    return_normalized: float
    dormant_fraction: float
    effective_rank: int
    live_contrib: float
    dormant_contrib: float
    loss: float


@dataclass
class TrainRunRecord:
    run_id: str
    variant: str
    activation: str
    seed: int
    checkpoints: List[Checkpoint] = field(default_factory=list)
    # final network (HRCK text) and the observations of its last diagnostic
    network: Optional[str] = field(default=None, repr=False, compare=False)
    observations: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def append(self, checkpoint: Checkpoint) -> None:
        if self.checkpoints and checkpoint.step <= self.checkpoints[-1].step:
            raise ContractError(f"Checkpoint step {checkpoint.step} does not follow {self.checkpoints[-1].step}")
        self.checkpoints.append(checkpoint)

    @property
    def final(self) -> Optional[Checkpoint]:
        return self.checkpoints[-1] if self.checkpoints else None


class RunStatus(BaseModel):
    run_id: str
    variant: str
    activation: str
    seed: int
    status: str                          # "ok" | "failed"
    csv: Optional[str] = None
    network: Optional[str] = None
    observations: Optional[str] = None
    error: Optional[str] = None


class VariantAggregate(BaseModel):
    variant: str
    activation: str
    runs: int
    final_eval_return: float
    final_return_normalized: float
    final_dormant_fraction: float
    final_effective_rank: float
    final_live_contrib: float
    final_dormant_contrib: float


class ShiftSummary(BaseModel):
    activation: str
    baseline_fraction: float
    hadamard_fraction: float
    delta_absolute: float
    delta_relative: float
    predicted_absolute: float
    predicted_relative: float
    matches_prediction: bool


class RunManifest(BaseModel):
    name: str
    config: Dict
    config_hash: str
    seeds: List[int]
    runs: List[RunStatus] = Field(default_factory=list)
    aggregates: List[VariantAggregate] = Field(default_factory=list)
    dormancy_shifts: List[ShiftSummary] = Field(default_factory=list)
    duration_seconds: float = 0.0

    @property
    def failed(self) -> List[RunStatus]:
        return [r for r in self.runs if r.status != "ok"]
