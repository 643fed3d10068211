"""
Experiment configuration schema
pydantic models for the TOML experiment file. Every section forbids unknown
keys so a typo fails loudly instead of silently running the default.
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.network.activations import ActivationKind


class Variant(str, Enum):
    BASELINE = "baseline"
    HR = "hr"
    WIDEN = "widen"
    HR2 = "hr2"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EnvConfig(StrictModel):
    n_states: int = Field(24, ge=2)
    noise_dim: int = Field(8, ge=0)
    horizon: Optional[int] = Field(None, ge=1)   # default 4 * n_states

    @property
    def resolved_horizon(self) -> int:
        return self.horizon if self.horizon is not None else 4 * self.n_states


class DiagnosticsConfig(StrictModel):
    threshold: float = Field(20.0, gt=0)
    jitter_variance: float = Field(1e-5, ge=0)
    batch_size: int = Field(512, ge=2)
    grid_points: int = Field(512, ge=2)
    rank_delta: float = Field(0.01, ge=0, lt=1)
    saturation_tolerance: float = Field(0.1, ge=0)


class TrainSettings(StrictModel):
    """Hyperparameters shared by every run of a suite (the `[train]` section)."""

    total_steps: int = Field(60_000, ge=0)
    buffer_capacity: int = Field(10_000, ge=1)
    batch_size: int = Field(32, ge=1)
    target_update_period: int = Field(200, ge=1)
    gamma: float = Field(0.99, ge=0, le=1)
    lr: float = Field(1e-4, ge=0)
    adam_eps: float = Field(1e-5, gt=0)
    learning_starts: int = Field(500, ge=0)
    exploration_fraction: float = Field(0.1, gt=0, le=1)
    epsilon_start: float = Field(1.0, ge=0, le=1)
    epsilon_end: float = Field(0.1, ge=0, le=1)
    diagnostics_period: int = Field(2_000, ge=1)
    eval_episodes: int = Field(10, ge=1)
    hidden_width: int = Field(128, ge=1)


class TrainConfig(TrainSettings):
    variant: Variant = Variant.HR
    activation: ActivationKind = ActivationKind.TANH
    with_layernorm: bool = False
    seed: int = Field(0, ge=0)
    env: EnvConfig = Field(default_factory=EnvConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)

    @field_validator("activation")
    @classmethod
    def _hidden_activation(cls, value: ActivationKind) -> ActivationKind:
        if value is ActivationKind.IDENTITY:
            raise ValueError("hidden activation must be tanh or relu")
        return value

    @property
    def run_id(self) -> str:
        ln = "-ln" if self.with_layernorm else ""
        return f"{self.variant.value}-{self.activation.value}{ln}-s{self.seed}"

    @property
    def decay_steps(self) -> int:
        return max(1, int(round(self.exploration_fraction * self.total_steps)))


class ExperimentSection(StrictModel):
    name: str = "hr-lab"
    variants: List[Variant] = Field(default_factory=lambda: [Variant.BASELINE, Variant.HR])
    activations: List[ActivationKind] = Field(default_factory=lambda: [ActivationKind.TANH])
    seeds: List[int] = Field(default_factory=lambda: [0])
    with_layernorm: bool = False
    workers: int = Field(1, ge=1)

    @field_validator("activations")
    @classmethod
    def _hidden_activations(cls, value: List[ActivationKind]) -> List[ActivationKind]:
        if ActivationKind.IDENTITY in value:
            raise ValueError("hidden activations must be tanh or relu")
        return value

    @field_validator("seeds")
    @classmethod
    def _non_negative_seeds(cls, value: List[int]) -> List[int]:
        if any(s < 0 for s in value):
            raise ValueError("seeds must be non-negative")
        return value


class OutputSection(StrictModel):
    dir: str = "out"


class SuiteConfig(StrictModel):
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    train: TrainSettings = Field(default_factory=TrainSettings)
    env: EnvConfig = Field(default_factory=EnvConfig)
    diagnostics: DiagnosticsConfig = Field(default_factory=DiagnosticsConfig)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _epsilon_order(self) -> "SuiteConfig":
        if self.train.epsilon_end > self.train.epsilon_start:
            raise ValueError("train.epsilon_end must not exceed train.epsilon_start")
        return self

    def run_configs(self, variant: Optional[str] = None, seed: Optional[int] = None) -> List[TrainConfig]:
        """The variant x activation x seed grid, in that nesting order."""
        configs = []
        for v in self.experiment.variants:
            if variant is not None and v.value != variant:
                continue
            for activation in self.experiment.activations:
                for s in self.experiment.seeds:
                    if seed is not None and s != seed:
                        continue
                    configs.append(TrainConfig(
                        **self.train.model_dump(),
                        variant=v,
                        activation=activation,
                        with_layernorm=self.experiment.with_layernorm,
                        seed=s,
                        env=self.env,
                        diagnostics=self.diagnostics,
                    ))
        return configs
