"""Linear ε-greedy schedule."""

from dataclasses import dataclass

from src.errors import InvalidInputError


@dataclass
class EpsilonSchedule:
    start: float = 1.0
    end: float = 0.1
    decay_steps: int = 1


def epsilon_at(schedule: EpsilonSchedule, step: int) -> float:
    if step < 0:
        raise InvalidInputError(f"Step must be >= 0, got {step}")
    fraction = min(step / max(schedule.decay_steps, 1), 1.0)
    return schedule.start + fraction * (schedule.end - schedule.start)
