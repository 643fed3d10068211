"""
ChainWorld
A deterministic chain of n states. RIGHT moves +1, LEFT moves −1 (clamped at
0). Reaching the last state pays +1 and ends the episode; every other step
costs −0.01. Observations are one-hot(state) followed by `noise_dim` standard
normal distractors, which give the hidden layers a non-trivial input space.
"""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.errors import ContractError, InvalidInputError, InvalidSpecError
from src.numerics.rng import Rng

LEFT = 0
RIGHT = 1
N_ACTIONS = 2
GOAL_REWARD = 1.0
STEP_PENALTY = -0.01


@dataclass
class ChainWorld:
    n_states: int = 24
    noise_dim: int = 8
    horizon: Optional[int] = None
    state: int = field(default=0, init=False)
    steps: int = field(default=0, init=False)
    done: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.n_states < 2:
            raise InvalidSpecError(f"ChainWorld needs at least 2 states, got {self.n_states}")
        if self.noise_dim < 0:
            raise InvalidSpecError(f"noise_dim must be >= 0, got {self.noise_dim}")
        if self.horizon is None:
            self.horizon = 4 * self.n_states

    @classmethod
    def from_config(cls, env_config) -> "ChainWorld":
        return cls(n_states=env_config.n_states, noise_dim=env_config.noise_dim, horizon=env_config.resolved_horizon)

    @property
    def goal(self) -> int:
        return self.n_states - 1

    @property
    def obs_dim(self) -> int:
        return self.n_states + self.noise_dim

    def observe(self, state: int, rng: Rng) -> np.ndarray:
        obs = np.zeros(self.obs_dim)
        obs[state] = 1.0
        if self.noise_dim:
            obs[self.n_states:] = rng.standard_normal(self.noise_dim)
        return obs

    def reset(self, rng: Rng) -> np.ndarray:
        self.state, self.steps, self.done = 0, 0, False
        return self.observe(self.state, rng)

    def step(self, action: int, rng: Rng) -> Tuple[np.ndarray, float, bool]:
        if self.done:
            raise ContractError("step() called on a finished episode; call reset() first")
        if action not in (LEFT, RIGHT):
            raise InvalidInputError(f"Action must be LEFT (0) or RIGHT (1), got {action!r}")

        self.state = min(self.state + 1, self.goal) if action == RIGHT else max(self.state - 1, 0)
        self.steps += 1
        if self.state == self.goal:
            reward, self.done = GOAL_REWARD, True
        else:
            reward, self.done = STEP_PENALTY, self.steps >= self.horizon
        return self.observe(self.state, rng), reward, self.done

    @property
    def terminated(self) -> bool:
        """Episode ended at the goal (as opposed to running out of horizon)."""
        return self.done and self.state == self.goal

    def sample_observations(self, n: int, rng: Rng) -> np.ndarray:
        """Observations of uniformly drawn states; used before the replay buffer fills."""
        states = rng.integers(0, self.n_states, size=n)
        return np.stack([self.observe(int(s), rng) for s in states])


def env_reset(env: ChainWorld, rng: Rng) -> np.ndarray:
    return env.reset(rng)


def env_step(env: ChainWorld, action: int, rng: Rng) -> Tuple[np.ndarray, float, bool]:
    return env.step(action, rng)


def optimal_return(env: ChainWorld, gamma: float) -> float:
    """Discounted return of always moving RIGHT from state 0."""
    n = env.n_states
    penalties = sum(gamma ** t for t in range(n - 2))
    return STEP_PENALTY * penalties + GOAL_REWARD * gamma ** (n - 2)


def value_iteration(env: ChainWorld, gamma: float, tol: float = 1e-13, max_sweeps: int = 100_000) -> np.ndarray:
    """State values of the chain (goal is terminal with value 0)."""
    n = env.n_states
    values = np.zeros(n)
    for _ in range(max_sweeps):
        updated = values.copy()
        for s in range(n - 1):
            candidates = []
            for nxt in (max(s - 1, 0), min(s + 1, n - 1)):
                if nxt == n - 1:
                    candidates.append(GOAL_REWARD)
                else:
                    candidates.append(STEP_PENALTY + gamma * values[nxt])
            updated[s] = max(candidates)
        delta = float(np.max(np.abs(updated - values)))
        values = updated
        if delta < tol:
            break
    return values
