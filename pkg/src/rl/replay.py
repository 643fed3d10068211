"""Uniform experience replay with FIFO eviction."""

from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInputError, ShapeError
from src.numerics.rng import Rng


@dataclass
class TransitionBatch:
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    dones: np.ndarray

    def __len__(self) -> int:
        return self.obs.shape[0]


class ReplayBuffer:
    def __init__(self, capacity: int, obs_dim: int):
        if capacity < 1:
            raise InvalidInputError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.obs = np.zeros((capacity, obs_dim))
        self.next_obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, obs, action: int, reward: float, next_obs, done: bool) -> None:
        if np.shape(obs) != (self.obs_dim,) or np.shape(next_obs) != (self.obs_dim,):
            raise ShapeError(f"Transition observations must have width {self.obs_dim}")
        i = self._next
        self.obs[i] = obs
        self.next_obs[i] = next_obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.dones[i] = float(done)
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _age_order(self) -> np.ndarray:
        if self._size < self.capacity:
            return np.arange(self._size)
        return (np.arange(self.capacity) + self._next) % self.capacity

    def contents(self) -> TransitionBatch:
        """Everything stored, oldest first."""
        idx = self._age_order()
        return self._gather(idx)

    def _gather(self, idx: np.ndarray) -> TransitionBatch:
        return TransitionBatch(
            obs=self.obs[idx], actions=self.actions[idx], rewards=self.rewards[idx],
            next_obs=self.next_obs[idx], dones=self.dones[idx],
        )

    def sample(self, batch_size: int, rng: Rng) -> TransitionBatch:
        """Uniform batch, no repeats within the batch."""
        if batch_size < 1 or batch_size > self._size:
            raise InvalidInputError(f"Cannot sample {batch_size} transitions from a buffer of {self._size}")
        return self._gather(rng.choice(self._size, size=batch_size, replace=False))

    def sample_observations(self, n: int, rng: Rng) -> np.ndarray:
        n = min(n, self._size)
        return self.obs[rng.choice(self._size, size=n, replace=False)]
