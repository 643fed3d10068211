"""
DQN Trainer
ε-greedy collection on ChainWorld, uniform replay, MSE TD loss against a
periodically synced target network, Adam updates. Every diagnostics period the
final hidden layer is checked on a replay sample: dormant fraction, effective
rank and the live/dormant split of the Q-values.

Each concern draws from its own seeded stream (init, env, exploration, replay,
and per-checkpoint evaluation/diagnostic samples), so a run is reproducible
from its seed and changing the diagnostics period does not change training.
"""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

from src.analyzers.bias import ContributionSplit, contribution_split
from src.analyzers.dormancy import DormancyReport, classify_dormant
from src.analyzers.rank import effective_rank
from src.errors import DivergenceError, ShapeError
from src.models.config import DiagnosticsConfig, TrainConfig
from src.models.records import Checkpoint, TrainRunRecord
from src.network.activations import ActivationKind
from src.network.model import Network
from src.network.optim import AdamState, adam_step
from src.parsers.checkpoint import dump_checkpoint
from src.numerics.rng import Rng, make_rng
from src.rl.chain_world import N_ACTIONS, ChainWorld, optimal_return
from src.rl.replay import ReplayBuffer, TransitionBatch
from src.rl.schedule import EpsilonSchedule, epsilon_at
from src.rl.variants import INIT_STREAM, build_variant

logger = logging.getLogger(__name__)

ENV_STREAM = 2
EXPLORE_STREAM = 3
REPLAY_STREAM = 4
EVAL_STREAM = 5
SAMPLE_STREAM = 6
JITTER_STREAM = 7


def greedy_action(net: Network, obs: np.ndarray) -> int:
    q = net.forward(obs).output
    return int(np.argmax(q))


def td_targets(batch: TransitionBatch, target_net: Network, gamma: float) -> np.ndarray:
    """y = r + γ · max_a Q_target(s', a) · (1 − done)."""
    q_next = target_net.forward(batch.next_obs).output
    if q_next.ndim != 2 or q_next.shape[0] != len(batch.rewards):
        raise ShapeError(f"Target Q-values of shape {q_next.shape} do not match a batch of {len(batch.rewards)}")
    return batch.rewards + gamma * q_next.max(axis=1) * (1.0 - batch.dones)


def evaluate_policy(net: Network, env: ChainWorld, gamma: float, episodes: int, rng: Rng) -> float:
    """Mean discounted return of the greedy policy."""
    returns = []
    for _ in range(episodes):
        obs = env.reset(rng)
        total, discount, done = 0.0, 1.0, False
        while not done:
            obs, reward, done = env.step(greedy_action(net, obs), rng)
            total += discount * reward
            discount *= gamma
        returns.append(total)
    return float(np.mean(returns))


@dataclass
class RepresentationSnapshot:
    dormancy: DormancyReport
    effective_rank: int
    split: ContributionSplit


def diagnose_representation(
    net: Network,
    observations: np.ndarray,
    activation: ActivationKind,
    settings: DiagnosticsConfig,
    jitter_rng: Rng,
) -> RepresentationSnapshot:
    """Dormancy, rank and Q-value split of the final hidden layer on one observation batch."""
    features = net.forward(observations).activations[-1]
    dormancy = classify_dormant(
        features, activation, jitter_rng,
        threshold=settings.threshold,
        jitter_variance=settings.jitter_variance,
        grid_points=settings.grid_points,
        saturation_tolerance=settings.saturation_tolerance,
    )
    return RepresentationSnapshot(
        dormancy=dormancy,
        effective_rank=effective_rank(features, settings.rank_delta),
        split=contribution_split(net, observations, dormancy),
    )


def _update(online: Network, target: Network, adam: AdamState, batch: TransitionBatch, gamma: float, step: int) -> float:
    y = td_targets(batch, target, gamma)
    result = online.forward(batch.obs)
    rows = np.arange(len(batch))
    td_error = result.output[rows, batch.actions] - y
    loss = float(np.mean(td_error ** 2))
    if not math.isfinite(loss):
        raise DivergenceError(step, loss)

    grad_output = np.zeros_like(result.output)
    grad_output[rows, batch.actions] = 2.0 * td_error / len(batch)
    _, grads = online.backward(result.caches, grad_output)
    adam_step(adam, online.parameters(), grads)
    online.mark_updated()
    return loss


class DqnRun:
    """State of one training run; `train_run` is the one-call entry point."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self.env = ChainWorld.from_config(config.env)
        self.eval_env = ChainWorld.from_config(config.env)
        self.online = build_variant(config, make_rng(config.seed, INIT_STREAM))
        self.target = self.online.clone()
        self.adam = AdamState.for_parameters(self.online.parameters(), lr=config.lr, eps=config.adam_eps)
        self.buffer = ReplayBuffer(config.buffer_capacity, self.env.obs_dim)
        self.schedule = EpsilonSchedule(config.epsilon_start, config.epsilon_end, config.decay_steps)
        self.env_rng = make_rng(config.seed, ENV_STREAM)
        self.explore_rng = make_rng(config.seed, EXPLORE_STREAM)
        self.replay_rng = make_rng(config.seed, REPLAY_STREAM)
        self.optimum = optimal_return(self.env, config.gamma)
        self.record = TrainRunRecord(
            run_id=config.run_id,
            variant=config.variant.value,
            activation=config.activation.value,
            seed=config.seed,
        )

    def diagnostic_batch(self, step: int) -> np.ndarray:
        rng = make_rng(self.config.seed, SAMPLE_STREAM, step)
        size = self.config.diagnostics.batch_size
        if len(self.buffer) >= 2:
            return self.buffer.sample_observations(size, rng)
        return self.eval_env.sample_observations(size, rng)

    def checkpoint(self, step: int, losses: List[float]) -> Checkpoint:
        cfg = self.config
        snapshot = diagnose_representation(
            self.online, self.diagnostic_batch(step), cfg.activation, cfg.diagnostics,
            make_rng(cfg.seed, JITTER_STREAM),
        )
        eval_return = evaluate_policy(self.online, self.eval_env, cfg.gamma, cfg.eval_episodes,
                                      make_rng(cfg.seed, EVAL_STREAM, step))
        checkpoint = Checkpoint(
            step=step,
            eval_return=eval_return,
            return_normalized=eval_return / self.optimum if self.optimum != 0 else math.nan,
            dormant_fraction=snapshot.dormancy.dormant_fraction,
            effective_rank=snapshot.effective_rank,
            live_contrib=snapshot.split.live,
            dormant_contrib=snapshot.split.dormant,
            loss=float(np.mean(losses)) if losses else math.nan,
        )
        logger.info(
            "%s step=%d return=%.4f dormant=%.3f rank=%d loss=%.5g",
            cfg.run_id, step, eval_return, checkpoint.dormant_fraction, checkpoint.effective_rank, checkpoint.loss,
        )
        return checkpoint

    def act(self, obs: np.ndarray, step: int) -> int:
        if self.explore_rng.random() < epsilon_at(self.schedule, step):
            return int(self.explore_rng.integers(N_ACTIONS))
        return greedy_action(self.online, obs)

    def run(self) -> TrainRunRecord:
        cfg = self.config
        self.record.append(self.checkpoint(0, []))
        losses: List[float] = []
        obs = self.env.reset(self.env_rng)

        for step in range(1, cfg.total_steps + 1):
            action = self.act(obs, step - 1)
            next_obs, reward, done = self.env.step(action, self.env_rng)
            # running out of horizon is a truncation: the target still bootstraps
            self.buffer.add(obs, action, reward, next_obs, self.env.terminated)
            obs = self.env.reset(self.env_rng) if done else next_obs

            if step > cfg.learning_starts and len(self.buffer) >= cfg.batch_size:
                batch = self.buffer.sample(cfg.batch_size, self.replay_rng)
                losses.append(_update(self.online, self.target, self.adam, batch, cfg.gamma, step))

            if step % cfg.target_update_period == 0:
                self.target.copy_parameters_from(self.online)

            if step % cfg.diagnostics_period == 0 or step == cfg.total_steps:
                self.record.append(self.checkpoint(step, losses))
                losses = []

        self.record.network = dump_checkpoint(self.online)
        self.record.observations = self.diagnostic_batch(cfg.total_steps)
        return self.record


def train_run(config: TrainConfig) -> TrainRunRecord:
    return DqnRun(config).run()
