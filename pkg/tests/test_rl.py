import math

import numpy as np
import pytest

from src.errors import ContractError, DivergenceError, InvalidInputError, InvalidSpecError, ShapeError
from src.models.config import EnvConfig, TrainConfig
from src.network.model import count_hr_layers
from src.numerics.rng import make_rng
from src.parsers.run_csv import dump_run_csv
from src.rl.chain_world import (
    GOAL_REWARD,
    LEFT,
    RIGHT,
    STEP_PENALTY,
    ChainWorld,
    env_reset,
    env_step,
    optimal_return,
    value_iteration,
)
from src.rl.dqn import (
    JITTER_STREAM,
    DqnRun,
    diagnose_representation,
    evaluate_policy,
    greedy_action,
    td_targets,
    train_run,
)
from src.rl.replay import ReplayBuffer, TransitionBatch
from src.rl.schedule import EpsilonSchedule, epsilon_at
from src.rl.variants import build_variant, hidden_stages


# ─────────────────────────────────────────────
# ChainWorld
# ─────────────────────────────────────────────

def test_walk_right_reaches_goal():
    env = ChainWorld(n_states=4, noise_dim=2)
    rng = make_rng(0)
    obs = env_reset(env, rng)
    assert obs.shape == (6,)
    assert obs[0] == 1.0 and obs[:4].sum() == 1.0
    rewards = []
    done = False
    while not done:
        obs, reward, done = env_step(env, RIGHT, rng)
        rewards.append(reward)
    assert rewards == [STEP_PENALTY, STEP_PENALTY, GOAL_REWARD]
    assert env.terminated


def test_left_is_clamped_at_zero():
    env = ChainWorld(n_states=5, noise_dim=0)
    rng = make_rng(0)
    env.reset(rng)
    obs, reward, done = env.step(LEFT, rng)
    assert env.state == 0 and obs[0] == 1.0
    assert reward == STEP_PENALTY and not done


def test_horizon_truncates_without_terminating():
    env = ChainWorld(n_states=5, noise_dim=0, horizon=3)
    rng = make_rng(0)
    env.reset(rng)
    for _ in range(3):
        _, _, done = env.step(LEFT, rng)
    assert done and not env.terminated


def test_step_after_done_and_bad_action():
    env = ChainWorld(n_states=2, noise_dim=0)
    rng = make_rng(0)
    with pytest.raises(ContractError):
        env.step(RIGHT, rng)
    env.reset(rng)
    with pytest.raises(InvalidInputError):
        env.step(2, rng)
    env.step(RIGHT, rng)
    with pytest.raises(ContractError):
        env.step(RIGHT, rng)


def test_chain_needs_two_states():
    with pytest.raises(InvalidSpecError):
        ChainWorld(n_states=1)


@pytest.mark.parametrize("n,gamma,expected", [(2, 1.0, 1.0), (3, 0.5, 0.49)])
def test_optimal_return_values(n, gamma, expected):
    assert optimal_return(ChainWorld(n_states=n), gamma) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5, 24])
@pytest.mark.parametrize("gamma", [0.5, 0.9, 0.99])
def test_optimal_return_matches_value_iteration(n, gamma):
    env = ChainWorld(n_states=n)
    values = value_iteration(env, gamma)
    assert values[0] == pytest.approx(optimal_return(env, gamma), abs=1e-9)
    assert values[-1] == 0.0


# ─────────────────────────────────────────────
# Replay and exploration
# ─────────────────────────────────────────────

def _fill(buffer, count, obs_dim=2):
    for i in range(count):
        obs = np.full(obs_dim, float(i))
        buffer.add(obs, i % 2, float(i), obs + 1, False)


def test_replay_evicts_oldest_first():
    buffer = ReplayBuffer(capacity=3, obs_dim=2)
    _fill(buffer, 5)
    assert len(buffer) == 3
    assert buffer.contents().rewards.tolist() == [2.0, 3.0, 4.0]


def test_replay_sample_has_no_repeats():
    buffer = ReplayBuffer(capacity=10, obs_dim=2)
    _fill(buffer, 10)
    batch = buffer.sample(10, make_rng(0))
    assert sorted(batch.rewards.tolist()) == [float(i) for i in range(10)]


def test_replay_sample_too_large():
    buffer = ReplayBuffer(capacity=10, obs_dim=2)
    _fill(buffer, 3)
    with pytest.raises(InvalidInputError):
        buffer.sample(4, make_rng(0))


def test_replay_rejects_wrong_width():
    with pytest.raises(ShapeError):
        ReplayBuffer(capacity=2, obs_dim=2).add(np.zeros(3), 0, 0.0, np.zeros(3), False)


def test_epsilon_schedule():
    schedule = EpsilonSchedule(start=1.0, end=0.1, decay_steps=100)
    assert epsilon_at(schedule, 0) == 1.0
    assert epsilon_at(schedule, 50) == pytest.approx(0.55)
    assert epsilon_at(schedule, 100) == pytest.approx(0.1)
    assert epsilon_at(schedule, 10_000) == pytest.approx(0.1)


# ─────────────────────────────────────────────
# Variants and targets
# ─────────────────────────────────────────────

def _config(**overrides):
    base = dict(hidden_width=8, env=EnvConfig(n_states=5, noise_dim=3))
    base.update(overrides)
    return TrainConfig(**base)


def test_variant_architectures():
    assert build_variant(_config(variant="baseline")).describe() == [
        "dense:tanh:8:8", "dense:tanh:8:8", "dense:identity:8:2",
    ]
    assert build_variant(_config(variant="hr")).describe()[1] == "hr:tanh:8:8"
    assert build_variant(_config(variant="widen")).describe()[1] == "dense:tanh:8:16"
    hr2 = build_variant(_config(variant="hr2"))
    assert count_hr_layers(hr2) == 2


def test_widen_matches_hr_stage_size():
    hr = build_variant(_config(variant="hr")).layers[1].parameter_count()
    widen = build_variant(_config(variant="widen")).layers[1].parameter_count()
    assert hr == widen


def test_unknown_variant():
    with pytest.raises(InvalidSpecError):
        hidden_stages("resnet", 8, "tanh", False)


def test_td_targets():
    net = build_variant(_config())
    next_obs = make_rng(1).standard_normal((3, 8))
    batch = TransitionBatch(
        obs=np.zeros((3, 8)), actions=np.array([0, 1, 0]), rewards=np.array([1.0, -0.5, 0.0]),
        next_obs=next_obs, dones=np.array([0.0, 1.0, 0.0]),
    )
    q_next = net.forward(next_obs).output.max(axis=1)
    y = td_targets(batch, net, 0.9)
    assert y[0] == pytest.approx(1.0 + 0.9 * q_next[0])
    assert y[1] == -0.5
    assert y[2] == pytest.approx(0.9 * q_next[2])


def test_td_targets_shape_mismatch():
    net = build_variant(_config())
    batch = TransitionBatch(
        obs=np.zeros((2, 8)), actions=np.zeros(3, dtype=int), rewards=np.zeros(3),
        next_obs=np.zeros((2, 8)), dones=np.zeros(3),
    )
    with pytest.raises(ShapeError):
        td_targets(batch, net, 0.9)


def test_evaluation_never_beats_optimum():
    config = _config()
    env = ChainWorld.from_config(config.env)
    net = build_variant(config)
    value = evaluate_policy(net, env, 0.99, 3, make_rng(0))
    assert value <= optimal_return(env, 0.99) + 1e-9
    assert greedy_action(net, env.reset(make_rng(0))) in (LEFT, RIGHT)


# ─────────────────────────────────────────────
# Training runs
# ─────────────────────────────────────────────

def test_train_run_checkpoints(tiny_train_config):
    record = train_run(tiny_train_config)
    assert [c.step for c in record.checkpoints] == [0, 80, 160, 240]
    assert math.isnan(record.checkpoints[0].loss)
    assert all(math.isfinite(c.loss) for c in record.checkpoints[1:])
    for c in record.checkpoints:
        assert 0.0 <= c.dormant_fraction <= 1.0
        assert 1 <= c.effective_rank <= tiny_train_config.hidden_width
        assert c.eval_return <= optimal_return(ChainWorld(n_states=6), 0.99) + 1e-9
    assert record.run_id == "hr-tanh-s3"


def _with(config, **updates):
    return TrainConfig.model_validate({**config.model_dump(), **updates})


def test_train_run_is_deterministic(tiny_train_config):
    assert dump_run_csv([train_run(tiny_train_config)]) == dump_run_csv([train_run(tiny_train_config)])


def test_different_seeds_differ(tiny_train_config):
    a = train_run(tiny_train_config).checkpoints[-1]
    b = train_run(_with(tiny_train_config, seed=4)).checkpoints[-1]
    assert a.loss != b.loss


def test_zero_learning_rate_leaves_network_and_diagnostics_unchanged(tiny_train_config):
    config = _with(tiny_train_config, lr=0.0)
    run = DqnRun(config)
    initial = run.online.clone()
    run.run()
    for name, p in initial.parameters().items():
        assert np.array_equal(run.online.parameters()[name], p)

    obs = run.diagnostic_batch(config.total_steps)
    before = diagnose_representation(initial, obs, config.activation, config.diagnostics,
                                     make_rng(config.seed, JITTER_STREAM))
    after = diagnose_representation(run.online, obs, config.activation, config.diagnostics,
                                    make_rng(config.seed, JITTER_STREAM))
    assert before == after


def test_target_network_synced_after_period(tiny_train_config):
    config = _with(tiny_train_config, total_steps=80)
    run = DqnRun(config)
    run.run()
    for name, p in run.online.parameters().items():
        assert np.array_equal(run.target.parameters()[name], p)


def test_buffer_never_exceeds_capacity(tiny_train_config):
    config = _with(tiny_train_config, buffer_capacity=50)
    run = DqnRun(config)
    run.run()
    assert len(run.buffer) == 50


@pytest.mark.parametrize("variant", ["baseline", "widen", "hr2"])
@pytest.mark.parametrize("activation", ["tanh", "relu"])
def test_every_variant_trains(tiny_train_config, variant, activation):
    record = train_run(_with(tiny_train_config, variant=variant, activation=activation, total_steps=100))
    assert [c.step for c in record.checkpoints] == [0, 80, 100]


def test_layernorm_variant_trains(tiny_train_config):
    record = train_run(_with(tiny_train_config, with_layernorm=True, total_steps=100))
    assert record.run_id == "hr-tanh-ln-s3"


def test_divergence_is_reported(tiny_train_config):
    config = _with(tiny_train_config, lr=1e200, total_steps=200)
    with pytest.raises(DivergenceError) as info:
        train_run(config)
    assert info.value.step > config.learning_starts
