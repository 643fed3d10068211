import pytest

from src.models.config import DiagnosticsConfig, EnvConfig, TrainConfig
from src.numerics.rng import make_rng


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow training reproductions")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def tiny_train_config():
    """A few hundred steps on a short chain with narrow layers."""
    return TrainConfig(
        variant="hr",
        activation="tanh",
        seed=3,
        total_steps=240,
        buffer_capacity=200,
        batch_size=16,
        target_update_period=40,
        learning_starts=40,
        diagnostics_period=80,
        eval_episodes=2,
        hidden_width=8,
        env=EnvConfig(n_states=6, noise_dim=2),
        diagnostics=DiagnosticsConfig(batch_size=32, grid_points=128),
    )


SMALL_SUITE = """
[experiment]
name = "small"
variants = ["baseline", "hr"]
activations = ["tanh"]
seeds = [0, 1]

[train]
total_steps = 60
learning_starts = 20
batch_size = 8
buffer_capacity = 100
target_update_period = 20
diagnostics_period = 30
eval_episodes = 1
hidden_width = 6

[env]
n_states = 4
noise_dim = 1

[diagnostics]
batch_size = 16
grid_points = 64
"""


@pytest.fixture
def small_config_text():
    return SMALL_SUITE


@pytest.fixture
def config_path(tmp_path):
    """A two-variant, two-seed suite that trains in well under a second per run."""
    path = tmp_path / "small.toml"
    path.write_text(SMALL_SUITE, encoding="utf-8")
    return path
