"""
Dormancy Analyzer
Flags neurons whose output is approximately constant across an observation
batch. Each neuron's activations are jittered with a little Gaussian noise, a
Gaussian-kernel density is fitted with Scott's-rule bandwidth, and the neuron is
dormant when the density peak reaches the threshold ω. ReLU neurons that are
identically zero are dormant regardless of the density.

A dormant neuron whose mass sits away from its activation's saturation limit
(±1 for tanh, 0 for ReLU) is tagged `collapsed`; its Ω̂ is its own mean.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy.stats import norm

from src.errors import InvalidInputError
from src.network.activations import ActivationKind
from src.numerics.linalg import Matrix, as_matrix, as_vector
from src.numerics.rng import Rng, gaussian_sample

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 20.0
DEFAULT_JITTER_VARIANCE = 1e-5
DEFAULT_GRID_POINTS = 512
DEFAULT_SATURATION_TOLERANCE = 0.1


def as_feature_matrix(data, name: str = "feature matrix") -> Matrix:
    """Rows = observations, cols = neurons of one hidden layer."""
    phi = as_matrix(data, name)
    if phi.shape[0] < 2:
        raise InvalidInputError(f"{name} needs at least 2 observations, got {phi.shape[0]}")
    return phi


@dataclass
class KdeProfile:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    @property
    def peak(self) -> float:
        return float(self.density.max())

    def side_peaks(self):
        """(peak over x < 0, peak over x >= 0); 0 when the grid has no points on a side."""
        left = self.density[self.grid < 0.0]
        right = self.density[self.grid >= 0.0]
        return (float(left.max()) if left.size else 0.0, float(right.max()) if right.size else 0.0)


def kde_profile(
    activations,
    rng: Rng,
    jitter_variance: float = DEFAULT_JITTER_VARIANCE,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> KdeProfile:
    values = as_vector(activations, "activations")
    n = values.size
    if n < 2:
        raise InvalidInputError(f"KDE needs at least 2 samples, got {n}")
    if jitter_variance < 0:
        raise InvalidInputError(f"Jitter variance must be >= 0, got {jitter_variance}")

    jittered = values + gaussian_sample(rng, 0.0, float(np.sqrt(jitter_variance)), n)
    bandwidth = n ** (-1.0 / 5.0) * float(jittered.std())
    if bandwidth == 0.0:
        # only reachable with jitter disabled on a constant sample: a point mass
        return KdeProfile(grid=jittered[:1].copy(), density=np.array([np.inf]), bandwidth=0.0)

    grid = np.linspace(jittered.min() - 3.0 * bandwidth, jittered.max() + 3.0 * bandwidth, grid_points)
    kernel = norm.pdf((grid[:, np.newaxis] - jittered[np.newaxis, :]) / bandwidth)
    density = kernel.sum(axis=1) / (n * bandwidth)
    return KdeProfile(grid=grid, density=density, bandwidth=bandwidth)


def kde_peak_density(
    activations,
    rng: Rng,
    jitter_variance: float = DEFAULT_JITTER_VARIANCE,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> float:
    """
    Peak of the jittered Gaussian-kernel density of one neuron's activations.

    Args:
        activations: The neuron's outputs over an observation batch (n >= 2).
        rng: Stream for the jitter.
        jitter_variance: Variance of the jitter; 0 disables it.
        grid_points: Number of evaluation points.

    Returns:
        Maximum density on the grid; inf for a constant sample with no jitter.
    """
    return kde_profile(activations, rng, jitter_variance, grid_points).peak


@dataclass
class NeuronDormancy:
    index: int
    dormant: bool
    peak_density: float
    mean_activation: float
    omega_hat: Optional[float] = None
    bimodal: bool = False
    collapsed: bool = False


@dataclass
class DormancyReport:
    activation: ActivationKind
    threshold: float
    neurons: List[NeuronDormancy]

    @property
    def dormant_fraction(self) -> float:
        if not self.neurons:
            return 0.0
        return sum(n.dormant for n in self.neurons) / len(self.neurons)

    @property
    def dormant_indices(self) -> List[int]:
        return [n.index for n in self.neurons if n.dormant]

    @property
    def collapsed_indices(self) -> List[int]:
        return [n.index for n in self.neurons if n.collapsed]

    @property
    def saturated_fraction(self) -> float:
        """Share of neurons that are dormant at their saturation limit."""
        if not self.neurons:
            return 0.0
        return sum(n.dormant and not n.collapsed for n in self.neurons) / len(self.neurons)

    @property
    def live_indices(self) -> List[int]:
        return [n.index for n in self.neurons if not n.dormant]

    @property
    def peak_densities(self) -> np.ndarray:
        return np.array([n.peak_density for n in self.neurons])

    def omega_hat(self) -> Dict[int, float]:
        return {n.index: n.omega_hat for n in self.neurons if n.dormant}


def _saturation_value(activation: ActivationKind, column: np.ndarray, profile: KdeProfile, threshold: float, tolerance: float):
    """Returns (Ω̂, bimodal, collapsed) for a dormant neuron."""
    mean = float(column.mean())
    if activation is ActivationKind.TANH:
        left, right = profile.side_peaks()
        if left >= threshold and right >= threshold:
            return (1.0 if right >= left else -1.0), True, False
        limit = 1.0 if mean >= 0.0 else -1.0
    elif activation is ActivationKind.RELU:
        limit = 0.0
    else:
        return mean, False, False
    if abs(mean - limit) > tolerance:
        return mean, False, True
    return limit, False, False


def classify_dormant(
    features,
    activation: ActivationKind,
    rng: Rng,
    threshold: float = DEFAULT_THRESHOLD,
    jitter_variance: float = DEFAULT_JITTER_VARIANCE,
    grid_points: int = DEFAULT_GRID_POINTS,
    saturation_tolerance: float = DEFAULT_SATURATION_TOLERANCE,
) -> DormancyReport:
    """
    Classify every neuron of one hidden layer as dormant or live.

    Args:
        features: Feature matrix, rows = observations, cols = neurons.
        activation: Activation of the layer; decides the saturation limit.
        rng: Stream for the KDE jitter; the same seed gives the same report.
        threshold: Peak density ω at or above which a neuron is dormant.
        jitter_variance: Variance of the Gaussian jitter added before the KDE.
        grid_points: Number of points the density is evaluated on.
        saturation_tolerance: Largest distance between a dormant neuron's mean
            and its saturation limit before it is tagged collapsed.

    Returns:
        DormancyReport with one NeuronDormancy per column.
    """
    phi = as_feature_matrix(features)
    activation = ActivationKind(activation)

    neurons = []
    for index in range(phi.shape[1]):
        column = phi[:, index]
        profile = kde_profile(column, rng, jitter_variance, grid_points)
        dormant = profile.peak >= threshold
        if activation is ActivationKind.RELU and not np.any(column):
            dormant = True

        omega_hat, bimodal, collapsed = None, False, False
        if dormant:
            omega_hat, bimodal, collapsed = _saturation_value(activation, column, profile, threshold, saturation_tolerance)
        neurons.append(NeuronDormancy(
            index=index,
            dormant=bool(dormant),
            peak_density=profile.peak,
            mean_activation=float(column.mean()),
            omega_hat=omega_hat,
            bimodal=bimodal,
            collapsed=collapsed,
        ))

    report = DormancyReport(activation=activation, threshold=threshold, neurons=neurons)
    logger.debug(
        "Dormancy: %d/%d neurons dormant, %d collapsed",
        len(report.dormant_indices), len(neurons), len(report.collapsed_indices),
    )
    return report
