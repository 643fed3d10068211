"""
Dormant Bias Analyzer
Splits the next layer's pre-activation h = A z + b into the part carried by
live neurons and the constant B* that dormant neurons inject through their
outgoing weights: h = Σ_{i∈C} z_i A[:, i] + Σ_{i∈D} Ω_i A[:, i] + b.
A dormant ReLU neuron has Ω = 0 and is simply pruned; a saturated tanh neuron
turns its column into an input-independent bias.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np

from src.analyzers.dormancy import DormancyReport
from src.errors import InvalidInputError, ShapeError
from src.network.model import Network
from src.numerics.linalg import as_matrix, as_vector


@dataclass
class BiasDecomposition:
    live: np.ndarray
    dormant_bias: np.ndarray         # B*
    bias: np.ndarray                 # original b

    @property
    def effective_bias(self) -> np.ndarray:
        return self.dormant_bias + self.bias

    @property
    def pre_activation(self) -> np.ndarray:
        return self.live + self.dormant_bias + self.bias


@dataclass
class ContributionSplit:
    live: float
    dormant: float


def _dormant_mask(width: int, dormant_set: Iterable[int]) -> np.ndarray:
    mask = np.zeros(width, dtype=bool)
    for i in dormant_set:
        if not 0 <= int(i) < width:
            raise InvalidInputError(f"Neuron index {i} out of range for a layer of width {width}")
        mask[int(i)] = True
    return mask


def bias_decomposition(
    A_next,
    b_next,
    z,
    dormant_set: Iterable[int],
    omega_hat: Union[Dict[int, float], Sequence[float]],
) -> BiasDecomposition:
    """
    Split the next layer's pre-activation into live and dormant parts.

    Args:
        A_next: Weights of the next layer, shape (out, width).
        b_next: Bias of the next layer, length out.
        z: Hidden activations, one vector or a batch with rows = samples.
        dormant_set: Indices of dormant neurons in the hidden layer.
        omega_hat: Saturation value per dormant neuron, as an index -> value
            dict or a sequence ordered like the sorted dormant indices.

    Returns:
        BiasDecomposition whose live + dormant_bias + bias equals A_next z + b_next.
    """
    A = as_matrix(A_next, "A_next")
    b = as_vector(b_next, "b_next")
    if b.shape[0] != A.shape[0]:
        raise ShapeError(f"Bias length {b.shape[0]} != rows of A {A.shape[0]}")
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != A.shape[1]:
        raise ShapeError(f"Hidden vector width {z.shape[-1]} != columns of A {A.shape[1]}")

    dormant = sorted(set(int(i) for i in dormant_set))
    mask = _dormant_mask(A.shape[1], dormant)
    if isinstance(omega_hat, dict):
        missing = [i for i in dormant if i not in omega_hat]
        if missing:
            raise InvalidInputError(f"No saturation value for dormant neurons {missing}")
        omega = np.array([omega_hat[i] for i in dormant], dtype=np.float64)
    else:
        omega = np.asarray(omega_hat, dtype=np.float64)
        if omega.shape != (len(dormant),):
            raise InvalidInputError(f"Expected {len(dormant)} saturation values, got {omega.shape}")

    live = z[..., ~mask] @ A[:, ~mask].T
    dormant_bias = A[:, mask] @ omega
    return BiasDecomposition(live=live, dormant_bias=dormant_bias, bias=b.copy())


def contributions(net: Network, observations, dormant_set: Iterable[int]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Signed per-sample head contributions (live, dormant, output) of the final hidden layer."""
    obs = np.asarray(observations, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[0] == 0:
        raise InvalidInputError("Contribution split needs a non-empty batch of observations")
    if not net.hidden_layers:
        raise InvalidInputError("Contribution split needs a network with at least one hidden layer")
    result = net.forward(obs)
    z = result.activations[-1]
    A = net.head.A
    mask = _dormant_mask(A.shape[1], dormant_set)
    live = z[:, ~mask] @ A[:, ~mask].T
    dormant = z[:, mask] @ A[:, mask].T
    return live, dormant, result.output


def contribution_split(net: Network, observations, dormancy: DormancyReport) -> ContributionSplit:
    """
    Mean absolute head contribution of the live and the dormant neurons.

    Args:
        net: Network whose final hidden layer was classified.
        observations: Batch of observations, rows = samples.
        dormancy: Report on that final hidden layer.

    Returns:
        ContributionSplit(live, dormant), both averaged over samples and outputs.
    """
    width = net.head.in_dim
    if len(dormancy.neurons) != width:
        raise InvalidInputError(f"Dormancy report covers {len(dormancy.neurons)} neurons, final hidden layer has {width}")
    live, dormant, _ = contributions(net, observations, dormancy.dormant_indices)
    return ContributionSplit(live=float(np.mean(np.abs(live))), dormant=float(np.mean(np.abs(dormant))))


def zero_dormant_columns(net: Network, dormant_set: Iterable[int]) -> Network:
    """Copy of `net` whose head ignores the given final-hidden neurons."""
    pruned = net.clone()
    mask = _dormant_mask(pruned.head.in_dim, dormant_set)
    pruned.head.A[:, mask] = 0.0
    pruned.mark_updated()
    return pruned
