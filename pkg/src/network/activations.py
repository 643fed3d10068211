"""
Activation functions
tanh and ReLU are the two activations every experiment compares; identity is
only used by the linear Q-head.
"""

from enum import Enum
from typing import Tuple

import numpy as np


class ActivationKind(str, Enum):
    TANH = "tanh"
    RELU = "relu"
    IDENTITY = "identity"


# Saturation limit Ω: the constant a dormant neuron settles on
SATURATION_LIMITS = {
    ActivationKind.TANH: (-1.0, 1.0),
    ActivationKind.RELU: (0.0,),
}


def saturation_limits(kind: ActivationKind) -> Tuple[float, ...]:
    return SATURATION_LIMITS.get(ActivationKind(kind), ())


def activation_apply(kind: ActivationKind, pre: np.ndarray) -> np.ndarray:
    kind = ActivationKind(kind)
    pre = np.asarray(pre, dtype=np.float64)
    if kind is ActivationKind.TANH:
        return np.tanh(pre)
    if kind is ActivationKind.RELU:
        return np.maximum(pre, 0.0)
    return pre.copy()


def activation_derivative(kind: ActivationKind, pre: np.ndarray) -> np.ndarray:
    """f'(pre). ReLU's subgradient at exactly 0 is 0."""
    kind = ActivationKind(kind)
    pre = np.asarray(pre, dtype=np.float64)
    if kind is ActivationKind.TANH:
        t = np.tanh(pre)
        return 1.0 - t * t
    if kind is ActivationKind.RELU:
        return (pre > 0.0).astype(np.float64)
    return np.ones_like(pre)
