"""
Adam optimizer
Bias-corrected Adam with moments kept per named parameter. Defaults follow the
DQN setup: lr 1e-4, epsilon 1e-5, betas (0.9, 0.999).
"""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.errors import ShapeError


@dataclass
class AdamState:
    lr: float = 1e-4
    eps: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def for_parameters(cls, params: Dict[str, np.ndarray], **kwargs) -> "AdamState":
        state = cls(**kwargs)
        for name, p in params.items():
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        return state


def adam_step(state: AdamState, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """Updates `params` in place and returns them."""
    for name, p in params.items():
        if name not in grads:
            raise ShapeError(f"No gradient for parameter '{name}'")
        if grads[name].shape != p.shape:
            raise ShapeError(f"Gradient for '{name}' has shape {grads[name].shape}, parameter {p.shape}")
        if name in state.m and state.m[name].shape != p.shape:
            raise ShapeError(f"Adam moments for '{name}' have shape {state.m[name].shape}, parameter {p.shape}")

    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    step_size = state.lr / bc1

    for name, p in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p -= step_size * m / (np.sqrt(v / bc2) + state.eps)
    return params
