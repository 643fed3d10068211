"""
Network layers
DenseLayer computes f(A x + b); HrLayer computes the Hadamard representation
f(A1 x + b1) ⊙ f(A2 x + b2) from two independently parameterized branches.
Both accept one input vector or a batch (rows = samples) and keep hand-derived
backward passes. The optional LayerNorm stage normalizes each branch's
pre-activation before the activation is applied.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from src.errors import ContractError, InvalidSpecError, ShapeError
from src.network.activations import ActivationKind, activation_apply, activation_derivative

LAYER_NORM_EPS = 1e-5


# ─────────────────────────────────────────────
# LAYER NORM STAGE
# ─────────────────────────────────────────────

@dataclass
class LayerNormCache:
    x_hat: np.ndarray
    inv_std: np.ndarray


def layer_norm_forward(u: np.ndarray, gain: np.ndarray, offset: np.ndarray) -> Tuple[np.ndarray, LayerNormCache]:
    mean = u.mean(axis=1, keepdims=True)
    var = u.var(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    x_hat = (u - mean) * inv_std
    return x_hat * gain + offset, LayerNormCache(x_hat=x_hat, inv_std=inv_std)


def layer_norm_backward(cache: LayerNormCache, gain: np.ndarray, dy: np.ndarray):
    """Returns (du, dgain, doffset)."""
    width = dy.shape[1]
    dx_hat = dy * gain
    du = (cache.inv_std / width) * (
        width * dx_hat
        - dx_hat.sum(axis=1, keepdims=True)
        - cache.x_hat * (dx_hat * cache.x_hat).sum(axis=1, keepdims=True)
    )
    return du, (dy * cache.x_hat).sum(axis=0), dy.sum(axis=0)


# ─────────────────────────────────────────────
# AFFINE BRANCH (shared by dense and HR layers)
# ─────────────────────────────────────────────

@dataclass
class BranchCache:
    pre: np.ndarray                      # activation input (after LayerNorm when enabled)
    ln: Optional[LayerNormCache] = None


def _branch_forward(params: Dict[str, np.ndarray], prefix: str, x: np.ndarray, layer_norm: bool) -> BranchCache:
    u = x @ params[f"{prefix}A"].T + params[f"{prefix}b"]
    if not layer_norm:
        return BranchCache(pre=u)
    pre, ln_cache = layer_norm_forward(u, params[f"{prefix}ln.gain"], params[f"{prefix}ln.offset"])
    return BranchCache(pre=pre, ln=ln_cache)


def _branch_backward(
    params: Dict[str, np.ndarray],
    prefix: str,
    x: np.ndarray,
    cache: BranchCache,
    d_pre: np.ndarray,
    grads: Dict[str, np.ndarray],
) -> np.ndarray:
    """Accumulates the branch parameter gradients into `grads`; returns dL/dx."""
    du = d_pre
    if cache.ln is not None:
        du, d_gain, d_offset = layer_norm_backward(cache.ln, params[f"{prefix}ln.gain"], d_pre)
        grads[f"{prefix}ln.gain"] = d_gain
        grads[f"{prefix}ln.offset"] = d_offset
    grads[f"{prefix}A"] = du.T @ x
    grads[f"{prefix}b"] = du.sum(axis=0)
    return du @ params[f"{prefix}A"]


# ─────────────────────────────────────────────
# LAYERS
# ─────────────────────────────────────────────

@dataclass
class LayerCache:
    layer_id: int
    generation: int
    x: np.ndarray
    branches: Tuple[BranchCache, ...]
    squeeze: bool


@dataclass
class LayerGradients:
    grad_x: np.ndarray
    params: Dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.params[name]


class Layer(ABC):
    kind: str = ""

    def __init__(self, in_dim: int, out_dim: int, activation: ActivationKind, layer_norm: bool = False):
        if in_dim <= 0 or out_dim <= 0:
            raise InvalidSpecError(f"Layer dimensions must be positive, got {in_dim}->{out_dim}")
        self.in_dim = int(in_dim)
        self.out_dim = int(out_dim)
        self.activation = ActivationKind(activation)
        self.layer_norm = bool(layer_norm)
        self.params: Dict[str, np.ndarray] = {}
        self.generation = 0

    @property
    def branch_prefixes(self) -> Tuple[str, ...]:
        return ("",)

    def _allocate(self) -> None:
        for prefix in self.branch_prefixes:
            self.params[f"{prefix}A"] = np.zeros((self.out_dim, self.in_dim))
            self.params[f"{prefix}b"] = np.zeros(self.out_dim)
            if self.layer_norm:
                self.params[f"{prefix}ln.gain"] = np.ones(self.out_dim)
                self.params[f"{prefix}ln.offset"] = np.zeros(self.out_dim)

    def mark_updated(self) -> None:
        """Invalidates caches produced before an in-place parameter update."""
        self.generation += 1

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def describe(self) -> str:
        desc = f"{self.kind}:{self.activation.value}:{self.in_dim}:{self.out_dim}"
        return desc + (":ln" if self.layer_norm else "")

    def _prepare_input(self, x) -> Tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != self.in_dim:
            raise ShapeError(f"{self.kind} layer expects input width {self.in_dim}, got shape {x.shape}")
        return x, squeeze

    def _check_cache(self, cache: LayerCache, upstream) -> np.ndarray:
        if cache.layer_id != id(self):
            raise ContractError("Backward cache was produced by a different layer")
        if cache.generation != self.generation:
            raise ContractError("Backward cache is stale: layer parameters changed since forward")
        if cache.x.shape[1] != self.in_dim:
            raise ContractError("Backward cache input width does not match the layer")
        up = np.asarray(upstream, dtype=np.float64)
        if cache.squeeze and up.ndim == 1:
            up = up[np.newaxis, :]
        if up.shape != (cache.x.shape[0], self.out_dim):
            raise ShapeError(f"Upstream gradient shape {up.shape} does not match output {(cache.x.shape[0], self.out_dim)}")
        return up

    def _make_cache(self, x: np.ndarray, branches, squeeze: bool) -> LayerCache:
        return LayerCache(layer_id=id(self), generation=self.generation, x=x, branches=tuple(branches), squeeze=squeeze)

    @abstractmethod
    def forward(self, x) -> Tuple[np.ndarray, LayerCache]:
        ...

    @abstractmethod
    def backward(self, cache: LayerCache, upstream) -> LayerGradients:
        ...


class DenseLayer(Layer):
    """z = f(A x + b)."""

    kind = "dense"

    def __init__(self, in_dim: int, out_dim: int, activation: ActivationKind, layer_norm: bool = False):
        super().__init__(in_dim, out_dim, activation, layer_norm)
        self._allocate()

    @property
    def A(self) -> np.ndarray:
        return self.params["A"]

    @property
    def b(self) -> np.ndarray:
        return self.params["b"]

    def forward(self, x) -> Tuple[np.ndarray, LayerCache]:
        x, squeeze = self._prepare_input(x)
        branch = _branch_forward(self.params, "", x, self.layer_norm)
        z = activation_apply(self.activation, branch.pre)
        return (z[0] if squeeze else z), self._make_cache(x, [branch], squeeze)

    def backward(self, cache: LayerCache, upstream) -> LayerGradients:
        up = self._check_cache(cache, upstream)
        (branch,) = cache.branches
        grads: Dict[str, np.ndarray] = {}
        d_pre = up * activation_derivative(self.activation, branch.pre)
        grad_x = _branch_backward(self.params, "", cache.x, branch, d_pre, grads)
        return LayerGradients(grad_x=grad_x[0] if cache.squeeze else grad_x, params=grads)


class HrLayer(Layer):
    """Hadamard representation: z = f(A1 x + b1) ⊙ f(A2 x + b2)."""

    kind = "hr"

    def __init__(self, in_dim: int, out_dim: int, activation: ActivationKind, layer_norm: bool = False):
        if ActivationKind(activation) is ActivationKind.IDENTITY:
            raise InvalidSpecError("HR layers need a tanh or relu activation")
        super().__init__(in_dim, out_dim, activation, layer_norm)
        self._allocate()

    @property
    def branch_prefixes(self) -> Tuple[str, ...]:
        return ("branch1.", "branch2.")

    @property
    def A1(self) -> np.ndarray:
        return self.params["branch1.A"]

    @property
    def b1(self) -> np.ndarray:
        return self.params["branch1.b"]

    @property
    def A2(self) -> np.ndarray:
        return self.params["branch2.A"]

    @property
    def b2(self) -> np.ndarray:
        return self.params["branch2.b"]

    def forward(self, x) -> Tuple[np.ndarray, LayerCache]:
        x, squeeze = self._prepare_input(x)
        first = _branch_forward(self.params, "branch1.", x, self.layer_norm)
        second = _branch_forward(self.params, "branch2.", x, self.layer_norm)
        z = activation_apply(self.activation, first.pre) * activation_apply(self.activation, second.pre)
        return (z[0] if squeeze else z), self._make_cache(x, [first, second], squeeze)

    def backward(self, cache: LayerCache, upstream) -> LayerGradients:
        up = self._check_cache(cache, upstream)
        first, second = cache.branches
        f1 = activation_apply(self.activation, first.pre)
        f2 = activation_apply(self.activation, second.pre)
        # product rule: each branch's gradient path is gated by the other branch's output
        d_pre1 = up * activation_derivative(self.activation, first.pre) * f2
        d_pre2 = up * f1 * activation_derivative(self.activation, second.pre)

        grads: Dict[str, np.ndarray] = {}
        grad_x = _branch_backward(self.params, "branch1.", cache.x, first, d_pre1, grads)
        grad_x = grad_x + _branch_backward(self.params, "branch2.", cache.x, second, d_pre2, grads)
        return LayerGradients(grad_x=grad_x[0] if cache.squeeze else grad_x, params=grads)


def hr_forward(layer: HrLayer, x) -> Tuple[np.ndarray, LayerCache]:
    return layer.forward(x)


def hr_backward(layer: HrLayer, cache: LayerCache, upstream_grad) -> LayerGradients:
    return layer.backward(cache, upstream_grad)


def dense_forward(layer: DenseLayer, x) -> Tuple[np.ndarray, LayerCache]:
    return layer.forward(x)


def dense_backward(layer: DenseLayer, cache: LayerCache, upstream_grad) -> LayerGradients:
    return layer.backward(cache, upstream_grad)


LAYER_TYPES = {DenseLayer.kind: DenseLayer, HrLayer.kind: HrLayer}
