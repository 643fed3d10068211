"""
Feed-forward network
A Network is an ordered list of layers ending in one linear head. forward()
returns the output together with every hidden layer's activations so the
diagnostics can look at any representation without re-running the model.
"""

import copy
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import InvalidSpecError, ShapeError
from src.network.activations import ActivationKind
from src.network.layers import LAYER_TYPES, DenseLayer, HrLayer, Layer, LayerCache
from src.numerics.rng import Rng

logger = logging.getLogger(__name__)


@dataclass
class LayerSpec:
    kind: str                         # "dense" or "hr"
    width: int
    activation: ActivationKind = ActivationKind.TANH
    layer_norm: bool = False


@dataclass
class NetworkSpec:
    input_dim: int
    hidden: List[LayerSpec]
    output_dim: int


@dataclass
class ForwardResult:
    output: np.ndarray
    activations: List[np.ndarray]     # one entry per hidden layer, in order
    caches: List[LayerCache] = field(default_factory=list)


class Network:
    def __init__(self, layers: List[Layer]):
        if not layers:
            raise InvalidSpecError("A network needs at least an output head")
        for prev, nxt in zip(layers, layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ShapeError(f"Layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}")
        if not isinstance(layers[-1], DenseLayer) or layers[-1].activation is not ActivationKind.IDENTITY:
            raise InvalidSpecError("The last layer must be a linear (identity) dense head")
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def head(self) -> DenseLayer:
        return self.layers[-1]

    @property
    def hidden_layers(self) -> List[Layer]:
        return self.layers[:-1]

    def forward(self, x) -> ForwardResult:
        h = np.asarray(x, dtype=np.float64)
        if h.shape[-1] != self.input_dim:
            raise ShapeError(f"Network expects input width {self.input_dim}, got shape {h.shape}")
        activations, caches = [], []
        for layer in self.layers:
            h, cache = layer.forward(h)
            caches.append(cache)
            activations.append(h)
        return ForwardResult(output=h, activations=activations[:-1], caches=caches)

    def backward(self, caches: List[LayerCache], grad_output) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        """Returns (dL/dx, gradients keyed like parameters())."""
        if len(caches) != len(self.layers):
            raise ShapeError(f"Expected {len(self.layers)} caches, got {len(caches)}")
        grads: Dict[str, np.ndarray] = {}
        upstream = grad_output
        for index in reversed(range(len(self.layers))):
            layer_grads = self.layers[index].backward(caches[index], upstream)
            for name, g in layer_grads.params.items():
                grads[f"layer{index}.{name}"] = g
            upstream = layer_grads.grad_x
        return upstream, grads

    def parameters(self) -> Dict[str, np.ndarray]:
        """Ordered name -> array view; updating a view updates the network."""
        params: Dict[str, np.ndarray] = {}
        for index, layer in enumerate(self.layers):
            for name, p in layer.params.items():
                params[f"layer{index}.{name}"] = p
        return params

    def parameter_count(self) -> int:
        return sum(layer.parameter_count() for layer in self.layers)

    def mark_updated(self) -> None:
        for layer in self.layers:
            layer.mark_updated()

    def copy_parameters_from(self, other: "Network") -> None:
        mine, theirs = self.parameters(), other.parameters()
        if mine.keys() != theirs.keys():
            raise ShapeError("Networks have different parameter layouts")
        for name, p in mine.items():
            if p.shape != theirs[name].shape:
                raise ShapeError(f"Parameter {name} shape {p.shape} != {theirs[name].shape}")
            np.copyto(p, theirs[name])
        self.mark_updated()

    def clone(self) -> "Network":
        return copy.deepcopy(self)

    def describe(self) -> List[str]:
        return [layer.describe() for layer in self.layers]


def forward(net: Network, x) -> Tuple[np.ndarray, List[np.ndarray]]:
    result = net.forward(x)
    return result.output, result.activations


def _init_layer(layer: Layer, rng: Rng) -> None:
    # uniform fan-in scaling for weights and biases; HR branches are drawn one after the other
    bound = 1.0 / np.sqrt(layer.in_dim)
    for prefix in layer.branch_prefixes:
        layer.params[f"{prefix}A"][...] = rng.uniform(-bound, bound, size=(layer.out_dim, layer.in_dim))
        layer.params[f"{prefix}b"][...] = rng.uniform(-bound, bound, size=layer.out_dim)


def build_layer(kind: str, in_dim: int, out_dim: int, activation: ActivationKind, layer_norm: bool = False) -> Layer:
    layer_type = LAYER_TYPES.get(kind)
    if layer_type is None:
        raise InvalidSpecError(f"Unknown layer kind '{kind}'")
    return layer_type(in_dim, out_dim, activation, layer_norm)


def init_network(spec: NetworkSpec, rng: Optional[Rng]) -> Network:
    if spec.input_dim <= 0 or spec.output_dim <= 0:
        raise InvalidSpecError("Input and output dimensions must be positive")
    layers: List[Layer] = []
    width = spec.input_dim
    for layer_spec in spec.hidden:
        if layer_spec.width <= 0:
            raise InvalidSpecError(f"Hidden layer width must be positive, got {layer_spec.width}")
        layers.append(build_layer(layer_spec.kind, width, layer_spec.width, layer_spec.activation, layer_spec.layer_norm))
        width = layer_spec.width
    layers.append(DenseLayer(width, spec.output_dim, ActivationKind.IDENTITY))

    if rng is not None:
        for layer in layers:
            _init_layer(layer, rng)
    net = Network(layers)
    logger.debug("Initialized network %s (%d parameters)", net.describe(), net.parameter_count())
    return net


def count_hr_layers(net: Network) -> int:
    return sum(isinstance(layer, HrLayer) for layer in net.layers)
