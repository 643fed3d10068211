"""
Network variants
  baseline  dense(w) -> dense(w)      -> head
  hr        dense(w) -> HR(w)         -> head
  widen     dense(w) -> dense(2w)     -> head   (same parameter count as the HR stage)
  hr2       dense(w) -> HR(w) -> HR(w) -> head
HR always replaces the last hidden stage; the Q-head is linear.
"""

from typing import List, Optional

from src.errors import InvalidSpecError
from src.models.config import TrainConfig, Variant
from src.network.model import LayerSpec, Network, NetworkSpec, init_network
from src.numerics.rng import Rng, make_rng
from src.rl.chain_world import N_ACTIONS

INIT_STREAM = 1


def hidden_stages(variant, width: int, activation, layer_norm: bool) -> List[LayerSpec]:
    try:
        variant = Variant(variant)
    except ValueError:
        raise InvalidSpecError(f"Unknown variant '{variant}'; expected one of {[v.value for v in Variant]}")

    first = LayerSpec("dense", width, activation, layer_norm)
    if variant is Variant.BASELINE:
        return [first, LayerSpec("dense", width, activation, layer_norm)]
    if variant is Variant.HR:
        return [first, LayerSpec("hr", width, activation, layer_norm)]
    if variant is Variant.WIDEN:
        return [first, LayerSpec("dense", 2 * width, activation, layer_norm)]
    return [first, LayerSpec("hr", width, activation, layer_norm), LayerSpec("hr", width, activation, layer_norm)]


def build_variant(config: TrainConfig, rng: Optional[Rng] = None) -> Network:
    spec = NetworkSpec(
        input_dim=config.env.n_states + config.env.noise_dim,
        hidden=hidden_stages(config.variant, config.hidden_width, config.activation, config.with_layernorm),
        output_dim=N_ACTIONS,
    )
    return init_network(spec, rng if rng is not None else make_rng(config.seed, INIT_STREAM))
