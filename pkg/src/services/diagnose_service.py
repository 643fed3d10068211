"""
Diagnose Service
Checkpoint + observation batch → representational-health report of the final
hidden layer (dormancy, effective rank, effective bias, live/dormant split).
"""

import csv
import io
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.analyzers.bias import bias_decomposition, contribution_split
from src.analyzers.dormancy import DormancyReport, classify_dormant
from src.analyzers.rank import effective_rank
from src.errors import ShapeError
from src.models.config import DiagnosticsConfig
from src.network.model import Network, count_hr_layers
from src.numerics.rng import make_rng

logger = logging.getLogger(__name__)

NEURON_COLUMNS = ["neuron", "dormant", "peak_density", "mean_activation", "omega_hat", "bimodal", "collapsed"]


def diagnose_network(
    net: Network,
    observations,
    settings: Optional[DiagnosticsConfig] = None,
    seed: int = 0,
) -> Dict[str, Any]:
    settings = settings or DiagnosticsConfig()
    obs = np.asarray(observations, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[1] != net.input_dim:
        raise ShapeError(f"Observations must have shape (n, {net.input_dim}), got {obs.shape}")

    layer = net.hidden_layers[-1] if net.hidden_layers else None
    if layer is None:
        raise ShapeError("Network has no hidden layer to diagnose")
    result = net.forward(obs)
    features = result.activations[-1]

    dormancy = classify_dormant(
        features, layer.activation, make_rng(seed),
        threshold=settings.threshold,
        jitter_variance=settings.jitter_variance,
        grid_points=settings.grid_points,
        saturation_tolerance=settings.saturation_tolerance,
    )
    decomposition = bias_decomposition(
        net.head.A, net.head.b, features, dormancy.dormant_indices, dormancy.omega_hat(),
    )
    split = contribution_split(net, obs, dormancy)
    report = {
        "architecture": net.describe(),
        "hr_layers": count_hr_layers(net),
        "observations": int(obs.shape[0]),
        "activation": layer.activation.value,
        "width": layer.out_dim,
        "dormant_fraction": dormancy.dormant_fraction,
        "dormant_neurons": dormancy.dormant_indices,
        "collapsed_neurons": dormancy.collapsed_indices,
        "saturated_fraction": dormancy.saturated_fraction,
        "effective_rank": effective_rank(features, settings.rank_delta),
        "dormant_bias": decomposition.dormant_bias.tolist(),
        "effective_bias": decomposition.effective_bias.tolist(),
        "live_contrib": split.live,
        "dormant_contrib": split.dormant,
        "neurons": neuron_rows(dormancy),
    }
    logger.info(
        "Diagnosed %s: %.3f dormant, rank %d",
        report["architecture"], report["dormant_fraction"], report["effective_rank"],
    )
    return report


def neuron_rows(dormancy: DormancyReport) -> List[Dict[str, Any]]:
    return [
        {
            "neuron": n.index,
            "dormant": n.dormant,
            # a point mass has no finite peak; JSON has no infinity
            "peak_density": n.peak_density if math.isfinite(n.peak_density) else None,
            "mean_activation": n.mean_activation,
            "omega_hat": n.omega_hat,
            "bimodal": n.bimodal,
            "collapsed": n.collapsed,
        }
        for n in dormancy.neurons
    ]


def dump_neuron_csv(rows: List[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=NEURON_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in NEURON_COLUMNS})
    return buffer.getvalue()
