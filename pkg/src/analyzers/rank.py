"""
Effective Rank
srank_δ(Φ): the number of leading singular values needed to hold (1 − δ) of
the total spectral mass of a feature matrix.
"""

import warnings

import numpy as np

from src.analyzers.dormancy import as_feature_matrix
from src.numerics.linalg import singular_values

DEFAULT_RANK_DELTA = 0.01


def effective_rank(phi, delta: float = DEFAULT_RANK_DELTA) -> int:
    """
    Number of leading singular directions that hold (1 − δ) of the spectrum.

    Args:
        phi: Feature matrix, rows = observations, cols = neurons.
        delta: Share of the singular-value sum allowed to fall outside.

    Returns:
        k = d − #{i : cumsum(σ)_i ≥ (1 − δ)·Σσ} + 1, between 1 and min(rows, cols).
    """
    phi = as_feature_matrix(phi)
    sigma = singular_values(phi)
    nuclear_norm = np.sum(sigma)
    if nuclear_norm == 0.0:
        warnings.warn("Feature matrix is all zeros; effective rank reported as 1", RuntimeWarning, stacklevel=2)

    cumsum = np.cumsum(sigma)
    threshold_crossed = cumsum >= (1.0 - delta) * nuclear_norm
    return int(sigma.shape[0] - np.sum(threshold_crossed) + 1)
