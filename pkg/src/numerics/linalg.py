"""
Dense linear algebra helpers
Matrices are float64 numpy arrays; these helpers validate them once at the
boundary so the layers and diagnostics can assume clean input.
"""

import numpy as np
import numpy.typing as npt

from src.errors import InvalidInputError, ShapeError

Matrix = npt.NDArray[np.float64]


def as_matrix(data, name: str = "matrix") -> Matrix:
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return m


def as_vector(data, name: str = "vector") -> np.ndarray:
    v = np.asarray(data, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return v


def singular_values(m) -> np.ndarray:
    """Singular values in descending order, length min(rows, cols)."""
    m = as_matrix(m)
    sigma = np.linalg.svd(m, compute_uv=False)
    # LAPACK already sorts; roundoff can still leave -0.0 style noise
    sigma = np.clip(sigma, 0.0, None)
    return np.sort(sigma)[::-1]


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m), ord="fro"))
