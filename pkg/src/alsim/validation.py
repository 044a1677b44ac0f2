"""Small input-validation helpers shared across modules."""

from __future__ import annotations

import numpy as np


def as_float_vector(x, name: str = "x") -> np.ndarray:
    """Coerce to a finite 1-D float64 array or raise ValueError."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_distribution(dist, n: int | None = None, tol: float = 1e-6) -> np.ndarray:
    """Validate a probability vector: entries >= 0, sum within `tol` of 1."""
    p = as_float_vector(dist, "dist")
    if n is not None and p.shape[0] != n:
        raise ValueError(f"dist has length {p.shape[0]}, expected {n}")
    if np.any(p < 0):
        raise ValueError("dist has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"dist sums to {total}, not 1 within {tol}")
    return p


def check_fraction(value: float, name: str) -> float:
    """Require a real number strictly inside (0, 1)."""
    value = float(value)
    if not (0.0 < value < 1.0):
        raise ValueError(f"{name} must lie in (0, 1), got {value}")
    return value


def check_positive(value: float, name: str) -> float:
    """Require a finite real number > 0."""
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value}")
    return value
