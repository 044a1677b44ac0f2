"""Exponential-decay model of the oracle's memory.

The chance that the oracle still remembers the activity behind an
observation decays exponentially with the lag between capture and query:
``exp(-delta_t / s)`` where ``s`` is the user-specific memory strength, in
the same time unit as the observation timestamps.  Only the ratio
``delta_t / s`` matters, so the unit itself is free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Pool
from .validation import check_fraction, check_positive


@dataclass(frozen=True)
class MemoryModel:
    """Oracle memory with decay constant ``strength_s`` (> 0, finite)."""

    strength_s: float

    def __post_init__(self):
        check_positive(self.strength_s, "strength_s")

    def retention(self, delta_t):
        """Probability of correct recall after lag ``delta_t`` (scalar or array).

        Always in (0, 1]: exactly 1 at zero lag, and floored at the smallest
        positive float where the exponential would underflow to zero.
        """
        dt = np.asarray(delta_t, dtype=np.float64)
        if np.any(dt < 0):
            raise ValueError("delta_t must be >= 0 (query cannot precede the observation)")
        out = np.maximum(np.exp(-dt / self.strength_s), np.finfo(np.float64).tiny)
        return float(out) if np.isscalar(delta_t) or dt.ndim == 0 else out


class PerfectMemory:
    """Degenerate memory whose retention is clamped to 1 at every lag.

    Stands in for the infinite-strength limit; used to show that the
    combined strategy collapses to pure uncertainty sampling when memory
    never decays.
    """

    strength_s = math.inf

    def retention(self, delta_t):
        dt = np.asarray(delta_t, dtype=np.float64)
        if np.any(dt < 0):
            raise ValueError("delta_t must be >= 0 (query cannot precede the observation)")
        if np.isscalar(delta_t) or dt.ndim == 0:
            return 1.0
        return np.ones_like(dt)

    def __repr__(self) -> str:  # pragma: no cover
        return "PerfectMemory()"


@dataclass(frozen=True)
class RetentionLevel:
    """Named retention band. ``target_low`` is the retention calibrated at the
    pool's maximum lag; the high end emerges from the minimum lag and is
    reported, not configured."""

    name: str
    target_low: float
    target_high: float = 0.99

    def __post_init__(self):
        if not (0.0 < self.target_low <= self.target_high <= 1.0):
            raise ValueError(
                f"retention level {self.name}: need 0 < target_low <= target_high <= 1, "
                f"got ({self.target_low}, {self.target_high})"
            )


#: Comparative three-level set used by the baseline comparison sweeps.
DEFAULT_RETENTION_LEVELS = (
    RetentionLevel("R1", 0.10),
    RetentionLevel("R2", 0.25),
    RetentionLevel("R3", 0.70),
)

#: Five-level set used by the budget-sweep-only analysis.
FIVE_RETENTION_LEVELS = (
    RetentionLevel("R1", 0.10),
    RetentionLevel("R2", 0.20),
    RetentionLevel("R3", 0.30),
    RetentionLevel("R4", 0.50),
    RetentionLevel("R5", 0.70),
)


def calibrate_strength(delta_t_ref: float, target_retention: float) -> MemoryModel:
    """Invert the decay curve: the strength for which retention at lag
    ``delta_t_ref`` equals ``target_retention``."""
    check_positive(delta_t_ref, "delta_t_ref")
    check_fraction(target_retention, "target_retention")
    return MemoryModel(strength_s=-delta_t_ref / math.log(target_retention))


def retention_range(pool: Pool, t_q: float, model: MemoryModel) -> tuple[float, float]:
    """Retention band over a pool at query time ``t_q``: (value at the oldest
    observation, value at the newest)."""
    ts = pool.timestamps()
    t_max = float(ts.max())
    if t_q < t_max:
        raise ValueError(f"t_q={t_q} precedes the latest observation at {t_max}")
    low = model.retention(t_q - float(ts.min()))
    high = model.retention(t_q - t_max)
    return float(low), float(high)
