"""Synthetic activity-dataset generator.

Produces labeled, timestamped Gaussian-blob feature vectors whose two knobs
match the data properties that drive simulator behavior: how separable the
classes are (``class_separation`` vs ``noise_sigma``) and how often the
activity switches over time (``switch_prob``).  Small switch probabilities
give long single-activity runs, the regime where recency-only selection
keeps querying the same activity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ActivityVocabulary, Observation, Pool, RngStream
from .validation import check_positive


@dataclass(frozen=True)
class SyntheticSpec:
    """Generator parameters; all validated on construction."""

    n_classes: int
    d: int
    m: int
    class_separation: float
    noise_sigma: float
    switch_prob: float
    dt: float
    seed: int

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        check_positive(self.class_separation, "class_separation")
        check_positive(self.noise_sigma, "noise_sigma")
        if not (0.0 < self.switch_prob <= 1.0):
            raise ValueError(f"switch_prob must lie in (0, 1], got {self.switch_prob}")
        check_positive(self.dt, "dt")

    def vocabulary(self) -> ActivityVocabulary:
        """Zero-padded names so lexicographic order equals class order."""
        width = len(str(self.n_classes - 1))
        return ActivityVocabulary(tuple(f"act{i:0{width}d}" for i in range(self.n_classes)))


def class_means(spec: SyntheticSpec) -> np.ndarray:
    """Distinct fixed mean per class: axis-aligned unit points scaled by
    ``class_separation``, wrapping to larger magnitudes when classes
    outnumber dimensions."""
    means = np.zeros((spec.n_classes, spec.d))
    for c in range(spec.n_classes):
        means[c, c % spec.d] = spec.class_separation * (1 + c // spec.d)
    return means


def generate(spec: SyntheticSpec) -> Pool:
    """Generate a pool: a Markov activity sequence (switch with probability
    ``switch_prob`` to a uniformly chosen other class) sampled at ``dt``
    intervals, features = class mean + isotropic Gaussian noise."""
    rng = RngStream(spec.seed)
    n = spec.n_classes

    states = np.empty(spec.m, dtype=np.int64)
    state = min(int(rng.random() * n), n - 1)
    states[0] = state
    for i in range(1, spec.m):
        u_switch = rng.random()
        u_target = rng.random()
        if u_switch < spec.switch_prob:
            k = min(int(u_target * (n - 1)), n - 2)
            state = k if k < state else k + 1
        states[i] = state

    means = class_means(spec)
    noise = rng.normal((spec.m, spec.d)) * spec.noise_sigma
    features = means[states] + noise

    observations = [
        Observation(features[i], timestamp=i * spec.dt, true_label=int(states[i]), subject=0, id=i)
        for i in range(spec.m)
    ]
    return Pool(observations)
