"""Simulated human annotators.

``SimulatedOracle`` answers correctly with probability equal to its memory
retention at the query lag, and otherwise returns a uniformly random wrong
class.  ``PerfectOracle`` always answers correctly, for the upper-bound
baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .data import ActivityVocabulary, Observation, RngStream


@dataclass(frozen=True)
class QueryResponse:
    """Label returned by an oracle. ``was_correct`` is instrumentation only."""

    label: int
    was_correct: bool


class SimulatedOracle:
    """Memory-limited annotator.

    Every ``answer`` call consumes exactly two RNG draws (one for the
    remember/forget coin, one for the wrong-class choice, drawn even when it
    is not needed) so that trajectories sharing a seed stay aligned no matter
    how individual queries resolve.
    """

    def __init__(self, memory, vocab: ActivityVocabulary, rng: RngStream, query_time_tq: float):
        if vocab.n < 2:
            raise ValueError("oracle needs at least 2 classes (no wrong label exists otherwise)")
        self.memory = memory
        self.vocab = vocab
        self.rng = rng
        self.query_time_tq = float(query_time_tq)

    def answer(self, x: Observation) -> QueryResponse:
        if x.timestamp > self.query_time_tq:
            raise ValueError(
                f"observation at t={x.timestamp} is later than query time {self.query_time_tq}"
            )
        r = self.memory.retention(self.query_time_tq - x.timestamp)
        u_recall = self.rng.random()
        u_wrong = self.rng.random()
        if u_recall < r:
            return QueryResponse(label=x.true_label, was_correct=True)
        # floor of one unit uniform: fixed draw count, unlike rejection sampling
        n = self.vocab.n
        k = min(int(u_wrong * (n - 1)), n - 2)
        wrong = k if k < x.true_label else k + 1
        return QueryResponse(label=wrong, was_correct=False)


class PerfectOracle:
    """Annotator that never forgets; consumes no randomness."""

    def __init__(self, vocab: ActivityVocabulary):
        self.vocab = vocab
        self.query_time_tq = math.inf

    def answer(self, x: Observation) -> QueryResponse:
        return QueryResponse(label=x.true_label, was_correct=True)
