"""Query-selection policies and the active-learning session loop.

Five strategies share one loop: score every remaining observation, pick one,
ask the oracle for its label, retrain, repeat until the budget is spent.

- ``emma``: expected gain = predictive entropy x memory retention
- ``ema``:  entropy only (retention factor fixed at 1)
- ``mma``:  retention only (entropy factor fixed at 1)
- ``ub``:   entropy only, paired with a perfect oracle (upper bound)
- ``lb``:   uniform random selection, noisy oracle (lower bound)

Scores are recomputed from the freshly retrained model on every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .classifier import SoftmaxClassifier, feature_scaler
from .data import ActivityVocabulary, LabeledSet, Observation, Pool, RngStream, draw_initial_labels
from .oracle import PerfectOracle, SimulatedOracle
from .validation import check_distribution

STRATEGIES = ("emma", "ema", "mma", "ub", "lb")


def check_strategy(kind: str) -> str:
    if kind not in STRATEGIES:
        raise ValueError(f"unknown strategy {kind!r}; valid: {', '.join(STRATEGIES)}")
    return kind


@dataclass(frozen=True)
class GainScore:
    """Per-observation expected gain. ``gain`` is always the product of the
    two terms; strategies that ignore a term carry it as 1.0."""

    entropy_term: float
    retention_term: float
    gain: float


class SessionSeeds(NamedTuple):
    """Independent seeds for the three random choices a session makes."""

    initial: int
    oracle: int
    selection: int


@dataclass
class SessionTrace:
    """Everything a session did, in query order."""

    query_order: list[int] = field(default_factory=list)
    labels_received: list[tuple[int, bool]] = field(default_factory=list)
    accuracy_curve: list[float] = field(default_factory=list)
    cumulative_objective: list[float] = field(default_factory=list)
    initial_accuracy: float = 0.0
    truncated: bool = False

    @property
    def final_accuracy(self) -> float:
        return self.accuracy_curve[-1] if self.accuracy_curve else self.initial_accuracy

    @property
    def noisy_fraction(self) -> float:
        if not self.labels_received:
            return 0.0
        return float(np.mean([not ok for _, ok in self.labels_received]))

    @property
    def final_objective(self) -> float:
        return self.cumulative_objective[-1] if self.cumulative_objective else 0.0


def entropy(dist) -> float:
    """Shannon entropy (natural log) of a class distribution, with the
    convention that zero-probability terms contribute zero."""
    p = check_distribution(dist)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def entropy_rows(probs: np.ndarray) -> np.ndarray:
    """Row-wise entropy of a (k, n) probability matrix."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(probs > 0, probs * np.log(probs), 0.0)
    return -terms.sum(axis=1)


def gain(kind: str, entropy_val: float, retention_val: float) -> GainScore:
    """Expected gain of labeling one observation under a strategy.

    ``lb`` never reads its gain when selecting; the entropy-retention
    product is still recorded so traces stay comparable across strategies.
    """
    check_strategy(kind)
    e, r = float(entropy_val), float(retention_val)
    if kind == "ema" or kind == "ub":
        return GainScore(e, 1.0, e)
    if kind == "mma":
        return GainScore(1.0, r, r)
    return GainScore(e, r, e * r)  # emma, lb


def _gain_vector(kind: str, ent: np.ndarray, ret: np.ndarray) -> np.ndarray:
    if kind in ("ema", "ub"):
        return ent
    if kind == "mma":
        return ret
    return ent * ret


def _argmax_tiebreak(gains: np.ndarray, ts: np.ndarray, ids: np.ndarray) -> int:
    """Index of the max gain; ties go to the larger timestamp, then the
    smaller id."""
    cand = np.flatnonzero(gains == gains.max())
    if cand.size > 1:
        cand = cand[ts[cand] == ts[cand].max()]
    if cand.size > 1:
        return int(cand[np.argmin(ids[cand])])
    return int(cand[0])


def select_next(
    kind: str,
    pool_view: list[Observation],
    model: SoftmaxClassifier,
    memory,
    t_q: float,
    rng: RngStream | None = None,
) -> int:
    """Pick the next observation to query from the remaining pool; returns
    its id.  ``lb`` draws uniformly (one RNG draw); the others take the
    argmax of their gain."""
    check_strategy(kind)
    if not pool_view:
        raise ValueError("cannot select from an empty pool")
    if kind == "lb":
        if rng is None:
            raise ValueError("lb selection needs an RngStream")
        row = min(int(rng.random() * len(pool_view)), len(pool_view) - 1)
        return pool_view[row].id

    X = np.stack([obs.features for obs in pool_view])
    ts = np.array([obs.timestamp for obs in pool_view])
    ids = np.array([obs.id for obs in pool_view])
    ent = entropy_rows(model.predict_proba(X))
    ret = np.asarray(memory.retention(t_q - ts))
    row = _argmax_tiebreak(_gain_vector(kind, ent, ret), ts, ids)
    return int(ids[row])


def run_session(
    kind: str,
    train: Pool,
    test: Pool,
    vocab: ActivityVocabulary,
    memory,
    budget: int,
    init_k: int,
    seeds: SessionSeeds,
    *,
    oracle=None,
    initial: LabeledSet | None = None,
    classifier_params: dict | None = None,
    standardize: bool = True,
    t_q: float | None = None,
) -> SessionTrace:
    """Run one full active-learning session and return its trace.

    Starts from ``init_k`` correctly-labeled seed observations (or the given
    ``initial`` set), then loops up to ``budget`` times: score the remaining
    pool with the current model, select, query the oracle, retrain, and
    measure held-out accuracy.  If the pool runs out early the trace is
    truncated and flagged rather than raising.

    ``memory`` drives the retention term of the scores; the oracle (built
    from ``seeds.oracle`` unless supplied) owns its own memory model, so the
    two can be decoupled deliberately, e.g. to clamp the scoring retention
    to 1 while keeping a forgetful oracle.
    """
    check_strategy(kind)
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    if init_k < 1 and initial is None:
        raise ValueError("run_session needs at least one initial label to fit a first model")

    params = dict(classifier_params or {})
    if t_q is None:
        t_q = float(train.timestamps().max())

    X = train.feature_matrix()
    ts = train.timestamps()
    ids = train.ids()
    if standardize:
        mu, sigma = feature_scaler(X)
        X = (X - mu) / sigma
        X_test = (test.feature_matrix() - mu) / sigma
    else:
        X_test = test.feature_matrix()
    y_test = test.true_labels()

    if initial is None:
        initial = draw_initial_labels(train, init_k, RngStream(seeds.initial))
    row_of = {int(i): r for r, i in enumerate(ids)}
    try:
        labeled_rows = [row_of[obs_id] for obs_id in initial.ids()]
    except KeyError as exc:
        raise ValueError(f"initial labeled set references id {exc} not present in the train pool") from None
    labeled_y = [e.assigned_label for e in initial.entries]

    if oracle is None:
        if kind == "ub":
            oracle = PerfectOracle(vocab)
        else:
            oracle = SimulatedOracle(memory, vocab, RngStream(seeds.oracle), t_q)
    select_rng = RngStream(seeds.selection)

    def refit() -> SoftmaxClassifier:
        clf = SoftmaxClassifier(n_classes=vocab.n, **params)
        return clf.fit(X[labeled_rows], np.array(labeled_y, dtype=np.int64))

    def test_accuracy(clf: SoftmaxClassifier) -> float:
        return float(np.mean(clf.predict(X_test) == y_test))

    model = refit()
    trace = SessionTrace(initial_accuracy=test_accuracy(model))

    taken = set(labeled_rows)
    remaining = [r for r in range(len(train)) if r not in taken]
    running = 0.0
    for _ in range(budget):
        if not remaining:
            trace.truncated = True
            break
        rem = np.array(remaining)
        ent = entropy_rows(model.predict_proba(X[rem]))
        ret = np.asarray(memory.retention(t_q - ts[rem]))
        if kind == "lb":
            pick = min(int(select_rng.random() * len(remaining)), len(remaining) - 1)
        else:
            pick = _argmax_tiebreak(_gain_vector(kind, ent, ret), ts[rem], ids[rem])
        row = remaining.pop(pick)
        score = gain(kind, float(ent[pick]), float(ret[pick]))

        response = oracle.answer(train.observations[row])
        labeled_rows.append(row)
        labeled_y.append(response.label)
        model = refit()

        trace.query_order.append(int(ids[row]))
        trace.labels_received.append((response.label, response.was_correct))
        running += score.gain
        trace.cumulative_objective.append(running)
        trace.accuracy_curve.append(test_accuracy(model))

    return trace
