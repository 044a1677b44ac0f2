"""Domain types shared by all modules: vocabulary, observations, pools,
labeled sets, and deterministic randomness.

A ``Pool`` is an ordered collection of timestamped, pre-featurized sensor
observations.  Ground-truth labels travel inside ``Observation`` but are only
ever read by the simulated oracle and the evaluation metrics, never by a
query-selection strategy or the classifier.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .validation import check_fraction

#: RNG algorithm used everywhere.  PCG64 is numpy's default 64-bit generator;
#: a fixed seed yields the same draw sequence on every platform.
RNG_ALGORITHM = "PCG64"


class RngStream:
    """Seeded random stream (numpy PCG64) with a fixed, documented algorithm.

    Identical seeds produce identical draw sequences.  ``random()`` draws one
    unit uniform; callers that need a fixed draw count per event (the oracle,
    random selection) use it directly instead of variable-consumption helpers.
    """

    algorithm = RNG_ALGORITHM

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        """One unit uniform draw."""
        return float(self.generator.random())

    def normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, algorithm={self.algorithm!r})"


@dataclass(frozen=True)
class ActivityVocabulary:
    """Fixed, ordered set of activity class names.

    Declared up front (from the dataset or config) so the classifier always
    emits a full distribution over all classes, including ones not yet seen.
    """

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        if len(self.names) < 2:
            raise ValueError(f"vocabulary needs at least 2 activities, got {len(self.names)}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("vocabulary names must be unique")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)


@dataclass(frozen=True, eq=False)
class Observation:
    """One timestamped feature vector with a hidden ground-truth label.

    ``true_label`` is visible only to the oracle and the evaluator; ``id`` is
    the observation's position in the pool it was originally loaded into.
    """

    features: np.ndarray
    timestamp: float
    true_label: int
    subject: int = 0
    id: int = 0

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim != 1:
            raise ValueError(f"features must be a vector, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise ValueError(f"observation {self.id}: non-finite features")
        if self.timestamp < 0:
            raise ValueError(f"observation {self.id}: negative timestamp {self.timestamp}")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "timestamp", float(self.timestamp))


class Pool:
    """Ordered list of observations sharing one feature dimension.

    Timestamps are non-decreasing in list order; this is asserted on every
    constructed pool.
    """

    def __init__(self, observations: list[Observation]):
        observations = list(observations)
        if not observations:
            raise ValueError("pool must contain at least one observation")
        d = observations[0].features.shape[0]
        prev_t = -np.inf
        for obs in observations:
            if obs.features.shape[0] != d:
                raise ValueError(
                    f"observation {obs.id}: dimension {obs.features.shape[0]} != pool dimension {d}"
                )
            if obs.timestamp < prev_t:
                raise ValueError("pool timestamps must be non-decreasing")
            prev_t = obs.timestamp
        self.observations = observations
        self.d = d

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def feature_matrix(self) -> np.ndarray:
        return np.stack([obs.features for obs in self.observations])

    def timestamps(self) -> np.ndarray:
        return np.array([obs.timestamp for obs in self.observations], dtype=np.float64)

    def true_labels(self) -> np.ndarray:
        return np.array([obs.true_label for obs in self.observations], dtype=np.int64)

    def ids(self) -> np.ndarray:
        return np.array([obs.id for obs in self.observations], dtype=np.int64)

    def subjects(self) -> list[int]:
        """Distinct subject identifiers, ascending."""
        return sorted({obs.subject for obs in self.observations})


@dataclass
class LabeledEntry:
    """One labeled observation.  ``was_correct`` exists for metrics only and
    is never read by any strategy or classifier."""

    observation: Observation
    assigned_label: int
    was_correct: bool


@dataclass
class LabeledSet:
    """Training set assembled by a session: observations plus the labels the
    oracle assigned them (right or wrong)."""

    entries: list[LabeledEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, observation: Observation, assigned_label: int, was_correct: bool) -> None:
        self.entries.append(LabeledEntry(observation, int(assigned_label), bool(was_correct)))

    def feature_matrix(self) -> np.ndarray:
        if not self.entries:
            raise ValueError("labeled set is empty")
        return np.stack([e.observation.features for e in self.entries])

    def labels(self) -> np.ndarray:
        return np.array([e.assigned_label for e in self.entries], dtype=np.int64)

    def ids(self) -> list[int]:
        return [e.observation.id for e in self.entries]


def split_pool(
    pool: Pool,
    test_fraction: float,
    rng: RngStream,
    n_classes: int | None = None,
) -> tuple[Pool, Pool]:
    """Stratified train/test split by true label.

    Per-class test counts are proportional within one observation (floor plus
    largest-remainder top-up to the overall target).  Both halves keep
    timestamp order.  Every class in ``range(n_classes)`` (or every observed
    class when ``n_classes`` is None) must have at least 2 observations.
    """
    check_fraction(test_fraction, "test_fraction")
    labels = pool.true_labels()
    classes = range(n_classes) if n_classes is not None else sorted(set(labels.tolist()))

    per_class: dict[int, np.ndarray] = {}
    for c in classes:
        idx = np.flatnonzero(labels == c)
        if idx.size == 0:
            raise ValueError(f"class {c} has no observations")
        if idx.size < 2:
            raise ValueError(f"class {c} has only {idx.size} observation; need at least 2")
        per_class[c] = idx

    m = len(pool)
    total_test = int(m * test_fraction + 0.5)
    total_test = min(max(total_test, 1), m - 1)

    targets = {c: idx.size * test_fraction for c, idx in per_class.items()}
    counts = {c: int(np.floor(t)) for c, t in targets.items()}
    # Keep at least one training item per class.
    for c, idx in per_class.items():
        counts[c] = min(counts[c], idx.size - 1)
    leftover = total_test - sum(counts.values())
    if leftover > 0:
        by_remainder = sorted(
            per_class, key=lambda c: (-(targets[c] - np.floor(targets[c])), c)
        )
        for c in by_remainder:
            if leftover == 0:
                break
            if counts[c] < per_class[c].size - 1:
                counts[c] += 1
                leftover -= 1

    test_rows: list[int] = []
    for c in sorted(per_class):
        idx = per_class[c]
        order = rng.generator.permutation(idx.size)
        test_rows.extend(idx[order[: counts[c]]].tolist())

    test_set = set(test_rows)
    train_obs = [obs for i, obs in enumerate(pool.observations) if i not in test_set]
    test_obs = [obs for i, obs in enumerate(pool.observations) if i in test_set]
    return Pool(train_obs), Pool(test_obs)


def draw_initial_labels(train: Pool, k: int, rng: RngStream) -> LabeledSet:
    """Draw ``k`` seed observations uniformly without replacement and label
    them with their true labels (these are given, not oracle-queried)."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k > len(train):
        raise ValueError(f"cannot draw {k} initial labels from a pool of {len(train)}")
    labeled = LabeledSet()
    if k == 0:
        return labeled
    rows = rng.generator.permutation(len(train))[:k]
    for row in sorted(rows.tolist()):
        obs = train.observations[row]
        labeled.add(obs, obs.true_label, was_correct=True)
    return labeled


DATASET_FIXED_COLUMNS = ("subject", "timestamp", "label")


def load_dataset_csv(path, vocab: ActivityVocabulary | None = None) -> tuple[Pool, ActivityVocabulary]:
    """Load a dataset CSV with header ``subject,timestamp,label,f0,...``.

    Rows may arrive unsorted; the loader sorts them by timestamp (stable).
    When no vocabulary is supplied, it is declared up front as the sorted
    unique label strings of the whole file.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        expected = list(DATASET_FIXED_COLUMNS)
        if header[: len(expected)] != expected:
            raise ValueError(
                f"{path}: header must start with {','.join(expected)}, got {','.join(header[:3])}"
            )
        feature_names = header[len(expected):]
        d = len(feature_names)
        if d == 0:
            raise ValueError(f"{path}: no feature columns found")
        for j, name in enumerate(feature_names):
            if name != f"f{j}":
                raise ValueError(f"{path}: feature column {len(expected) + j} must be named f{j}, got {name!r}")

        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                subject = int(row[0])
                timestamp = float(row[1])
                feats = np.array([float(v) for v in row[3:]], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            rows.append((subject, timestamp, row[2], feats, lineno))

    if not rows:
        raise ValueError(f"{path}: no data rows")

    if vocab is None:
        vocab = ActivityVocabulary(tuple(sorted({r[2] for r in rows})))
    label_to_index = {name: i for i, name in enumerate(vocab.names)}

    rows.sort(key=lambda r: r[1])  # stable by timestamp
    observations = []
    for i, (subject, timestamp, label, feats, lineno) in enumerate(rows):
        if label not in label_to_index:
            raise ValueError(f"{path}: line {lineno}: unknown label {label!r}")
        observations.append(
            Observation(feats, timestamp, label_to_index[label], subject=subject, id=i)
        )
    return Pool(observations), vocab


def save_dataset_csv(pool: Pool, vocab: ActivityVocabulary, path) -> None:
    """Write a pool in the dataset CSV schema (label column holds names)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(DATASET_FIXED_COLUMNS) + [f"f{j}" for j in range(pool.d)])
        for obs in pool:
            writer.writerow(
                [obs.subject, repr(obs.timestamp), vocab.names[obs.true_label]]
                + [repr(float(v)) for v in obs.features]
            )


def pools_by_subject(pool: Pool) -> dict[int, Pool]:
    """Split a pool into per-subject pools, preserving timestamp order and ids."""
    groups: dict[int, list[Observation]] = {}
    for obs in pool:
        groups.setdefault(obs.subject, []).append(obs)
    return {s: Pool(obs_list) for s, obs_list in sorted(groups.items())}
