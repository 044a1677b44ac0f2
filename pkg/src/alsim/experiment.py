"""Experiment harness: strategy x retention x budget sweeps with repeated
seeded trials, plus aggregation and CSV I/O.

Each (subject, retention, strategy, budget, repeat) cell runs one session
whose seeds are derived by hashing the cell coordinates, so results are
reproducible bit-for-bit and cells are independent.  Within a
(subject, retention, repeat) coordinate every strategy and budget shares the
same train/test split and initial labeled draw, making comparisons paired.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import ActivityVocabulary, Pool, RngStream, load_dataset_csv, pools_by_subject, split_pool
from .memory import DEFAULT_RETENTION_LEVELS, RetentionLevel, calibrate_strength
from .strategies import STRATEGIES, SessionSeeds, check_strategy, run_session
from .synthetic import SyntheticSpec, generate


class ConfigError(ValueError):
    """Invalid experiment configuration or input data."""


RESULTS_HEADER = (
    "strategy,retention,strength_s,budget,repeat,subject,"
    "final_accuracy,noisy_fraction,cum_objective,queries,seed"
)
CURVES_HEADER = "strategy,retention,repeat,subject,query_index,accuracy"
AGGREGATE_HEADER = "strategy,retention,budget,mean_accuracy,std_accuracy,n"

DEFAULT_BUDGETS = (5, 10, 20, 40, 60, 100, 140, 200)


@dataclass(frozen=True)
class ClassifierConfig:
    l2_lambda: float = 1e-3
    learning_rate: float = 0.5
    epochs: int = 300
    standardize: bool = True

    def params(self) -> dict:
        return {
            "l2_lambda": self.l2_lambda,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | None = None
    synthetic: SyntheticSpec | None = None
    strategies: tuple[str, ...] = STRATEGIES
    retention_levels: tuple[RetentionLevel, ...] = DEFAULT_RETENTION_LEVELS
    budgets: tuple[int, ...] = DEFAULT_BUDGETS
    repeats: int = 30
    init_k: int = 2
    test_fraction: float = 0.3
    base_seed: int = 0
    t_q_offset: float = 0.0
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)

    def __post_init__(self):
        if (self.dataset is None) == (self.synthetic is None):
            raise ConfigError("config needs exactly one of a dataset path or a synthetic spec")
        for s in self.strategies:
            check_strategy(s)
        if not self.budgets or any(b <= 0 for b in self.budgets):
            raise ConfigError(f"budgets must be positive, got {self.budgets}")
        if list(self.budgets) != sorted(self.budgets) or len(set(self.budgets)) != len(self.budgets):
            raise ConfigError(f"budgets must be strictly ascending, got {self.budgets}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.init_k < 1:
            raise ConfigError(f"init_k must be >= 1, got {self.init_k}")
        if not (0.0 < self.test_fraction < 1.0):
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if self.t_q_offset < 0:
            raise ConfigError(f"t_q_offset must be >= 0, got {self.t_q_offset}")


@dataclass(frozen=True)
class ResultRecord:
    """One (strategy, retention, budget, repeat, subject) outcome."""

    strategy: str
    retention_name: str
    memory_strength_s: float
    budget: int
    repeat_index: int
    subject: int
    final_accuracy: float
    noisy_label_fraction: float
    cumulative_objective: float
    queries_executed: int
    seed: int

    def csv_row(self) -> list[str]:
        return [
            self.strategy,
            self.retention_name,
            repr(self.memory_strength_s),
            str(self.budget),
            str(self.repeat_index),
            str(self.subject),
            repr(self.final_accuracy),
            repr(self.noisy_label_fraction),
            repr(self.cumulative_objective),
            str(self.queries_executed),
            str(self.seed),
        ]

    def sort_key(self):
        return (self.strategy, self.retention_name, self.budget, self.repeat_index, self.subject)


@dataclass(frozen=True)
class CurvePoint:
    strategy: str
    retention_name: str
    repeat_index: int
    subject: int
    query_index: int
    accuracy: float


def derive_seed(base_seed: int, *parts) -> int:
    """64-bit child seed: SHA-256 of the base seed joined with the cell
    coordinates, truncated to 8 bytes."""
    text = "|".join([str(int(base_seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def load_pools(config: ExperimentConfig) -> tuple[dict[int, Pool], ActivityVocabulary]:
    """Materialize the per-subject pools named by the config."""
    if config.synthetic is not None:
        pool = generate(config.synthetic)
        vocab = config.synthetic.vocabulary()
    else:
        try:
            pool, vocab = load_dataset_csv(config.dataset)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load dataset {config.dataset}: {exc}") from exc
    return pools_by_subject(pool), vocab


def _run_group(args) -> tuple[list[ResultRecord], list[CurvePoint]]:
    """All sessions for one (subject, retention level, repeat) coordinate."""
    config, subject, pool, vocab, level, repeat = args
    ts = pool.timestamps()
    t_q = float(ts.max()) + config.t_q_offset
    max_lag = t_q - float(ts.min())
    memory = calibrate_strength(max(max_lag, np.finfo(float).tiny), level.target_low)

    split_rng = RngStream(derive_seed(config.base_seed, "split", subject, level.name, repeat))
    train, test = split_pool(pool, config.test_fraction, split_rng, n_classes=vocab.n)
    init_seed = derive_seed(config.base_seed, "init", subject, level.name, repeat)

    records: list[ResultRecord] = []
    curves: list[CurvePoint] = []
    for strategy in config.strategies:
        for budget in config.budgets:
            oracle_seed = derive_seed(config.base_seed, "oracle", subject, level.name, strategy, budget, repeat)
            select_seed = derive_seed(config.base_seed, "select", subject, level.name, strategy, budget, repeat)
            trace = run_session(
                strategy, train, test, vocab, memory, budget, config.init_k,
                SessionSeeds(init_seed, oracle_seed, select_seed),
                classifier_params=config.classifier.params(),
                standardize=config.classifier.standardize,
                t_q=t_q,
            )
            records.append(ResultRecord(
                strategy=strategy,
                retention_name=level.name,
                memory_strength_s=memory.strength_s,
                budget=budget,
                repeat_index=repeat,
                subject=subject,
                final_accuracy=trace.final_accuracy,
                noisy_label_fraction=trace.noisy_fraction,
                cumulative_objective=trace.final_objective,
                queries_executed=len(trace.query_order),
                seed=oracle_seed,
            ))
            if budget == config.budgets[-1]:
                curves.extend(
                    CurvePoint(strategy, level.name, repeat, subject, i + 1, acc)
                    for i, acc in enumerate(trace.accuracy_curve)
                )
    return records, curves


def run_sweep(
    config: ExperimentConfig,
    jobs: int = 1,
    collect_curves: bool = False,
) -> tuple[list[ResultRecord], list[CurvePoint]]:
    """Run the whole sweep; returns records (and per-query accuracy curves of
    each largest-budget session when requested), sorted by cell coordinates
    regardless of execution order or worker count."""
    pools, vocab = load_pools(config)
    for subject, pool in pools.items():
        need = config.init_k + 1
        if len(pool) < need:
            raise ConfigError(f"subject {subject} has only {len(pool)} observations; need >= {need}")

    tasks = [
        (config, subject, pool, vocab, level, repeat)
        for subject, pool in pools.items()
        for level in config.retention_levels
        for repeat in range(config.repeats)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool_exec:
            results = list(pool_exec.map(_run_group, tasks, chunksize=1))
    else:
        results = [_run_group(t) for t in tasks]

    records = [rec for group, _ in results for rec in group]
    records.sort(key=ResultRecord.sort_key)
    curves: list[CurvePoint] = []
    if collect_curves:
        curves = [pt for _, group in results for pt in group]
        curves.sort(key=lambda p: (p.strategy, p.retention_name, p.repeat_index, p.subject, p.query_index))
    return records, curves


@dataclass(frozen=True)
class AggregateRow:
    strategy: str
    retention_name: str
    budget: int
    mean_accuracy: float
    std_accuracy: float
    n: int


def aggregate(records: list[ResultRecord]) -> list[AggregateRow]:
    """Mean/std of final accuracy per (strategy, retention, budget):
    per-subject mean (and population std) over repeats, then averaged across
    subjects.  Order-independent."""
    if not records:
        raise ValueError("no records to aggregate")
    cells: dict[tuple[str, str, int], dict[int, list[float]]] = {}
    for rec in records:
        key = (rec.strategy, rec.retention_name, rec.budget)
        cells.setdefault(key, {}).setdefault(rec.subject, []).append(rec.final_accuracy)
    rows = []
    for key in sorted(cells):
        by_subject = cells[key]
        subj_means = [float(np.mean(v)) for _, v in sorted(by_subject.items())]
        subj_stds = [float(np.std(v)) for _, v in sorted(by_subject.items())]
        n = sum(len(v) for v in by_subject.values())
        rows.append(AggregateRow(key[0], key[1], key[2], float(np.mean(subj_means)), float(np.mean(subj_stds)), n))
    return rows


def results_csv_text(records: list[ResultRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER.split(","))
    for rec in records:
        writer.writerow(rec.csv_row())
    return buf.getvalue()


def write_results_csv(records: list[ResultRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(results_csv_text(records))


def read_results_csv(path) -> list[ResultRecord]:
    """Parse a results CSV, validating the schema; errors name the line."""
    expected = RESULTS_HEADER.split(",")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected:
            raise ValueError(f"{path}: line 1: header must be {RESULTS_HEADER!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise ValueError(f"{path}: line {lineno}: expected {len(expected)} fields, got {len(row)}")
            try:
                records.append(ResultRecord(
                    strategy=check_strategy(row[0]),
                    retention_name=row[1],
                    memory_strength_s=float(row[2]),
                    budget=int(row[3]),
                    repeat_index=int(row[4]),
                    subject=int(row[5]),
                    final_accuracy=float(row[6]),
                    noisy_label_fraction=float(row[7]),
                    cumulative_objective=float(row[8]),
                    queries_executed=int(row[9]),
                    seed=int(row[10]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
    return records


def write_curves_csv(curves: list[CurvePoint], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CURVES_HEADER.split(","))
        for pt in curves:
            writer.writerow([
                pt.strategy, pt.retention_name, str(pt.repeat_index),
                str(pt.subject), str(pt.query_index), repr(pt.accuracy),
            ])


def write_aggregate_csv(rows: list[AggregateRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_HEADER.split(","))
        for r in rows:
            writer.writerow([
                r.strategy, r.retention_name, str(r.budget),
                repr(r.mean_accuracy), repr(r.std_accuracy), str(r.n),
            ])


def _get(parser: configparser.ConfigParser, section: str, option: str, conv, default):
    if not parser.has_option(section, option):
        return default
    raw = parser.get(section, option)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {option} = {raw!r}: {exc}") from None


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_levels(raw: str) -> tuple[RetentionLevel, ...]:
    levels = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, low = item.partition(":")
        if not low:
            raise ValueError(f"retention level {item!r} must look like NAME:target_low")
        levels.append(RetentionLevel(name.strip(), float(low)))
    if not levels:
        raise ValueError("no retention levels given")
    return tuple(levels)


def load_synthetic_spec(parser: configparser.ConfigParser) -> SyntheticSpec | None:
    if not parser.has_section("synthetic"):
        return None
    try:
        return SyntheticSpec(
            n_classes=_get(parser, "synthetic", "n_classes", int, 6),
            d=_get(parser, "synthetic", "d", int, 6),
            m=_get(parser, "synthetic", "m", int, 600),
            class_separation=_get(parser, "synthetic", "class_separation", float, 3.0),
            noise_sigma=_get(parser, "synthetic", "noise_sigma", float, 0.5),
            switch_prob=_get(parser, "synthetic", "switch_prob", float, 0.1),
            dt=_get(parser, "synthetic", "dt", float, 1.0),
            seed=_get(parser, "synthetic", "seed", int, 0),
        )
    except ValueError as exc:
        raise ConfigError(f"[synthetic]: {exc}") from None


def load_config(path, base_seed_override: int | None = None) -> ExperimentConfig:
    """Read an INI experiment config (sections: experiment, classifier,
    synthetic)."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    sec = "experiment"
    if not parser.has_section(sec):
        raise ConfigError(f"{path}: missing [experiment] section")

    def csv_ints(raw: str) -> tuple[int, ...]:
        return tuple(int(v.strip()) for v in raw.split(",") if v.strip())

    def csv_strs(raw: str) -> tuple[str, ...]:
        return tuple(v.strip().lower() for v in raw.split(",") if v.strip())

    classifier = ClassifierConfig(
        l2_lambda=_get(parser, "classifier", "l2_lambda", float, 1e-3),
        learning_rate=_get(parser, "classifier", "learning_rate", float, 0.5),
        epochs=_get(parser, "classifier", "epochs", int, 300),
        standardize=_get(parser, "classifier", "standardize", _parse_bool, True),
    )
    base_seed = _get(parser, sec, "base_seed", int, 0)
    if base_seed_override is not None:
        base_seed = base_seed_override
    try:
        return ExperimentConfig(
            dataset=_get(parser, sec, "dataset", str, None),
            synthetic=load_synthetic_spec(parser),
            strategies=_get(parser, sec, "strategies", csv_strs, STRATEGIES),
            retention_levels=_get(parser, sec, "retention_levels", _parse_levels, DEFAULT_RETENTION_LEVELS),
            budgets=_get(parser, sec, "budgets", csv_ints, DEFAULT_BUDGETS),
            repeats=_get(parser, sec, "repeats", int, 30),
            init_k=_get(parser, sec, "init_k", int, 2),
            test_fraction=_get(parser, sec, "test_fraction", float, 0.3),
            base_seed=base_seed,
            t_q_offset=_get(parser, sec, "t_q_offset", float, 0.0),
            classifier=classifier,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
