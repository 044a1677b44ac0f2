"""Acceptance gate: one test per criterion, each printing a pass line with
the measured values.  Run with ``pytest tests/test_acceptance.py -s``.

The two committed configs under configs/ drive the sweep-based criteria;
everything is seeded, so these outcomes are exact, not statistical.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from alsim.bruteforce import (
    TINY_CLASSIFIER_PARAMS,
    count_ordered_subsets,
    optimal_session,
    tiny_instance,
)
from alsim.classifier import SoftmaxClassifier, feature_scaler, loss_and_gradient
from alsim.data import RngStream
from alsim.experiment import load_config, results_csv_text, run_sweep
from alsim.memory import MemoryModel, PerfectMemory, calibrate_strength
from alsim.oracle import SimulatedOracle
from alsim.strategies import SessionSeeds, entropy, run_session
from alsim.synthetic import SyntheticSpec, generate

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
JOBS = 2


@pytest.fixture(scope="module")
def default_sweep():
    """One run of the full default sweep; shared by the trend, comparative,
    and determinism criteria."""
    config = load_config(CONFIG_DIR / "default.ini")
    records, _ = run_sweep(config, jobs=JOBS)
    return config, records


def cell_means(records):
    by_cell = {}
    for rec in records:
        by_cell.setdefault((rec.strategy, rec.retention_name, rec.budget), []).append(rec.final_accuracy)
    return {key: float(np.mean(vals)) for key, vals in by_cell.items()}


def test_c01_unit_identities():
    model = MemoryModel(strength_s=37.5)
    assert model.retention(0.0) == 1.0
    assert abs(model.retention(37.5) - math.exp(-1)) <= 1e-12

    assert entropy([1.0, 0.0, 0.0, 0.0]) == 0.0
    for n in range(2, 9):
        assert abs(entropy([1.0 / n] * n) - math.log(n)) <= 1e-12

    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(200):
        T = float(rng.uniform(1e-3, 1e5))
        r = float(rng.uniform(1e-6, 1 - 1e-6))
        worst = max(worst, abs(calibrate_strength(T, r).retention(T) - r) / r)
    assert worst <= 1e-9
    print(f"\n[PASS] C1 unit identities: retention/entropy exact, round-trip rel err {worst:.2e}")


def test_c02_oracle_binomial():
    from alsim.data import ActivityVocabulary, Observation

    vocab = ActivityVocabulary(("a", "b", "c", "d"))
    probe = Observation(np.zeros(2), timestamp=50.0, true_label=1, subject=0, id=0)
    n_queries = 10_000

    for r, seed in ((0.1, 501), (0.5, 502), (0.9, 503)):
        oracle = SimulatedOracle(calibrate_strength(50.0, r), vocab, RngStream(seed), 100.0)
        hits = sum(oracle.answer(probe).was_correct for _ in range(n_queries))
        tol = 3 * math.sqrt(r * (1 - r) / n_queries)
        assert abs(hits / n_queries - r) <= tol, (r, hits / n_queries)

    # wrong-branch uniformity over the other classes
    oracle = SimulatedOracle(calibrate_strength(50.0, 0.1), vocab, RngStream(504), 100.0)
    wrong = [resp.label for resp in (oracle.answer(probe) for _ in range(n_queries))
             if not resp.was_correct]
    p = 1.0 / 3
    tol = 3 * math.sqrt(p * (1 - p) / len(wrong))
    for label in (0, 2, 3):
        frac = wrong.count(label) / len(wrong)
        assert abs(frac - p) <= tol, (label, frac)
    print(f"[PASS] C2 oracle binomial: rates within 3-sigma at R=0.1/0.5/0.9; "
          f"{len(wrong)} wrong draws uniform within 3-sigma")


def test_c03_gradient_check():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 4))
        d = int(rng.integers(1, 5))
        k = int(rng.integers(2, 11))
        X = rng.normal(size=(k, d))
        y = rng.integers(0, n, k)
        W = rng.normal(size=(n, d + 1))
        lam = float(rng.uniform(0, 0.1))
        _, grad = loss_and_gradient(W, X, y, n, lam)
        fd = np.zeros_like(W)
        h = 1e-6
        for idx in np.ndindex(W.shape):
            Wp, Wm = W.copy(), W.copy()
            Wp[idx] += h
            Wm[idx] -= h
            fd[idx] = (loss_and_gradient(Wp, X, y, n, lam)[0]
                       - loss_and_gradient(Wm, X, y, n, lam)[0]) / (2 * h)
        worst = max(worst, float(np.abs(grad - fd).max() / np.abs(fd).max()))
    assert worst <= 1e-5
    print(f"[PASS] C3 gradient check: 20 instances, worst relative error {worst:.2e}")


def test_c04_counting():
    import itertools

    def enumerated(m, budget):
        return sum(sum(1 for _ in itertools.permutations(range(m), b)) for b in range(1, budget + 1))

    assert count_ordered_subsets(5, 2) == 25 == enumerated(5, 2)
    assert count_ordered_subsets(6, 3) == 156 == enumerated(6, 3)
    for m in range(1, 21):
        assert count_ordered_subsets(m, 1) == m == enumerated(m, 1)
    print("[PASS] C4 counting: (5,2)=25, (6,3)=156, (m,1)=m for m=1..20, all equal to enumeration")


def test_c05_half_approximation():
    ratios = []
    for i in range(20):
        m = 6 + i % 3
        budget = 2 + i % 2
        train, test, vocab, memory, init = tiny_instance(m, seed=100 + i)
        report = optimal_session(train, test, vocab, memory, budget, init,
                                 classifier_params=TINY_CLASSIFIER_PARAMS)
        ratios.append(report.ratio)
        assert report.ratio >= 0.5, (m, budget, 100 + i, report.ratio)
    print(f"[PASS] C5 half-approximation: 20 instances (m=6..8, B=2..3), "
          f"min ratio {min(ratios):.4f} >= 0.5")


def test_c06_exponential_growth():
    counts = []
    for budget in (1, 2, 3):
        train, test, vocab, memory, init = tiny_instance(7, seed=400)
        counts.append(optimal_session(train, test, vocab, memory, budget, init,
                                      classifier_params=TINY_CLASSIFIER_PARAMS).count_enumerated)
    factors = [counts[1] / counts[0], counts[2] / counts[1]]
    for f in factors:
        assert 7 / 2 <= f <= 7 * 2, (counts, factors)
    print(f"[PASS] C6 exponential growth: measured counts {counts}, "
          f"factors {factors[0]:.2f}, {factors[1]:.2f} within x2 of m=7")


def test_c07_clamped_equivalence():
    spec = SyntheticSpec(n_classes=4, d=3, m=200, class_separation=2.5,
                         noise_sigma=0.8, switch_prob=0.2, dt=1.0, seed=33)
    pool = generate(spec)
    vocab = spec.vocabulary()
    from alsim.data import split_pool
    train, test = split_pool(pool, 0.3, RngStream(90), n_classes=vocab.n)
    t_q = float(train.timestamps().max())
    memory = calibrate_strength(t_q - float(train.timestamps().min()), 0.2)
    for seed in range(600, 610):
        a = run_session("emma", train, test, vocab, PerfectMemory(), 30, 2,
                        SessionSeeds(seed, 0, 0),
                        oracle=SimulatedOracle(memory, vocab, RngStream(seed), t_q), t_q=t_q)
        b = run_session("ema", train, test, vocab, memory, 30, 2,
                        SessionSeeds(seed, 0, 0),
                        oracle=SimulatedOracle(memory, vocab, RngStream(seed), t_q), t_q=t_q)
        assert a.query_order == b.query_order, seed
    print("[PASS] C7 equivalence: retention clamped to 1 reproduces entropy-only "
          "query sequences on 10 seeds (m=200)")


def test_c08_trend_monotone_when_memory_strong():
    config = load_config(CONFIG_DIR / "separable.ini")
    pool = generate(config.synthetic)
    X = pool.feature_matrix()
    mu, sigma = feature_scaler(X)
    clf = SoftmaxClassifier(n_classes=config.synthetic.n_classes).fit(
        (X - mu) / sigma, pool.true_labels())
    full_acc = float(np.mean(clf.predict((X - mu) / sigma) == pool.true_labels()))
    assert full_acc > 0.95

    records, _ = run_sweep(config, jobs=JOBS)
    means = cell_means(records)
    curve = [means[("emma", "R5", b)] for b in config.budgets]
    for earlier, later in zip(curve, curve[1:]):
        assert later >= earlier - 0.02, curve
    print(f"[PASS] C8 trend A: full-data acc {full_acc:.3f} > 0.95; R5 curve "
          f"{[round(a, 3) for a in curve]} non-decreasing within 0.02")


def test_c09_trend_degrades_when_memory_weak(default_sweep):
    config, records = default_sweep
    means = cell_means(records)
    curve = {b: means[("emma", "R1", b)] for b in config.budgets}
    peak = max(curve.values())
    final = curve[200]
    assert peak - final >= 0.02, curve
    print(f"[PASS] C9 trend B: R1 peak {peak:.3f} vs B=200 {final:.3f} "
          f"(drop {peak - final:.3f} >= 0.02)")


def test_c10_comparative_ordering(default_sweep):
    config, records = default_sweep
    means = cell_means(records)
    margins_ema = []
    margins_mma = []
    for b in (5, 10, 20, 40):
        margins_ema.append(means[("emma", "R1", b)] - means[("ema", "R1", b)])
        margins_mma.append(means[("emma", "R1", b)] - means[("mma", "R1", b)])
    assert all(m >= 0 for m in margins_ema), margins_ema
    assert all(m >= 0 for m in margins_mma), margins_mma

    worst_ub, worst_lb = np.inf, np.inf
    for level in config.retention_levels:
        for b in config.budgets:
            emma = means[("emma", level.name, b)]
            worst_ub = min(worst_ub, means[("ub", level.name, b)] - emma)
            worst_lb = min(worst_lb, emma - means[("lb", level.name, b)])
    assert worst_ub >= -0.02
    assert worst_lb >= 0.0
    print(f"[PASS] C10 comparative: R1 budgets<=40 margins vs ema "
          f"{[round(m, 3) for m in margins_ema]}, vs mma {[round(m, 3) for m in margins_mma]}; "
          f"min(ub-emma)={worst_ub:+.3f} >= -0.02, min(emma-lb)={worst_lb:+.3f} >= 0")


def test_c11_determinism(default_sweep):
    config, records = default_sweep
    second, _ = run_sweep(config, jobs=JOBS)
    assert results_csv_text(records) == results_csv_text(second)
    print(f"[PASS] C11 determinism: two full default sweeps ({len(records)} records) "
          f"produce byte-identical CSVs")
