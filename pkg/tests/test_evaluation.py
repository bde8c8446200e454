import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpprlink.dppr import SolverConfig
from dpprlink.evaluation import (CSV_COLUMNS, Protocol, SplitError, aupr, holdout_split, mean_aupr,
                                 results_csv, run_benchmark, summarize, summary_json, sweep,
                                 sweep_csv, timings_csv)
from dpprlink.generators import BaParams
from dpprlink.graph import from_edges

from conftest import random_graph


def brute_force_ap(labels, scores):
    """O(n^2) average precision: rank each item by pairwise comparison."""
    n = len(labels)
    ranks = []
    for i in range(n):
        above = sum(1 for j in range(n) if scores[j] > scores[i])
        tied_before = sum(1 for j in range(i) if scores[j] == scores[i])
        ranks.append(above + tied_before + 1)
    total = 0.0
    for i in range(n):
        if labels[i] == 1:
            hits = sum(1 for j in range(n) if labels[j] == 1 and ranks[j] <= ranks[i])
            total += hits / ranks[i]
    return total / sum(labels)


def test_aupr_small_cases():
    assert aupr([1, 1, 0, 0], [0.9, 0.8, 0.1, 0.0]) == 1.0
    # the single positive sits at rank 2
    assert aupr([1, 0], [0.2, 0.9]) == 0.5
    # ties keep input order
    assert aupr([0, 1], [1.0, 1.0]) == 0.5
    assert aupr([1, 0], [1.0, 1.0]) == 1.0


def test_aupr_errors():
    with pytest.raises(ValueError):
        aupr([0, 0], [0.1, 0.2])
    with pytest.raises(ValueError):
        aupr([1, 0], [0.1])
    with pytest.raises(ValueError):
        aupr([], [])
    with pytest.raises(ValueError):
        aupr([2, 0], [0.1, 0.2])


def test_aupr_matches_brute_force(rng):
    for _ in range(50):
        n = int(rng.integers(1, 200))
        labels = rng.integers(0, 2, n)
        labels[rng.integers(n)] = 1
        scores = rng.integers(0, 6, n).astype(float) if rng.random() < 0.5 else rng.random(n)
        assert abs(aupr(labels, scores) - brute_force_ap(labels.tolist(), scores.tolist())) <= 1e-12


def test_reversed_perfect_ranking():
    labels = [0] * 5 + [1] * 5
    scores = list(range(10, 0, -1))
    assert aupr(labels, scores) == pytest.approx(brute_force_ap(labels, scores), abs=1e-15)
    assert aupr(labels, scores) == pytest.approx(np.mean([k / (5 + k) for k in range(1, 6)]))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(-20, 20)), min_size=1, max_size=60))
def test_aupr_invariant_under_monotone_transform(items):
    # integer scores keep these transforms strictly monotone in floating point
    labels = [lab for lab, _ in items]
    if sum(labels) == 0:
        labels[0] = 1
    scores = np.array([s for _, s in items], dtype=float)
    base = aupr(labels, scores)
    assert aupr(labels, np.exp(scores) * 3 + 1) == base
    assert aupr(labels, scores**3 - 7) == base
    assert aupr(labels, np.arctan(scores / 4)) == base


def test_split_karate_counts(karate):
    s = holdout_split(karate, 0.1, seed=4)
    assert len(s.positives) == 7 and len(s.negatives) == 7
    assert s.train.m == 71 and s.train.n == 34
    s20 = holdout_split(karate, 0.2, seed=4)
    assert len(s20.positives) == 15 and s20.train.m == 63


def test_split_invariants(karate, rng):
    graphs = [karate] + [random_graph(rng, 60, 0.1)[0] for _ in range(5)]
    for g in graphs:
        for seed in range(5):
            s = holdout_split(g, 0.1, seed)
            original = {tuple(e) for e in g.edges().tolist()}
            train = {tuple(e) for e in s.train.edges().tolist()}
            pos = {tuple(e) for e in s.positives.tolist()}
            neg = {tuple(e) for e in s.negatives.tolist()}
            assert pos <= original and not (pos & train)
            assert train | pos == original
            assert not (neg & original)
            assert len(neg) == len(pos) == len(s.negatives)
            assert all(u < v for u, v in neg)
            assert sorted(s.labels()) == [0] * len(neg) + [1] * len(pos)


def test_split_deterministic(karate):
    a, b = holdout_split(karate, 0.1, 7), holdout_split(karate, 0.1, 7)
    np.testing.assert_array_equal(a.positives, b.positives)
    np.testing.assert_array_equal(a.negatives, b.negatives)
    np.testing.assert_array_equal(a.pairs(), b.pairs())
    assert not np.array_equal(a.pairs(), holdout_split(karate, 0.1, 8).pairs())


def test_split_errors():
    k4 = from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    with pytest.raises(SplitError, match="non-edges"):
        holdout_split(k4, 0.1)
    with pytest.raises(SplitError, match="too small"):
        holdout_split(from_edges(10, [(0, 1), (2, 3)]), 0.1)
    with pytest.raises(SplitError):
        holdout_split(from_edges(10, [(0, 1)]), 1.5)


def test_dense_graph_negative_sampling():
    # complement is small, exercising the enumeration path
    n = 30
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if (i + j) % 7]
    g = from_edges(n, edges)
    s = holdout_split(g, 0.1, 0)
    assert not any(g.has_edge(u, v) for u, v in s.negatives)
    assert len({tuple(p) for p in s.negatives.tolist()}) == len(s.negatives)


def test_run_benchmark_single_method_reproducible(karate):
    p = Protocol(0.1, 1, seed=3)
    a = run_benchmark(karate, ["cn"], p)
    b = run_benchmark(karate, ["cn"], p)
    assert len(a) == 1 and a[0].aupr == b[0].aupr
    assert a[0].n_pos == a[0].n_neg == 7
    assert a[0].table.aupr == a[0].aupr


def test_run_benchmark_records_failures(karate):
    bad = SolverConfig(ppr_max_iter=1)
    res = run_benchmark(karate, ["dppr", "cn"], Protocol(0.1, 2), solver=bad)
    dppr = [r for r in res if r.method == "dppr"]
    assert all(not r.ok and math.isnan(r.aupr) for r in dppr)
    assert all(r.ok for r in res if r.method == "cn")
    rows = {r["method"]: r for r in summarize(res)}
    assert rows["dppr"]["n_failed"] == 2 and rows["cn"]["n_ok"] == 2
    assert "did not converge" in json.loads(summary_json(res, {}))["failures"][0]["error"]


def test_run_benchmark_rejects_unknown_method(karate):
    with pytest.raises(ValueError):
        run_benchmark(karate, ["jaccard"])


def test_jobs_do_not_change_results(karate):
    p = Protocol(0.2, 4, seed=10)
    serial = run_benchmark(karate, protocol=p, jobs=1)
    parallel = run_benchmark(karate, protocol=p, jobs=3)
    assert results_csv(serial) == results_csv(parallel)


def test_output_formats(karate):
    res = run_benchmark(karate, ["cn", "aa"], Protocol(0.1, 2))
    lines = results_csv(res).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 4
    assert timings_csv(res).splitlines()[0].endswith("runtime_ms")
    summary = json.loads(summary_json(res, {"note": "x"}))
    assert summary["config"] == {"note": "x"} and summary["seeds"] == [0, 1]
    assert {r["method"] for r in summary["summary"]} == {"cn", "aa"}


def test_sweep_single_value_equals_direct_run(karate):
    p = Protocol(0.1, 3)
    table = sweep("alpha", [2.0], p, graph=karate)
    direct = run_benchmark(karate, protocol=p, solver=SolverConfig(alpha=2.0), axis="alpha=2.0")
    assert results_csv(table.results) == results_csv(direct)
    assert len(table.rows) == 4


def test_alpha_sweep_only_moves_dppr(karate):
    table = sweep("alpha", [0.1, 10.0], Protocol(0.1, 3), graph=karate)
    by = {(r["value"], r["method"]): r["mean_aupr"] for r in table.rows}
    for m in ("cn", "aa", "katz"):
        assert by[(0.1, m)] == by[(10.0, m)]
    assert by[(0.1, "dppr")] != by[(10.0, "dppr")]


def test_sweep_generated_axes():
    table = sweep("ba_m", [2, 3], Protocol(0.1, 2), methods=["cn"], ba=BaParams(n=80))
    assert [r["value"] for r in table.rows] == [2, 3]
    assert all(not r["failed"] for r in table.rows)
    assert "ba_m,2,cn" in sweep_csv(table)


def test_sweep_failed_cell_is_marked():
    table = sweep("ba_m", [2, 100], Protocol(0.1, 2), methods=["cn"], ba=BaParams(n=50))
    rows = {r["value"]: r for r in table.rows}
    assert not rows[2]["failed"] and rows[100]["failed"]


def test_sweep_bad_axis(karate):
    with pytest.raises(ValueError):
        sweep("gamma", [1], graph=karate)
    with pytest.raises(ValueError):
        sweep("beta", [0.5])


def test_mean_aupr_helper(karate):
    res = run_benchmark(karate, ["cn"], Protocol(0.1, 3))
    assert mean_aupr(res, "cn") == pytest.approx(np.mean([r.aupr for r in res]))
    assert math.isnan(mean_aupr(res, "katz"))
