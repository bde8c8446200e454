"""Edge-holdout protocol, AUPR, and benchmark/sweep orchestration."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from . import baselines
from .baselines import KatzConfig
from .dppr import PairScore, SolverConfig, dppr_score_pairs
from .generators import BaParams, LfrParams, generate_ba, generate_lfr
from .graph import Graph, from_edges

logger = logging.getLogger(__name__)

METHODS = ("dppr", "katz", "cn", "aa")
AXES = ("ba_m", "lfr_mu", "alpha", "beta")
CSV_COLUMNS = ("axis", "method", "repeat", "seed", "aupr", "n_pos", "n_neg")
TIMING_COLUMNS = ("axis", "method", "repeat", "seed", "runtime_ms")


class SplitError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SplitDataset:
    """Train graph plus labelled test pairs.

    ``order`` is a seeded permutation of positives+negatives; scoring and
    AUPR use that order so tied scores are not biased toward either label.
    """

    train: Graph
    positives: np.ndarray
    negatives: np.ndarray
    holdout_fraction: float
    seed: int
    order: np.ndarray

    def pairs(self) -> np.ndarray:
        return np.concatenate([self.positives, self.negatives])[self.order]

    def labels(self) -> np.ndarray:
        lab = np.r_[np.ones(len(self.positives), int), np.zeros(len(self.negatives), int)]
        return lab[self.order]


def holdout_split(g: Graph, fraction: float = 0.1, seed: int = 0) -> SplitDataset:
    """Hide ``floor(fraction * m)`` edges and draw as many non-edges of ``g``."""
    if not 0 < fraction < 1:
        raise SplitError(f"fraction must lie in (0, 1), got {fraction}")
    n_pos = math.floor(fraction * g.m)
    pool = g.n * (g.n - 1) // 2 - g.m
    if pool < max(n_pos, 1):
        raise SplitError(f"only {pool} non-edges available, need {max(n_pos, 1)} negatives")
    if n_pos < 1 or n_pos >= g.m:
        raise SplitError(f"graph with m={g.m} is too small for holdout fraction {fraction}")

    rng = np.random.default_rng(seed)
    edges = g.edges()
    held = np.sort(rng.choice(g.m, size=n_pos, replace=False))
    positives = edges[held]
    keep = np.ones(g.m, bool)
    keep[held] = False
    train = from_edges(g.n, edges[keep], labels=g.labels)
    negatives = _sample_non_edges(rng, g, n_pos, pool)
    order = rng.permutation(2 * n_pos)
    return SplitDataset(train, positives, negatives, fraction, seed, order)


def _sample_non_edges(rng, g: Graph, k: int, pool: int) -> np.ndarray:
    total = g.n * (g.n - 1) // 2
    if pool < total // 2:
        # dense graph: enumerate the complement and sample from it
        iu, iv = np.triu_indices(g.n, 1)
        mask = np.asarray(g.adjacency[iu, iv]).ravel() == 0
        cand = np.column_stack([iu[mask], iv[mask]])
        return cand[np.sort(rng.choice(len(cand), size=k, replace=False))]
    chosen = []
    seen = set()
    while len(chosen) < k:
        u, v = rng.integers(g.n, size=2)
        if u == v:
            continue
        u, v = (int(u), int(v)) if u < v else (int(v), int(u))
        if (u, v) in seen or g.has_edge(u, v):
            continue
        seen.add((u, v))
        chosen.append((u, v))
    return np.array(chosen, dtype=np.int64)


def aupr(labels, scores) -> float:
    """Average precision of a ranking by descending score.

    Ties keep their input order. The value is the mean, over positives, of
    the precision at each positive's rank.
    """
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=float)
    if labels.shape != scores.shape or labels.ndim != 1 or len(labels) == 0:
        raise ValueError("labels and scores must be non-empty 1-d arrays of equal length")
    if not np.all(np.isin(labels, (0, 1))):
        raise ValueError("labels must be binary")
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("AUPR needs at least one positive label")
    order = np.argsort(-scores, kind="stable")
    hits = labels[order]
    precision = np.cumsum(hits) / np.arange(1, len(hits) + 1)
    return float(precision[hits == 1].sum() / n_pos)


@dataclass
class ScoreTable:
    pairs: np.ndarray
    labels: np.ndarray
    scores: np.ndarray

    @property
    def aupr(self) -> float:
        return aupr(self.labels, self.scores)


@dataclass
class BenchmarkResult:
    method: str
    repeat: int
    seed: int
    config: dict
    table: ScoreTable | None
    aupr: float
    wall_time: float
    axis: str = ""
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def n_pos(self) -> int:
        return 0 if self.table is None else int(self.table.labels.sum())

    @property
    def n_neg(self) -> int:
        return 0 if self.table is None else int(len(self.table.labels) - self.table.labels.sum())


@dataclass(frozen=True)
class Protocol:
    fraction: float = 0.1
    repeats: int = 30
    seed: int = 0
    seeds: tuple | None = None

    def split_seeds(self) -> list[int]:
        if self.seeds is not None:
            return [int(s) for s in self.seeds]
        return [self.seed + r for r in range(self.repeats)]


def score_method(method: str, g: Graph, pairs, solver: SolverConfig, katz: KatzConfig):
    """Scores for ``pairs`` on ``g`` and the config snapshot that produced them."""
    if method == "dppr":
        out = dppr_score_pairs(g, pairs, solver)
        for r in out:
            if not isinstance(r, PairScore):
                raise r
        return np.array([r.score for r in out]), solver.to_dict()
    if method == "katz":
        scores, damping = baselines.katz_scores(g, pairs, katz)
        return scores, {**katz.to_dict(), "damping_used": damping}
    if method == "cn":
        return baselines.common_neighbors_scores(g, pairs), {}
    if method == "aa":
        return baselines.adamic_adar_scores(g, pairs), {}
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _run_repeat(source, methods, fraction, seed, repeat, solver, katz, axis):
    g = source(seed=seed) if callable(source) else source
    split = holdout_split(g, fraction, seed)
    pairs, labels = split.pairs(), split.labels()
    results = []
    for method in methods:
        t0 = time.perf_counter()
        try:
            scores, snapshot = score_method(method, split.train, pairs, solver, katz)
            table = ScoreTable(pairs, labels, scores)
            results.append(BenchmarkResult(method, repeat, seed, snapshot, table, table.aupr,
                                           time.perf_counter() - t0, axis))
        except Exception as exc:  # recorded, the run carries on
            logger.warning("%s failed on repeat %d: %s", method, repeat, exc)
            results.append(BenchmarkResult(method, repeat, seed, {}, None, math.nan,
                                           time.perf_counter() - t0, axis, error=repr(exc)))
    return results


def run_benchmark(source, methods=METHODS, protocol: Protocol = Protocol(),
                  solver: SolverConfig = SolverConfig(), katz: KatzConfig = KatzConfig(),
                  jobs: int = 1, axis: str = "") -> list[BenchmarkResult]:
    """Score every method on fresh splits, one per protocol seed.

    ``source`` is a fixed :class:`Graph` or a picklable ``f(seed=...)``
    returning one, in which case each repeat gets its own generated graph.
    Results come back ordered by (repeat, method) whatever ``jobs`` is.
    """
    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    seeds = protocol.split_seeds()
    task = partial(_run_repeat, source, methods, protocol.fraction,
                   solver=solver, katz=katz, axis=axis)
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(task, seeds, range(len(seeds))))
    else:
        chunks = [task(s, r) for r, s in enumerate(seeds)]
    return [res for chunk in chunks for res in chunk]


def summarize(results) -> list[dict]:
    """Mean and population std of AUPR per (axis, method), over successful repeats."""
    groups: dict = {}
    for r in results:
        groups.setdefault((r.axis, r.method), []).append(r)
    rows = []
    for (axis, method), rs in groups.items():
        vals = np.array([r.aupr for r in rs if r.ok])
        rows.append({
            "axis": axis,
            "method": method,
            "mean_aupr": float(vals.mean()) if len(vals) else math.nan,
            "std_aupr": float(vals.std()) if len(vals) else math.nan,
            "n_ok": int(len(vals)),
            "n_failed": int(len(rs) - len(vals)),
            "wall_time_s": float(sum(r.wall_time for r in rs)),
        })
    return rows


def mean_aupr(results, method: str, axis: str | None = None) -> float:
    vals = [r.aupr for r in results if r.method == method and r.ok and (axis is None or r.axis == axis)]
    return float(np.mean(vals)) if vals else math.nan


def _ba_source(n, m, seed):
    return generate_ba(BaParams(n, m, seed))


def _lfr_source(params, seed):
    return generate_lfr(replace(params, seed=seed))[0]


@dataclass
class SweepTable:
    axis: str
    rows: list = field(default_factory=list)
    results: list = field(default_factory=list)


def sweep(axis: str, values, protocol: Protocol = Protocol(), methods=METHODS,
          graph: Graph | None = None, ba: BaParams = BaParams(), lfr: LfrParams = LfrParams(),
          solver: SolverConfig = SolverConfig(), katz: KatzConfig = KatzConfig(),
          jobs: int = 1) -> SweepTable:
    """One :func:`run_benchmark` per value of ``axis``.

    ``ba_m`` and ``lfr_mu`` generate a fresh graph per repeat from ``ba`` /
    ``lfr`` with the swept field replaced; ``alpha`` and ``beta`` re-run the
    fixed ``graph`` with the solver field replaced. Cells that fail outright
    are kept in the table with ``failed`` set.
    """
    if axis not in AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {AXES}")
    if axis in ("alpha", "beta") and graph is None:
        raise ValueError(f"{axis} sweep needs a graph")
    table = SweepTable(axis)
    for value in values:
        label = f"{axis}={value}"
        cell_solver = solver
        try:
            if axis == "ba_m":
                source = partial(_ba_source, ba.n, int(value))
                BaParams(ba.n, int(value))
            elif axis == "lfr_mu":
                source = partial(_lfr_source, replace(lfr, mu=float(value)))
            else:
                source = graph
                cell_solver = replace(solver, **{axis: float(value)})
            results = run_benchmark(source, methods, protocol, cell_solver, katz, jobs, axis=label)
        except Exception as exc:
            logger.warning("sweep cell %s failed: %s", label, exc)
            for method in methods:
                table.rows.append({"axis": axis, "value": value, "method": method,
                                   "mean_aupr": math.nan, "std_aupr": math.nan,
                                   "failed": True, "error": repr(exc)})
            continue
        table.results += results
        for row in summarize(results):
            table.rows.append({"axis": axis, "value": value, "method": row["method"],
                               "mean_aupr": row["mean_aupr"], "std_aupr": row["std_aupr"],
                               "failed": row["n_ok"] == 0, "error": None})
    return table


def results_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        w.writerow([r.axis, r.method, r.repeat, r.seed, repr(r.aupr), r.n_pos, r.n_neg])
    return buf.getvalue()


def timings_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_COLUMNS)
    for r in results:
        w.writerow([r.axis, r.method, r.repeat, r.seed, f"{1000 * r.wall_time:.3f}"])
    return buf.getvalue()


def sweep_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "value", "method", "mean_aupr", "std_aupr", "failed"])
    for row in table.rows:
        w.writerow([row["axis"], row["value"], row["method"], repr(row["mean_aupr"]),
                    repr(row["std_aupr"]), int(row["failed"])])
    return buf.getvalue()


def summary_json(results, config: dict) -> str:
    configs = {}
    for r in results:
        if r.ok:
            configs.setdefault(r.method, r.config)
    payload = {
        "config": config,
        "method_configs": configs,
        "seeds": sorted({r.seed for r in results}),
        "summary": summarize(results),
        "failures": [{"method": r.method, "repeat": r.repeat, "axis": r.axis, "error": r.error}
                     for r in results if not r.ok],
    }
    return json.dumps(payload, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
