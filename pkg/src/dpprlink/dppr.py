"""D-PPR link scoring.

Each endpoint is represented by its personalized PageRank vector. Two
endpoints are compared by diffusing the difference of their vectors through
the resolvent (I + alpha L)^-1 and taking the Euclidean norm; the link score
is the reciprocal of that distance.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, _check_node
from .linsolve import CgConfig, ConvergenceError, cg_solve
from .ppr import PprConfig, PprVector, ppr_batch, ppr_solve


@dataclass(frozen=True)
class SolverConfig:
    alpha: float = 1.0
    beta: float = 0.85
    epsilon: float = 1e-10
    ppr_tol: float = 1e-10
    ppr_max_iter: int = 1000
    cg_tol: float = 1e-8
    cg_max_iter: int | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        # delegate the remaining range checks
        self.ppr, self.cg  # noqa: B018

    @property
    def ppr(self) -> PprConfig:
        return PprConfig(self.beta, self.ppr_tol, self.ppr_max_iter)

    @property
    def cg(self) -> CgConfig:
        return CgConfig(self.alpha, self.cg_tol, self.cg_max_iter)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PairScore:
    u: int
    v: int
    distance: float
    score: float


class PairScoringError(RuntimeError):
    def __init__(self, u, v, cause):
        super().__init__(f"scoring pair ({u}, {v}) failed: {cause}")
        self.u, self.v, self.cause = u, v, cause


def dppr_distance(g: Graph, su: PprVector, sv: PprVector, cfg: SolverConfig = SolverConfig()) -> float:
    """``|| (I + alpha L)^-1 (s_u - s_v) ||_2`` with the solve done by CG."""
    diff = su.values - sv.values
    try:
        report = cg_solve(g, diff, cfg.cg)
    except ConvergenceError as exc:
        raise PairScoringError(su.source, sv.source, exc) from exc
    return float(np.linalg.norm(report.solution))


def score_from_distance(distance: float, epsilon: float) -> float:
    return 1.0 / (distance + epsilon)


def dppr_score(g: Graph, u: int, v: int, cfg: SolverConfig = SolverConfig()) -> PairScore:
    _check_node(g, u)
    _check_node(g, v)
    if u == v:
        raise ValueError("prediction pairs need distinct endpoints")
    pc = cfg.ppr
    d = dppr_distance(g, ppr_solve(g, u, pc), ppr_solve(g, v, pc), cfg)
    return PairScore(u, v, d, score_from_distance(d, cfg.epsilon))


def dppr_score_pairs(g: Graph, pairs, cfg: SolverConfig = SolverConfig(), jobs: int = 1, cache=None):
    """Score many pairs, solving PPR once per distinct endpoint.

    Output order follows ``pairs``. A pair whose solve fails is returned as a
    :class:`PairScoringError` instead of a :class:`PairScore`.
    """
    pairs = [(int(u), int(v)) for u, v in pairs]
    if not pairs:
        return []
    endpoints = sorted({x for p in pairs for x in p})
    vectors = dict(zip(endpoints, ppr_batch(g, endpoints, cfg.ppr, jobs=jobs, cache=cache)))

    def one(pair):
        u, v = pair
        try:
            if u == v:
                raise ValueError("prediction pairs need distinct endpoints")
            su, sv = vectors[u], vectors[v]
            for s in (su, sv):
                if isinstance(s, Exception):
                    raise s
            d = dppr_distance(g, su, sv, cfg)
        except PairScoringError as exc:
            return exc
        except (ConvergenceError, IndexError, ValueError) as exc:
            return PairScoringError(u, v, exc)
        return PairScore(u, v, d, score_from_distance(d, cfg.epsilon))

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, pairs))
    return [one(p) for p in pairs]


def rank_pairs(scores):
    """Order PairScores by ascending distance; near-ties go to lexicographic pair order."""
    out = sorted(scores, key=lambda s: (s.distance, s.u, s.v))
    # distances within 1e-12 count as equal; settle those runs lexicographically
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            a, b = out[i], out[i + 1]
            if abs(a.distance - b.distance) <= 1e-12 and (b.u, b.v) < (a.u, a.v):
                out[i], out[i + 1] = b, a
                changed = True
    return out
