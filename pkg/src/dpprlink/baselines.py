"""Common Neighbors, Adamic-Adar and Katz baselines."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, _check_node, adjacency_apply
from .linsolve import conjugate_gradient

EXACT = "exact"
TRUNCATED = "truncated"


class SpectralGuardError(ValueError):
    def __init__(self, damping, lambda_max):
        super().__init__(
            f"Katz damping {damping:g} violates damping * lambda_max < 1 "
            f"(estimated lambda_max = {lambda_max:.6g})"
        )
        self.damping = damping
        self.lambda_max = lambda_max


@dataclass(frozen=True)
class KatzConfig:
    damping: float = 0.005
    max_len: int = 10
    mode: str = EXACT
    tol: float = 1e-12
    auto_fallback: bool = True

    def __post_init__(self):
        if not self.damping > 0:
            raise ValueError(f"damping must be positive, got {self.damping}")
        if self.mode not in (EXACT, TRUNCATED):
            raise ValueError(f"unknown Katz mode {self.mode!r}")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def _check_pair(g, u, v):
    _check_node(g, u)
    _check_node(g, v)
    if u == v:
        raise ValueError("prediction pairs need distinct endpoints")


def common_neighbors(g: Graph, u: int, v: int) -> int:
    _check_pair(g, u, v)
    return len(np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True))


def adamic_adar(g: Graph, u: int, v: int) -> float:
    _check_pair(g, u, v)
    common = np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True)
    # a common neighbor is adjacent to both u and v, so its degree is >= 2
    return float(np.sum(1.0 / np.log(g.degrees[common])))


def spectral_radius(g: Graph, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest adjacency eigenvalue by power iteration on A + I.

    The shift makes the dominant eigenvalue unique even on bipartite graphs.
    """
    if g.m == 0:
        return 0.0
    x = np.ones(g.n) / np.sqrt(g.n)
    lam = 0.0
    for _ in range(max_iter):
        y = adjacency_apply(g, x) + x
        lam_next = float(np.linalg.norm(y))
        x = y / lam_next
        if abs(lam_next - lam) <= tol * lam_next:
            lam = lam_next
            break
        lam = lam_next
    return lam - 1.0


def resolve_damping(g: Graph, cfg: KatzConfig) -> float:
    """Damping actually used on ``g``: the configured one, or 0.85/lambda_max
    when the guard fails and fallback is enabled."""
    lam = spectral_radius(g)
    if cfg.damping * lam < 1:
        return cfg.damping
    if cfg.auto_fallback:
        return 0.85 / lam
    raise SpectralGuardError(cfg.damping, lam)


def _katz_column(g: Graph, v: int, damping: float, tol: float) -> np.ndarray:
    """Column v of (I - damping A)^-1 via CG (the matrix is SPD under the guard)."""
    adj = g.adjacency
    b = np.zeros(g.n)
    b[v] = 1.0
    x, _, _ = conjugate_gradient(lambda x: x - damping * (adj @ x), b, tol, 10 * g.n + 100)
    return x


def _katz_series_column(g: Graph, v: int, damping: float, max_len: int) -> np.ndarray:
    walk = np.zeros(g.n)
    walk[v] = 1.0
    total = np.zeros(g.n)
    for _ in range(max_len):
        walk = damping * adjacency_apply(g, walk)
        total += walk
    return total


def katz_score(g: Graph, u: int, v: int, cfg: KatzConfig = KatzConfig(), damping: float | None = None) -> float:
    """Katz index ``sum_l damping^l (A^l)_{uv}``.

    Exact mode solves (I - damping A) x = e_v and reads x[u]; for u != v the
    identity term contributes nothing. Truncated mode sums walks up to
    ``cfg.max_len``. Pass ``damping`` to skip re-estimating lambda_max.
    """
    _check_pair(g, u, v)
    return float(katz_columns(g, [v], cfg, damping)[v][u])


def katz_columns(g: Graph, targets, cfg: KatzConfig = KatzConfig(), damping: float | None = None) -> dict:
    if damping is None:
        if cfg.mode == EXACT:
            damping = resolve_damping(g, cfg)
        else:
            damping = cfg.damping
    out = {}
    for v in targets:
        if cfg.mode == EXACT:
            col = _katz_column(g, v, damping, cfg.tol)
            col[v] -= 1.0
        else:
            col = _katz_series_column(g, v, damping, cfg.max_len)
        out[v] = col
    return out


def katz_scores(g: Graph, pairs, cfg: KatzConfig = KatzConfig()):
    """Katz scores for many pairs plus the damping used; one solve per distinct target."""
    pairs = [(int(u), int(v)) for u, v in pairs]
    for u, v in pairs:
        _check_pair(g, u, v)
    damping = resolve_damping(g, cfg) if cfg.mode == EXACT else cfg.damping
    cols = katz_columns(g, sorted({v for _, v in pairs}), cfg, damping)
    return np.array([cols[v][u] for u, v in pairs]), damping


def common_neighbors_scores(g: Graph, pairs) -> np.ndarray:
    return np.array([common_neighbors(g, u, v) for u, v in pairs], dtype=float)


def adamic_adar_scores(g: Graph, pairs) -> np.ndarray:
    return np.array([adamic_adar(g, u, v) for u, v in pairs], dtype=float)
