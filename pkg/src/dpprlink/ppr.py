"""Personalized PageRank by fixed-point iteration."""

from __future__ import annotations

import os
import struct
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, _check_node, walk_apply
from .linsolve import ConvergenceError

CACHE_ENV = "DPPR_CACHE_DIR"


@dataclass(frozen=True)
class PprConfig:
    beta: float = 0.85
    tol: float = 1e-10
    max_iter: int = 1000

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class PprVector:
    source: int
    values: np.ndarray
    iterations: int = 0


def ppr_step(g: Graph, s: np.ndarray, u: int, beta: float) -> np.ndarray:
    """One application of s -> (1-beta) e_u + beta A D^-1 s.

    Mass that the walk drops at isolated nodes is handed back to ``u``.
    """
    nxt = beta * walk_apply(g, s)
    stranded = s[g.degrees == 0].sum()
    nxt[u] += (1.0 - beta) + beta * stranded
    return nxt


def ppr_solve(g: Graph, u: int, cfg: PprConfig = PprConfig()) -> PprVector:
    """PPR vector of source ``u``, iterated from e_u until the L1 step gap <= tol."""
    _check_node(g, u)
    s = np.zeros(g.n)
    s[u] = 1.0
    gap = np.inf
    for k in range(1, cfg.max_iter + 1):
        nxt = ppr_step(g, s, u, cfg.beta)
        gap = np.abs(nxt - s).sum()
        s = nxt
        if gap <= cfg.tol:
            return PprVector(u, s, k)
    raise ConvergenceError(
        f"PPR from node {u} did not converge in {cfg.max_iter} iterations (gap {gap:.3e})",
        s, gap, cfg.max_iter,
    )


def ppr_batch(g: Graph, sources, cfg: PprConfig = PprConfig(), jobs: int = 1, cache=None):
    """PPR vectors for each source, in order.

    A failing source yields its exception object in place of a vector so the
    rest of the batch still completes.
    """
    def one(u):
        try:
            if cache is not None:
                hit = cache.get(g, u, cfg)
                if hit is not None:
                    return hit
            vec = ppr_solve(g, u, cfg)
            if cache is not None:
                cache.put(g, vec, cfg)
            return vec
        except (ConvergenceError, IndexError) as exc:
            return exc

    sources = list(sources)
    if jobs > 1 and len(sources) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, sources))
    return [one(u) for u in sources]


def ppr_dense(g: Graph, u: int, beta: float) -> np.ndarray:
    """Direct solve of (I - beta A D^-1) s = (1-beta) e_u; small graphs only.

    Isolated-node columns send their mass back to ``u``, matching ppr_step.
    """
    from .graph import dense_adjacency

    a = dense_adjacency(g)
    deg = a.sum(axis=0)
    w = np.divide(a, deg, out=np.zeros_like(a), where=deg > 0)
    w[u, deg == 0] = 1.0
    rhs = np.zeros(g.n)
    rhs[u] = 1.0 - beta
    return np.linalg.solve(np.eye(g.n) - beta * w, rhs)


class PprCache:
    """On-disk cache of PPR vectors keyed by (graph digest, source, beta, tol).

    Binary layout: 4-byte magic, then a little-endian header
    ``<16s q d d q`` (digest, source, beta, tol, n), then n float64 values.
    """

    MAGIC = b"PPR1"
    HEADER = struct.Struct("<16sqddq")

    def __init__(self, directory=None):
        directory = directory or os.environ.get(CACHE_ENV)
        if directory is None:
            raise ValueError(f"no cache directory given and ${CACHE_ENV} is unset")
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_env(cls):
        return cls() if os.environ.get(CACHE_ENV) else None

    def _path(self, g, u, cfg):
        return self.directory / f"{g.digest()}_{u}_{cfg.beta!r}_{cfg.tol!r}.ppr"

    def get(self, g: Graph, u: int, cfg: PprConfig):
        path = self._path(g, u, cfg)
        if not path.exists():
            return None
        data = path.read_bytes()
        if data[:4] != self.MAGIC:
            return None
        digest, src, beta, tol, n = self.HEADER.unpack_from(data, 4)
        if (digest.decode(), src, beta, tol, n) != (g.digest(), u, cfg.beta, cfg.tol, g.n):
            return None
        values = np.frombuffer(data, dtype="<f8", count=n, offset=4 + self.HEADER.size).copy()
        return PprVector(u, values)

    def put(self, g: Graph, vec: PprVector, cfg: PprConfig) -> None:
        header = self.HEADER.pack(g.digest().encode(), vec.source, cfg.beta, cfg.tol, g.n)
        path = self._path(g, vec.source, cfg)
        tmp = path.with_suffix(f".{os.getpid()}.{threading.get_ident()}.tmp")
        tmp.write_bytes(self.MAGIC + header + vec.values.astype("<f8").tobytes())
        tmp.replace(path)


def write_ppr_csv(vec: PprVector, labels=None) -> str:
    lines = ["node,label,value"]
    for i, val in enumerate(vec.values):
        lab = labels[i] if labels is not None else i
        lines.append(f"{i},{lab},{float(val)!r}")
    return "\n".join(lines) + "\n"
