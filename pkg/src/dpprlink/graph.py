"""Immutable undirected simple graph in compressed adjacency form.

The adjacency, degree and Laplacian operators are applied matrix-free on top
of the CSR arrays; nothing of size n x n is ever built here.
"""

from __future__ import annotations

import hashlib
import io
import logging
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class EdgelistParseError(ValueError):
    """Raised for malformed or empty edgelist input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected, unweighted simple graph.

    ``indptr``/``indices`` hold per-node sorted neighbor lists in CSR layout.
    ``labels[i]`` is the external id of dense node ``i`` (first-appearance
    order when parsed from text).
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple = field(default=())
    _adj: sp.csr_matrix = field(init=False, repr=False, compare=False)
    _deg: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        indptr.setflags(write=False)
        indices.setflags(write=False)
        n = len(indptr) - 1
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise ValueError(f"got {len(labels)} labels for {n} nodes")
        deg = np.diff(indptr)
        deg.setflags(write=False)
        adj = sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_deg", deg)
        object.__setattr__(self, "_adj", adj)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self._deg

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Read-only view of A as a scipy CSR matrix (shares storage)."""
        return self._adj

    @property
    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    def neighbors(self, u: int) -> np.ndarray:
        _check_node(self, u)
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array of ``u < v`` pairs in lexicographic order."""
        src = np.repeat(np.arange(self.n), self._deg)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def index_of(self, label) -> int:
        try:
            return self._label_index[str(label)]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    @property
    def _label_index(self):
        cache = self.__dict__.get("_label_cache")
        if cache is None:
            cache = {lab: i for i, lab in enumerate(self.labels)}
            self.__dict__["_label_cache"] = cache
        return cache

    def digest(self) -> str:
        """Stable content hash of the edge structure (labels excluded)."""
        h = hashlib.sha256()
        h.update(np.int64(self.n).tobytes())
        h.update(self.edges().astype("<i8").tobytes())
        return h.hexdigest()[:16]

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _check_node(g: Graph, u) -> None:
    if not 0 <= u < g.n:
        raise IndexError(f"node index {u} out of range for graph with n={g.n}")


def _check_signal(g: Graph, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise ValueError(f"signal has shape {x.shape}, expected ({g.n},)")
    return x


def from_edges(n: int, edges: Iterable[Sequence[int]], labels=None) -> Graph:
    """Build a graph on nodes ``0..n-1``; self-loops and repeats are dropped."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise IndexError(f"edge endpoint out of range for n={n}")
    arr = arr[arr[:, 0] != arr[:, 1]]
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    und = np.unique(np.column_stack([lo, hi]), axis=0) if len(arr) else np.empty((0, 2), np.int64)
    src = np.concatenate([und[:, 0], und[:, 1]])
    dst = np.concatenate([und[:, 1], und[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    return Graph(indptr, dst, tuple(labels) if labels is not None else ())


def parse_edgelist(source, *, comment: str = "#") -> Graph:
    """Parse whitespace-separated ``u v`` lines into a :class:`Graph`.

    ``source`` may be a path, a str/bytes payload, or a text/binary stream.
    Node ids are arbitrary tokens mapped to dense indices in first-appearance
    order. Duplicate edges and self-loops are dropped with a logged count.
    """
    text = _read_text(source)
    index: dict[str, int] = {}
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(comment):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgelistParseError(f"expected 2 tokens, got {len(tokens)}: {raw!r}", lineno)
        ids = []
        for tok in tokens:
            if tok not in index:
                index[tok] = len(index)
            ids.append(index[tok])
        pairs.append(ids)
    if not index:
        raise EdgelistParseError("empty edgelist")

    n_loops = sum(1 for u, v in pairs if u == v)
    g = from_edges(len(index), pairs, labels=list(index))
    n_dups = len(pairs) - n_loops - g.m
    if n_loops or n_dups:
        logger.warning("dropped %d self-loop(s) and %d duplicate edge(s)", n_loops, n_dups)
    return g


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode()
    if isinstance(source, os.PathLike):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    if isinstance(source, str):
        if "\n" not in source and os.path.exists(source):
            with open(source, encoding="utf-8") as fh:
                return fh.read()
        return source
    data = source.read()
    return data.decode() if isinstance(data, bytes) else data


def serialize_edgelist(g: Graph) -> str:
    """Canonical form: sorted ``u v`` lines, ``u < v``, dense 0-based ids."""
    buf = io.StringIO()
    for u, v in g.edges():
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def degree(g: Graph, u: int) -> int:
    _check_node(g, u)
    return int(g.degrees[u])


def adjacency_apply(g: Graph, x) -> np.ndarray:
    x = _check_signal(g, x)
    return g.adjacency @ x


def laplacian_apply(g: Graph, x) -> np.ndarray:
    """Apply L = D - A to ``x``."""
    x = _check_signal(g, x)
    return g.degrees * x - g.adjacency @ x


def walk_apply(g: Graph, x) -> np.ndarray:
    """Apply the column-stochastic walk operator A D^-1 to ``x``.

    Columns of isolated nodes are zero, so mass sitting on a degree-0 node
    is dropped; callers that need mass conservation must re-inject it.
    """
    x = _check_signal(g, x)
    deg = g.degrees
    scaled = np.zeros_like(x)
    np.divide(x, deg, out=scaled, where=deg > 0)
    return g.adjacency @ scaled


def read_communities(source, g: Graph | None = None) -> np.ndarray:
    """Read ``node_id community_id`` lines.

    With ``g`` given, node ids are resolved through the graph's labels and
    the result is indexed by dense node index; otherwise ids must be 0..n-1.
    """
    text = _read_text(source)
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgelistParseError(f"expected 2 tokens, got {len(tokens)}", lineno)
        rows.append(tokens)
    if g is not None:
        out = np.full(g.n, -1, dtype=np.int64)
        for node, comm in rows:
            out[g.index_of(node)] = int(comm)
    else:
        out = np.full(len(rows), -1, dtype=np.int64)
        for node, comm in rows:
            out[int(node)] = int(comm)
    if (out < 0).any():
        raise ValueError("community file does not cover every node")
    return out


def write_communities(communities) -> str:
    return "".join(f"{i} {c}\n" for i, c in enumerate(communities))


def dense_adjacency(g: Graph) -> np.ndarray:
    """Dense A for small-graph oracles."""
    return g.adjacency.toarray()
