"""Seeded synthetic networks: Barabasi-Albert and LFR benchmark graphs.

All randomness comes from one ``numpy.random.Generator`` per call, so a seed
fully determines the output.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .graph import Graph, from_edges


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class BaParams:
    n: int = 500
    m: int = 2
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.m < self.n:
            raise ValueError(f"BA needs 1 <= m < n, got m={self.m}, n={self.n}")


def ba_edge_count(n: int, m: int) -> int:
    return m * (n - m) + m * (m - 1) // 2


def generate_ba(params: BaParams) -> Graph:
    """Preferential attachment grown from an m-clique.

    Each new node links to ``m`` distinct existing nodes drawn with
    probability proportional to current degree. When every existing degree
    is zero (m = 1, first step) the draw is uniform.
    """
    n, m = params.n, params.m
    rng = np.random.default_rng(params.seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # each node appears in ``ends`` once per incident edge endpoint
    ends = [x for e in edges for x in e]
    for new in range(m, n):
        if ends:
            targets = set()
            while len(targets) < m:
                targets.add(ends[rng.integers(len(ends))])
            chosen = sorted(targets)
        else:
            chosen = sorted(rng.choice(new, size=m, replace=False).tolist())
        for t in chosen:
            edges.append((t, new))
            ends.extend((t, new))
    return from_edges(n, edges)


@dataclass(frozen=True)
class LfrParams:
    n: int = 250
    tau1: float = 3.0
    tau2: float = 1.5
    mu: float = 0.1
    avg_degree: float = 5.0
    min_community: int = 20
    max_degree: int | None = None  # None -> n // 10
    max_community: int | None = None  # None -> n // 2
    seed: int = 0

    def __post_init__(self):
        if not self.tau1 > 1 or not self.tau2 > 1:
            raise ValueError("LFR exponents tau1, tau2 must exceed 1")
        if not 0 < self.mu < 1:
            raise ValueError(f"mu must lie in (0, 1), got {self.mu}")
        if not 1 <= self.min_community <= self.community_cap <= self.n:
            raise ValueError("need 1 <= min_community <= max_community <= n")
        if not 1 <= self.avg_degree < self.degree_cap:
            raise ValueError("need 1 <= avg_degree < max_degree")

    @property
    def degree_cap(self) -> int:
        return self.max_degree if self.max_degree is not None else self.n // 10

    @property
    def community_cap(self) -> int:
        return self.max_community if self.max_community is not None else self.n // 2

    def to_dict(self) -> dict:
        return asdict(self)


def _powerlaw_cdf(x, lo, hi, tau):
    """CDF of the continuous density ~ x^-tau on [lo, hi]."""
    x = np.clip(x, lo, hi)
    a = 1.0 - tau
    return (x**a - lo**a) / (hi**a - lo**a)


def _powerlaw_sample(rng, size, lo, hi, tau):
    a = 1.0 - tau
    u = rng.random(size)
    return (lo**a + u * (hi**a - lo**a)) ** (1.0 / a)


def _rounded_mean(lo, hi, tau):
    """Mean of round(X) for X ~ x^-tau on [lo, hi]."""
    ks = np.arange(max(1, math.floor(lo)), math.ceil(hi) + 1)
    probs = _powerlaw_cdf(ks + 0.5, lo, hi, tau) - _powerlaw_cdf(ks - 0.5, lo, hi, tau)
    return float(ks @ probs)


def _solve_min_degree(mean, hi, tau):
    lo_b, hi_b = 0.5, float(hi)
    if _rounded_mean(lo_b, hi, tau) > mean:
        raise GenerationError(f"average degree {mean} is too small for max degree {hi}")
    if _rounded_mean(hi_b - 1e-9, hi, tau) < mean:
        raise GenerationError(f"average degree {mean} is unreachable with max degree {hi}")
    for _ in range(100):
        mid = 0.5 * (lo_b + hi_b)
        if _rounded_mean(mid, hi, tau) < mean:
            lo_b = mid
        else:
            hi_b = mid
    return 0.5 * (lo_b + hi_b)


def _degree_sequence(rng, p: LfrParams):
    kmin = _solve_min_degree(p.avg_degree, p.degree_cap, p.tau1)
    deg = np.rint(_powerlaw_sample(rng, p.n, kmin, p.degree_cap, p.tau1)).astype(np.int64)
    deg = np.clip(deg, 1, p.degree_cap)
    return deg


def _community_sizes(rng, p: LfrParams):
    sizes = []
    total = 0
    while total < p.n:
        s = int(np.rint(_powerlaw_sample(rng, 1, p.min_community, p.community_cap, p.tau2)[0]))
        sizes.append(s)
        total += s
    excess = total - p.n
    sizes[-1] -= excess
    if sizes[-1] < p.min_community:
        # fold the short last community into the others
        spill = sizes.pop()
        for i in range(spill):
            sizes[i % len(sizes)] += 1
    if max(sizes) > p.community_cap or min(sizes) < p.min_community:
        raise GenerationError("community sizes violate [min_community, max_community]")
    return np.array(sizes, dtype=np.int64)


def _assign_communities(rng, internal, sizes):
    """Place nodes so each node's internal degree fits inside its community."""
    n = len(internal)
    order = np.lexsort((rng.random(n), -internal))
    free = sizes.copy()
    member = np.full(n, -1, dtype=np.int64)
    for node in order:
        ok = np.flatnonzero((free > 0) & (sizes - 1 >= internal[node]))
        if len(ok) == 0:
            raise GenerationError(
                f"no community can host a node with internal degree {internal[node]}"
            )
        c = rng.choice(ok, p=free[ok] / free[ok].sum())
        member[node] = c
        free[c] -= 1
    return member


def _match_stubs(rng, nodes, counts):
    stubs = np.repeat(nodes, counts)
    rng.shuffle(stubs)
    return stubs.reshape(-1, 2)


def _rewire(rng, pairs, is_bad, budget):
    """Double-edge swaps that clear self-loops, repeats and ``is_bad`` pairs."""
    pairs = [tuple(sorted(map(int, e))) for e in pairs]

    def bad_indices():
        seen = set()
        out = []
        for i, (a, b) in enumerate(pairs):
            if a == b or (a, b) in seen or is_bad(a, b):
                out.append(i)
            seen.add((a, b))
        return out

    bad = bad_indices()
    attempts = 0
    while bad and attempts < budget:
        i = bad[rng.integers(len(bad))]
        j = int(rng.integers(len(pairs)))
        attempts += 1
        if i == j:
            continue
        (a, b), (c, d) = pairs[i], pairs[j]
        if rng.random() < 0.5:
            c, d = d, c
        e1, e2 = tuple(sorted((a, c))), tuple(sorted((b, d)))
        if e1[0] == e1[1] or e2[0] == e2[1] or is_bad(*e1) or is_bad(*e2):
            continue
        current = set(pairs)
        if e1 in current or e2 in current or e1 == e2:
            continue
        pairs[i], pairs[j] = e1, e2
        bad = bad_indices()
    if bad:
        raise GenerationError(
            f"{len(bad)} stub pairs still self-looped, repeated or community-violating after {budget} swaps"
        )
    return pairs


def _lfr_attempt(rng, p: LfrParams):
    deg = _degree_sequence(rng, p)
    # stochastic rounding keeps the expected external share at exactly mu
    raw = p.mu * deg
    external = np.floor(raw).astype(np.int64) + (rng.random(p.n) < raw - np.floor(raw))
    internal = deg - external
    sizes = _community_sizes(rng, p)
    member = _assign_communities(rng, internal, sizes)

    edges = []
    nodes = np.arange(p.n)
    for c in range(len(sizes)):
        idx = nodes[member == c]
        k_in = internal[idx]
        if k_in.sum() % 2:
            # move one stub outside to make the internal count even
            j = idx[np.argmax(k_in)]
            internal[j] -= 1
            external[j] += 1
            k_in = internal[idx]
        pairs = _match_stubs(rng, idx, k_in)
        budget = 100 * max(len(pairs), 1)
        edges += _rewire(rng, pairs, lambda a, b: False, budget)

    if external.sum() % 2:
        j = int(np.argmax(external))
        external[j] -= 1
    pairs = _match_stubs(rng, nodes, external)
    edges += _rewire(rng, pairs, lambda a, b: member[a] == member[b], 100 * max(len(pairs), 1))
    return from_edges(p.n, edges), member


def generate_lfr(params: LfrParams, retries: int = 20):
    """LFR benchmark graph and per-node community ids.

    Degrees follow a truncated power law with exponent ``tau1`` tuned to hit
    ``avg_degree``; community sizes follow exponent ``tau2``. Each node sends
    a ``mu`` share of its stubs outside its community. Stubs are paired by a
    configuration model, and offending pairs are fixed by edge swaps.
    """
    rng = np.random.default_rng(params.seed)
    last = None
    for _ in range(retries):
        try:
            return _lfr_attempt(rng, params)
        except GenerationError as exc:
            last = exc
    raise GenerationError(f"LFR generation failed after {retries} attempts: {last}")


def mixing_fractions(g: Graph, communities) -> np.ndarray:
    """Per-node share of edges leaving the node's community (NaN for isolated nodes)."""
    communities = np.asarray(communities)
    src = np.repeat(np.arange(g.n), g.degrees)
    outside = np.bincount(src, weights=communities[src] != communities[g.indices], minlength=g.n)
    with np.errstate(invalid="ignore", divide="ignore"):
        return outside / g.degrees
