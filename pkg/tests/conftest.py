import numpy as np
import pytest

from dpprlink.graph import from_edges


def dense_from_edges(n, edges):
    """Dense adjacency built straight from an edge list (oracle side)."""
    a = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            a[u, v] = a[v, u] = 1.0
    return a


def random_graph(rng, n, p, connected=False):
    """Erdos-Renyi edges; ``connected`` adds a random spanning tree first."""
    edges = []
    if connected:
        perm = rng.permutation(n)
        for i in range(1, n):
            edges.append((int(perm[i]), int(perm[rng.integers(i)])))
    iu, iv = np.triu_indices(n, 1)
    mask = rng.random(len(iu)) < p
    edges += list(zip(iu[mask].tolist(), iv[mask].tolist()))
    return from_edges(n, edges), edges


def triangle():
    return from_edges(3, [(0, 1), (1, 2), (0, 2)])


def path3():
    return from_edges(3, [(0, 1), (1, 2)])


def star(leaves):
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle(n):
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def karate():
    from dpprlink.datasets import load_dataset

    return load_dataset("karate")
