import random

import numpy as np
import pytest

from localcluster import EmptyGraphError, Graph, SeedDistribution, SparseVector, graph_from_edges


def bfs_connected(g: Graph) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.node_count


def er_connected(rng: random.Random, n: int, prob: float) -> Graph:
    """Erdos-Renyi G(n, prob), resampled until simple-connected with all n nodes."""
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < prob]
        try:
            g = graph_from_edges(edges)
        except EmptyGraphError:
            continue
        if g.node_count == n and bfs_connected(g):
            return g


def random_small_graph(rng: random.Random, lo: int = 8, hi: int = 64) -> Graph:
    n = rng.randint(lo, hi)
    return er_connected(rng, n, min(0.9, 2.5 / n + 0.05))


def random_sparse_q(rng: random.Random, g: Graph, density: float = 0.3) -> SparseVector:
    entries = {}
    for i in range(g.node_count):
        if rng.random() < density:
            entries[i] = rng.uniform(0.0, 1.0)
    if not entries:
        entries[rng.randrange(g.node_count)] = rng.uniform(0.1, 1.0)
    return SparseVector(entries)


def brute_conductance(g: Graph, members) -> float:
    """Independent recomputation by whole-edge enumeration."""
    inside = set(members)
    cut = 0
    for u in range(g.node_count):
        for v in g.adjacency[u]:
            if u < v and ((u in inside) != (v in inside)):
                cut += 1
    vol = sum(g.degrees_list[u] for u in inside)
    return cut / min(vol, g.total_volume - vol)


@pytest.fixture
def triangle() -> Graph:
    return graph_from_edges([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path2() -> Graph:
    """Single edge 0-1; both degrees 1."""
    return graph_from_edges([(0, 1)])


@pytest.fixture
def barbell() -> Graph:
    """Two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3."""
    return graph_from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


@pytest.fixture
def k4() -> Graph:
    return graph_from_edges([(i, j) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def two_triangles() -> Graph:
    return graph_from_edges([(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def seed_at(g: Graph, node: int) -> SeedDistribution:
    return SeedDistribution.single(g, node)
