"""Shared fixtures: small named graphs and seeded random instances."""

from __future__ import annotations

import random

from lsvc.graph import Graph, Instance, Mode, path_graph, star_graph

# 8-vertex example graph used across fixtures: cover {0,1,2}, nine edges.
FIG1_EDGES = [(0, 1), (0, 3), (0, 4), (1, 5), (2, 5), (1, 6), (1, 7), (2, 6), (2, 7)]
FIG1_COVER = frozenset({0, 1, 2})


def fig1_graph() -> Graph:
    return Graph(8, FIG1_EDGES)


def fig1_instance(k: int = 4, d: int = 1) -> Instance:
    return Instance.unit(fig1_graph(), FIG1_COVER, k, d, Mode.GLSVC)


def figw1_instance(k: int = 2, d: int = 2, w_mid: int = 3) -> Instance:
    """Weighted path 0-1-2 with weights (1, w_mid, 1) and cover {0, 1}."""
    return Instance.weighted(path_graph(3), {0, 1}, (1, w_mid, 1), k, d, Mode.GLSWVC)


def p3_instance(cover, k, d, mode=Mode.GLSVC) -> Instance:
    return Instance.unit(path_graph(3), cover, k, d, mode)


def star_leaves_cover(leaves: int, k: int, d: int, mode=Mode.GLSVC) -> Instance:
    g = star_graph(leaves)
    return Instance.unit(g, range(1, leaves + 1), k, d, mode)


def two_stars_instance(k: int, d: int, mode=Mode.GLSVC) -> Instance:
    """Two disjoint paths 0-1-2 and 3-4-5 with the leaves as cover."""
    g = Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    return Instance.unit(g, {0, 2, 3, 5}, k, d, mode)


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, edges)


def random_regular_graph(rng: random.Random, n: int, degree: int) -> Graph:
    """Pairing-model regular graph; retries until simple."""
    assert (n * degree) % 2 == 0
    while True:
        stubs = [v for v in range(n) for _ in range(degree)]
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return Graph(n, sorted(edges))


def random_cover(rng: random.Random, g: Graph, slack: float = 0.35) -> frozenset[int]:
    """Complement of a random maximal independent set, plus random slack."""
    order = list(range(g.n))
    rng.shuffle(order)
    indep: set[int] = set()
    for v in order:
        if not (g.adj_sets[v] & indep):
            indep.add(v)
    cover = set(range(g.n)) - indep
    for v in list(indep):
        if rng.random() < slack:
            cover.add(v)
    return frozenset(cover)


def random_instance(rng: random.Random, n_max: int = 12, p_choices=(0.2, 0.5),
                    k_max: int = 5, w_max: int = 8,
                    modes=(Mode.LSVC, Mode.GLSVC, Mode.LSWVC, Mode.GLSWVC)) -> Instance:
    n = rng.randint(3, n_max)
    g = random_graph(rng, n, rng.choice(p_choices))
    cover = random_cover(rng, g)
    mode = rng.choice(list(modes))
    if mode in (Mode.LSVC, Mode.LSWVC):
        k = rng.randint(1, k_max)
        d = 1
    elif mode is Mode.GLSVC:
        k = rng.randint(1, k_max)
        d = rng.randint(1, k)
    else:
        k = rng.randint(0, k_max)
        d = rng.randint(0, k + 2)
    if mode.weighted:
        weights = tuple(rng.randint(1, w_max) for _ in range(n))
    else:
        weights = (1,) * n
    return Instance(g, cover, weights, k, d, mode)
