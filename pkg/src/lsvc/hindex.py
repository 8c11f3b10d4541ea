"""Solver parameterized by the h-index: branch over all intersections of a
hypothetical swap with the high-degree vertices, then delegate the
low-degree remainder to the degree-parameterized solver."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .graph import EMPTY_SWAP, Graph, Instance, SolveReport, Swap
from .degree import solve_glswvc_by_degree
from .swaps import (exclusion_instance, make_swap_instance, solve_hindex_le_1,
                    solve_k_le_2)
from .treewidth import bounded_degree_decomposition, solve_max_improvement_tw


@dataclass
class HIndexDecomposition:
    h: int
    high: frozenset[int]                     # vertices of degree >= h + 1
    adjacency: dict[int, frozenset[int]]     # adjacency inside `high`


def compute_h_index(g: Graph) -> HIndexDecomposition:
    """Largest h with at least h vertices of degree >= h, plus the vertices
    exceeding it."""
    degs = sorted((g.degree(v) for v in range(g.n)), reverse=True)
    h = 0
    for i, dv in enumerate(degs, start=1):
        if dv >= i:
            h = i
    high = frozenset(v for v in range(g.n) if g.degree(v) >= h + 1)
    assert len(high) <= h
    adjacency = {v: g.adj_sets[v] & high for v in high}
    return HIndexDecomposition(h=h, high=high, adjacency=adjacency)


def solve_glswvc_by_hindex(inst: Instance) -> SolveReport:
    """Exact weighted gap solver with branching confined to the high-degree
    part; the rest has bounded degree."""
    t0 = time.perf_counter()
    g = inst.graph

    def done(swap, algorithm, branches=0, sub_nodes=0, h=None):
        if swap is not None:
            assert swap.valid and swap.improvement >= inst.d and len(swap) <= inst.k
        return SolveReport(swap=swap, algorithm=algorithm, branch_nodes=branches,
                           elapsed=time.perf_counter() - t0,
                           details={"h": h, "sub_nodes": sub_nodes})

    if inst.d <= 0:
        return done(EMPTY_SWAP, "hindex")
    if inst.k <= 2:
        rep = solve_k_le_2(inst)
        return done(rep.swap, "hindex:k<=2")
    hd = compute_h_index(g)
    if hd.h <= 1:
        rep = solve_hindex_le_1(inst)
        return done(rep.swap, "hindex:h<=1", h=hd.h)
    if hd.h == 2:
        td = bounded_degree_decomposition(g, include_in_all=hd.high)
        rep = solve_max_improvement_tw(inst, td)
        return done(rep.swap, "hindex:h=2", h=hd.h)

    high = sorted(hd.high)
    branches = 0
    sub_nodes = 0
    for size in range(0, min(inst.k, len(high)) + 1):
        for w_h in itertools.combinations(high, size):
            w_h = frozenset(w_h)
            w_cover = w_h & inst.cover
            if not all(not (hd.adjacency[v] & w_cover) for v in w_cover):
                continue
            forced_high = frozenset(
                u for v in w_cover for u in hd.adjacency[v]) - inst.cover
            if not forced_high <= w_h:
                continue  # some high non-cover neighbor would have to join
            branches += 1
            si = make_swap_instance(inst, w_h)
            if si.k < 0:
                continue
            if si.d <= 0:
                return done(Swap.of(inst, si.extension), "hindex",
                            branches, sub_nodes, hd.h)
            child = si.child_instance()
            surviving_high = frozenset(
                si.old_to_new[v] for v in hd.high if v not in si.removed)
            ex = exclusion_instance(child, surviving_high)
            assert ex.instance.graph.max_degree() <= hd.h
            rep = solve_glswvc_by_degree(ex.instance)
            sub_nodes += rep.branch_nodes
            if rep.found:
                witness = si.lift(ex.lift(rep.swap.vertices))
                return done(Swap.of(inst, witness), "hindex",
                            branches, sub_nodes, hd.h)
    return done(None, "hindex", branches, sub_nodes, hd.h)
