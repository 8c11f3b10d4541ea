"""Branching solvers parameterized by maximum degree.

Connected swaps are enumerated by seeding at a cover vertex and alternately
auto-adding forced non-cover neighbors and branching on which cover vertex
joins next.  Swap families (one best connected representative per improvement
value or per size) drive the branching rules that handle disconnected optima.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .graph import Instance, SolveReport, Swap, best_swap, improvement
from .swaps import (PreconditionError, make_swap_instance, solve_k_le_2,
                    solve_kd_le_4)
from .treewidth import bounded_degree_decomposition, solve_glsvc_tw, \
    solve_max_improvement_tw


def enumerate_connected_swaps(inst: Instance, kmax: int,
                              balanced_only: bool = False) -> Iterator[frozenset[int]]:
    """Yield every valid connected swap of size <= kmax exactly once.

    With ``balanced_only``, only swaps with one more cover vertex than
    non-cover vertices are emitted (the shape every 1-improving unit-weight
    swap has); the search itself is not restricted.
    """
    if kmax < 1:
        return
    g = inst.graph
    cover = inst.cover

    def balanced(w: frozenset[int]) -> bool:
        inside = len(w & cover)
        return inside == len(w) - inside + 1

    if not balanced_only:
        for w in range(g.n):
            if w not in cover:
                yield frozenset({w})

    for seed in sorted(cover):
        base = frozenset({seed}) | (g.adj_sets[seed] - cover)
        if len(base) > kmax:
            continue
        visited = {base}
        stack = [base]
        if not balanced_only or balanced(base):
            yield base
        while stack:
            cur = stack.pop()
            if len(cur) >= kmax:
                continue
            cur_cover = cur & cover
            for white in cur - cover:
                for black in g.adj_sets[white] & cover:
                    if black <= seed or black in cur:
                        continue
                    if g.adj_sets[black] & cur_cover:
                        continue
                    new = cur | {black} | (g.adj_sets[black] - cover)
                    if len(new) > kmax or new in visited:
                        continue
                    visited.add(new)
                    stack.append(new)
                    if not balanced_only or balanced(new):
                        yield new


def improving_singletons(inst: Instance) -> frozenset[int]:
    """Cover vertices whose whole neighborhood stays covered: valid 1-swaps."""
    return frozenset(v for v in inst.cover
                     if inst.graph.adj_sets[v] <= inst.cover)


def _capped_independent_set(g, vertices: list[int], cap: int) -> list[int]:
    """A maximum independent set among ``vertices``, stopped at size cap."""
    best: list[int] = []

    def rec(rest: list[int], acc: list[int]):
        nonlocal best
        if len(acc) > len(best):
            best = list(acc)
        if len(best) >= cap or not rest or len(acc) + len(rest) <= len(best):
            return
        v = rest[0]
        rec([u for u in rest[1:] if u not in g.adj_sets[v]], acc + [v])
        rec(rest[1:], acc)

    rec(sorted(vertices), [])
    return sorted(best)


def compute_swap_family_unweighted(inst: Instance) -> dict[int, Swap]:
    """For each improvement value j in [1, d], a minimum valid connected
    j-improving swap of size at most k-d+j, when one exists.

    Candidates come from balanced connected swaps extended by independent
    sets of additional removable cover vertices.
    """
    g = inst.graph
    cover = inst.cover
    if any(g.adj_sets[v] <= cover for v in cover):
        raise PreconditionError(
            "swap family requires every cover vertex to have an outside neighbor")
    k, d = inst.k, inst.d
    family: dict[int, Swap] = {}

    def offer(j: int, vertices: frozenset[int]):
        if j > d or len(vertices) > k - d + j:
            return
        sw = Swap.of(inst, vertices)
        assert sw.valid and sw.improvement == j
        cur = family.get(j)
        if cur is None or (len(sw), sw.vertices) < (len(cur), cur.vertices):
            family[j] = sw

    for w_prime in enumerate_connected_swaps(inst, k - d + 1, balanced_only=True):
        offer(1, w_prime)
        if d == 1:
            continue
        shifted = (cover - w_prime) | (w_prime - cover)
        eligible = []
        whites = w_prime - cover
        for v in g.neighborhood(whites) & cover:
            if v in w_prime:
                continue
            if g.adj_sets[v] <= shifted:
                eligible.append(v)
        if not eligible:
            continue
        indep = _capped_independent_set(g, eligible, d - 1)
        for r in range(1, len(indep) + 1):
            offer(r + 1, w_prime | frozenset(indep[:r]))
    return family


def compute_swap_family_weighted(inst: Instance, kmax: Optional[int] = None) -> dict[int, Swap]:
    """For each size j in [1, kmax], a maximum-improvement valid connected
    swap of exactly that size, when one exists.

    Singletons outside the cover are skipped: no minimum good swap has such
    a component (dropping it always helps), so they never serve as the
    replacement representative the branching relies on.
    """
    if kmax is None:
        kmax = inst.k
    family: dict[int, Swap] = {}
    for w in enumerate_connected_swaps(inst, kmax):
        if not w & inst.cover:
            continue
        sw = Swap.of(inst, w)
        j = len(sw)
        cur = family.get(j)
        if cur is None or (-sw.improvement, sw.vertices) < (-cur.improvement, cur.vertices):
            family[j] = sw
    return family


@dataclass
class _Search:
    branch_nodes: int = 0
    max_depth: int = 0
    details: dict = field(default_factory=dict)


def _solve_unit_gap(inst: Instance, ctx: _Search, depth: int = 0) -> Optional[frozenset[int]]:
    ctx.branch_nodes += 1
    ctx.max_depth = max(ctx.max_depth, depth)
    if inst.d <= 0:
        return frozenset()
    if inst.k <= 0 or inst.d > inst.k:
        return None
    if inst.k + inst.d <= 4:
        rep = solve_kd_le_4(inst)
        return rep.swap.as_set() if rep.found else None
    if inst.graph.max_degree() <= 2:
        rep = solve_glsvc_tw(inst, bounded_degree_decomposition(inst.graph))
        return rep.swap.as_set() if rep.found else None

    isolated = sorted(improving_singletons(inst))
    branches: list[frozenset[int]] = []
    if isolated:
        v = isolated[0]
        branches.append(frozenset({v}))
        nb = sorted(inst.graph.adj_sets[v])
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                if not inst.graph.has_edge(a, b):
                    branches.append(frozenset({a, b}))
    else:
        family = compute_swap_family_unweighted(inst)
        if inst.d in family:
            return family[inst.d].as_set()
        seen: set[frozenset[int]] = set()
        for j in range(1, inst.d // 2 + 1):
            if j not in family:
                continue
            wj = family[j].as_set()
            for cand in [wj] + [frozenset({w})
                                for w in sorted(inst.graph.neighborhood(wj))]:
                if cand not in seen:
                    seen.add(cand)
                    branches.append(cand)

    for w in branches:
        si = make_swap_instance(inst, w)
        if si.k < 0:
            continue
        sub = _solve_unit_gap(si.child_instance(), ctx, depth + 1)
        if sub is not None:
            return si.lift(sub)
    return None


def _solve_weighted_gap(inst: Instance, ctx: _Search, depth: int = 0) -> Optional[frozenset[int]]:
    ctx.branch_nodes += 1
    ctx.max_depth = max(ctx.max_depth, depth)
    if inst.d <= 0:
        return frozenset()
    if inst.k <= 0:
        return None
    if inst.k <= 2:
        rep = solve_k_le_2(inst)
        return rep.swap.as_set() if rep.found else None
    if inst.graph.max_degree() <= 2:
        rep = solve_max_improvement_tw(inst, bounded_degree_decomposition(inst.graph))
        return rep.swap.as_set() if rep.found else None

    family = compute_swap_family_weighted(inst)
    winners = [sw for sw in family.values() if sw.improvement >= inst.d]
    if winners:
        return best_swap(winners).as_set()

    s1 = improving_singletons(inst)
    branches: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()

    def push(cand: frozenset[int]):
        if cand not in seen:
            seen.add(cand)
            branches.append(cand)

    if 1 in family:
        w1 = family[1].as_set()
        for w in sorted(w1 | inst.graph.neighborhood(w1)):
            push(frozenset({w}))
    for j in range(2, inst.k // 2 + 1):
        if j not in family:
            continue
        wj = family[j].as_set()
        push(wj)
        for w in sorted(inst.graph.neighborhood(wj) - s1):
            push(frozenset({w}))

    for w in branches:
        si = make_swap_instance(inst, w)
        if si.k < 0:
            continue
        sub = _solve_weighted_gap(si.child_instance(), ctx, depth + 1)
        if sub is not None:
            return si.lift(sub)
    return None


def _finish(inst: Instance, ctx: _Search, witness: Optional[frozenset[int]],
            algorithm: str, t0: float) -> SolveReport:
    rep = SolveReport(swap=None, algorithm=algorithm, branch_nodes=ctx.branch_nodes,
                      elapsed=time.perf_counter() - t0,
                      details={"max_depth": ctx.max_depth, **ctx.details})
    if witness is not None:
        sw = Swap.of(inst, witness)
        assert sw.valid and sw.improvement >= inst.d and len(sw) <= inst.k
        rep.swap = sw
    return rep


def solve_glsvc_by_degree(inst: Instance) -> SolveReport:
    """Unit-weight gap solver branching on swap families and their neighbors."""
    if inst.mode.weighted:
        raise PreconditionError("solve_glsvc_by_degree requires a unit-weight mode")
    t0 = time.perf_counter()
    ctx = _Search()
    witness = _solve_unit_gap(inst, ctx)
    return _finish(inst, ctx, witness, "degree-gap", t0)


def solve_glswvc_by_degree(inst: Instance) -> SolveReport:
    """Weighted gap solver; fully general entry point."""
    t0 = time.perf_counter()
    ctx = _Search()
    witness = _solve_weighted_gap(inst, ctx)
    return _finish(inst, ctx, witness, "degree-weighted", t0)


def solve_lswvc_by_degree(inst: Instance) -> SolveReport:
    """d = 1 weighted local search: some connected good swap exists whenever
    any good swap does, so a scan over connected swaps is exact."""
    if inst.d != 1:
        raise PreconditionError("solve_lswvc_by_degree requires d = 1")
    t0 = time.perf_counter()
    count = 0
    cand: list[Swap] = []
    for w in enumerate_connected_swaps(inst, inst.k):
        count += 1
        delta = improvement(inst, w)
        if delta >= 1:
            cand.append(Swap(tuple(sorted(w)), delta, True))
    rep = SolveReport(swap=best_swap(cand), algorithm="degree-lswvc",
                      branch_nodes=count, elapsed=time.perf_counter() - t0)
    return rep
