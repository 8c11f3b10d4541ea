"""Swap calculus: residual instances after partial swaps, exclusion
instances, parity and small-subset reductions, and the linear-time
special-case solvers shared by the branching algorithms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import (EMPTY_SWAP, Graph, Instance, SolveReport, Swap, best_swap,
                    improvement)


class PreconditionError(ValueError):
    """An operation was called outside its supported case."""


def extension(inst: Instance, swap_vertices: Iterable[int]) -> frozenset[int]:
    """Minimal superset of the swap whose application yields a vertex cover.

    Requires the swapped-out cover part to be independent; the result is the
    swap plus all neighbors that would otherwise lose their only cover.
    """
    g = inst.graph
    w = g.check_vertex_set(swap_vertices)
    if not g.is_independent(w & inst.cover):
        raise PreconditionError("swap seed intersects the cover in adjacent vertices")
    return w | (g.neighborhood(w) - inst.cover)


@dataclass
class SwapInstance:
    """Residual instance after committing a partial swap.

    The committed swap is extended (``extension``) so it is valid on its own;
    the extension together with the cover-neighbors of the swapped-out part
    is removed from the graph, and budget/gap are adjusted.  ``new_to_old``
    translates surviving vertex ids back to the parent instance.
    """

    parent: Instance
    seed: frozenset[int]
    extension: frozenset[int]
    removed: frozenset[int]
    graph: Graph
    cover: frozenset[int]
    weights: tuple[int, ...]
    k: int
    d: int
    new_to_old: list[int]
    old_to_new: dict[int, int]

    def child_instance(self) -> Instance:
        return Instance(self.graph, self.cover, self.weights, self.k, self.d,
                        self.parent.mode, relaxed=True)

    def lift(self, child_vertices: Iterable[int]) -> frozenset[int]:
        """Map a child swap back to parent ids and merge the committed part."""
        return self.extension | {self.new_to_old[v] for v in child_vertices}


def make_swap_instance(inst: Instance, swap_vertices: Iterable[int]) -> SwapInstance:
    g = inst.graph
    w = g.check_vertex_set(swap_vertices)
    ext = extension(inst, w)
    removed = (g.neighborhood(w & inst.cover) | ext)
    keep = [v for v in range(g.n) if v not in removed]
    sub, old_to_new, new_to_old = g.induced_subgraph(keep)
    cover = frozenset(old_to_new[v] for v in inst.cover if v not in removed)
    weights = tuple(inst.weights[v] for v in new_to_old)
    k2 = inst.k - len(ext)
    d2 = inst.d - improvement(inst, ext)
    if not inst.mode.weighted:
        assert k2 + d2 == inst.k + inst.d - 2 * len(w & inst.cover)
    return SwapInstance(parent=inst, seed=w, extension=ext, removed=removed,
                        graph=sub, cover=cover, weights=weights, k=k2, d=d2,
                        new_to_old=new_to_old, old_to_new=old_to_new)


@dataclass
class ExclusionInstance:
    """Instance restricted to swaps avoiding a vertex set.

    Removes the avoided set plus the neighborhoods of its non-cover part;
    budget and gap are unchanged.
    """

    parent: Instance
    avoided: frozenset[int]
    removed: frozenset[int]
    instance: Instance
    new_to_old: list[int]
    old_to_new: dict[int, int]

    def lift(self, child_vertices: Iterable[int]) -> frozenset[int]:
        return frozenset(self.new_to_old[v] for v in child_vertices)


def exclusion_instance(inst: Instance, avoid: Iterable[int]) -> ExclusionInstance:
    g = inst.graph
    avoid = g.check_vertex_set(avoid)
    # vertices adjacent to an avoided non-cover vertex cannot leave the
    # cover, so dropping them does not change the answer
    removed = avoid | frozenset(u for v in (avoid - inst.cover) for u in g.adj_sets[v])
    keep = [v for v in range(g.n) if v not in removed]
    sub, old_to_new, new_to_old = g.induced_subgraph(keep)
    cover = frozenset(old_to_new[v] for v in inst.cover if v not in removed)
    weights = tuple(inst.weights[v] for v in new_to_old)
    child = Instance(sub, cover, weights, inst.k, inst.d, inst.mode, relaxed=True)
    return ExclusionInstance(parent=inst, avoided=avoid, removed=removed,
                             instance=child, new_to_old=new_to_old,
                             old_to_new=old_to_new)


def apply_parity_reduction(inst: Instance) -> Instance:
    """For unit weights, an odd k+d never helps: drop the budget by one."""
    if inst.mode.weighted:
        raise PreconditionError("parity reduction applies to unit-weight modes only")
    if (inst.k + inst.d) % 2 == 1 and inst.k >= 1:
        return Instance(inst.graph, inst.cover, inst.weights, inst.k - 1,
                        inst.d, inst.mode)
    return inst


def small_subset_bound(inst: Instance) -> int:
    """Cap on |S_X u C_X| that solvers may enforce for minimal good swaps."""
    if inst.mode.weighted:
        raise PreconditionError("small-subset bound applies to unit-weight modes only")
    return (inst.k + inst.d) // 2


def _h_index(g: Graph) -> int:
    degs = sorted((g.degree(v) for v in range(g.n)), reverse=True)
    h = 0
    for i, dv in enumerate(degs, start=1):
        if dv >= i:
            h = i
    return h


# ---------------------------------------------------------------------------
# k <= 2 (weighted)
# ---------------------------------------------------------------------------

def solve_k_le_2(inst: Instance) -> SolveReport:
    """Exact solver for budgets 0..2; also reports a max-improvement swap.

    Minimal improving swaps with at most two vertices are: a cover vertex
    with no outside neighbor, two such non-adjacent vertices, or a cover
    vertex traded for its unique outside neighbor.
    """
    if inst.k > 2:
        raise PreconditionError("solve_k_le_2 requires k <= 2")
    g = inst.graph
    candidates: list[Swap] = [EMPTY_SWAP]
    if inst.k >= 1:
        s_star = sorted(v for v in inst.cover if g.adj_sets[v] <= inst.cover)
        if s_star:
            v_best = min(s_star, key=lambda v: (-inst.weights[v], v))
            candidates.append(Swap.of(inst, [v_best]))
        if inst.k == 2:
            trade = None
            for v in sorted(inst.cover):
                outside = g.adj_sets[v] - inst.cover
                if len(outside) == 1:
                    (w,) = outside
                    if inst.weights[v] > inst.weights[w]:
                        cand = Swap.of(inst, [v, w])
                        trade = best_swap([trade, cand] if trade else [cand])
            if trade is not None:
                candidates.append(trade)
            # best non-adjacent pair within s_star via a sorted-prefix walk
            order = sorted(s_star, key=lambda v: (-inst.weights[v], v))
            pair = None
            for v in order:
                for u in order:
                    if u != v and not g.has_edge(u, v):
                        cand = Swap.of(inst, [u, v])
                        pair = best_swap([pair, cand] if pair else [cand])
                        break
            if pair is not None:
                candidates.append(pair)
    top = best_swap(candidates)
    assert top is not None and top.valid
    found = top if top.improvement >= inst.d else None
    return SolveReport(swap=found, algorithm="k<=2", details={"best": top})


# ---------------------------------------------------------------------------
# k + d <= 4 (unweighted gap)
# ---------------------------------------------------------------------------

def solve_kd_le_4(inst: Instance) -> SolveReport:
    """Exact unit-weight solver when k + d <= 4."""
    if inst.mode.weighted:
        raise PreconditionError("solve_kd_le_4 requires a unit-weight mode")
    if inst.k + inst.d > 4:
        raise PreconditionError("solve_kd_le_4 requires k + d <= 4")
    if inst.d <= 0:
        return SolveReport(swap=EMPTY_SWAP, algorithm="k+d<=4")
    if inst.k <= 2:
        rep = solve_k_le_2(inst)
        rep.algorithm = "k+d<=4"
        return rep
    # remaining case: k = 3, d = 1
    g = inst.graph
    for v in sorted(inst.cover):
        if g.adj_sets[v] <= inst.cover:
            return SolveReport(swap=Swap.of(inst, [v]), algorithm="k+d<=4")
    groups: dict[int, list[int]] = {}
    for v in sorted(inst.cover):
        outside = g.adj_sets[v] - inst.cover
        if len(outside) == 1:
            (c,) = outside
            groups.setdefault(c, []).append(v)
    for c in sorted(groups):
        members = groups[c]
        for i, w1 in enumerate(members):
            for w2 in members[i + 1:]:
                if not g.has_edge(w1, w2):
                    return SolveReport(swap=Swap.of(inst, [w1, c, w2]),
                                       algorithm="k+d<=4")
    return SolveReport(swap=None, algorithm="k+d<=4")


# ---------------------------------------------------------------------------
# h-index <= 1 (weighted)
# ---------------------------------------------------------------------------

def _solve_max_degree_le_1(inst: Instance) -> tuple[int, frozenset[int]]:
    """Max-improvement swap on graphs of isolated vertices and edges.

    Returns (improvement, swap).  Dominant-endpoint reduction first, then an
    exact merge of the best single-vertex swaps and the best edge trades.
    """
    g = inst.graph
    dropped: set[int] = set()
    for u in range(g.n):
        for v in g.adj[u]:
            if u < v and u in inst.cover and v in inst.cover:
                dropped.add(v if inst.weights[v] <= inst.weights[u] else u)
    deg = {v: sum(1 for w in g.adj[v] if w not in dropped)
           for v in range(g.n) if v not in dropped}

    singles = sorted((v for v in inst.cover
                      if v not in dropped and deg[v] == 0 and inst.weights[v] > 0),
                     key=lambda v: (-inst.weights[v], v))
    pairs = []
    for u in range(g.n):
        if u in dropped:
            continue
        for v in g.adj[u]:
            if u < v and v not in dropped:
                inside = u if u in inst.cover else v
                outside = v if inside == u else u
                delta = inst.weights[inside] - inst.weights[outside]
                if delta > 0:
                    pairs.append(((inside, outside), delta))
    pairs.sort(key=lambda p: (-p[1], p[0]))

    sing_pref = [0]
    for v in singles:
        sing_pref.append(sing_pref[-1] + inst.weights[v])
    pair_pref = [0]
    for _, delta in pairs:
        pair_pref.append(pair_pref[-1] + delta)

    best_val, best_p = 0, 0
    for p in range(min(len(pairs), inst.k // 2) + 1):
        s = min(len(singles), inst.k - 2 * p)
        val = pair_pref[p] + sing_pref[s]
        if val > best_val:
            best_val, best_p = val, p
    s = min(len(singles), inst.k - 2 * best_p)
    witness: set[int] = set(singles[:s])
    for (a, b), _ in pairs[:best_p]:
        witness.update((a, b))
    return best_val, frozenset(witness)


def solve_hindex_le_1(inst: Instance) -> SolveReport:
    """Exact solver when at most one vertex has degree two or more."""
    g = inst.graph
    if _h_index(g) > 1:
        raise PreconditionError("solve_hindex_le_1 requires h-index <= 1")
    report = SolveReport(swap=None, algorithm="h<=1")
    if inst.d <= 0:
        report.swap = EMPTY_SWAP
        return report
    if inst.k <= 0:
        return report
    if g.max_degree() <= 1:
        val, witness = _solve_max_degree_le_1(inst)
        report.details["best_improvement"] = val
        if val >= inst.d:
            report.swap = Swap.of(inst, witness)
        return report

    hubs = [v for v in range(g.n) if g.degree(v) >= 2]
    assert len(hubs) == 1
    v_star = hubs[0]

    si = make_swap_instance(inst, [v_star])
    report.branch_nodes += 1
    if si.k >= 0:
        if si.d <= 0:
            report.swap = Swap.of(inst, si.extension)
            return report
        child = si.child_instance()
        assert child.graph.max_degree() <= 1
        val, witness = _solve_max_degree_le_1(child)
        if val >= si.d:
            report.swap = Swap.of(inst, si.lift(witness))
            return report

    ex = exclusion_instance(inst, [v_star])
    report.branch_nodes += 1
    assert ex.instance.graph.max_degree() <= 1
    val, witness = _solve_max_degree_le_1(ex.instance)
    if val >= inst.d:
        report.swap = Swap.of(inst, ex.lift(witness))
    return report
