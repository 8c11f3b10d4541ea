"""Brute-force ground truth: exhaustive enumeration of valid k-swaps.

Deliberately naive.  Guarded so it refuses instance sizes where subset
enumeration stops being feasible, unless explicitly forced.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .graph import Instance, Swap, swap_sort_key

ALL_GOOD_CAP = 10 ** 6


class OracleGuardError(RuntimeError):
    """Enumeration would be too large; pass force=True to override."""


@dataclass
class OracleResult:
    best: Optional[Swap]                 # max improvement, min size, lex
    d: int                               # gap the result was computed for
    all_good: Optional[list[Swap]] = None
    truncated: bool = False

    @property
    def is_yes(self) -> bool:
        return self.best is not None and self.best.improvement >= self.d


def _guard(inst: Instance, force: bool):
    n = inst.graph.n
    if force:
        return
    if n > 24 and inst.k > 4:
        raise OracleGuardError(
            f"oracle refuses n={n}, k={inst.k} (guard: n <= 24 or k <= 4); force to override")


def oracle_solve(inst: Instance, collect: bool = False, force: bool = False) -> OracleResult:
    """Enumerate every swap of size <= k; keep the best valid one.

    With ``collect``, additionally gathers every good swap (valid and
    d-improving), capped at ALL_GOOD_CAP sets.
    """
    return oracle_constrained(inst, frozenset(), frozenset(), collect=collect, force=force)


def oracle_constrained(inst: Instance, must_contain: frozenset[int],
                       must_avoid: frozenset[int], collect: bool = False,
                       force: bool = False) -> OracleResult:
    """Oracle restricted to swaps W with must_contain <= W and W disjoint
    from must_avoid."""
    _guard(inst, force)
    g = inst.graph
    must_contain = g.check_vertex_set(must_contain)
    must_avoid = g.check_vertex_set(must_avoid)
    if must_contain & must_avoid:
        return OracleResult(best=None, d=inst.d, all_good=[] if collect else None)

    n = g.n
    k = inst.k
    cover_mask = 0
    for v in inst.cover:
        cover_mask |= 1 << v
    adj = g.adj_mask
    wt = inst.weights

    base = list(sorted(must_contain))
    if len(base) > k:
        return OracleResult(best=None, d=inst.d, all_good=[] if collect else None)
    free = [v for v in range(n) if v not in must_contain and v not in must_avoid]

    best: Optional[Swap] = None
    good: list[Swap] = []
    truncated = False

    def consider(mask: int, members: list[int], delta: int):
        nonlocal best, truncated
        # validity: cover part independent (maintained by construction only
        # for the free extension; base may break it) and extension closed.
        in_cover = mask & cover_mask
        sub = in_cover
        while sub:
            v = (sub & -sub).bit_length() - 1
            sub &= sub - 1
            if adj[v] & in_cover:
                return
            if adj[v] & ~cover_mask & ~mask:
                return
        sw = Swap(tuple(members), delta, True)
        if best is None or swap_sort_key(sw) < swap_sort_key(best):
            best = sw
        if collect and delta >= inst.d:
            if len(good) < ALL_GOOD_CAP:
                good.append(sw)
            else:
                truncated = True

    base_mask = 0
    base_delta = 0
    for v in base:
        base_mask |= 1 << v
        base_delta += wt[v] if v in inst.cover else -wt[v]

    # DFS over subsets of `free` in increasing-id order, extending the base.
    stack: list[tuple[int, int, int, list[int]]] = [(0, base_mask, base_delta, base)]
    while stack:
        start, mask, delta, members = stack.pop()
        consider(mask, members, delta)
        if len(members) >= k:
            continue
        for idx in range(start, len(free)):
            v = free[idx]
            bit = 1 << v
            if bit & cover_mask and adj[v] & mask & cover_mask:
                continue  # cover part would stop being independent
            stack.append((idx + 1, mask | bit, delta + (wt[v] if bit & cover_mask else -wt[v]),
                          sorted(members + [v])))

    return OracleResult(best=best, d=inst.d,
                        all_good=sorted(good, key=swap_sort_key) if collect else None,
                        truncated=truncated)


def oracle_all_valid(inst: Instance, kmax: Optional[int] = None,
                     force: bool = False) -> list[Swap]:
    """Every valid swap of size <= kmax (default: the instance budget)."""
    query = inst if kmax is None else inst.with_budget(kmax, inst.d)
    _guard(query, force)
    g = inst.graph
    out: list[Swap] = []

    def rec(start: int, members: tuple[int, ...]):
        sw = Swap.of(query, members)
        if sw.valid:
            out.append(sw)
        if len(members) >= query.k:
            return
        for v in range(start, g.n):
            rec(v + 1, members + (v,))

    rec(0, ())
    return sorted(out, key=swap_sort_key)
