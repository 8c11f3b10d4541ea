"""Modular decompositions and the solvers built on them.

The decomposition is the usual parallel/series/prime tree: parallel nodes
split into connected components, series nodes into co-components, prime
nodes into maximal proper modules.  Two solvers run over it: a direct DP
that enumerates independent sets of quotient vertices, and a branching
solver that treats each quotient as a knapsack-with-swaps subproblem
rewarded by the children's DP tables.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Optional

from .graph import Graph, Instance, Mode, SolveReport, Swap, improvement
from .swaps import PreconditionError
from .degree import enumerate_connected_swaps

NEG = -(10 ** 15)
INF_COST = math.inf


@dataclass
class MdNode:
    kind: str                         # leaf | parallel | series | prime
    children: tuple[int, ...]
    vertices: frozenset[int]          # vertex set represented by the node
    vertex: Optional[int] = None      # for leaves
    quotient_edges: frozenset[tuple[int, int]] = frozenset()  # child positions


@dataclass
class ModularDecomposition:
    nodes: list[MdNode]
    root: int

    def postorder(self) -> list[int]:
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            idx, expanded = stack.pop()
            if expanded:
                order.append(idx)
            else:
                stack.append((idx, True))
                for c in self.nodes[idx].children:
                    stack.append((c, False))
        return order

    def internal_nodes(self) -> list[int]:
        return [i for i in self.postorder() if self.nodes[i].kind != "leaf"]

    @property
    def width(self) -> int:
        internal = self.internal_nodes()
        if not internal:
            return 1
        return max(len(self.nodes[i].children) for i in internal)

    def quotient_degree(self, idx: int) -> int:
        node = self.nodes[idx]
        if node.kind == "parallel":
            return 0
        if node.kind == "series":
            return len(node.children) - 1
        deg = [0] * len(node.children)
        for a, b in node.quotient_edges:
            deg[a] += 1
            deg[b] += 1
        return max(deg, default=0)

    def quotient_neighbors(self, idx: int) -> list[frozenset[int]]:
        """Adjacency between child positions of an internal node."""
        node = self.nodes[idx]
        c = len(node.children)
        if node.kind == "parallel":
            return [frozenset()] * c
        if node.kind == "series":
            full = frozenset(range(c))
            return [full - {i} for i in range(c)]
        nb = [set() for _ in range(c)]
        for a, b in node.quotient_edges:
            nb[a].add(b)
            nb[b].add(a)
        return [frozenset(s) for s in nb]


def _co_components(g: Graph, vs: list[int]) -> list[list[int]]:
    vs_mask = 0
    for v in vs:
        vs_mask |= 1 << v
    remaining = set(vs)
    comps = []
    while remaining:
        start = min(remaining)
        comp = {start}
        stack = [start]
        remaining.discard(start)
        while stack:
            x = stack.pop()
            non_adj = vs_mask & ~g.adj_mask[x] & ~(1 << x)
            sub = non_adj
            while sub:
                y = (sub & -sub).bit_length() - 1
                sub &= sub - 1
                if y in remaining:
                    remaining.discard(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps


def _module_closure(g: Graph, vs_mask: int, a: int, b: int) -> int:
    """Smallest module of G[vs] containing both seeds, as a bitmask."""
    x = (1 << a) | (1 << b)
    while True:
        add = 0
        rest = vs_mask & ~x
        sub = rest
        while sub:
            u = (sub & -sub).bit_length() - 1
            sub &= sub - 1
            nx = g.adj_mask[u] & x
            if nx and nx != x:
                add |= 1 << u
        if not add:
            return x
        x |= add


def _maximal_module_partition(g: Graph, vs: list[int]) -> list[list[int]]:
    """Maximal proper modules of a connected, co-connected induced subgraph."""
    vs_mask = 0
    for v in vs:
        vs_mask |= 1 << v
    parent = {v: v for v in vs}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in itertools.combinations(vs, 2):
        if find(a) == find(b):
            continue
        closure = _module_closure(g, vs_mask, a, b)
        if closure == vs_mask:
            continue
        members = []
        sub = closure
        while sub:
            v = (sub & -sub).bit_length() - 1
            sub &= sub - 1
            members.append(v)
        root = find(members[0])
        for v in members[1:]:
            parent[find(v)] = root
    blocks: dict[int, list[int]] = {}
    for v in vs:
        blocks.setdefault(find(v), []).append(v)
    return sorted((sorted(b) for b in blocks.values()), key=lambda b: b[0])


def compute_modular_decomposition(g: Graph) -> ModularDecomposition:
    if g.n < 1:
        raise PreconditionError("modular decomposition needs at least one vertex")
    nodes: list[MdNode] = []

    def add(kind, children, vertices, vertex=None, qedges=frozenset()):
        nodes.append(MdNode(kind, tuple(children), frozenset(vertices),
                            vertex, qedges))
        return len(nodes) - 1

    def build(vs: list[int]) -> int:
        if len(vs) == 1:
            return add("leaf", (), vs, vertex=vs[0])
        comps = g.connected_components(vs)
        if len(comps) > 1:
            return add("parallel", [build(c) for c in comps],
                       [v for c in comps for v in c])
        cocomps = _co_components(g, vs)
        if len(cocomps) > 1:
            return add("series", [build(c) for c in cocomps],
                       [v for c in cocomps for v in c])
        blocks = _maximal_module_partition(g, vs)
        children = [build(b) for b in blocks]
        reps = [b[0] for b in blocks]
        qedges = frozenset(
            (i, j) for i in range(len(reps)) for j in range(i + 1, len(reps))
            if g.has_edge(reps[i], reps[j]))
        return add("prime", children, vs, qedges=qedges)

    root = build(list(range(g.n)))
    return ModularDecomposition(nodes=nodes, root=root)


def verify_modular_decomposition(g: Graph, md: ModularDecomposition) -> None:
    """Exhaustively check the complete/empty bipartite property between the
    vertex sets of any two children of every internal node."""
    for idx in md.internal_nodes():
        node = md.nodes[idx]
        sets = [sorted(md.nodes[c].vertices) for c in node.children]
        nbs = md.quotient_neighbors(idx)
        for i in range(len(sets)):
            for j in range(i + 1, len(sets)):
                expected = j in nbs[i]
                for u in sets[i]:
                    for v in sets[j]:
                        if g.has_edge(u, v) != expected:
                            raise AssertionError(
                                f"node {idx}: children {i},{j} not uniform at "
                                f"({u},{v})")
    root_vertices = md.nodes[md.root].vertices
    assert root_vertices == frozenset(range(g.n))


def compute_delta_md(md: ModularDecomposition) -> int:
    """Maximum quotient-graph degree over all internal nodes."""
    return max((md.quotient_degree(i) for i in md.internal_nodes()), default=0)


def delta_md_prime_only(md: ModularDecomposition) -> int:
    return max((md.quotient_degree(i) for i in md.internal_nodes()
                if md.nodes[i].kind == "prime"), default=0)


def dump_modular_decomposition(md: ModularDecomposition) -> str:
    lines = []
    for i, node in enumerate(md.nodes):
        pairs = ",".join(f"{a}-{b}" for a, b in sorted(node.quotient_edges))
        kids = ",".join(str(c) for c in node.children)
        lines.append(f"node {i} kind={node.kind} children={kids} "
                     f"quotient-edges={pairs}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DP over the decomposition
# ---------------------------------------------------------------------------

def _merge_free(acc: list[int], row: list[int], k: int) -> list[int]:
    out = [NEG] * (k + 1)
    for b in range(k + 1):
        best = NEG
        for b2 in range(b + 1):
            a = acc[b - b2]
            r = row[b2]
            if a > NEG and r > NEG and a + r > best:
                best = a + r
        out[b] = best
    return out


def _merge_at_least_one(acc: list[int], row: list[int], k: int) -> list[int]:
    out = [NEG] * (k + 1)
    for b in range(k + 1):
        best = NEG
        for b2 in range(1, b + 1):
            a = acc[b - b2]
            r = row[b2]
            if a > NEG and r > NEG and a + r > best:
                best = a + r
        out[b] = best
    return out


class _MwDP:
    """Bottom-up tables D_x[k'] = best improvement of a k'-swap inside the
    node's vertex set, combined through quotient-level independent sets."""

    def __init__(self, inst: Instance, md: ModularDecomposition, cap: int):
        self.inst = inst
        self.md = md
        self.cap = cap
        self.tables: list[Optional[list[int]]] = [None] * len(md.nodes)
        self.cells = 0

    def run(self) -> list[int]:
        inst, md = self.inst, self.md
        if md.nodes[md.root].vertices != frozenset(range(inst.graph.n)):
            raise PreconditionError("decomposition does not match the instance")
        k = inst.k
        for idx in md.postorder():
            node = md.nodes[idx]
            if node.kind == "leaf":
                v = node.vertex
                gain = inst.weights[v] if v in inst.cover else 0
                self.tables[idx] = [0] + [gain] * k
            elif node.kind == "parallel":
                acc = [0] * (k + 1)
                for c in node.children:
                    acc = _merge_free(acc, self.tables[c], k)
                self.tables[idx] = acc
            else:
                self.tables[idx] = self._internal_row(idx)
            self.cells += k + 1
        return self.tables[md.root]

    def _choices(self, idx: int):
        """Independent quotient sets with their forced-entry size/weight."""
        inst, md = self.inst, self.md
        node = md.nodes[idx]
        c = len(node.children)
        nbs = md.quotient_neighbors(idx)
        out_size = []
        out_weight = []
        for child in node.children:
            outside = md.nodes[child].vertices - inst.cover
            out_size.append(len(outside))
            out_weight.append(sum(inst.weights[v] for v in outside))
        max_size = min(self.cap, inst.k, c)
        if node.kind == "series":
            subsets = [(i,) for i in range(c)] if max_size >= 1 else []
        else:
            subsets = []
            for r in range(1, max_size + 1):
                for combo in itertools.combinations(range(c), r):
                    if all(b not in nbs[a] for a, b in itertools.combinations(combo, 2)):
                        subsets.append(combo)
        for combo in subsets:
            forced = frozenset().union(*(nbs[i] for i in combo)) - set(combo)
            yield (combo, sum(out_size[i] for i in forced),
                   sum(out_weight[i] for i in forced), forced)

    def _internal_row(self, idx: int) -> list[int]:
        inst, md = self.inst, self.md
        node = md.nodes[idx]
        k = inst.k
        row = [0] * (k + 1)
        for combo, f_size, f_weight, _forced in self._choices(idx):
            if f_size + len(combo) > k:
                continue
            acc = [0] + [NEG] * k
            for i in combo:
                acc = _merge_at_least_one(acc, self.tables[node.children[i]], k)
            for kp in range(f_size + len(combo), k + 1):
                got = acc[kp - f_size]
                if got > NEG and got - f_weight > row[kp]:
                    row[kp] = got - f_weight
        return row

    # -- witness reconstruction (argmax replay, top-down) -------------------

    def witness(self, idx: int, budget: int) -> set[int]:
        inst, md = self.inst, self.md
        node = md.nodes[idx]
        target = self.tables[idx][budget]
        if node.kind == "leaf":
            return {node.vertex} if target > 0 else set()
        if target == 0:
            return set()
        k = inst.k
        if node.kind == "parallel":
            rows = [self.tables[c] for c in node.children]
            prefix = [[0] * (k + 1)]
            for r in rows:
                prefix.append(_merge_free(prefix[-1], r, k))
            out: set[int] = set()
            b = budget
            for i in range(len(rows) - 1, -1, -1):
                for b2 in range(b + 1):
                    if (prefix[i][b - b2] > NEG and rows[i][b2] > NEG and
                            prefix[i][b - b2] + rows[i][b2] == prefix[i + 1][b]):
                        out |= self.witness(node.children[i], b2)
                        b -= b2
                        break
            return out
        for combo, f_size, f_weight, forced in self._choices(idx):
            if f_size + len(combo) > budget:
                continue
            arrays = [[0] + [NEG] * k]
            for i in combo:
                arrays.append(_merge_at_least_one(
                    arrays[-1], self.tables[node.children[i]], k))
            got = arrays[-1][budget - f_size]
            if got > NEG and got - f_weight == target:
                out = set()
                for i in forced:
                    out |= md.nodes[node.children[i]].vertices - inst.cover
                b = budget - f_size
                for pos in range(len(combo) - 1, -1, -1):
                    row = self.tables[node.children[combo[pos]]]
                    for b2 in range(1, b + 1):
                        if (arrays[pos][b - b2] > NEG and row[b2] > NEG and
                                arrays[pos][b - b2] + row[b2] == arrays[pos + 1][b]):
                            out |= self.witness(node.children[combo[pos]], b2)
                            b -= b2
                            break
                return out
        raise AssertionError("traceback failed to reproduce the table value")


def mw_tables(inst: Instance, md: ModularDecomposition,
              cap: Optional[int] = None) -> tuple[list[list[int]], int]:
    """All node tables (uncapped unless a cap is given); returns (tables, cells)."""
    dp = _MwDP(inst, md, cap if cap is not None else inst.k)
    dp.run()
    return dp.tables, dp.cells


def solve_glswvc_mw(inst: Instance, md: ModularDecomposition) -> SolveReport:
    t0 = time.perf_counter()
    dp = _MwDP(inst, md, cap=inst.k)
    root_row = dp.run()
    value = root_row[inst.k]
    verts = dp.witness(md.root, inst.k)
    sw = Swap.of(inst, verts)
    assert sw.valid and sw.improvement == value and len(sw) <= inst.k
    found = sw if value >= inst.d else None
    return SolveReport(swap=found, algorithm="modular", dp_cells=dp.cells,
                       elapsed=time.perf_counter() - t0,
                       details={"best": sw, "best_improvement": value,
                                "width": md.width, "tables": dp.tables})


def solve_glsvc_mw(inst: Instance, md: ModularDecomposition) -> SolveReport:
    if inst.mode.weighted:
        raise PreconditionError("solve_glsvc_mw requires a unit-weight mode")
    t0 = time.perf_counter()
    cap = (inst.k + inst.d) // 2
    dp = _MwDP(inst, md, cap=cap)
    root_row = dp.run()
    value = root_row[inst.k]
    rep = SolveReport(swap=None, algorithm="modular-gap", dp_cells=dp.cells,
                      elapsed=time.perf_counter() - t0,
                      details={"capped_improvement": value, "width": md.width,
                               "tables": dp.tables})
    if value >= inst.d:
        sw = Swap.of(inst, dp.witness(md.root, inst.k))
        assert sw.valid and sw.improvement == value and len(sw) <= inst.k
        rep.swap = sw
    return rep


# ---------------------------------------------------------------------------
# Knapsack-with-swaps subproblem on a quotient graph
# ---------------------------------------------------------------------------

@dataclass
class KnapInstance:
    """Quotient-level subproblem: pick a valid swap of the quotient plus a
    budget split among children, rewarded per child by ``gamma``.

    gamma[v][c] is the reward for giving child v an internal budget c;
    rows must be non-decreasing with gamma[v][0] == 0.  ``cost[v]`` is the
    number of vertices child v adds to the cover when it enters it.
    """

    graph: Graph
    cover: frozenset[int]
    k: int
    gamma: list[list[int]]
    cost: list[float]

    def validate(self) -> None:
        bad = self.graph.is_vertex_cover(self.cover)
        if bad is not None:
            raise PreconditionError(f"knap cover misses edge {bad}")
        for v, row in enumerate(self.gamma):
            if row[0] != 0:
                raise PreconditionError(f"gamma[{v}][0] must be 0")
            if any(row[i] > row[i + 1] for i in range(len(row) - 1)):
                raise PreconditionError(f"gamma[{v}] is not non-decreasing")


@dataclass
class KnapSolution:
    value: int
    swap: frozenset[int]            # quotient vertices entering/leaving cover
    internal: dict[int, int]        # child -> internal budget (c-values)


def _knapsack_rows(rows: list[tuple[int, list[int]]], budget: int) -> tuple[int, dict[int, int]]:
    """Maximize the sum of one entry per row subject to total index <= budget."""
    if budget < 0:
        return NEG, {}
    acc = [0] * (budget + 1)
    picks: list[list[int]] = [[0] * (budget + 1)]
    for _v, row in rows:
        nxt = [NEG] * (budget + 1)
        pick = [0] * (budget + 1)
        for b in range(budget + 1):
            best, arg = NEG, 0
            for c in range(min(b, len(row) - 1) + 1):
                if acc[b - c] > NEG and row[c] > NEG and acc[b - c] + row[c] > best:
                    best, arg = acc[b - c] + row[c], c
            nxt[b] = best
            pick[b] = arg
        acc = nxt
        picks.append(pick)
    assignment: dict[int, int] = {}
    b = budget
    best_b = max(range(budget + 1), key=lambda i: acc[i])
    b = best_b
    total = acc[b]
    for i in range(len(rows) - 1, -1, -1):
        c = picks[i + 1][b]
        if c:
            assignment[rows[i][0]] = c
        b -= c
    return total, assignment


def knap_micro_oracle(ki: KnapInstance) -> int:
    """Exhaustive ground truth for tiny quotients.

    Enumerates the cover side of the swap; the non-cover side is exactly the
    forced neighborhood (voluntary extra entries can never raise the value).
    """
    g = ki.graph
    assert g.n <= 10 and ki.k <= 6
    best = NEG
    cover = sorted(ki.cover)
    for r in range(len(cover) + 1):
        for out in itertools.combinations(cover, r):
            out_set = frozenset(out)
            if not g.is_independent(out_set):
                continue
            forced = g.neighborhood(out_set) - ki.cover
            if any(ki.cost[v] == INF_COST for v in forced):
                continue
            fixed = sum(int(ki.cost[v]) for v in forced)
            if fixed + len(out_set) > ki.k:
                continue
            rows = [(v, ki.gamma[v]) for v in sorted(out_set)]
            free = [(v, ki.gamma[v]) for v in range(g.n)
                    if v not in ki.cover and v not in forced]
            # cover members leaving need c >= 1: shift their rows by one unit
            shifted = [(v, row[1:]) for v, row in rows]
            val, _ = _knapsack_rows(shifted + free, ki.k - fixed - len(out_set))
            if val > NEG:
                val -= fixed
                best = max(best, val)
    return best


def solve_knap_ls(ki: KnapInstance) -> KnapSolution:
    """Branch on the best connected quotient swaps per budget, recursing on
    residual instances where the committed vertex keeps collecting budget
    through shifted rewards."""
    ki.validate()
    n = ki.graph.n
    g = ki.graph
    base_gamma = ki.gamma
    kmax_row = len(base_gamma[0]) - 1 if n else 0
    memo: dict = {}

    def gamma_at(v: int, shift: int, c: int) -> int:
        idx = min(c + shift, kmax_row)
        return base_gamma[v][idx]

    def gamma_row(v: int, shift: int, budget: int) -> list[int]:
        return [gamma_at(v, shift, c) for c in range(budget + 1)]

    def rec(alive: frozenset[int], cover: frozenset[int], shifts: tuple[int, ...],
            k: int) -> tuple[int, frozenset[int], dict[int, int]]:
        if k < 0:
            return NEG, frozenset(), {}
        key = (alive, cover, shifts, k)
        if key in memo:
            return memo[key]
        def cost_of(v: int) -> float:
            # a vertex that already branched stays out of the cover for good
            return INF_COST if shifts[v] > 0 else ki.cost[v]

        free = sorted(alive - cover)
        base_val, base_assign = _knapsack_rows(
            [(v, gamma_row(v, shifts[v], k)) for v in free], k)
        best = (base_val, frozenset(), dict(base_assign))

        if k >= 1:
            sub_alive = sorted(alive)
            pseudo_edges = [(a, b) for a in sub_alive for b in g.adj[a]
                            if a < b and b in alive]
            remap = {v: i for i, v in enumerate(sub_alive)}
            pg = Graph(len(sub_alive), [(remap[a], remap[b]) for a, b in pseudo_edges])
            pcover = frozenset(remap[v] for v in cover & alive)
            pseudo = Instance(pg, pcover, (1,) * pg.n, min(k, pg.n), 0,
                              Mode.GLSWVC, relaxed=True)
            best_per_budget: dict[int, tuple[int, frozenset[int]]] = {}
            for w_local in enumerate_connected_swaps(pseudo, min(k, pg.n)):
                w = frozenset(sub_alive[i] for i in w_local)
                w_out = w - cover
                if any(cost_of(v) == INF_COST for v in w_out):
                    continue
                fixed = sum(int(cost_of(v)) for v in w_out)
                w_in = w & cover
                floor = fixed + len(w_in)
                if floor > k or floor == 0:
                    continue
                rows = [(v, gamma_row(v, shifts[v] + 1, k)) for v in sorted(w_in)]
                frees = [(v, gamma_row(v, shifts[v], k))
                         for v in free if v not in w]
                for i in range(floor, k + 1):
                    val, _ = _knapsack_rows(rows + frees, i - floor)
                    val -= fixed
                    cur = best_per_budget.get(i)
                    if cur is None or val > cur[0]:
                        best_per_budget[i] = (val, w)
            candidates: set[int] = set()
            for i, (_val, w) in best_per_budget.items():
                candidates.update(w)
                for v in w:
                    candidates.update(u for u in g.adj_sets[v] if u in alive)
            for w_vertex in sorted(candidates):
                if w_vertex in cover:
                    neigh = g.adj_sets[w_vertex] & alive
                    entering = sorted(neigh - cover)
                    if any(cost_of(u) == INF_COST for u in entering):
                        continue
                    pay = sum(int(cost_of(u)) for u in entering)
                    new_alive = alive - neigh
                    new_cover = cover - {w_vertex}
                    new_shifts = tuple(s + 1 if v == w_vertex else s
                                       for v, s in enumerate(shifts))
                    val, w_sub, c_sub = rec(new_alive, new_cover, new_shifts,
                                            k - 1 - pay)
                    if val > NEG:
                        val -= pay
                        if val > best[0]:
                            c_new = dict(c_sub)
                            c_new[w_vertex] = c_new.get(w_vertex, 0) + 1
                            best = (val, w_sub | {w_vertex} | frozenset(entering),
                                    c_new)
                else:
                    neigh = g.adj_sets[w_vertex] & alive
                    new_alive = alive - neigh
                    new_shifts = tuple(s + 1 if v == w_vertex else s
                                       for v, s in enumerate(shifts))
                    val, w_sub, c_sub = rec(new_alive, cover, new_shifts, k - 1)
                    if val > NEG and val > best[0]:
                        c_new = dict(c_sub)
                        c_new[w_vertex] = c_new.get(w_vertex, 0) + 1
                        best = (val, w_sub, c_new)
        memo[key] = best
        return best

    val, swap, internal = rec(frozenset(range(n)), ki.cover, (0,) * n, ki.k)
    return KnapSolution(value=val, swap=swap, internal=internal)


def knap_from_node(inst: Instance, md: ModularDecomposition, idx: int,
                   tables: list[list[int]], k: int) -> KnapInstance:
    node = md.nodes[idx]
    c = len(node.children)
    nbs = md.quotient_neighbors(idx)
    edges = [(i, j) for i in range(c) for j in nbs[i] if i < j]
    qg = Graph(c, edges)
    cover = frozenset(i for i, ch in enumerate(node.children)
                      if md.nodes[ch].vertices <= inst.cover)
    gamma = [list(tables[node.children[i]][:k + 1]) for i in range(c)]
    cost: list[float] = []
    for i, ch in enumerate(node.children):
        if i in cover:
            cost.append(INF_COST)
        else:
            cost.append(len(md.nodes[ch].vertices - inst.cover))
    return KnapInstance(graph=qg, cover=cover, k=k, gamma=gamma, cost=cost)


def solve_glsvc_delta_md(inst: Instance, md: ModularDecomposition) -> SolveReport:
    """Gap solver whose per-node work is the quotient knapsack branching."""
    if inst.mode.weighted:
        raise PreconditionError("solve_glsvc_delta_md requires a unit-weight mode")
    t0 = time.perf_counter()
    k = inst.k
    tables: list[Optional[list[int]]] = [None] * len(md.nodes)
    solutions: dict[tuple[int, int], KnapSolution] = {}
    for idx in md.postorder():
        node = md.nodes[idx]
        if node.kind == "leaf":
            gain = inst.weights[node.vertex] if node.vertex in inst.cover else 0
            tables[idx] = [0] + [gain] * k
            continue
        row = [0] * (k + 1)
        for kp in range(k + 1):
            ki = knap_from_node(inst, md, idx, tables, kp)
            sol = solve_knap_ls(ki)
            row[kp] = max(0, sol.value)
            solutions[(idx, kp)] = sol
        tables[idx] = row
    value = tables[md.root][k]
    rep = SolveReport(swap=None, algorithm="modular-degree",
                      elapsed=time.perf_counter() - t0,
                      details={"tables": tables, "best_improvement": value,
                               "delta_md": compute_delta_md(md),
                               "delta_md_prime": delta_md_prime_only(md)})
    if value >= inst.d:
        verts = _expand_knap_witness(inst, md, tables, solutions, md.root, k)
        sw = Swap.of(inst, verts)
        assert sw.valid and sw.improvement == value and len(sw) <= inst.k
        rep.swap = sw
    return rep


def _expand_knap_witness(inst, md, tables, solutions, idx, budget) -> set[int]:
    node = md.nodes[idx]
    if node.kind == "leaf":
        return {node.vertex} if tables[idx][budget] > 0 else set()
    if tables[idx][budget] == 0:
        return set()
    sol = solutions[(idx, budget)]
    out: set[int] = set()
    cover_children = frozenset(
        i for i, ch in enumerate(node.children)
        if md.nodes[ch].vertices <= inst.cover)
    for pos in sol.swap - cover_children:
        out |= md.nodes[node.children[pos]].vertices - inst.cover
    for pos, c in sol.internal.items():
        if c > 0:
            out |= _expand_knap_witness(inst, md, tables, solutions,
                                        node.children[pos], min(c, inst.k))
    return out
