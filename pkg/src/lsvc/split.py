"""Split decompositions and the three-table DP over them.

A split separates the graph into two sides whose cross edges form a complete
bipartite pattern between two border sets; recursing yields a tree of small
quotient graphs glued at shared marker vertices.  The DP tracks, per node,
the best swap value in three regimes: border cover vertices free to leave
(D+), all border non-cover vertices forced in and no border cover vertex out
(D-), and merely no border cover vertex out (Do).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Optional

from .graph import Graph, Instance, SolveReport, Swap
from .swaps import PreconditionError

NEG = -(10 ** 15)


# ---------------------------------------------------------------------------
# Split finding on token graphs
# ---------------------------------------------------------------------------

def find_split(adj: dict, exhaustive_limit: int = 14) -> Optional[tuple[set, set]]:
    """Find any split (V1, V2), both sides >= 2, of the token graph ``adj``.

    Seeded neighborhood closures first; for small graphs an exhaustive
    fallback certifies primality exactly.
    """
    tokens = sorted(adj, key=repr)
    n = len(tokens)
    if n < 4:
        return None
    index = {t: i for i, t in enumerate(tokens)}
    masks = [0] * n
    for t, nbs in adj.items():
        for u in nbs:
            masks[index[t]] |= 1 << index[u]
    full = (1 << n) - 1

    def closure(a: int, b: int) -> Optional[int]:
        side = (1 << a) | (1 << b)
        while True:
            rest = full & ~side
            if rest.bit_count() <= 1:
                return None
            distinct: set[int] = set()
            sub = side
            while sub:
                v = (sub & -sub).bit_length() - 1
                sub &= sub - 1
                out = masks[v] & rest
                if out:
                    distinct.add(out)
            if len(distinct) <= 1:
                return side
            union = 0
            inter = full
            for m in distinct:
                union |= m
                inter &= m
            side |= union & ~inter

    for a in range(n):
        for b in range(a + 1, n):
            side = closure(a, b)
            if side is not None:
                v1 = {tokens[i] for i in range(n) if side >> i & 1}
                return v1, set(tokens) - v1
    if n <= exhaustive_limit:
        for bits in range(1, full):
            if not 2 <= bits.bit_count() <= n - 2:
                continue
            rest = full & ~bits
            outs = set()
            sub = bits
            ok = True
            while sub:
                v = (sub & -sub).bit_length() - 1
                sub &= sub - 1
                out = masks[v] & rest
                if out:
                    outs.add(out)
                if len(outs) > 1:
                    ok = False
                    break
            if ok:
                v1 = {tokens[i] for i in range(n) if bits >> i & 1}
                return v1, set(tokens) - v1
    return None


def is_prime_exhaustive(g: Graph) -> bool:
    """Ground-truth primality for tiny graphs: no bipartition is a split."""
    assert g.n <= 12
    adj = {v: set(g.adj_sets[v]) for v in range(g.n)}
    tokens = sorted(adj)
    n = len(tokens)
    for bits in range(1, 1 << n):
        size = bin(bits).count("1")
        if not 2 <= size <= n - 2:
            continue
        side = {tokens[i] for i in range(n) if bits >> i & 1}
        outs = {frozenset(adj[v] - side) for v in side if adj[v] - side}
        if len(outs) <= 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Decomposition construction
# ---------------------------------------------------------------------------

@dataclass
class SplitNode:
    slots: int
    edges: frozenset[tuple[int, int]]
    child_of_slot: dict[int, int]
    self_slot: int
    vertices: frozenset[int]
    border: frozenset[int]
    real_vertex: Optional[int] = None
    real_slot: Optional[int] = None

    def neighbors_of(self, slot: int) -> frozenset[int]:
        out = set()
        for a, b in self.edges:
            if a == slot:
                out.add(b)
            elif b == slot:
                out.add(a)
        return frozenset(out)

    @property
    def is_leaf(self) -> bool:
        return self.real_vertex is not None


@dataclass
class NiceSplitDecomposition:
    nodes: list[SplitNode]
    root: int
    width: int          # raw width: largest quotient before pendant/aux markers
    n_vertices: int

    def postorder(self) -> list[int]:
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            idx, expanded = stack.pop()
            if expanded:
                order.append(idx)
            else:
                stack.append((idx, True))
                for c in self.nodes[idx].child_of_slot.values():
                    stack.append((c, False))
        return order


class _RawNode:
    __slots__ = ("adj",)

    def __init__(self, adj: dict):
        self.adj = adj  # token -> set of tokens


def _decompose_tokens(adj: dict, counter: list[int]) -> list[_RawNode]:
    """Split the token graph until no further split exists."""
    split = find_split(adj)
    if split is None:
        return [_RawNode(adj)]
    v1, v2 = split
    border1 = {t for t in v1 if adj[t] & v2}
    border2 = {t for t in v2 if adj[t] & v1}
    counter[0] += 1
    marker = ("m", counter[0])
    adj1 = {t: (adj[t] & v1) | ({marker} if t in border1 else set()) for t in v1}
    adj1[marker] = set(border1)
    adj2 = {t: (adj[t] & v2) | ({marker} if t in border2 else set()) for t in v2}
    adj2[marker] = set(border2)
    return _decompose_tokens(adj1, counter) + _decompose_tokens(adj2, counter)


def compute_split_decomposition(g: Graph) -> NiceSplitDecomposition:
    """Decompose, then make nice: every real vertex moves to a pendant leaf,
    the tree is rooted, and the root quotient gains an isolated marker."""
    if g.n < 1:
        raise PreconditionError("split decomposition needs at least one vertex")
    counter = [0]
    adj = {v: set(g.adj_sets[v]) for v in range(g.n)}
    raw = _decompose_tokens(adj, counter)
    width = max(len(r.adj) for r in raw)

    # pendant leaves for real vertices
    leaves: list[tuple] = []  # (marker, vertex)
    for node in raw:
        for token in sorted([t for t in node.adj if isinstance(t, int)]):
            counter[0] += 1
            marker = ("m", counter[0])
            nbs = node.adj.pop(token)
            for u in nbs:
                node.adj[u].discard(token)
                node.adj[u].add(marker)
            node.adj[marker] = nbs
            leaves.append((marker, token))

    # tree structure: nodes sharing a marker are adjacent
    entries: list[dict] = [n.adj for n in raw]
    leaf_base = len(entries)
    for marker, vertex in leaves:
        entries.append({marker: set(), "real": vertex})
    owner: dict = {}
    tree_adj: dict[int, set[int]] = {i: set() for i in range(len(entries))}
    for i, e in enumerate(entries):
        for t in e:
            if t == "real" or isinstance(t, int):
                continue
            if t in owner:
                tree_adj[i].add(owner[t])
                tree_adj[owner[t]].add(i)
            else:
                owner[t] = i

    root_raw = 0  # raw nodes precede leaves; always internal after pendanting
    parent: dict[int, Optional[int]] = {root_raw: None}
    order = [root_raw]
    queue = [root_raw]
    while queue:
        x = queue.pop()
        for y in tree_adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
                queue.append(y)
    assert len(parent) == len(entries)

    def shared_marker(a: int, b: int):
        common = [t for t in entries[a] if t != "real" and t in entries[b]]
        assert len(common) == 1
        return common[0]

    nodes: list[Optional[SplitNode]] = [None] * len(entries)
    for idx in reversed(order):
        e = entries[idx]
        if "real" in e:
            v = e["real"]
            marker = next(t for t in e if t != "real")
            nodes[idx] = SplitNode(
                slots=2, edges=frozenset({(0, 1)}), child_of_slot={},
                self_slot=1, vertices=frozenset({v}), border=frozenset({v}),
                real_vertex=v, real_slot=0)
            continue
        tokens = sorted((t for t in e), key=repr)
        if parent[idx] is None:
            self_token = ("aux",)
            tokens.append(self_token)
        else:
            self_token = shared_marker(idx, parent[idx])
        slot_of = {t: i for i, t in enumerate(tokens)}
        edges = set()
        for t, nbs in e.items():
            for u in nbs:
                a, b = slot_of[t], slot_of[u]
                if a < b:
                    edges.add((a, b))
        child_of_slot = {}
        for y in tree_adj[idx]:
            if y == parent[idx]:
                continue
            child_of_slot[slot_of[shared_marker(idx, y)]] = y
        vertices = frozenset().union(
            *(nodes[c].vertices for c in child_of_slot.values()))
        node = SplitNode(slots=len(tokens), edges=frozenset(edges),
                         child_of_slot=child_of_slot, self_slot=slot_of[self_token],
                         vertices=vertices, border=frozenset())
        border = frozenset()
        for s in node.neighbors_of(node.self_slot):
            border |= nodes[child_of_slot[s]].border
        node.border = border
        nodes[idx] = node

    sd = NiceSplitDecomposition(nodes=nodes, root=root_raw, width=width,
                                n_vertices=g.n)
    assert sd.nodes[sd.root].vertices == frozenset(range(g.n))
    assert sd.nodes[sd.root].border == frozenset()
    return sd


def recompose(sd: NiceSplitDecomposition, subtree: Optional[int] = None,
              keep_self_marker: bool = False):
    """Compose the quotients back; returns adjacency over real vertices (and
    the subtree's own marker when kept)."""
    root = sd.root if subtree is None else subtree

    def token_graph(idx: int) -> dict:
        node = sd.nodes[idx]
        adj: dict = {}

        def name(slot):
            if node.is_leaf and slot == node.real_slot:
                return node.real_vertex
            if slot == node.self_slot:
                return ("self", idx)
            return ("link", idx, slot)

        for s in range(node.slots):
            adj.setdefault(name(s), set())
        for a, b in node.edges:
            adj[name(a)].add(name(b))
            adj[name(b)].add(name(a))
        return adj

    def compose(idx: int) -> dict:
        node = sd.nodes[idx]
        acc = token_graph(idx)
        for slot, child in node.child_of_slot.items():
            sub = compose(child)
            m_here = ("link", idx, slot)
            m_there = ("self", child)
            nb_here = acc.pop(m_here)
            for u in nb_here:
                acc[u].discard(m_here)
            nb_there = sub.pop(m_there)
            for u in nb_there:
                sub[u].discard(m_there)
            for t, nbs in sub.items():
                acc.setdefault(t, set()).update(nbs)
            for p in nb_here:
                for q in nb_there:
                    acc[p].add(q)
                    acc[q].add(p)
        return acc

    out = compose(root)
    marker = ("self", root)
    if not keep_self_marker and marker in out:
        for u in out.pop(marker):
            out[u].discard(marker)
    return out


def dump_split_decomposition(sd: NiceSplitDecomposition) -> str:
    lines = []
    for i, node in enumerate(sd.nodes):
        kind = "leaf" if node.is_leaf else "internal"
        kids = ",".join(str(node.child_of_slot[s])
                        for s in sorted(node.child_of_slot))
        pairs = ",".join(f"{a}-{b}" for a, b in sorted(node.edges))
        lines.append(f"node {i} kind={kind} children={kids} "
                     f"marker={node.self_slot} quotient-edges={pairs}")
    return "\n".join(lines) + "\n"


def recomposed_graph(sd: NiceSplitDecomposition) -> Graph:
    adj = recompose(sd)
    reals = sorted(t for t in adj if isinstance(t, int))
    edges = [(a, b) for a in reals for b in adj[a] if isinstance(b, int) and a < b]
    return Graph(sd.n_vertices, edges)


# ---------------------------------------------------------------------------
# The DP
# ---------------------------------------------------------------------------

PLUS, MINUS, ZERO = 0, 1, 2


class _SplitDP:
    def __init__(self, inst: Instance, sd: NiceSplitDecomposition, cap: int):
        self.inst = inst
        self.sd = sd
        self.cap = cap
        self.tables: list[Optional[list[list[int]]]] = [None] * len(sd.nodes)
        self.cells = 0

    def run(self) -> list[int]:
        inst, sd = self.inst, self.sd
        if sd.n_vertices != inst.graph.n:
            raise PreconditionError("decomposition does not match the instance")
        k = inst.k
        for idx in sd.postorder():
            node = sd.nodes[idx]
            if node.is_leaf:
                v = node.real_vertex
                w = inst.weights[v]
                if v in inst.cover:
                    plus = [0] + [w] * k
                    minus = [0] * (k + 1)
                    zero = [0] * (k + 1)
                else:
                    plus = [0] * (k + 1)
                    minus = [NEG] + [-w] * k
                    zero = [0] * (k + 1)
                self.tables[idx] = [plus, minus, zero]
            else:
                self.tables[idx] = self._internal(idx)
            self.cells += 3 * (k + 1)
        root = self.tables[sd.root]
        return root[PLUS]

    def _choices(self, node: SplitNode, with_self: bool):
        """Independent slot sets; with_self further excludes N[self]."""
        child_slots = sorted(node.child_of_slot)
        nbs = {s: node.neighbors_of(s) for s in range(node.slots)}
        if with_self:
            pool = [s for s in child_slots
                    if s != node.self_slot and s not in nbs[node.self_slot]]
        else:
            pool = child_slots
        max_size = min(self.cap, len(pool))
        for r in range(0, max_size + 1):
            for combo in itertools.combinations(pool, r):
                if all(b not in nbs[a]
                       for a, b in itertools.combinations(combo, 2)):
                    yield frozenset(combo), nbs

    def _combined(self, node: SplitNode, chosen: frozenset[int],
                  nbs: dict[int, frozenset[int]]) -> list[int]:
        """Budget-split merge of child tables under the slot classification."""
        k = self.inst.k
        forced = frozenset().union(*(nbs[s] for s in chosen)) if chosen else frozenset()
        acc = [0] * (k + 1)
        for slot in sorted(node.child_of_slot):
            child = node.child_of_slot[slot]
            if slot in chosen:
                row = self.tables[child][PLUS]
            elif slot in forced:
                row = self.tables[child][MINUS]
            else:
                row = self.tables[child][ZERO]
            nxt = [NEG] * (k + 1)
            for b in range(k + 1):
                best = NEG
                for b2 in range(b + 1):
                    if acc[b - b2] > NEG and row[b2] > NEG:
                        cand = acc[b - b2] + row[b2]
                        if cand > best:
                            best = cand
                nxt[b] = best
            acc = nxt
        return acc

    def _internal(self, idx: int) -> list[list[int]]:
        node = self.sd.nodes[idx]
        k = self.inst.k
        out = [[NEG] * (k + 1) for _ in range(3)]
        for chosen, nbs in self._choices(node, with_self=False):
            arr = self._combined(node, chosen, nbs)
            for kp in range(k + 1):
                if arr[kp] > out[PLUS][kp]:
                    out[PLUS][kp] = arr[kp]
        for chosen, nbs in self._choices(node, with_self=True):
            arr = self._combined(node, chosen | {node.self_slot}, nbs)
            for kp in range(k + 1):
                if arr[kp] > out[MINUS][kp]:
                    out[MINUS][kp] = arr[kp]
            arr = self._combined(node, chosen, nbs)
            for kp in range(k + 1):
                if arr[kp] > out[ZERO][kp]:
                    out[ZERO][kp] = arr[kp]
        return out

    def witness(self, idx: int, table: int, budget: int) -> set[int]:
        node = self.sd.nodes[idx]
        target = self.tables[idx][table][budget]
        assert target > NEG
        if node.is_leaf:
            v = node.real_vertex
            if table == MINUS and v not in self.inst.cover:
                return {v}
            if target > 0:
                return {v}
            if target < 0:
                return {v}
            return set()
        choice_iter: list[tuple[frozenset[int], dict]] = []
        if table == PLUS:
            choice_iter = [(c, nbs) for c, nbs in self._choices(node, False)]
            extra = frozenset()
        elif table == MINUS:
            choice_iter = [(c, nbs) for c, nbs in self._choices(node, True)]
            extra = frozenset({node.self_slot})
        else:
            choice_iter = [(c, nbs) for c, nbs in self._choices(node, True)]
            extra = frozenset()
        for chosen, nbs in choice_iter:
            eff = chosen | extra
            arr = self._combined(node, eff, nbs)
            if arr[budget] != target:
                continue
            forced = frozenset().union(*(nbs[s] for s in eff)) if eff else frozenset()
            k = self.inst.k
            slots = sorted(node.child_of_slot)
            rows = []
            for slot in slots:
                child = node.child_of_slot[slot]
                if slot in eff:
                    rows.append((slot, PLUS, self.tables[child][PLUS]))
                elif slot in forced:
                    rows.append((slot, MINUS, self.tables[child][MINUS]))
                else:
                    rows.append((slot, ZERO, self.tables[child][ZERO]))
            prefix = [[0] * (k + 1)]
            for _slot, _cls, row in rows:
                acc = prefix[-1]
                nxt = [NEG] * (k + 1)
                for b in range(k + 1):
                    best = NEG
                    for b2 in range(b + 1):
                        if acc[b - b2] > NEG and row[b2] > NEG:
                            cand = acc[b - b2] + row[b2]
                            if cand > best:
                                best = cand
                    nxt[b] = best
                prefix.append(nxt)
            out: set[int] = set()
            b = budget
            for i in range(len(rows) - 1, -1, -1):
                slot, cls, row = rows[i]
                for b2 in range(b + 1):
                    if (prefix[i][b - b2] > NEG and row[b2] > NEG and
                            prefix[i][b - b2] + row[b2] == prefix[i + 1][b]):
                        out |= self.witness(node.child_of_slot[slot], cls, b2)
                        b -= b2
                        break
            return out
        raise AssertionError("split traceback failed to match the table value")


def split_tables(inst: Instance, sd: NiceSplitDecomposition,
                 cap: Optional[int] = None):
    dp = _SplitDP(inst, sd, cap if cap is not None else inst.k)
    dp.run()
    return dp.tables, dp.cells


def solve_glswvc_sw(inst: Instance, sd: NiceSplitDecomposition) -> SolveReport:
    t0 = time.perf_counter()
    dp = _SplitDP(inst, sd, cap=inst.k)
    plus = dp.run()
    value = plus[inst.k]
    verts = dp.witness(sd.root, PLUS, inst.k)
    sw = Swap.of(inst, verts)
    assert sw.valid and sw.improvement == value and len(sw) <= inst.k
    found = sw if value >= inst.d else None
    return SolveReport(swap=found, algorithm="split", dp_cells=dp.cells,
                       elapsed=time.perf_counter() - t0,
                       details={"best": sw, "best_improvement": value,
                                "width": sd.width})


def solve_glsvc_sw(inst: Instance, sd: NiceSplitDecomposition) -> SolveReport:
    if inst.mode.weighted:
        raise PreconditionError("solve_glsvc_sw requires a unit-weight mode")
    t0 = time.perf_counter()
    cap = (inst.k + inst.d) // 2
    dp = _SplitDP(inst, sd, cap=cap)
    plus = dp.run()
    value = plus[inst.k]
    rep = SolveReport(swap=None, algorithm="split-gap", dp_cells=dp.cells,
                      elapsed=time.perf_counter() - t0,
                      details={"capped_improvement": value, "width": sd.width})
    if value >= inst.d:
        sw = Swap.of(inst, dp.witness(sd.root, PLUS, inst.k))
        assert sw.valid and sw.improvement == value and len(sw) <= inst.k
        rep.swap = sw
    return rep
