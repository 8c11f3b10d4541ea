"""Tree-decomposition machinery and the bag dynamic program.

The DP computes, per decomposition node, the best improvement of a swap in
the subtree given how the swap meets the current bag: the swapped cover part
``S_x`` and the swapped non-cover part ``C_x`` outside the extension of
``S_x``.  The unweighted gap solver additionally caps ``|S_x u C_x|``, which
is lossless for minimal good swaps.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .graph import Graph, Instance, SolveReport, Swap
from .swaps import PreconditionError

NEG = -(10 ** 15)


class TdError(ValueError):
    """Malformed or invalid tree decomposition."""


@dataclass
class TdNode:
    kind: str                      # leaf | forget | introduce | join
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    special: Optional[int] = None  # vertex forgotten/introduced at this node


@dataclass
class NiceTreeDecomposition:
    nodes: list[TdNode]
    root: int
    width: int
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
                for c in self.nodes[idx].children:
                    stack.append((c, False))
        return order

def validate_tree_decomposition(g: Graph, bags: Sequence[frozenset[int]],
                                tree_edges: Sequence[tuple[int, int]]) -> int:
    """Check the three decomposition axioms; returns the width.

    Raises TdError naming a concrete witness for the first violated axiom.
    """
    nb = len(bags)
    if nb == 0:
        raise TdError("decomposition has no bags")
    adj = [[] for _ in range(nb)]
    for a, b in tree_edges:
        if not (0 <= a < nb and 0 <= b < nb):
            raise TdError(f"tree edge ({a},{b}) references unknown bag")
        adj[a].append(b)
        adj[b].append(a)
    if len(tree_edges) != nb - 1:
        raise TdError(f"tree must have {nb - 1} edges, found {len(tree_edges)}")
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != nb:
        raise TdError("bag tree is disconnected")

    containing: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, bag in enumerate(bags):
        for v in bag:
            if not (0 <= v < g.n):
                raise TdError(f"bag {i} contains unknown vertex {v}")
            containing[v].append(i)
    for v in range(g.n):
        if not containing[v]:
            raise TdError(f"vertex {g.labels[v]} appears in no bag")
    for u in range(g.n):
        for v in g.adj[u]:
            if u < v and not any(v in bags[i] for i in containing[u]):
                raise TdError(
                    f"edge ({g.labels[u]},{g.labels[v]}) is covered by no bag")
    for v in range(g.n):
        nodes = set(containing[v])
        start = next(iter(nodes))
        comp = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in nodes and y not in comp:
                    comp.add(y)
                    stack.append(y)
        if comp != nodes:
            raise TdError(f"bags containing vertex {g.labels[v]} are not connected")
    return max(len(b) for b in bags) - 1


class _NiceBuilder:
    def __init__(self):
        self.nodes: list[TdNode] = []

    def add(self, kind, bag, children=(), special=None) -> int:
        self.nodes.append(TdNode(kind, frozenset(bag), tuple(children), special))
        return len(self.nodes) - 1

    def leaf_chain_to(self, bag: frozenset[int]) -> int:
        idx = self.add("leaf", frozenset())
        cur: set[int] = set()
        for v in sorted(bag):
            cur.add(v)
            idx = self.add("introduce", set(cur), (idx,), v)
        return idx

    def transform(self, idx: int, src: frozenset[int], dst: frozenset[int]) -> int:
        """Chain of forget/introduce nodes taking bag src to bag dst."""
        cur = set(src)
        for v in sorted(src - dst):
            cur.discard(v)
            idx = self.add("forget", set(cur), (idx,), v)
        for v in sorted(dst - src):
            cur.add(v)
            idx = self.add("introduce", set(cur), (idx,), v)
        return idx


def nicify(g: Graph, bags: Sequence[frozenset[int]],
           tree_edges: Sequence[tuple[int, int]]) -> NiceTreeDecomposition:
    """Root the decomposition, pad with forget/introduce chains and joins so
    every node is one of the four kinds and root/leaf bags are empty."""
    width = validate_tree_decomposition(g, bags, tree_edges)
    nb = len(bags)
    adj = [[] for _ in range(nb)]
    for a, b in tree_edges:
        adj[a].append(b)
        adj[b].append(a)

    children: list[list[int]] = [[] for _ in range(nb)]
    order = []
    parent = [-1] * nb
    seen = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        order.append(x)
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                parent[y] = x
                children[x].append(y)
                queue.append(y)

    b = _NiceBuilder()
    built: dict[int, int] = {}
    for x in reversed(order):
        bag = frozenset(bags[x])
        subtrees = []
        for c in children[x]:
            sub = b.transform(built[c], frozenset(bags[c]), bag)
            subtrees.append(sub)
        if not subtrees:
            built[x] = b.leaf_chain_to(bag)
        else:
            top = subtrees[0]
            for other in subtrees[1:]:
                top = b.add("join", bag, (top, other))
            built[x] = top
    root = b.transform(built[0], frozenset(bags[0]), frozenset())
    assert not b.nodes[root].bag
    td = NiceTreeDecomposition(nodes=b.nodes, root=root, width=width, n_vertices=g.n)
    assert len(b.nodes) <= 4 * (width + 2) * (nb + g.n + 2)
    for idx in td.postorder():
        node = td.nodes[idx]
        if node.kind == "leaf":
            assert not node.bag
        elif node.kind == "forget":
            (c,) = node.children
            assert td.nodes[c].bag == node.bag | {node.special}
        elif node.kind == "introduce":
            (c,) = node.children
            assert td.nodes[c].bag == node.bag - {node.special}
        else:
            y, z = node.children
            assert td.nodes[y].bag == node.bag == td.nodes[z].bag
    return td


def parse_td_file(text: str, n_vertices: int) -> tuple[list[frozenset[int]], list[tuple[int, int]]]:
    """Parse a PACE-style .td file; vertex and bag ids are 1-based."""
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    declared = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if declared is not None:
                raise TdError(f"line {lineno}: duplicate solution line")
            if len(parts) != 5 or parts[1] != "td":
                raise TdError(f"line {lineno}: malformed 's td' header")
            declared = (int(parts[2]), int(parts[3]), int(parts[4]))
            if declared[2] != n_vertices:
                raise TdError(
                    f"line {lineno}: decomposition is for {declared[2]} vertices, "
                    f"graph has {n_vertices}")
        elif parts[0] == "b":
            if declared is None:
                raise TdError(f"line {lineno}: bag before 's td' header")
            try:
                bag_id = int(parts[1])
                verts = [int(p) for p in parts[2:]]
            except ValueError as exc:
                raise TdError(f"line {lineno}: {exc}") from exc
            if bag_id in bags:
                raise TdError(f"line {lineno}: duplicate bag {bag_id}")
            for v in verts:
                if not (1 <= v <= n_vertices):
                    raise TdError(f"line {lineno}: vertex {v} out of range")
            bags[bag_id] = frozenset(v - 1 for v in verts)
        else:
            if declared is None:
                raise TdError(f"line {lineno}: edge before 's td' header")
            try:
                a, b = int(parts[0]), int(parts[1])
            except (ValueError, IndexError) as exc:
                raise TdError(f"line {lineno}: malformed tree edge") from exc
            edges.append((a, b))
    if declared is None:
        raise TdError("missing 's td' header")
    nb = declared[0]
    for i in range(1, nb + 1):
        bags.setdefault(i, frozenset())
    bag_list = [bags[i] for i in range(1, nb + 1)]
    edge_list = []
    for a, b in edges:
        if not (1 <= a <= nb and 1 <= b <= nb):
            raise TdError(f"tree edge ({a},{b}) references unknown bag")
        edge_list.append((a - 1, b - 1))
    return bag_list, edge_list


def load_tree_decomposition(g: Graph, td_path_or_text) -> NiceTreeDecomposition:
    if hasattr(td_path_or_text, "read"):
        text = td_path_or_text.read()
    else:
        try:
            with open(td_path_or_text, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError:
            text = str(td_path_or_text)
    bags, edges = parse_td_file(text, g.n)
    return nicify(g, bags, edges)


def min_fill_elimination(g: Graph) -> tuple[list[frozenset[int]], list[tuple[int, int]]]:
    """Min-fill elimination order; returns raw bags and tree edges."""
    if g.n == 0:
        return [frozenset()], []
    adj = {v: set(g.adj_sets[v]) for v in range(g.n)}

    def fill_count(v: int) -> int:
        nb = list(adj[v])
        return sum(1 for i in range(len(nb)) for j in range(i + 1, len(nb))
                   if nb[j] not in adj[nb[i]])

    heap = [(fill_count(v), v) for v in range(g.n)]
    heapq.heapify(heap)
    eliminated: dict[int, int] = {}
    bags: list[frozenset[int]] = []
    alive = set(range(g.n))
    while alive:
        while True:
            fc, v = heapq.heappop(heap)
            if v not in alive:
                continue
            if fc != fill_count(v):
                heapq.heappush(heap, (fill_count(v), v))
                continue
            break
        pos = len(bags)
        bag = frozenset({v} | adj[v])
        bags.append(bag)
        eliminated[v] = pos
        nb = list(adj[v])
        for i in range(len(nb)):
            for j in range(i + 1, len(nb)):
                a, c = nb[i], nb[j]
                if c not in adj[a]:
                    adj[a].add(c)
                    adj[c].add(a)
        for u in nb:
            adj[u].discard(v)
        del adj[v]
        alive.discard(v)
        # fills may drop for vertices near the eliminated one; refresh them
        affected = set(nb)
        for u in nb:
            affected.update(adj[u])
        for u in affected:
            if u in alive:
                heapq.heappush(heap, (fill_count(u), u))

    edges = []
    for v, pos in eliminated.items():
        later = [u for u in bags[pos] if u != v and eliminated[u] > pos]
        if later:
            target = min(later, key=lambda u: eliminated[u])
            edges.append((pos, eliminated[target]))
        elif pos + 1 < len(bags):
            edges.append((pos, pos + 1))
    return bags, edges


def heuristic_tree_decomposition(g: Graph) -> NiceTreeDecomposition:
    """Min-fill decomposition: valid on any graph, width-optimal on chordal."""
    bags, edges = min_fill_elimination(g)
    return nicify(g, bags, edges)


def bounded_degree_decomposition(g: Graph, include_in_all: Iterable[int] = ()) -> NiceTreeDecomposition:
    """Direct decomposition for graphs whose non-hub part has max degree 2.

    Paths give bags of two vertices, cycles bags of three; hub vertices are
    added to every bag.  Width is at most 2 + number of hubs.
    """
    hubs = frozenset(g.check_vertex_set(include_in_all))
    rest = [v for v in range(g.n) if v not in hubs]
    for v in rest:
        if len(g.adj_sets[v] - hubs) > 2:
            raise PreconditionError("non-hub part has a vertex of degree > 2")
    bags: list[frozenset[int]] = []
    restricted = {v: sorted(g.adj_sets[v] - hubs) for v in rest}
    seen: set[int] = set()
    for comp in Graph(g.n, [(u, v) for u in rest for v in restricted[u] if u < v]).connected_components(rest):
        comp_set = set(comp)
        seen.update(comp)
        degs = {v: len(restricted[v]) for v in comp}
        if len(comp) == 1:
            bags.append(frozenset(comp))
            continue
        start = min((v for v in comp if degs[v] <= 1), default=comp[0])
        walk = [start]
        prev = None
        cur = start
        while True:
            nxt = [w for w in restricted[cur] if w != prev and w in comp_set]
            if not nxt or nxt[0] == start:
                break
            prev, cur = cur, nxt[0]
            walk.append(cur)
            if len(walk) == len(comp):
                break
        is_cycle = all(dv == 2 for dv in degs.values())
        if is_cycle:
            anchor = walk[0]
            for i in range(1, len(walk) - 1):
                bags.append(frozenset({anchor, walk[i], walk[i + 1]}))
        else:
            for i in range(len(walk) - 1):
                bags.append(frozenset({walk[i], walk[i + 1]}))
    if not bags:
        bags.append(frozenset())
    if hubs:
        bags = [bag | hubs for bag in bags]
    edges = [(i, i + 1) for i in range(len(bags) - 1)]
    return nicify(g, bags, edges)


# ---------------------------------------------------------------------------
# The dynamic program
# ---------------------------------------------------------------------------

@dataclass
class _TwDP:
    inst: Instance
    td: NiceTreeDecomposition
    cap: int
    tables: list[Optional[dict]] = field(default=None)
    cells: int = 0

    def run(self) -> int:
        inst, td = self.inst, self.td
        if td.n_vertices != inst.graph.n:
            raise TdError("decomposition does not match the instance graph")
        g = inst.graph
        cover = inst.cover
        wt = inst.weights
        k = inst.k
        self.tables = [None] * len(td.nodes)

        for idx in td.postorder():
            node = td.nodes[idx]
            bag = node.bag
            if node.kind == "leaf":
                self.tables[idx] = {(frozenset(), frozenset()): [0] * (k + 1)}
                self.cells += k + 1
                continue
            domain = self._domain(bag)
            table: dict = {}
            if node.kind == "forget":
                (cidx,) = node.children
                child = self.tables[cidx]
                v = node.special
                v_in_cover = v in cover
                nv = g.adj_sets[v]
                for (sx, cx), meta in domain.items():
                    wx_size, wx_delta = meta
                    if v_in_cover:
                        alt = (sx | {v}, cx - nv)
                    else:
                        alt = (sx, cx | {v})
                    row_a = child.get((sx, cx))
                    row_b = child.get(alt)
                    out = []
                    for kp in range(k + 1):
                        if wx_size > kp:
                            out.append(NEG)
                            continue
                        best = NEG
                        if row_a is not None and row_a[kp] > best:
                            best = row_a[kp]
                        if row_b is not None and row_b[kp] > best:
                            best = row_b[kp]
                        out.append(best)
                    table[(sx, cx)] = out
            elif node.kind == "introduce":
                (cidx,) = node.children
                child = self.tables[cidx]
                v = node.special
                v_in_cover = v in cover
                for (sx, cx), meta in domain.items():
                    wx_size, wx_delta = meta
                    if v in sx:
                        rest = sx - {v}
                        c_star = frozenset(
                            u for u in (g.adj_sets[v] & bag) - cover
                            if not (g.adj_sets[u] & rest))
                        key = (rest, cx | c_star)
                        row = child.get(key)
                        out = []
                        for kp in range(k + 1):
                            if wx_size > kp or kp == 0:
                                out.append(NEG)
                            else:
                                base = row[kp - 1] if row is not None else NEG
                                out.append(base + wt[v] if base > NEG else NEG)
                        table[(sx, cx)] = out
                    elif not v_in_cover and (v in cx or any(
                            v in g.adj_sets[u] for u in sx)):
                        key = (sx, cx - {v})
                        row = child.get(key)
                        out = []
                        for kp in range(k + 1):
                            if wx_size > kp or kp == 0:
                                out.append(NEG)
                            else:
                                base = row[kp - 1] if row is not None else NEG
                                out.append(base - wt[v] if base > NEG else NEG)
                        table[(sx, cx)] = out
                    else:
                        row = child.get((sx, cx))
                        out = []
                        for kp in range(k + 1):
                            if wx_size > kp:
                                out.append(NEG)
                            else:
                                out.append(row[kp] if row is not None else NEG)
                        table[(sx, cx)] = out
            else:  # join
                yidx, zidx = node.children
                left = self.tables[yidx]
                right = self.tables[zidx]
                for (sx, cx), meta in domain.items():
                    wx_size, wx_delta = meta
                    row_l = left.get((sx, cx))
                    row_r = right.get((sx, cx))
                    out = []
                    for kp in range(k + 1):
                        if wx_size > kp or row_l is None or row_r is None:
                            out.append(NEG)
                            continue
                        best = NEG
                        for k2 in range(kp - wx_size + 1):
                            a = row_l[k2 + wx_size]
                            bb = row_r[kp - k2]
                            if a > NEG and bb > NEG and a + bb - wx_delta > best:
                                best = a + bb - wx_delta
                        out.append(best)
                    table[(sx, cx)] = out
            self.cells += (k + 1) * len(table)
            self.tables[idx] = table
        root_row = self.tables[td.root][(frozenset(), frozenset())]
        return root_row[k]

    def _domain(self, bag: frozenset[int]) -> dict:
        """(S_x, C_x) pairs with their bag-local swap size and improvement."""
        inst = self.inst
        g = inst.graph
        cover = inst.cover
        bag_cover = sorted(bag & cover)
        bag_rest = sorted(bag - cover)
        cap = min(self.cap, inst.k)
        out: dict = {}
        for r in range(min(cap, len(bag_cover)) + 1):
            for sx_tuple in itertools.combinations(bag_cover, r):
                sx = frozenset(sx_tuple)
                if not g.is_independent(sx):
                    continue
                nsx = frozenset()
                for v in sx:
                    nsx |= g.adj_sets[v]
                ext_local = (nsx & bag) - cover
                allowed = [u for u in bag_rest if u not in nsx]
                for r2 in range(min(cap - r, len(allowed)) + 1):
                    for cx_tuple in itertools.combinations(allowed, r2):
                        cx = frozenset(cx_tuple)
                        wx = sx | cx | ext_local
                        delta = (sum(inst.weights[v] for v in sx)
                                 - sum(inst.weights[v] for v in cx | ext_local))
                        out[(sx, cx)] = (len(wx), delta)
        return out

    # -- traceback ---------------------------------------------------------

    def witness(self) -> frozenset[int]:
        """Swap-out cover vertices of one optimal swap, via argmax replay."""
        inst, td = self.inst, self.td
        g = inst.graph
        cover = inst.cover
        wt = inst.weights
        chosen: set[int] = set()
        stack = [(td.root, frozenset(), frozenset(), inst.k)]
        while stack:
            idx, sx, cx, kp = stack.pop()
            node = td.nodes[idx]
            value = self.tables[idx][(sx, cx)][kp]
            if node.kind == "leaf":
                continue
            if node.kind == "forget":
                (cidx,) = node.children
                v = node.special
                child = self.tables[cidx]
                if v in cover:
                    alt = (sx | {v}, cx - g.adj_sets[v])
                else:
                    alt = (sx, cx | {v})
                row_a = child.get((sx, cx))
                if row_a is not None and row_a[kp] == value:
                    stack.append((cidx, sx, cx, kp))
                else:
                    stack.append((cidx, alt[0], alt[1], kp))
            elif node.kind == "introduce":
                (cidx,) = node.children
                v = node.special
                if v in sx:
                    chosen.add(v)
                    rest = sx - {v}
                    c_star = frozenset(
                        u for u in (g.adj_sets[v] & node.bag) - cover
                        if not (g.adj_sets[u] & rest))
                    stack.append((cidx, rest, cx | c_star, kp - 1))
                elif v not in cover and (v in cx or any(
                        v in g.adj_sets[u] for u in sx)):
                    stack.append((cidx, sx, cx - {v}, kp - 1))
                else:
                    stack.append((cidx, sx, cx, kp))
            else:
                yidx, zidx = node.children
                wx_size, wx_delta = self._meta(node.bag, sx, cx)
                row_l = self.tables[yidx][(sx, cx)]
                row_r = self.tables[zidx][(sx, cx)]
                for k2 in range(kp - wx_size + 1):
                    a = row_l[k2 + wx_size]
                    bb = row_r[kp - k2]
                    if a > NEG and bb > NEG and a + bb - wx_delta == value:
                        stack.append((yidx, sx, cx, k2 + wx_size))
                        stack.append((zidx, sx, cx, kp - k2))
                        break
        return frozenset(chosen)

    def _meta(self, bag, sx, cx):
        inst = self.inst
        g = inst.graph
        nsx = frozenset()
        for v in sx:
            nsx |= g.adj_sets[v]
        ext_local = (nsx & bag) - inst.cover
        wx = sx | cx | ext_local
        delta = (sum(inst.weights[v] for v in sx)
                 - sum(inst.weights[v] for v in cx | ext_local))
        return len(wx), delta


def _extract_swap(inst: Instance, swapped_cover: frozenset[int]) -> Swap:
    ext = swapped_cover | (inst.graph.neighborhood(swapped_cover) - inst.cover)
    return Swap.of(inst, ext)


def solve_max_improvement_tw(inst: Instance, td: NiceTreeDecomposition) -> SolveReport:
    """Max-improvement valid k-swap via the bag DP (weighted, no cap)."""
    dp = _TwDP(inst, td, cap=inst.k)
    value = dp.run()
    sw = _extract_swap(inst, dp.witness())
    assert sw.valid and sw.improvement == value and len(sw) <= inst.k
    found = sw if sw.improvement >= inst.d else None
    return SolveReport(swap=found, algorithm="treewidth", dp_cells=dp.cells,
                       details={"best": sw, "best_improvement": value,
                                "width": td.width})


def solve_glsvc_tw(inst: Instance, td: NiceTreeDecomposition) -> SolveReport:
    """Unit-weight gap solver: same DP with the small-subset cap."""
    if inst.mode.weighted:
        raise PreconditionError("solve_glsvc_tw requires a unit-weight mode")
    cap = (inst.k + inst.d) // 2
    dp = _TwDP(inst, td, cap=cap)
    value = dp.run()
    report = SolveReport(swap=None, algorithm="treewidth-gap", dp_cells=dp.cells,
                         details={"capped_improvement": value, "width": td.width})
    if value >= inst.d:
        sw = _extract_swap(inst, dp.witness())
        assert sw.valid and sw.improvement == value and len(sw) <= inst.k
        report.swap = sw
    return report
