"""Core graph model: immutable graphs, vertex covers, swaps and improvements.

Vertices are dense integers 0..n-1.  External labels (e.g. the 1-based ids of
a DIMACS file) are kept in ``Graph.labels`` so that solver output can be
reported in the caller's vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs, covers, weights or vertex ids."""


class Mode(Enum):
    """Problem variants: (gap) local search on (weighted) vertex cover."""

    LSVC = "lsvc"        # unit weights, d = 1
    GLSVC = "glsvc"      # unit weights, 1 <= d <= k
    LSWVC = "lswvc"      # weighted, d = 1
    GLSWVC = "glswvc"    # weighted, any d >= 0

    @property
    def weighted(self) -> bool:
        return self in (Mode.LSWVC, Mode.GLSWVC)


class Graph:
    """Immutable undirected graph with sorted neighbor lists.

    Invariants (enforced on construction): symmetric adjacency, no
    self-loops, no duplicate edges, neighbor lists sorted ascending.
    """

    __slots__ = ("n", "m", "adj", "adj_sets", "adj_mask", "labels", "_degeneracy")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 labels: Optional[Sequence] = None):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        self.n = n
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self.adj_sets: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)
        mask = []
        for a in adj:
            b = 0
            for w in a:
                b |= 1 << w
            mask.append(b)
        self.adj_mask: tuple[int, ...] = tuple(mask)
        self.m = len(seen)
        if labels is None:
            labels = tuple(range(n))
        elif len(labels) != n:
            raise GraphError("label table length must equal vertex count")
        self.labels = tuple(labels)
        self._degeneracy: Optional[tuple[int, ...]] = None

    # -- basic accessors ---------------------------------------------------

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def vertices(self) -> range:
        return range(self.n)

    def check_vertex_set(self, vs: Iterable[int]) -> frozenset[int]:
        vs = frozenset(vs)
        for v in vs:
            if not (0 <= v < self.n):
                raise GraphError(f"vertex id {v} out of range 0..{self.n - 1}")
        return vs

    # -- derived structure -------------------------------------------------

    def degeneracy_order(self) -> tuple[int, ...]:
        """Smallest-last vertex ordering, computed once on demand."""
        if self._degeneracy is None:
            deg = [self.degree(v) for v in range(self.n)]
            alive = [True] * self.n
            order = []
            for _ in range(self.n):
                v = min((x for x in range(self.n) if alive[x]), key=lambda x: deg[x])
                order.append(v)
                alive[v] = False
                for w in self.adj[v]:
                    if alive[w]:
                        deg[w] -= 1
            self._degeneracy = tuple(order)
        return self._degeneracy

    def is_independent(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(not self.has_edge(vs[i], vs[j])
                   for i in range(len(vs)) for j in range(i + 1, len(vs)))

    def is_vertex_cover(self, cover: frozenset[int]) -> Optional[tuple[int, int]]:
        """Return None if ``cover`` covers every edge, else an uncovered edge."""
        for u in range(self.n):
            if u in cover:
                continue
            for v in self.adj[u]:
                if u < v and v not in cover:
                    return (u, v)
        return None

    def neighborhood(self, vs: Iterable[int]) -> frozenset[int]:
        """Open neighborhood N(vs): neighbors of vs outside vs."""
        vs = frozenset(vs)
        out: set[int] = set()
        for v in vs:
            out.update(self.adj_sets[v])
        return frozenset(out - vs)

    def connected_components(self, inside: Optional[Iterable[int]] = None) -> list[list[int]]:
        """Components of G (or of G[inside]), each sorted, ordered by minimum."""
        if inside is None:
            nodes = set(range(self.n))
        else:
            nodes = set(self.check_vertex_set(inside))
        comps = []
        while nodes:
            start = min(nodes)
            comp = {start}
            stack = [start]
            nodes.discard(start)
            while stack:
                x = stack.pop()
                for y in self.adj_sets[x]:
                    if y in nodes:
                        nodes.discard(y)
                        comp.add(y)
                        stack.append(y)
            comps.append(sorted(comp))
        comps.sort(key=lambda c: c[0])
        return comps

    def induced_subgraph(self, keep: Iterable[int]) -> tuple["Graph", dict[int, int], list[int]]:
        """Subgraph on ``keep``; returns (graph, old->new map, new->old list)."""
        keep = sorted(self.check_vertex_set(keep))
        old_to_new = {v: i for i, v in enumerate(keep)}
        edges = [(old_to_new[u], old_to_new[v])
                 for u in keep for v in self.adj[u]
                 if u < v and v in old_to_new]
        sub = Graph(len(keep), edges, labels=[self.labels[v] for v in keep])
        return sub, old_to_new, keep

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and ``leaves`` leaf vertices 1..leaves."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


@dataclass(frozen=True)
class Instance:
    """A local-search query: graph, vertex cover, weights, budget k and gap d.

    ``relaxed=True`` skips the mode-specific range checks; solvers use it for
    derived residual instances whose k or d may leave the user-facing ranges
    (negative budget signals a dead branch).  The cover and weight-domain
    checks always apply.
    """

    graph: Graph
    cover: frozenset[int]
    weights: tuple[int, ...]
    k: int
    d: int
    mode: Mode
    relaxed: bool = field(default=False, compare=False)

    def __post_init__(self):
        g = self.graph
        object.__setattr__(self, "cover", g.check_vertex_set(self.cover))
        if len(self.weights) != g.n:
            raise GraphError("weight table length must equal vertex count")
        if any(w < 0 for w in self.weights):
            raise GraphError("weights must be non-negative integers")
        bad = g.is_vertex_cover(self.cover)
        if bad is not None:
            raise GraphError(
                f"not a vertex cover: edge ({g.labels[bad[0]]},{g.labels[bad[1]]}) uncovered")
        if not self.mode.weighted and any(w != 1 for w in self.weights):
            raise GraphError(f"mode {self.mode.value} requires unit weights")
        if not self.relaxed:
            if self.k < 0:
                raise GraphError("swap budget k must be >= 0")
            if self.mode in (Mode.LSVC, Mode.LSWVC) and self.d != 1:
                raise GraphError(f"mode {self.mode.value} requires d = 1")
            if self.mode is Mode.GLSVC and not (1 <= self.d <= self.k):
                raise GraphError("mode glsvc requires 1 <= d <= k")
            if self.mode is Mode.GLSWVC and self.d < 0:
                raise GraphError("mode glswvc requires d >= 0")

    @staticmethod
    def unit(graph: Graph, cover: Iterable[int], k: int, d: int,
             mode: Mode = Mode.GLSVC, relaxed: bool = False) -> "Instance":
        return Instance(graph, frozenset(cover), (1,) * graph.n, k, d, mode, relaxed)

    @staticmethod
    def weighted(graph: Graph, cover: Iterable[int], weights: Sequence[int],
                 k: int, d: int, mode: Mode = Mode.GLSWVC, relaxed: bool = False) -> "Instance":
        return Instance(graph, frozenset(cover), tuple(weights), k, d, mode, relaxed)

    def weight_of(self, vs: Iterable[int]) -> int:
        return sum(self.weights[v] for v in vs)

    def with_budget(self, k: int, d: int) -> "Instance":
        return Instance(self.graph, self.cover, self.weights, k, d, self.mode, relaxed=True)

    @property
    def independent_side(self) -> frozenset[int]:
        return frozenset(range(self.graph.n)) - self.cover


@dataclass(frozen=True)
class Swap:
    """A vertex set W together with its cached improvement and validity."""

    vertices: tuple[int, ...]
    improvement: int
    valid: bool

    @staticmethod
    def of(inst: Instance, vs: Iterable[int]) -> "Swap":
        vs = tuple(sorted(inst.graph.check_vertex_set(vs)))
        return Swap(vs, improvement(inst, vs), is_valid_swap(inst, vs))

    def as_set(self) -> frozenset[int]:
        return frozenset(self.vertices)

    def __len__(self):
        return len(self.vertices)


EMPTY_SWAP = Swap((), 0, True)


@dataclass
class SolveReport:
    """Outcome of one solver invocation.

    ``swap`` is None when the instance is locally optimal (no good swap).
    Witnesses are always expressed in the original instance's vertex ids.
    """

    swap: Optional[Swap]
    algorithm: str
    branch_nodes: int = 0
    dp_cells: int = 0
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.swap is not None


def is_valid_swap(inst: Instance, swap_vertices: Iterable[int]) -> bool:
    """True iff applying the swap leaves a vertex cover.

    Equivalent characterizations (both must hold or both fail): the symmetric
    difference covers every edge, and the swapped-out cover part is
    independent with its outside neighborhood contained in the swap.
    """
    g = inst.graph
    w = g.check_vertex_set(swap_vertices)
    w_in_cover = w & inst.cover
    if not g.is_independent(w_in_cover):
        return False
    for v in w_in_cover:
        for u in g.adj_sets[v]:
            if u not in inst.cover and u not in w:
                return False
    return True


def applied_cover(inst: Instance, swap_vertices: Iterable[int]) -> frozenset[int]:
    """The candidate cover after applying the swap: S symmetric-difference W."""
    w = inst.graph.check_vertex_set(swap_vertices)
    return (inst.cover - w) | (w - inst.cover)


def improvement(inst: Instance, swap_vertices: Iterable[int]) -> int:
    """Weight leaving the cover minus weight entering it; may be negative."""
    w = inst.graph.check_vertex_set(swap_vertices)
    return (sum(inst.weights[v] for v in w & inst.cover)
            - sum(inst.weights[v] for v in w - inst.cover))


def connected_components_of_swap(g: Graph, swap_vertices: Iterable[int]) -> list[list[int]]:
    """Partition of the swap into connected components of the induced subgraph."""
    return g.connected_components(inside=swap_vertices)


def swap_sort_key(swap: Swap) -> tuple:
    """Deterministic preference: max improvement, then min size, then lex."""
    return (-swap.improvement, len(swap.vertices), swap.vertices)


def best_swap(candidates: Iterable[Swap]) -> Optional[Swap]:
    best: Optional[Swap] = None
    for s in candidates:
        if best is None or swap_sort_key(s) < swap_sort_key(best):
            best = s
    return best
