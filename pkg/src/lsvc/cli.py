"""File formats, algorithm selection, verification and the benchmark harness.

Graphs are DIMACS edge files, covers and weights are whitespace tables, tree
decompositions are PACE-style .td files.  Exit codes: 0 = an improving swap
was found, 1 = locally optimal, 2 = error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .graph import (Graph, GraphError, Instance, Mode, SolveReport,
                    improvement, is_valid_swap)
from .oracle import OracleGuardError, oracle_solve
from .swaps import PreconditionError
from .degree import (solve_glsvc_by_degree, solve_glswvc_by_degree,
                     solve_lswvc_by_degree)
from .hindex import compute_h_index, solve_glswvc_by_hindex
from .treewidth import (heuristic_tree_decomposition, load_tree_decomposition,
                        solve_glsvc_tw, solve_max_improvement_tw)
from .modular import (compute_modular_decomposition, solve_glsvc_delta_md,
                      solve_glsvc_mw, solve_glswvc_mw)
from .split import compute_split_decomposition, solve_glsvc_sw, solve_glswvc_sw

ALGORITHMS = ("auto", "oracle", "degree", "hindex", "treewidth", "modular",
              "modular-degree", "split")


class CliError(ValueError):
    pass


@dataclass
class RunConfig:
    graph_path: str
    cover_path: str                 # file or "greedy2approx"
    mode: Mode
    k: int
    d: int
    weights_path: Optional[str] = None
    algorithm: str = "auto"
    decomposition_path: Optional[str] = None
    verify: bool = False
    json_output: bool = False
    auto_hindex_ratio: float = 0.5  # auto picks hindex when h <= ratio * max degree
    seed: int = 0


# ---------------------------------------------------------------------------
# parsing / writing
# ---------------------------------------------------------------------------

def parse_dimacs(text: str) -> Graph:
    n = None
    m_declared = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise CliError(f"line {lineno}: duplicate problem line")
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise CliError(f"line {lineno}: malformed problem line")
            n, m_declared = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if n is None:
                raise CliError(f"line {lineno}: edge before problem line")
            try:
                u, v = int(parts[1]), int(parts[2])
            except (ValueError, IndexError) as exc:
                raise CliError(f"line {lineno}: malformed edge") from exc
            if not (1 <= u <= n and 1 <= v <= n):
                raise CliError(f"line {lineno}: edge ({u},{v}) out of range")
            edges.append((u - 1, v - 1))
        else:
            raise CliError(f"line {lineno}: unrecognized line {line!r}")
    if n is None:
        raise CliError("missing problem line")
    if m_declared is not None and m_declared != len(edges):
        raise CliError(f"problem line declares {m_declared} edges, found {len(edges)}")
    try:
        return Graph(n, edges, labels=range(1, n + 1))
    except GraphError as exc:
        raise CliError(str(exc)) from exc


def write_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.m}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_cover(text: str, g: Graph) -> frozenset[int]:
    ids = []
    for tok in text.split():
        try:
            ids.append(int(tok))
        except ValueError as exc:
            raise CliError(f"cover file: bad vertex id {tok!r}") from exc
    for v in ids:
        if not (1 <= v <= g.n):
            raise CliError(f"cover file: vertex {v} out of range 1..{g.n}")
    return frozenset(v - 1 for v in ids)


def parse_weights(text: str, g: Graph) -> tuple[int, ...]:
    weights = [1] * g.n
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CliError(f"weights line {lineno}: expected '<vertex> <weight>'")
        v, w = int(parts[0]), int(parts[1])
        if not (1 <= v <= g.n):
            raise CliError(f"weights line {lineno}: vertex {v} out of range")
        if v in seen:
            raise CliError(f"weights line {lineno}: duplicate vertex {v}")
        if w < 0:
            raise CliError(f"weights line {lineno}: negative weight")
        seen.add(v)
        weights[v - 1] = w
    if len(seen) != g.n:
        missing = next(v for v in range(1, g.n + 1) if v not in seen)
        raise CliError(f"weights file: missing weight for vertex {missing}")
    return tuple(weights)


def write_cover(cover: frozenset[int]) -> str:
    return " ".join(str(v + 1) for v in sorted(cover)) + "\n"


def write_weights(weights: Sequence[int]) -> str:
    return "".join(f"{v + 1} {w}\n" for v, w in enumerate(weights))


def greedy_2approx_cover(g: Graph) -> frozenset[int]:
    """Maximal-matching cover: both endpoints of a greedy matching."""
    cover: set[int] = set()
    for u, v in g.edges():
        if u not in cover and v not in cover:
            cover.update((u, v))
    return frozenset(cover)


def load_instance(cfg: RunConfig) -> Instance:
    g = parse_dimacs(Path(cfg.graph_path).read_text())
    if cfg.cover_path == "greedy2approx":
        cover = greedy_2approx_cover(g)
    else:
        cover = parse_cover(Path(cfg.cover_path).read_text(), g)
    if cfg.weights_path:
        weights = parse_weights(Path(cfg.weights_path).read_text(), g)
    else:
        weights = (1,) * g.n
    try:
        return Instance(g, cover, weights, cfg.k, cfg.d, cfg.mode)
    except GraphError as exc:
        raise CliError(str(exc)) from exc


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------

def _unit(inst: Instance) -> bool:
    return not inst.mode.weighted


def _dispatch(cfg: RunConfig, inst: Instance) -> SolveReport:
    algorithm = cfg.algorithm
    if algorithm == "auto":
        if cfg.decomposition_path:
            algorithm = "treewidth"
        else:
            hd = compute_h_index(inst.graph)
            delta = inst.graph.max_degree()
            algorithm = "hindex" if hd.h <= cfg.auto_hindex_ratio * delta else "degree"
    if algorithm == "oracle":
        t0 = time.perf_counter()
        res = oracle_solve(inst)
        swap = res.best if res.is_yes else None
        return SolveReport(swap=swap, algorithm="oracle",
                           elapsed=time.perf_counter() - t0,
                           details={"best_improvement": res.best.improvement
                                    if res.best else 0})
    if algorithm == "degree":
        if inst.mode in (Mode.GLSVC, Mode.LSVC):
            return solve_glsvc_by_degree(inst)
        if inst.mode is Mode.LSWVC:
            return solve_lswvc_by_degree(inst)
        return solve_glswvc_by_degree(inst)
    if algorithm == "hindex":
        return solve_glswvc_by_hindex(inst)
    if algorithm == "treewidth":
        if cfg.decomposition_path:
            td = load_tree_decomposition(inst.graph, cfg.decomposition_path)
        else:
            td = heuristic_tree_decomposition(inst.graph)
        if _unit(inst):
            return solve_glsvc_tw(inst, td)
        return solve_max_improvement_tw(inst, td)
    if algorithm == "modular":
        md = compute_modular_decomposition(inst.graph)
        if _unit(inst):
            return solve_glsvc_mw(inst, md)
        return solve_glswvc_mw(inst, md)
    if algorithm == "modular-degree":
        if not _unit(inst):
            raise CliError("algorithm modular-degree requires mode glsvc or lsvc")
        md = compute_modular_decomposition(inst.graph)
        return solve_glsvc_delta_md(inst, md)
    if algorithm == "split":
        sd = compute_split_decomposition(inst.graph)
        if _unit(inst):
            return solve_glsvc_sw(inst, sd)
        return solve_glswvc_sw(inst, sd)
    raise CliError(f"unknown algorithm {algorithm!r}")


def run(cfg: RunConfig) -> tuple[SolveReport, Optional[bool], Instance]:
    """Solve per the config; returns (report, verification verdict, instance)."""
    inst = load_instance(cfg)
    if cfg.algorithm == "modular-degree" and inst.mode.weighted:
        raise CliError("algorithm modular-degree requires mode glsvc or lsvc")
    if inst.mode in (Mode.LSVC, Mode.LSWVC) and cfg.d != 1:
        raise CliError(f"mode {inst.mode.value} fixes d = 1")
    report = _dispatch(cfg, inst)
    verified: Optional[bool] = None
    if cfg.verify:
        verified = True
        if report.swap is not None:
            ok = (is_valid_swap(inst, report.swap.vertices)
                  and improvement(inst, report.swap.vertices) >= inst.d
                  and len(report.swap) <= inst.k)
            verified = verified and ok
        if inst.graph.n <= 18:
            try:
                verified = verified and (
                    oracle_solve(inst).is_yes == report.found)
            except OracleGuardError:
                pass
    return report, verified, inst


def report_payload(report: SolveReport, verified, inst: Instance) -> dict:
    g = inst.graph
    swap_labels = ([g.labels[v] for v in report.swap.vertices]
                   if report.swap else None)
    counters = {"branch_nodes": report.branch_nodes, "dp_cells": report.dp_cells}
    params = {"n": g.n, "m": g.m, "k": inst.k, "d": inst.d,
              "mode": inst.mode.value, "max_degree": g.max_degree()}
    for key in ("width", "h", "delta_md"):
        if key in report.details:
            params[key] = report.details[key]
    return {
        "answer": "yes" if report.found else "locally_optimal",
        "swap": swap_labels,
        "improvement": report.swap.improvement if report.swap else None,
        "algorithm": report.algorithm,
        "params": params,
        "time_ms": round(report.elapsed * 1000.0, 3),
        "counters": counters,
        "verified": verified,
    }


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_gnp(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    return Graph(n, edges, labels=range(1, n + 1))


def gen_regular(rng: random.Random, n: int, degree: int) -> Graph:
    if (n * degree) % 2 != 0:
        raise CliError("n * degree must be even for a regular graph")
    for _ in range(2000):
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
            return Graph(n, sorted(edges), labels=range(1, n + 1))
    raise CliError("failed to sample a simple regular graph")


def gen_stars_of_cliques(rng: random.Random, cliques: int, size: int) -> Graph:
    """An apex vertex joined to disjoint cliques: modular width stays
    max(2, cliques, size) regardless of the vertex count."""
    n = 1 + cliques * size
    edges = []
    for c in range(cliques):
        base = 1 + c * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
        edges += [(0, base + i) for i in range(size)]
    return Graph(n, edges, labels=range(1, n + 1))


def build_graph(rng: random.Random, model: str, n: int, p: float = 0.3,
                degree: int = 3, cliques: int = 4, size: int = 4) -> Graph:
    if model == "gnp":
        return gen_gnp(rng, n, p)
    if model == "regular":
        return gen_regular(rng, n, degree)
    if model == "stars_of_cliques":
        return gen_stars_of_cliques(rng, cliques, size)
    raise CliError(f"unknown model {model!r}")


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def _load_toml(path: str) -> dict:
    try:
        import tomllib as toml
    except ModuleNotFoundError:
        import tomli as toml
    with open(path, "rb") as fh:
        return toml.load(fh)


def bench(spec_path: str, out_path: str) -> list[dict]:
    spec = _load_toml(spec_path)
    rows: list[dict] = []
    for sweep_index, sweep in enumerate(spec.get("sweep", [])):
        model = sweep.get("model", "gnp")
        ns = sweep.get("n", [12])
        if isinstance(ns, int):
            ns = [ns]
        count = sweep.get("count", 3)
        k = sweep.get("k", 4)
        d = sweep.get("d", 1)
        mode = Mode(sweep.get("mode", "glsvc"))
        algorithms = sweep.get("algorithms", ["degree"])
        seed = sweep.get("seed", 0)
        wmax = sweep.get("wmax", 8)
        rng = random.Random(seed)
        for n in ns:
            for rep in range(count):
                g = build_graph(rng, model, n, p=sweep.get("p", 0.3),
                                degree=sweep.get("degree", 3),
                                cliques=sweep.get("cliques", max(2, n // 4)),
                                size=sweep.get("size", 4))
                cover = greedy_2approx_cover(g)
                if mode.weighted:
                    weights = tuple(rng.randint(1, wmax) for _ in range(g.n))
                else:
                    weights = (1,) * g.n
                inst = Instance(g, cover, weights, k, d, mode)
                hd = compute_h_index(g)
                answers = {}
                for algorithm in algorithms:
                    cfg = RunConfig(graph_path="", cover_path="", mode=mode,
                                    k=k, d=d, algorithm=algorithm)
                    t0 = time.perf_counter()
                    report = _dispatch(cfg, inst)
                    elapsed = time.perf_counter() - t0
                    answers[algorithm] = report.found
                    rows.append({
                        "sweep": sweep_index, "model": model, "n": g.n,
                        "m": g.m, "k": k, "d": d, "mode": mode.value,
                        "algorithm": algorithm,
                        "max_degree": g.max_degree(), "h_index": hd.h,
                        "width": report.details.get("width", ""),
                        "delta_md": report.details.get("delta_md", ""),
                        "time_ms": round(elapsed * 1000.0, 3),
                        "nodes": report.branch_nodes, "cells": report.dp_cells,
                        "answer": "yes" if report.found else "no",
                        "improvement": (report.swap.improvement
                                        if report.swap else 0),
                        "agree": "",
                    })
                agree = len(set(answers.values())) <= 1
                for row in rows[-len(algorithms):]:
                    row["agree"] = str(agree).lower()
    if out_path:
        fieldnames = list(rows[0].keys()) if rows else []
        with open(out_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(rows)
    return rows


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _add_solve_args(p: argparse.ArgumentParser):
    p.add_argument("--graph", required=True)
    p.add_argument("--cover", required=True,
                   help="cover file, or 'greedy2approx' to construct one")
    p.add_argument("--weights")
    p.add_argument("--mode", default="glsvc", choices=[m.value for m in Mode])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--algorithm", default="auto", choices=ALGORITHMS)
    p.add_argument("--decomposition", help="PACE-style .td file")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--auto-hindex-ratio", type=float, default=0.5,
                   help="auto picks the h-index solver when h <= ratio * max degree")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lsvc", description="Parameterized local search for vertex cover")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one instance")
    _add_solve_args(ps)

    pb = sub.add_parser("bench", help="run a benchmark sweep")
    pb.add_argument("--spec", required=True, help="TOML sweep specification")
    pb.add_argument("--out", required=True, help="CSV output path")

    pg = sub.add_parser("gen", help="generate instance files")
    pg.add_argument("--model", default="gnp",
                    choices=["gnp", "regular", "stars_of_cliques"])
    pg.add_argument("--n", type=int, default=12)
    pg.add_argument("--p", type=float, default=0.3)
    pg.add_argument("--degree", type=int, default=3)
    pg.add_argument("--cliques", type=int, default=4)
    pg.add_argument("--size", type=int, default=4)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--weighted", action="store_true")
    pg.add_argument("--wmax", type=int, default=8)
    pg.add_argument("--out", required=True, help="output path prefix")

    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            cfg = RunConfig(
                graph_path=args.graph, cover_path=args.cover,
                weights_path=args.weights, mode=Mode(args.mode), k=args.k,
                d=args.d, algorithm=args.algorithm,
                decomposition_path=args.decomposition, verify=args.verify,
                json_output=args.json, auto_hindex_ratio=args.auto_hindex_ratio)
            report, verified, inst = run(cfg)
            payload = report_payload(report, verified, inst)
            if cfg.json_output:
                print(json.dumps(payload, indent=2))
            else:
                print(f"answer: {payload['answer']}")
                if payload["swap"] is not None:
                    print(f"swap: {' '.join(map(str, payload['swap']))}")
                    print(f"improvement: {payload['improvement']}")
                print(f"algorithm: {payload['algorithm']}")
                print(f"time: {payload['time_ms']} ms")
                if verified is not None:
                    print(f"verified: {verified}")
            if verified is False:
                print("verification FAILED", file=sys.stderr)
                return 2
            return 0 if payload["answer"] == "yes" else 1
        if args.command == "bench":
            rows = bench(args.spec, args.out)
            print(f"wrote {len(rows)} rows to {args.out}")
            return 0
        if args.command == "gen":
            rng = random.Random(args.seed)
            g = build_graph(rng, args.model, args.n, p=args.p,
                            degree=args.degree, cliques=args.cliques,
                            size=args.size)
            cover = greedy_2approx_cover(g)
            prefix = Path(args.out)
            prefix.parent.mkdir(parents=True, exist_ok=True)
            Path(f"{prefix}.dimacs").write_text(write_dimacs(g))
            Path(f"{prefix}.cover").write_text(write_cover(cover))
            if args.weighted:
                weights = [rng.randint(1, args.wmax) for _ in range(g.n)]
                Path(f"{prefix}.weights").write_text(write_weights(weights))
            print(f"wrote {prefix}.dimacs ({g.n} vertices, {g.m} edges)")
            return 0
    except (CliError, GraphError, PreconditionError, OracleGuardError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
