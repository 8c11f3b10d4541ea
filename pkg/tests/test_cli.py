"""File formats, CLI behavior, and the benchmark harness."""

import json
import random

import pytest

from lsvc.cli import (CliError, RunConfig, bench, gen_stars_of_cliques,
                      greedy_2approx_cover, load_instance, main, parse_cover,
                      parse_dimacs, parse_weights, report_payload, run,
                      write_cover, write_dimacs, write_weights)
from lsvc.graph import Graph, Mode
from lsvc.modular import compute_modular_decomposition

from helpers import random_graph

P3_DIMACS = "c tiny path\np edge 3 2\ne 1 2\ne 2 3\n"


@pytest.fixture
def p3_files(tmp_path):
    graph = tmp_path / "g.dimacs"
    graph.write_text(P3_DIMACS)
    cover = tmp_path / "s.txt"
    cover.write_text("1 3\n")
    return graph, cover


class TestParsing:
    def test_dimacs(self):
        g = parse_dimacs(P3_DIMACS)
        assert g.n == 3 and g.m == 2
        assert g.labels == (1, 2, 3)

    def test_dimacs_errors(self):
        with pytest.raises(CliError, match="line 2"):
            parse_dimacs("c x\ne 1 2\n")
        with pytest.raises(CliError, match="declares"):
            parse_dimacs("p edge 3 5\ne 1 2\n")
        with pytest.raises(CliError, match="out of range"):
            parse_dimacs("p edge 2 1\ne 1 9\n")

    def test_cover_variants(self, tmp_path):
        g = parse_dimacs(P3_DIMACS)
        assert parse_cover("2", g) == {1}
        assert parse_cover("1 3", g) == {0, 2}
        with pytest.raises(CliError, match="range"):
            parse_cover("7", g)

    def test_non_cover_reports_edge(self, p3_files, tmp_path):
        graph, _ = p3_files
        bad = tmp_path / "bad.txt"
        bad.write_text("1\n")
        cfg = RunConfig(str(graph), str(bad), Mode.LSVC, 2, 1)
        with pytest.raises(CliError, match=r"\(2,3\)"):
            load_instance(cfg)

    def test_weights(self):
        g = parse_dimacs(P3_DIMACS)
        assert parse_weights("1 4\n2 5\n3 6\n", g) == (4, 5, 6)
        with pytest.raises(CliError, match="missing weight"):
            parse_weights("1 4\n", g)

    def test_round_trip(self):
        rng = random.Random(91)
        for _ in range(20):
            g = random_graph(rng, rng.randint(1, 12), 0.4)
            relabeled = Graph(g.n, g.edges(), labels=range(1, g.n + 1))
            assert parse_dimacs(write_dimacs(relabeled)) == relabeled
            cover = greedy_2approx_cover(g)
            assert parse_cover(write_cover(cover), relabeled) == cover
            weights = tuple(rng.randint(0, 9) for _ in range(g.n))
            assert parse_weights(write_weights(weights), relabeled) == weights


class TestRun:
    def test_degree_and_oracle_agree(self, p3_files):
        graph, cover = p3_files
        for algorithm in ("degree", "oracle", "treewidth", "modular",
                          "modular-degree", "split", "hindex", "auto"):
            cfg = RunConfig(str(graph), str(cover), Mode.GLSVC, 3, 1,
                            algorithm=algorithm, verify=True)
            report, verified, inst = run(cfg)
            assert report.found, algorithm
            assert verified is True
            assert [inst.graph.labels[v] for v in report.swap.vertices] == [1, 2, 3]

    def test_greedy_cover(self, p3_files, tmp_path):
        graph, _ = p3_files
        cfg = RunConfig(str(graph), "greedy2approx", Mode.GLSVC, 2, 1,
                        algorithm="oracle")
        report, _, inst = run(cfg)
        assert inst.graph.is_vertex_cover(inst.cover) is None

    def test_modular_degree_mode_error(self, p3_files, tmp_path):
        graph, cover = p3_files
        weights = tmp_path / "w.txt"
        weights.write_text("1 2\n2 3\n3 1\n")
        cfg = RunConfig(str(graph), str(cover), Mode.GLSWVC, 2, 1,
                        weights_path=str(weights), algorithm="modular-degree")
        with pytest.raises(CliError, match="modular-degree"):
            run(cfg)

    def test_payload_schema(self, p3_files):
        graph, cover = p3_files
        cfg = RunConfig(str(graph), str(cover), Mode.GLSVC, 3, 1,
                        algorithm="degree", verify=True)
        payload = report_payload(*run(cfg))
        assert set(payload) == {"answer", "swap", "improvement", "algorithm",
                                "params", "time_ms", "counters", "verified"}
        assert payload["answer"] == "yes"
        assert payload["swap"] == [1, 2, 3]


class TestMainExitCodes:
    def test_yes(self, p3_files, capsys):
        graph, cover = p3_files
        code = main(["solve", "--graph", str(graph), "--cover", str(cover),
                     "--mode", "glsvc", "--k", "3", "--d", "1", "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["answer"] == "yes"

    def test_locally_optimal(self, p3_files, tmp_path, capsys):
        graph, _ = p3_files
        cover = tmp_path / "mid.txt"
        cover.write_text("2\n")
        code = main(["solve", "--graph", str(graph), "--cover", str(cover),
                     "--mode", "glsvc", "--k", "3", "--d", "1"])
        assert code == 1

    def test_error(self, tmp_path, capsys):
        code = main(["solve", "--graph", str(tmp_path / "missing.dimacs"),
                     "--cover", "greedy2approx", "--k", "2"])
        assert code == 2

    def test_gen_then_solve(self, tmp_path, capsys):
        prefix = tmp_path / "inst"
        assert main(["gen", "--model", "gnp", "--n", "12", "--p", "0.3",
                     "--seed", "7", "--out", str(prefix)]) == 0
        code = main(["solve", "--graph", f"{prefix}.dimacs", "--cover",
                     f"{prefix}.cover", "--mode", "glsvc", "--k", "3",
                     "--d", "1", "--algorithm", "auto", "--verify"])
        assert code in (0, 1)

    def test_gen_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["gen", "--n", "10", "--seed", "5", "--out", str(a)])
        main(["gen", "--n", "10", "--seed", "5", "--out", str(b)])
        assert (tmp_path / "a.dimacs").read_text() == (tmp_path / "b.dimacs").read_text()


class TestBench:
    def test_sweep(self, tmp_path):
        spec = tmp_path / "sweep.toml"
        spec.write_text(
            '[[sweep]]\nmodel = "gnp"\nn = [8, 10]\ncount = 2\nk = 3\nd = 1\n'
            'mode = "glsvc"\nalgorithms = ["degree", "treewidth", "oracle"]\n'
            'seed = 11\np = 0.35\n')
        out = tmp_path / "results.csv"
        rows = bench(str(spec), str(out))
        assert len(rows) == 2 * 2 * 3
        assert all(row["agree"] == "true" for row in rows)
        text = out.read_text()
        assert text.startswith("sweep,")

    def test_stars_of_cliques_low_mw(self):
        g = gen_stars_of_cliques(random.Random(1), cliques=4, size=4)
        md = compute_modular_decomposition(g)
        assert md.width <= max(4, 4)
