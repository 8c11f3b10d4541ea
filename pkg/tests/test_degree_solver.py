"""Connected-swap enumeration, swap families and the degree solvers."""

import math
import random

import pytest

from lsvc.degree import (compute_swap_family_unweighted, compute_swap_family_weighted,
                         enumerate_connected_swaps, improving_singletons,
                         solve_glsvc_by_degree, solve_glswvc_by_degree,
                         solve_lswvc_by_degree)
from lsvc.graph import Graph, Instance, Mode, is_valid_swap
from lsvc.oracle import oracle_all_valid, oracle_solve
from lsvc.swaps import PreconditionError, make_swap_instance

from helpers import (figw1_instance, p3_instance, random_instance,
                     star_leaves_cover, two_stars_instance)


class TestEnumeration:
    def test_p3_contains_full_swap(self):
        inst = p3_instance({0, 2}, 3, 1)
        swaps = set(enumerate_connected_swaps(inst, 3))
        assert frozenset({0, 1, 2}) in swaps

    def test_figw1(self):
        inst = figw1_instance()
        swaps = set(enumerate_connected_swaps(inst, 2))
        assert frozenset({0}) in swaps
        assert frozenset({1, 2}) in swaps

    def test_isolated_cover_vertex(self):
        g = Graph(1, [])
        inst = Instance.unit(g, {0}, 1, 1, Mode.GLSVC)
        assert set(enumerate_connected_swaps(inst, 1)) == {frozenset({0})}

    def test_exactly_valid_connected_no_duplicates(self):
        rng = random.Random(51)
        for _ in range(60):
            inst = random_instance(rng, n_max=10, k_max=5)
            kmax = rng.randint(1, 5)
            emitted = list(enumerate_connected_swaps(inst, kmax))
            assert len(emitted) == len(set(emitted)), "duplicate emission"
            expected = {
                sw.as_set()
                for sw in oracle_all_valid(inst, kmax=kmax)
                if sw.vertices and
                len(inst.graph.connected_components(sw.vertices)) == 1
            }
            assert set(emitted) == expected

    def test_balanced_filter(self):
        rng = random.Random(52)
        for _ in range(30):
            inst = random_instance(rng, n_max=9, k_max=4, modes=(Mode.GLSVC,))
            for w in enumerate_connected_swaps(inst, 4, balanced_only=True):
                assert len(w & inst.cover) == len(w - inst.cover) + 1


class TestUnweightedFamily:
    def test_star(self):
        inst = star_leaves_cover(3, 4, 2)
        fam = compute_swap_family_unweighted(inst)
        assert 1 in fam and len(fam[1]) == 3 and fam[1].improvement == 1
        assert 2 in fam and len(fam[2]) == 4 and fam[2].improvement == 2

    def test_triangle_no_family(self):
        g = Graph(3, [(0, 1), (1, 2), (0, 2)])
        inst = Instance.unit(g, {0, 1}, 3, 2, Mode.GLSVC)
        assert compute_swap_family_unweighted(inst) == {}

    def test_two_stars(self):
        # k=3, d=2: the 1-improving slot caps at size k-d+1 = 2, so the
        # 3-vertex star swap does not qualify and the family is empty
        assert compute_swap_family_unweighted(two_stars_instance(3, 2)) == {}
        # with k=4 the star swap fits; no connected 2-improving swap exists
        fam = compute_swap_family_unweighted(two_stars_instance(4, 2))
        assert 1 in fam and len(fam[1]) == 3 and fam[1].improvement == 1
        assert 2 not in fam

    def test_requires_rule_one_inapplicable(self):
        g = Graph(2, [(0, 1)])
        inst = Instance.unit(g, {0, 1}, 2, 1, Mode.GLSVC)
        with pytest.raises(PreconditionError):
            compute_swap_family_unweighted(inst)

    def test_minimality_against_oracle(self):
        rng = random.Random(53)
        done = 0
        while done < 150:
            inst = random_instance(rng, n_max=10, k_max=5, modes=(Mode.GLSVC,))
            if improving_singletons(inst):
                continue
            fam = compute_swap_family_unweighted(inst)
            # oracle: minimum connected j-improving swap of size <= k-d+j
            per_j = {}
            for sw in oracle_all_valid(inst):
                if not sw.vertices:
                    continue
                if len(inst.graph.connected_components(sw.vertices)) != 1:
                    continue
                j = sw.improvement
                if 1 <= j <= inst.d and len(sw) <= inst.k - inst.d + j:
                    if j not in per_j or len(sw) < per_j[j]:
                        per_j[j] = len(sw)
            assert set(fam) == set(per_j)
            for j, size in per_j.items():
                assert len(fam[j]) == size
            done += 1


class TestWeightedFamily:
    def test_figw1(self):
        inst = figw1_instance()
        fam = compute_swap_family_weighted(inst)
        assert fam[1].vertices == (0,) and fam[1].improvement == 1
        assert fam[2].vertices == (1, 2) and fam[2].improvement == 2

    def test_no_cover(self):
        g = Graph(3, [])
        inst = Instance.weighted(g, set(), (1, 1, 1), 3, 1, Mode.GLSWVC)
        assert compute_swap_family_weighted(inst) == {}

    def test_isolated_heavy(self):
        g = Graph(1, [])
        inst = Instance.weighted(g, {0}, (5,), 2, 1, Mode.GLSWVC)
        fam = compute_swap_family_weighted(inst)
        assert fam[1].vertices == (0,) and fam[1].improvement == 5
        assert 2 not in fam

    def test_max_improvement_per_size(self):
        rng = random.Random(54)
        for _ in range(80):
            inst = random_instance(rng, n_max=9, k_max=4, modes=(Mode.GLSWVC,))
            if inst.k == 0:
                continue
            fam = compute_swap_family_weighted(inst)
            per_size = {}
            for sw in oracle_all_valid(inst):
                if not sw.vertices or not set(sw.vertices) & inst.cover:
                    continue
                if len(inst.graph.connected_components(sw.vertices)) != 1:
                    continue
                j = len(sw)
                if j not in per_size or sw.improvement > per_size[j]:
                    per_size[j] = sw.improvement
            assert set(fam) == set(per_size)
            for j in fam:
                assert fam[j].improvement == per_size[j]


class TestSolvers:
    def test_glsvc_star(self):
        rep = solve_glsvc_by_degree(star_leaves_cover(3, 4, 2))
        assert rep.found and rep.swap.improvement >= 2

    def test_glsvc_disconnected_swap(self):
        # two disjoint 3-leaf stars force the disconnection branching
        g = Graph(8, [(0, 1), (0, 2), (0, 3), (4, 5), (4, 6), (4, 7)])
        inst = Instance.unit(g, {1, 2, 3, 5, 6, 7}, 8, 4, Mode.GLSVC)
        rep = solve_glsvc_by_degree(inst)
        assert rep.found and rep.swap.improvement >= 4 and len(rep.swap) <= 8

    def test_glsvc_triangle_no(self):
        g = Graph(3, [(0, 1), (1, 2), (0, 2)])
        inst = Instance.unit(g, {0, 1}, 3, 1, Mode.GLSVC)
        assert not solve_glsvc_by_degree(inst).found

    def test_glswvc_figw1(self):
        rep = solve_glswvc_by_degree(figw1_instance(k=2, d=2))
        assert rep.found and rep.swap.vertices == (1, 2)
        rep = solve_glswvc_by_degree(figw1_instance(k=1, d=1))
        assert rep.found and rep.swap.vertices == (0,)
        rep = solve_glswvc_by_degree(figw1_instance(k=2, d=2, w_mid=1))
        assert not rep.found

    def test_lswvc(self):
        rep = solve_lswvc_by_degree(figw1_instance(k=1, d=1))
        assert rep.found and rep.swap.vertices == (0,)
        inst = p3_instance({1}, 3, 1, Mode.LSVC)
        assert not solve_lswvc_by_degree(inst).found
        inst = p3_instance({0, 2}, 3, 1, Mode.LSVC)
        rep = solve_lswvc_by_degree(inst)
        assert rep.found and rep.swap.vertices == (0, 1, 2)

    def test_agreement_with_oracle(self):
        rng = random.Random(55)
        for i in range(800):
            inst = random_instance(rng, n_max=11, k_max=5)
            res = oracle_solve(inst)
            if inst.mode in (Mode.GLSVC, Mode.LSVC):
                rep = solve_glsvc_by_degree(inst)
                assert rep.found == res.is_yes, _show(inst)
                _check_witness(inst, rep)
            rep = solve_glswvc_by_degree(inst)
            assert rep.found == res.is_yes, _show(inst)
            _check_witness(inst, rep)
            if inst.d == 1:
                rep = solve_lswvc_by_degree(inst)
                assert rep.found == res.is_yes, _show(inst)
                _check_witness(inst, rep)

    def test_depth_bound(self):
        rng = random.Random(56)
        for _ in range(200):
            inst = random_instance(rng, n_max=11, k_max=5, modes=(Mode.GLSVC,))
            rep = solve_glsvc_by_degree(inst)
            assert rep.details["max_depth"] <= math.ceil((inst.k + inst.d) / 2)


def _show(inst):
    return (inst.graph.edges(), sorted(inst.cover), inst.weights, inst.k,
            inst.d, inst.mode)


def _check_witness(inst, rep):
    if rep.found:
        assert is_valid_swap(inst, rep.swap.vertices)
        assert rep.swap.improvement >= inst.d
        assert len(rep.swap) <= inst.k


class TestBranchingRuleOne:
    def test_soundness_on_yes_instances(self):
        # with an all-cover-neighborhood vertex present, some branch child
        # stays a yes-instance
        rng = random.Random(57)
        done = 0
        while done < 120:
            inst = random_instance(rng, n_max=10, k_max=5, modes=(Mode.GLSVC,))
            iso = sorted(improving_singletons(inst))
            if not iso or not oracle_solve(inst).is_yes:
                continue
            v = iso[0]
            branches = [frozenset({v})]
            nb = sorted(inst.graph.adj_sets[v])
            for i, a in enumerate(nb):
                for b in nb[i + 1:]:
                    if not inst.graph.has_edge(a, b):
                        branches.append(frozenset({a, b}))
            ok = False
            for w in branches:
                si = make_swap_instance(inst, w)
                if si.k < 0:
                    continue
                sub = oracle_solve(si.child_instance())
                if sub.best is not None and sub.best.improvement >= si.d:
                    ok = True
                    break
            assert ok
            done += 1
