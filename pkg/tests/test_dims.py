"""Graph shattering, graph dimension, one-inclusion graph orientations."""

import random
from fractions import Fraction as F
from itertools import combinations

import pytest

from cutofflab import core, dims
from cutofflab.errors import BudgetExceededError, PreconditionError

NAT = core.Point.nat
PAIR = core.Point.pair
HALF = F(1, 2)


def table_class(vectors, pool):
    """Finite class of table hypotheses over a fixed pool of points."""
    hs = tuple(
        core.TableHypothesis.from_dict({p: F(v) for p, v in zip(pool, vec)})
        for vec in vectors
    )
    return core.FiniteClass(hs)


class TestShatterCertificates:
    def test_cantor_pair_is_shattered_with_its_own_witness(self):
        cls = core.CantorClass(HALF, 2, 5)
        witness = cls.hypothesis({1, 2})
        cert = dims.check_graph_shattered([NAT(1), NAT(2)], cls, witness, HALF)
        assert cert is not None
        assert cert.verify(HALF)
        assert cert.pattern_witnesses[(0, 0)] == witness

    def test_singleton_class_cannot_shatter(self):
        pool = (NAT(1),)
        cls = table_class([(0,)], pool)
        witness = cls.hypotheses_list[0]
        assert dims.check_graph_shattered(pool, cls, witness, HALF) is None

    def test_empty_point_list_is_vacuous(self):
        cls = core.CantorClass(HALF, 2, 5)
        witness = cls.hypothesis({1, 2})
        cert = dims.check_graph_shattered([], cls, witness, HALF)
        assert cert is not None and cert.verify(HALF)

    def test_certificate_revalidates_by_direct_evaluation(self):
        cls = core.CantorClass(HALF, 3, 8)
        cert = dims.find_shattered_set(cls, cls.default_pool(), HALF, 3)
        assert cert is not None
        # independent re-check against the definition
        for pattern, h in cert.pattern_witnesses.items():
            for bit, x in zip(pattern, cert.points):
                diff = abs(h.value_at(x) - cert.witness.value_at(x))
                assert (diff == 0) if bit == 0 else (diff > HALF)

    def test_point_cap_refusal(self):
        cls = core.CantorClass(HALF, 2, 5)
        witness = cls.hypothesis({1, 2})
        points = [NAT(i) for i in range(1, 15)]
        with pytest.raises(BudgetExceededError):
            dims.check_graph_shattered(points, cls, witness, HALF, point_cap=12)


class TestGraphDimension:
    def test_singleton_class_has_dimension_zero(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0)], pool)
        assert dims.gamma_graph_dimension(cls, pool, HALF) == 0

    @pytest.mark.parametrize("d,universe", [(2, 5), (2, 6), (3, 8)])
    def test_cantor_dimension_equals_d(self, d, universe):
        cls = core.CantorClass(HALF, d, universe)
        assert dims.gamma_graph_dimension(cls, cls.default_pool(), HALF, d + 2) == d

    def test_split_complement_dimension_on_one_block(self):
        cls = core.SplitCantorClass(HALF, core.D_MINUS_ONE_COMPLEMENT, 2, 4)
        pool = tuple(PAIR(4, x) for x in range(1, 5))
        assert dims.gamma_graph_dimension(cls, pool, HALF, 4) == 2

    def test_no_d_plus_one_set_shattered(self):
        # exhaustive over all (d+1)-subsets and witnesses, d=2, universes 5-6
        for universe in (5, 6):
            cls = core.CantorClass(HALF, 2, universe)
            pool = cls.default_pool()
            for idx in combinations(range(len(pool)), 3):
                points = tuple(pool[i] for i in idx)
                for witness in cls.hypotheses():
                    assert dims.check_graph_shattered(points, cls, witness, HALF) is None

    def test_monotone_under_class_growth(self):
        rng = random.Random(5)
        pool = tuple(NAT(i) for i in range(1, 5))
        values = (0, F(3, 4))
        for _ in range(10):
            big = [tuple(rng.choice(values) for _ in pool) for _ in range(8)]
            small = big[: rng.randrange(1, 8)]
            d_small = dims.gamma_graph_dimension(table_class(small, pool), pool, HALF)
            d_big = dims.gamma_graph_dimension(table_class(big, pool), pool, HALF)
            assert d_small <= d_big

    def test_cap_refusal_carries_lower_bound(self):
        cls = core.CantorClass(HALF, 3, 8)
        with pytest.raises(BudgetExceededError) as err:
            dims.gamma_graph_dimension(cls, cls.default_pool(), HALF, cap_d=2)
        assert err.value.lower_bound == 2


class TestOneInclusionGraph:
    def test_single_hypothesis_graph(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        assert len(graph.vertices) == 1
        assert len(graph.edges) == 2
        assert all(len(ms) == 1 for ms in graph.edges.values())

    def test_cantor_d1_universe2_by_hand(self):
        # two hypotheses: zero set {1} (value 1) and zero set {2} (value 3/4)
        cls = core.CantorClass(HALF, 1, 2)
        graph = dims.build_oig(cls, (NAT(1), NAT(2)))
        assert set(graph.vertices) == {(F(0), F(1)), (F(3, 4), F(0))}
        # restrictions differ in both coordinates: all edges are singletons
        assert all(len(ms) == 1 for ms in graph.edges.values())

    def test_one_coordinate_difference_shares_an_edge(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        sizes = sorted(len(ms) for ms in graph.edges.values())
        assert sizes == [1, 1, 2]  # shared edge in coordinate 2


class TestOrientations:
    def test_all_zero_vertex_gets_every_edge(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4)), (F(3, 4), 0)], pool)
        graph = dims.build_oig(cls, pool)
        orientation = dims.orient_smallest_value(graph)
        zero_vec = (F(0), F(0))
        for i in range(2):
            key = graph.edge_key(zero_vec, i)
            assert orientation[key] == zero_vec
        assert dims.max_gamma_outdegree(graph, orientation, HALF) <= 1

    def test_singleton_edge_oriented_to_member(self):
        pool = (NAT(1),)
        cls = table_class([(F(3, 4),)], pool)
        graph = dims.build_oig(cls, pool)
        orientation = dims.orient_smallest_value(graph)
        assert list(orientation.values()) == [(F(3, 4),)]

    def test_tie_break_toward_lexicographic_smallest(self):
        pool = (NAT(1), NAT(2))
        # edge free in coordinate 2 with members (0, a) and (0, b), a < b
        cls = table_class([(0, F(1, 4)), (0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        orientation = dims.orient_smallest_value(graph)
        key = (1, (F(0),))
        assert orientation[key] == (F(0), F(1, 4))

    def test_self_orientation_gives_zero_outdegree(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        for v in graph.vertices:
            orientation = {
                key: (v if v in members else members[0])
                for key, members in graph.edges.items()
            }
            away = sum(
                1
                for i in range(2)
                if abs(orientation[graph.edge_key(v, i)][i] - v[i]) > HALF
            )
            assert away == 0

    def test_losing_vertex_outdegree_one(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        key = (1, (F(0),))
        far = (F(0), F(3, 4))
        near = (F(0), F(0))
        orientation = dims.orient_smallest_value(graph)
        orientation[key] = near  # points away from the gamma-far member
        # the far vertex loses its shared edge to a gamma-far target
        away = sum(
            1
            for i in range(2)
            if abs(orientation[graph.edge_key(far, i)][i] - far[i]) > HALF
        )
        assert away == 1

    @pytest.mark.parametrize(
        "cls",
        [
            core.CantorClass(HALF, 2, 5),
            core.CantorClass(HALF, 2, 6),
            core.CantorClass(HALF, 3, 8),
            core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 9),
            core.SplitCantorClass(HALF, core.D_MINUS_ONE_COMPLEMENT, 3, 6),
        ],
        ids=["cantor25", "cantor26", "cantor38", "split_sqrt9", "split_comp36"],
    )
    def test_smallest_value_orientation_outdegree_at_most_one(self, cls):
        rng = random.Random(11)
        pool = list(cls.default_pool())
        for n in (3, 4, 5):
            for _ in range(5):
                points = rng.sample(pool, n)
                graph = dims.build_oig(cls, points)
                orientation = dims.orient_smallest_value(graph)
                assert dims.max_gamma_outdegree(graph, orientation, HALF) <= 1

    def test_exhaustive_min_never_beats_zero_and_bounds_greedy(self):
        rng = random.Random(3)
        pool = tuple(NAT(i) for i in range(1, 5))
        values = (0, F(3, 4), F(7, 8))
        for _ in range(10):
            vectors = {tuple(rng.choice(values) for _ in pool) for _ in range(5)}
            cls = table_class(sorted(vectors), pool)
            graph = dims.build_oig(cls, pool)
            greedy = dims.max_gamma_outdegree(
                graph, dims.orient_smallest_value(graph), HALF
            )
            _, best = dims.exhaustive_orientation_min(graph, HALF)
            assert best <= greedy

    def test_all_singleton_graph_min_zero(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        _, best = dims.exhaustive_orientation_min(graph, HALF)
        assert best == 0

    def test_thm3_class_random_point_sets_min_at_most_one(self):
        cls = core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 9)
        rng = random.Random(23)
        pool = list(cls.default_pool())
        for _ in range(5):
            points = rng.sample(pool, 4)
            graph = dims.build_oig(cls, points)
            _, best = dims.exhaustive_orientation_min(graph, HALF)
            assert best <= 1

    def test_unoriented_edge_rejected(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4))], pool)
        graph = dims.build_oig(cls, pool)
        with pytest.raises(PreconditionError):
            dims.max_gamma_outdegree(graph, {}, HALF)


class TestInducedSubgraphs:
    def test_subgraph_edges_regroup(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0), (0, F(3, 4)), (F(3, 4), 0)], pool)
        graph = dims.build_oig(cls, pool)
        sub = dims.induced_subgraph(graph, [(F(0), F(0)), (F(0), F(3, 4))])
        assert len(sub.vertices) == 2
        assert sorted(len(ms) for ms in sub.edges.values()) == [1, 1, 2]

    def test_orientation_evidence_on_random_subgraphs(self):
        # the out-degree <= 1 guarantee must survive on arbitrary finite
        # subgraphs, which is what the dimension condition quantifies over
        rng = random.Random(7)
        for cls in (
            core.CantorClass(HALF, 2, 6),
            core.SplitCantorClass(HALF, core.SQRT_SIZE, None, 9),
            core.SplitCantorClass(HALF, core.D_MINUS_ONE_COMPLEMENT, 3, 6),
        ):
            pool = list(cls.default_pool())
            for _ in range(5):
                points = rng.sample(pool, 4)
                graph = dims.build_oig(cls, points)
                for _ in range(5):
                    size = rng.randrange(1, len(graph.vertices) + 1)
                    kept = rng.sample(list(graph.vertices), size)
                    sub = dims.induced_subgraph(graph, kept)
                    orientation = dims.orient_smallest_value(sub)
                    assert dims.max_gamma_outdegree(sub, orientation, HALF) <= 1

    def test_foreign_vertex_rejected(self):
        pool = (NAT(1), NAT(2))
        cls = table_class([(0, 0)], pool)
        graph = dims.build_oig(cls, pool)
        with pytest.raises(PreconditionError):
            dims.induced_subgraph(graph, [(F(1), F(1))])
