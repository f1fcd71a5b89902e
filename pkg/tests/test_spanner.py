import numpy as np
import pytest

from doubling import (
    FiniteMetric,
    WeightedGraph,
    build_spanner,
    exponential_star,
    load_spanner,
    random_euclidean,
    save_spanner,
    shortest_path_metric,
)
from doubling.net_tree import build_net_tree
from doubling.spanner import (
    assign_directions,
    build_base_edge_sets,
    cover_constant,
    donate_edges,
    donation_threshold,
)


def uniform4() -> FiniteMetric:
    return FiniteMetric(np.ones((4, 4)) - np.eye(4))


def collinear3() -> FiniteMetric:
    return shortest_path_metric(WeightedGraph(3, [(0, 1, 1.0), (1, 2, 1.0)]))


def geometric_progression_metric() -> FiniteMetric:
    """A 1-D comb that floods vertex 0 with one in-edge group per level.

    Point j > 0 sits at C * 2^j, so the pair {0, j} lands in edge set E_j
    and every such edge is directed into 0 (the longest-surviving label).
    Sixteen nonempty groups against a keep-threshold of fourteen forces
    exactly two donations.
    """
    C = cover_constant(0.25)
    pos = [0.0] + [C * 2.0**j for j in range(1, 17)]
    return FiniteMetric(np.abs(np.subtract.outer(pos, pos)), validate=False)


def test_constants():
    assert cover_constant(0.25) == 132.0
    assert cover_constant(0.125) == 260.0
    assert donation_threshold(0.25) == 14
    assert donation_threshold(1.0 / 32.0) == 35


class TestBaseEdgeSets:
    def test_uniform_pairs_enter_level_one(self):
        m = uniform4()
        t = build_net_tree(m, 0.25)
        sets = build_base_edge_sets(m, t, 0.25)
        assert sets[0] == []
        assert sets[1] == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        assert all(not s for s in sets[2:])

    def test_collinear_long_pair_enters_level_two(self):
        # scaled distances 256, 256, 512: 512 clears C*r_1 = 264 but not 528
        m = collinear3()
        t = build_net_tree(m, 0.25)
        sets = build_base_edge_sets(m, t, 0.25)
        assert sets[1] == [(0, 1), (1, 2)]
        assert sets[2] == [(0, 2)]

    def test_single_point(self):
        m = FiniteMetric([[0.0]])
        t = build_net_tree(m, 0.25)
        assert all(not s for s in build_base_edge_sets(m, t, 0.25))

    def test_every_pair_appears_once(self, lcp4_spanner):
        m = lcp4_spanner.net_tree
        sets = build_base_edge_sets(
            FiniteMetric(m.scaled_dist / m.scale, validate=False), m, lcp4_spanner.eps
        )
        seen = [p for s in sets for p in s]
        assert len(seen) == len(set(seen))


class TestDirections:
    def test_heads_are_longer_survivors(self):
        m = uniform4()
        t = build_net_tree(m, 0.25)
        directed = assign_directions(build_base_edge_sets(m, t, 0.25), t)
        # 0 survives to the top, so everything touching it flows into 0;
        # equal-istar pairs break toward the larger id
        assert directed == [
            (1, 0, 1),
            (2, 0, 1),
            (3, 0, 1),
            (1, 2, 1),
            (1, 3, 1),
            (2, 3, 1),
        ]

    def test_empty_input(self):
        t = build_net_tree(uniform4(), 0.25)
        assert assign_directions([[]], t) == []


class TestDonation:
    def test_below_threshold_keeps_everything(self):
        m = uniform4()
        t = build_net_tree(m, 0.25)
        directed = assign_directions(build_base_edge_sets(m, t, 0.25), t)
        s = donate_edges(directed, m, 0.25, net_tree=t)
        assert all(rec.kind_v == "B" and rec.donor is None for rec in s.edges)
        assert len(s.edges) == 6

    def test_progression_donates_exactly_two_groups(self):
        """Ranks 15 and 16 at vertex 0 move to the rank-1 and rank-2 tails."""
        m = geometric_progression_metric()
        s = build_spanner(m, 0.25)
        donated = [r for r in s.edges if r.kind_v == "C"]
        assert [(r.u, r.v, r.level, r.donor) for r in donated] == [
            (15, 1, 15, 0),
            (16, 2, 16, 0),
        ]
        for rec in donated:
            assert rec.length == m.d(rec.u, rec.v)  # re-measured, not copied

    def test_donation_distance_contract(self):
        """d(donor, new endpoint) <= eps^6 * originating length."""
        m = geometric_progression_metric()
        s = build_spanner(m, 0.25)
        for rec in s.edges:
            if rec.donor is None:
                continue
            original = m.d(rec.u, rec.donor)
            assert m.d(rec.donor, rec.v) <= 0.25**6 * original

    def test_no_duplicate_pairs(self, lcp4_spanner):
        pairs = [rec.pair for rec in lcp4_spanner.edges]
        assert len(pairs) == len(set(pairs))
        assert len(pairs) == len(lcp4_spanner.graph.edges)


class TestBuildSpanner:
    def test_two_points(self):
        s = build_spanner(FiniteMetric([[0.0, 5.0], [5.0, 0.0]]), 0.25)
        assert len(s.edges) == 1
        assert s.stretch.min_ratio == 1.0 and s.stretch.max_ratio == 1.0
        assert s.max_degree == 1

    def test_euclidean_stretch_all_pairs(self):
        m = random_euclidean(50, 2, 1)
        s = build_spanner(m, 0.25)
        sp = shortest_path_metric(s.graph)
        ratios = sp.dist[np.triu_indices(50, k=1)] / m.dist[np.triu_indices(50, k=1)]
        assert ratios.min() >= 1.0 - 1e-9
        assert ratios.max() <= 1.25 + 1e-9

    def test_level_brackets_hold_for_origins(self, lcp4_spanner):
        """Each record's originating pair sits in its level's length window."""
        t = lcp4_spanner.net_tree
        C = cover_constant(lcp4_spanner.eps)
        for rec in lcp4_spanner.edges:
            a, b = rec.origin
            d = float(t.scaled_dist[a, b])
            assert C * 2.0 ** (rec.level - 1) < d <= C * 2.0**rec.level

    def test_star_degree_saturates_at_threshold(self):
        """Below m0 leaves the center keeps its full degree; beyond it the
        donation pass caps the center at exactly m0 in-groups."""
        degrees = {}
        for n in (12, 16, 24, 32):
            s = build_spanner(shortest_path_metric(exponential_star(n)), 0.25)
            degrees[n] = s.max_degree
            assert s.stretch.max_ratio <= 1.25 + 1e-9
        assert degrees[12] == 12  # 12 groups, no donation
        assert degrees[24] == 14
        assert degrees[16] == degrees[32] == 14  # size-independent past m0

    def test_deterministic_rebuild(self):
        m = random_euclidean(30, 2, 4)
        a = build_spanner(m, 0.25)
        b = build_spanner(m, 0.25)
        assert a.edges == b.edges
        assert a.graph.edges == b.graph.edges

    def test_planar_uniform_degree_regression(self, euclidean_max_degrees):
        """Recorded max degrees on the seeded planar corpus at eps = 1/4."""
        assert euclidean_max_degrees == {
            (100, 1): 99,
            (100, 2): 99,
            (100, 3): 99,
            (100, 4): 98,
            (100, 5): 99,
            (400, 1): 397,
            (400, 2): 395,
            (400, 3): 397,
            (400, 4): 391,
            (400, 5): 397,
        }


class TestSerialization:
    def test_round_trip(self, tmp_path):
        m = geometric_progression_metric()
        s = build_spanner(m, 0.25)
        path = str(tmp_path / "s.spanner")
        save_spanner(s, path)
        back = load_spanner(path, 0.25)
        assert back.graph.edges == s.graph.edges
        assert back.edges == s.edges
        assert back.max_degree == s.max_degree
        assert back.eps == 0.25
        assert back.net_tree is None and back.stretch is None

    def test_rejects_malformed_meta(self, tmp_path):
        p = tmp_path / "bad.spanner"
        p.write_text("graph 2\ne 0 1 1.0\nmeta 0 1 level=1\n")
        with pytest.raises(ValueError):
            load_spanner(str(p), 0.25)
