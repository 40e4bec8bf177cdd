from fractions import Fraction

import numpy as np
import pytest

from bireg import (
    LayeredGraph,
    SamplerMethod,
    build_random_layered,
    check_commutative,
    check_edge_condition,
    magnification_bruteforce,
    magnification_flow,
    plunnecke_monotone_check,
)
from bireg.errors import (
    EdgeAbsent,
    InvalidDegree,
    LayerOutOfRange,
    NonIntegralLayer,
    NonPositiveValue,
    TooLarge,
)
from helpers import saturating_matching_exists

PAIRING = SamplerMethod.pairing()


def random_layered(rng, max_x0=10, hmax=3):
    m = int(rng.integers(2, max_x0 + 1))
    d = int(rng.integers(2, min(m, 4) + 1))
    h = int(rng.integers(1, hmax + 1))
    return build_random_layered(
        Fraction(1), m, d, h, seed=int(rng.integers(2**63)), method=PAIRING
    )


class TestBuild:
    def test_layer_sizes(self):
        lg = build_random_layered(Fraction(2), 4, 2, 2, seed=0, method=PAIRING)
        assert lg.layer_sizes == (4, 8, 16)

    def test_deterministic(self):
        a = build_random_layered(Fraction(1), 6, 2, 3, seed=9, method=PAIRING)
        b = build_random_layered(Fraction(1), 6, 2, 3, seed=9, method=PAIRING)
        assert a == b

    def test_layers_independent(self):
        lg = build_random_layered(Fraction(1), 8, 2, 2, seed=3, method=PAIRING)
        assert lg.blocks[0].rows_tuple() != lg.blocks[1].rows_tuple()

    def test_non_integral_layer(self):
        with pytest.raises(NonIntegralLayer):
            build_random_layered(Fraction(3, 2), 3, 2, 2, seed=0)

    def test_degree_range(self):
        with pytest.raises(InvalidDegree):
            build_random_layered(Fraction(1), 5, 1, 2, seed=0)
        with pytest.raises(InvalidDegree):
            build_random_layered(Fraction(1), 5, 6, 2, seed=0)
        with pytest.raises(InvalidDegree):
            build_random_layered(Fraction(2), 4, 3, 1, seed=0)  # kd = 6 > m

    def test_k_below_one(self):
        with pytest.raises(InvalidDegree):
            build_random_layered(Fraction(1, 2), 4, 2, 2, seed=0)


class TestEdgeCondition:
    def test_identity_stack_all_true(self):
        lg = LayeredGraph([3, 3, 3], [[[0], [1], [2]], [[0], [1], [2]]])
        for u in range(3):
            assert check_edge_condition(lg, 1, u, u, "upward")
            assert check_edge_condition(lg, 2, u, u, "downward")

    def test_fanout_violates_upward(self):
        lg = LayeredGraph([1, 1, 2], [[[0]], [[0, 1]]])
        assert not check_edge_condition(lg, 1, 0, 0, "upward")

    def test_edge_absent(self):
        lg = LayeredGraph([2, 2], [[[0], [1]]])
        with pytest.raises(EdgeAbsent):
            check_edge_condition(lg, 1, 0, 1, "upward")

    def test_layer_bounds(self):
        lg = LayeredGraph([2, 2, 2], [[[0], [1]], [[0], [1]]])
        with pytest.raises(LayerOutOfRange):
            check_edge_condition(lg, 2, 0, 0, "upward")  # needs i <= h-1
        with pytest.raises(LayerOutOfRange):
            check_edge_condition(lg, 1, 0, 0, "downward")  # needs i >= 2
        with pytest.raises(LayerOutOfRange):
            check_edge_condition(lg, 3, 0, 0, "upward")

    def test_against_permutation_scan(self):
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(25):
            lg = random_layered(rng, max_x0=6, hmax=2)
            if lg.h < 2:
                continue
            for (u, v) in lg.layer_edges(1):
                got = check_edge_condition(lg, 1, u, v, "upward")
                gamma_u = [int(x) for x in lg.block(1).row(u)]
                gamma_v = [int(w) for w in lg.block(2).row(v)]
                sub = lg.induce_layer(2, gamma_u, gamma_v)
                assert got == saturating_matching_exists(sub)
                checked += 1
        assert checked > 50

    def test_downward_equals_upward_on_reverse(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            lg = random_layered(rng, max_x0=6, hmax=3)
            h = lg.h
            rev = lg.reverse()
            for i in range(2, h + 1):
                for (u, v) in lg.layer_edges(i):
                    assert check_edge_condition(
                        lg, i, u, v, "downward"
                    ) == check_edge_condition(rev, h - i + 1, v, u, "upward")


class TestCheckCommutative:
    def test_single_layer_vacuous(self):
        lg = LayeredGraph([3, 3], [[[0], [1], [2]]])
        report = check_commutative(lg)
        assert report.commutative
        assert report.edges_checked == 0

    def test_fanout_report(self):
        lg = LayeredGraph([1, 1, 2], [[[0]], [[0, 1]]])
        report = check_commutative(lg)
        assert not report.commutative
        assert report.upward_violations == ((1, 0, 0),)
        assert report.downward_violations == ()
        assert report.edges_checked == 3

    def test_matches_per_edge_checks(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            lg = random_layered(rng, max_x0=7, hmax=3)
            report = check_commutative(lg)
            up, down = [], []
            for i in range(1, lg.h):
                for (u, v) in lg.layer_edges(i):
                    if not check_edge_condition(lg, i, u, v, "upward"):
                        up.append((i, u, v))
            for i in range(2, lg.h + 1):
                for (u, v) in lg.layer_edges(i):
                    if not check_edge_condition(lg, i, u, v, "downward"):
                        down.append((i, u, v))
            assert report.upward_violations == tuple(sorted(up))
            assert report.downward_violations == tuple(sorted(down))
            expected_checked = sum(
                lg.block(i).edge_count for i in range(1, lg.h)
            ) + sum(lg.block(i).edge_count for i in range(2, lg.h + 1))
            assert report.edges_checked == expected_checked

    def test_matches_per_edge_checks_on_ragged_graphs(self):
        # arbitrary row degrees, including empty neighborhoods, exercise the
        # saturation-impossible and empty-target paths of the bulk certifier
        rng = np.random.default_rng(71)
        for _ in range(40):
            sizes = [int(rng.integers(1, 7)) for _ in range(int(rng.integers(2, 5)))]
            blocks = []
            for lo, hi in zip(sizes, sizes[1:]):
                rows = []
                for _ in range(lo):
                    deg = int(rng.integers(0, hi + 1))
                    rows.append(sorted(rng.choice(hi, size=deg, replace=False).tolist()))
                blocks.append(rows)
            lg = LayeredGraph(sizes, blocks)
            report = check_commutative(lg)
            up, down = [], []
            for i in range(1, lg.h):
                for (u, v) in lg.layer_edges(i):
                    if not check_edge_condition(lg, i, u, v, "upward"):
                        up.append((i, u, v))
            for i in range(2, lg.h + 1):
                for (u, v) in lg.layer_edges(i):
                    if not check_edge_condition(lg, i, u, v, "downward"):
                        down.append((i, u, v))
            assert report.upward_violations == tuple(sorted(up))
            assert report.downward_violations == tuple(sorted(down))

    def test_subsampling(self):
        rng = np.random.default_rng(23)
        lg = random_layered(rng, max_x0=8, hmax=2)
        full = check_commutative(lg)
        sampled = check_commutative(lg, sample_edges=3, seed=4)
        assert sampled.sampled and not full.sampled
        if lg.h >= 2:
            assert sampled.edges_checked == min(3, lg.block(1).edge_count) + min(
                3, lg.block(lg.h).edge_count
            )
        assert set(sampled.upward_violations) <= set(full.upward_violations)
        assert set(sampled.downward_violations) <= set(full.downward_violations)

    def test_json_roundtrip(self):
        lg = LayeredGraph([1, 1, 2], [[[0]], [[0, 1]]])
        d = check_commutative(lg).to_dict()
        assert d["commutative"] is False
        assert d["upward_violations"] == [[1, 0, 0]]


class TestMagnification:
    def test_shared_target(self):
        lg = LayeredGraph([2, 1], [[[0], [0]]])
        res = magnification_bruteforce(lg, 1)
        assert res.value == Fraction(1, 2)
        assert res.witness == (0, 1)

    def test_identity_layer(self):
        lg = LayeredGraph([3, 3], [[[0], [1], [2]]])
        assert magnification_bruteforce(lg, 1).value == 1
        assert magnification_flow(lg, 1).value == 1

    def test_complete_expansion(self):
        lg = LayeredGraph([2, 4], [[[0, 1, 2, 3], [0, 1, 2, 3]]])
        res = magnification_bruteforce(lg, 1)
        assert res.value == 2
        assert res.witness == (0, 1)

    def test_single_vertex_bottom(self):
        lg = LayeredGraph([1, 3], [[[0, 2]]])
        res = magnification_flow(lg, 1)
        assert res.value == 2
        assert res.witness == (0,)

    def test_flow_equals_bruteforce_randomized(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            lg = random_layered(rng, max_x0=8, hmax=3)
            for i in range(1, lg.h + 1):
                bf = magnification_bruteforce(lg, i)
                fl = magnification_flow(lg, i)
                assert bf.value == fl.value
                # witnesses may differ; both must attain the value exactly
                for res in (bf, fl):
                    reach = len(
                        set().union(
                            *[
                                _iter_reach(lg, i, x)
                                for x in res.witness
                            ]
                        )
                    )
                    assert Fraction(reach, len(res.witness)) == res.value

    def test_biregular_law_small(self):
        for k, m, d in [(1, 6, 2), (2, 4, 2), (1, 8, 3), (Fraction(3, 2), 4, 2)]:
            lg = build_random_layered(Fraction(k), m, d, 2, seed=77, method=PAIRING)
            for i in (1, 2):
                assert magnification_flow(lg, i).value == Fraction(k) ** i

    def test_zero_reach_vertex(self):
        # a bottom vertex with no outgoing edges pins D_1 to 0
        lg = LayeredGraph([2, 1], [[[0], []]])
        res = magnification_bruteforce(lg, 1)
        assert res.value == 0
        assert magnification_flow(lg, 1).value == 0

    def test_too_large_for_bruteforce(self):
        lg = build_random_layered(Fraction(1), 24, 2, 1, seed=0, method=PAIRING)
        with pytest.raises(TooLarge):
            magnification_bruteforce(lg, 1)

    def test_level_bounds(self):
        lg = LayeredGraph([2, 2], [[[0], [1]]])
        with pytest.raises(LayerOutOfRange):
            magnification_flow(lg, 2)


def _iter_reach(lg, i, x):
    from bireg import neighborhood

    return neighborhood(lg, [x], "out", i)


class TestMonotoneCheck:
    def test_true_case(self):
        assert plunnecke_monotone_check([4, 2])

    def test_false_case(self):
        assert not plunnecke_monotone_check([2, 5])

    def test_equality_case(self):
        assert plunnecke_monotone_check([Fraction(3, 2), Fraction(9, 4)])

    def test_constant_ratio_long(self):
        k = Fraction(5, 3)
        assert plunnecke_monotone_check([k**i for i in range(1, 6)])

    def test_non_positive_rejected(self):
        with pytest.raises(NonPositiveValue):
            plunnecke_monotone_check([1, 0])

    def test_no_float_involved(self):
        # 10^16 and 10^16 + 1 collapse to the same double; the exact
        # cross-power comparison still separates them
        assert plunnecke_monotone_check([10**8, 10**16])
        assert not plunnecke_monotone_check([10**8, 10**16 + 1])


class TestCommutativeMonotoneInteraction:
    def test_commutative_instances_are_monotone(self):
        rng = np.random.default_rng(101)
        found = 0
        for _ in range(30):
            lg = random_layered(rng, max_x0=8, hmax=3)
            if not check_commutative(lg).commutative:
                continue
            values = [magnification_flow(lg, i).value for i in range(1, lg.h + 1)]
            assert plunnecke_monotone_check(values)
            found += 1
        assert found >= 3
