"""Tests for the discrete distribution layer."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from spotar.dist import (
    DistributionError,
    Histogram,
    JointDist,
    convolve,
    dominates,
    format_histogram,
    from_edge,
    joint_product,
    marginal,
    min_cost,
    point_mass,
    to_cost,
)

from _util import exact_cdf, exact_convolve, rand_hist, rand_joint


def test_histogram_basics():
    h = Histogram({10: 0.25, 2: 0.5, 7: 0.25})
    assert h.times() == (2, 7, 10)
    assert list(h.items()) == [(2, 0.5), (7, 0.25), (10, 0.25)]
    assert h.prob(7) == 0.25
    assert h.prob(3) == 0.0
    assert h.as_dict() == {2: 0.5, 7: 0.25, 10: 0.25}
    assert h.mass() == pytest.approx(1.0, abs=1e-15)
    assert h.mean() == pytest.approx(5.25, abs=1e-12)
    assert len(h) == 3
    assert h.delta == 1.0


def test_histogram_drops_zero_entries():
    h = Histogram({3: 1.0, 9: 0.0})
    assert h.times() == (3,)


def test_histogram_cdf_steps():
    h = Histogram({2: 0.5, 7: 0.25, 10: 0.25})
    assert h.cdf(1) == 0.0
    assert h.cdf(2) == pytest.approx(0.5, abs=1e-15)
    assert h.cdf(6) == pytest.approx(0.5, abs=1e-15)
    assert h.cdf(7) == pytest.approx(0.75, abs=1e-15)
    assert h.cdf(10) == pytest.approx(1.0, abs=1e-15)
    assert h.cdf(99) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "entries",
    [
        {},
        {0: 1.0},
        {-3: 1.0},
        {2.5: 1.0},
        {True: 1.0},
        {3: -0.1, 4: 1.1},
        {3: 0.4},
        {3: 0.6, 4: 0.6},
    ],
)
def test_histogram_rejects_bad_entries(entries):
    with pytest.raises(DistributionError):
        Histogram(entries)


def test_histogram_rejects_bad_delta():
    with pytest.raises(DistributionError):
        Histogram({1: 1.0}, delta=0.0)
    with pytest.raises(DistributionError):
        Histogram({1: 1.0}, delta=-60.0)


def test_histogram_mass_tolerance_is_tight():
    Histogram({3: 0.5, 4: 0.5 + 5e-10})  # inside the mass tolerance
    with pytest.raises(DistributionError):
        Histogram({3: 0.5, 4: 0.5 + 5e-9})


def test_histogram_equality_and_approx_eq():
    a = Histogram({3: 0.5, 4: 0.5})
    b = Histogram({4: 0.5, 3: 0.5})
    assert a == b
    assert a != Histogram({3: 0.5, 5: 0.5})
    assert a != Histogram({3: 0.5, 4: 0.5}, delta=60.0)
    assert a.approx_eq(Histogram({3: 0.5 + 1e-10, 4: 0.5 - 1e-10}))
    assert not a.approx_eq(Histogram({3: 0.6, 4: 0.4}))
    assert not a.approx_eq(Histogram({3: 0.5, 4: 0.5}, delta=60.0))


def test_point_mass_and_min_cost():
    h = point_mass(11, delta=60.0)
    assert h.as_dict() == {11: 1.0}
    assert h.delta == 60.0
    assert min_cost(h) == 11
    assert min_cost(Histogram({8: 0.9, 10: 0.1})) == 8


def test_convolve_golden_pair():
    # Sum of {8: .9, 10: .1} and {8: .8, 10: .2}.
    a = Histogram({8: 0.9, 10: 0.1})
    b = Histogram({8: 0.8, 10: 0.2})
    c = convolve(a, b)
    expect = {16: 0.72, 18: 0.26, 20: 0.02}
    assert set(c.times()) == set(expect)
    for t, p in expect.items():
        assert c.prob(t) == pytest.approx(p, abs=1e-9)


def test_convolve_requires_matching_resolution():
    with pytest.raises(DistributionError):
        convolve(point_mass(3, delta=1.0), point_mass(4, delta=60.0))


def test_convolve_matches_exact_enumeration():
    rng = random.Random(2101)
    for _ in range(200):
        a, ea = rand_hist(rng)
        b, eb = rand_hist(rng)
        got = convolve(a, b)
        want = exact_convolve(ea, eb)
        assert set(got.times()) == set(want)
        for t, p in want.items():
            assert got.prob(t) == pytest.approx(float(p), abs=1e-12)


def test_convolve_commutative_and_associative():
    rng = random.Random(2102)
    for _ in range(100):
        a, _ = rand_hist(rng)
        b, _ = rand_hist(rng)
        c, _ = rand_hist(rng)
        ab = convolve(a, b)
        ba = convolve(b, a)
        assert ab.approx_eq(ba, tol=1e-12)
        left = convolve(ab, c)
        right = convolve(a, convolve(b, c))
        assert left.approx_eq(right, tol=1e-12)


def test_dominates_strictly_faster():
    fast = Histogram({2: 1.0})
    slow = Histogram({3: 1.0})
    assert dominates(fast, slow)
    assert not dominates(slow, fast)


def test_dominates_equal_is_false_both_ways():
    a = Histogram({3: 0.5, 6: 0.5})
    b = Histogram({3: 0.5, 6: 0.5})
    assert not dominates(a, b)
    assert not dominates(b, a)


def test_dominates_incomparable_pair():
    # One is more likely to be fast, the other has a better worst tail
    # start; the cumulative curves cross, so neither wins everywhere.
    a = Histogram({14: 0.8, 20: 0.2})
    b = Histogram({13: 0.7, 20: 0.3})
    assert not dominates(a, b)
    assert not dominates(b, a)


def test_dominates_mixed_support():
    a = Histogram({2: 0.5, 5: 0.5})
    b = Histogram({2: 0.5, 7: 0.5})
    assert dominates(a, b)
    assert not dominates(b, a)


def test_dominates_matches_exact_cdf_comparison():
    rng = random.Random(2103)
    for _ in range(300):
        a, ea = rand_hist(rng, max_time=12)
        b, eb = rand_hist(rng, max_time=12)
        grid = sorted(set(ea) | set(eb))
        ge_everywhere = all(exact_cdf(ea, t) >= exact_cdf(eb, t) for t in grid)
        gt_somewhere = any(exact_cdf(ea, t) > exact_cdf(eb, t) for t in grid)
        want = ge_everywhere and gt_somewhere
        assert dominates(a, b) == want


def test_dominates_requires_matching_resolution():
    with pytest.raises(DistributionError):
        dominates(point_mass(3, delta=1.0), point_mass(4, delta=60.0))


def test_format_histogram():
    h = Histogram({10: 0.1, 8: 0.9})
    assert format_histogram(h) == "8:0.9\n10:0.1"


def test_joint_basics():
    j = JointDist(("a", "b"), {(8, 6): 0.8, (10, 10): 0.2})
    assert j.edges == ("a", "b")
    assert list(j.rows()) == [((8, 6), 0.8), ((10, 10), 0.2)]
    assert j.row_prob((8, 6)) == 0.8
    assert j.row_prob((8, 7)) == 0.0
    assert j.mass() == pytest.approx(1.0, abs=1e-15)
    assert len(j) == 2


@pytest.mark.parametrize(
    "edges,rows",
    [
        ((), {(): 1.0}),
        (("a", "a"), {(1, 2): 1.0}),
        (("a", "b"), {(1,): 1.0}),
        (("a", "b"), {(1, 0): 1.0}),
        (("a", "b"), {(1, 2): -0.5, (1, 3): 1.5}),
        (("a", "b"), {(1, 2): 0.7}),
        (("a", "b"), {}),
    ],
)
def test_joint_rejects_bad_rows(edges, rows):
    with pytest.raises(DistributionError):
        JointDist(edges, rows)


def test_from_edge_round_trip():
    h = Histogram({8: 0.9, 10: 0.1}, delta=60.0)
    j = from_edge("e1", h)
    assert j.edges == ("e1",)
    assert j.delta == 60.0
    assert to_cost(j) == h


def test_joint_product_golden():
    j14 = JointDist(("e1", "e4"), {(8, 6): 0.8, (10, 10): 0.2})
    j9 = from_edge("e9", Histogram({5: 0.4, 9: 0.6}))
    prod = joint_product(j14, j9)
    assert prod.edges == ("e1", "e4", "e9")
    expect = {
        (8, 6, 5): 0.32,
        (8, 6, 9): 0.48,
        (10, 10, 5): 0.08,
        (10, 10, 9): 0.12,
    }
    assert set(prod.as_dict()) == set(expect)
    for row, p in expect.items():
        assert prod.row_prob(row) == pytest.approx(p, abs=1e-9)


def test_joint_product_rejects_overlap_and_mismatch():
    a = JointDist(("x", "y"), {(1, 2): 1.0})
    b = JointDist(("y", "z"), {(2, 3): 1.0})
    with pytest.raises(DistributionError):
        joint_product(a, b)
    c = JointDist(("z",), {(3,): 1.0}, delta=60.0)
    with pytest.raises(DistributionError):
        joint_product(a, c)


def test_marginal_golden():
    j = JointDist(("e1", "e4"), {(8, 6): 0.8, (10, 10): 0.2})
    m1 = marginal(j, ("e1",))
    assert m1.as_dict() == {(8,): 0.8, (10,): 0.2}
    m4 = marginal(j, ("e4",))
    assert m4.as_dict() == {(6,): 0.8, (10,): 0.2}
    assert marginal(j, ("e1", "e4")) == j


def test_marginal_merges_rows():
    j = JointDist(("a", "b"), {(1, 5): 0.25, (2, 5): 0.25, (1, 7): 0.5})
    m = marginal(j, ("b",))
    assert m.row_prob((5,)) == pytest.approx(0.5, abs=1e-12)
    assert m.row_prob((7,)) == pytest.approx(0.5, abs=1e-12)


def test_marginal_requires_contiguous_run():
    j = JointDist(("a", "b", "c"), {(1, 2, 3): 1.0})
    with pytest.raises(DistributionError):
        marginal(j, ("a", "c"))
    with pytest.raises(DistributionError):
        marginal(j, ("b", "a"))
    with pytest.raises(DistributionError):
        marginal(j, ("q",))
    with pytest.raises(DistributionError):
        marginal(j, ())


def test_to_cost_golden():
    j = JointDist(
        ("e1", "e4", "e9"),
        {(8, 6, 5): 0.32, (8, 6, 9): 0.48, (10, 10, 5): 0.08, (10, 10, 9): 0.12},
    )
    c = to_cost(j)
    expect = {19: 0.32, 23: 0.48, 25: 0.08, 29: 0.12}
    assert set(c.times()) == set(expect)
    for t, p in expect.items():
        assert c.prob(t) == pytest.approx(p, abs=1e-9)


def test_to_cost_of_product_equals_convolve_of_costs():
    rng = random.Random(2104)
    for _ in range(100):
        a = rand_joint(rng, ("p", "q"))
        b = rand_joint(rng, ("r",))
        via_product = to_cost(joint_product(a, b))
        via_convolve = convolve(to_cost(a), to_cost(b))
        assert via_product.approx_eq(via_convolve, tol=1e-12)


def test_marginal_of_product_recovers_factors():
    rng = random.Random(2105)
    for _ in range(100):
        a = rand_joint(rng, ("p", "q"))
        b = rand_joint(rng, ("r", "s"))
        prod = joint_product(a, b)
        back_a = marginal(prod, ("p", "q"))
        back_b = marginal(prod, ("r", "s"))
        for row, p in a.rows():
            assert back_a.row_prob(row) == pytest.approx(p, abs=1e-12)
        for row, p in b.rows():
            assert back_b.row_prob(row) == pytest.approx(p, abs=1e-12)


def test_long_convolution_chain_keeps_mass():
    rng = random.Random(2106)
    total = point_mass(1)
    for _ in range(50):
        h, _ = rand_hist(rng, max_support=3, max_time=9)
        total = convolve(total, h)
    assert abs(total.mass() - 1.0) <= 1e-9
    assert total.cdf(10**6) == pytest.approx(1.0, abs=1e-9)


def test_exact_fraction_reference_self_check():
    # Guard the test helpers themselves: the rational twin really is
    # the same distribution.
    rng = random.Random(2107)
    h, exact = rand_hist(rng)
    assert sum(exact.values()) == Fraction(1)
    assert set(h.times()) == set(exact)
