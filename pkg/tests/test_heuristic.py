"""Tests for the remaining-time lower bounds."""

from __future__ import annotations

import math
import random

import pytest

from spotar.dist import Histogram, min_cost
from spotar.heuristic import (
    HeuristicKind,
    StraightLineBound,
    TreeBound,
    arrival_prob,
    build_min_tree,
    make_heuristic,
    reach_indicator,
)
from spotar.network import Network, Node
from spotar.oracle import gen_instance
from spotar.weights import build_store

from _util import rand_hist


def test_heuristic_kind_parse():
    assert HeuristicKind.parse("sp") is HeuristicKind.SP
    assert HeuristicKind.parse("BA") is HeuristicKind.BA
    with pytest.raises(ValueError):
        HeuristicKind.parse("astar")


def test_min_tree_sample_values(sample_net, sample_store):
    tree = build_min_tree(sample_net, sample_store, "d", 22)
    assert tree.mins == {"s": 18, "e": 11, "r": 10, "q": 5, "f": 8, "d": 0}
    assert tree.get_min("s") == 18
    assert tree.get_min("d") == 0


def test_min_tree_next_hop_is_a_minimal_first_step(sample_net, sample_store):
    tree = build_min_tree(sample_net, sample_store, "d", 22)
    assert "d" not in tree.next_hop
    for nid, first in tree.next_hop.items():
        e = sample_net.edge(first)
        assert e.from_node == nid
        step = min_cost(sample_store.edge_weight(first))
        assert step + tree.mins[e.to_node] == tree.mins[nid]


def test_min_tree_budget_cutoff(sample_net, sample_store):
    tree = build_min_tree(sample_net, sample_store, "d", 15)
    assert "s" not in tree.mins  # 18 units of road is over the cap
    assert tree.get_min("s") is None
    assert tree.mins == {"e": 11, "r": 10, "q": 5, "f": 8, "d": 0}
    tight = build_min_tree(sample_net, sample_store, "d", 4)
    assert tight.mins == {"d": 0}


def test_min_tree_unknown_dest(sample_net, sample_store):
    with pytest.raises(ValueError):
        build_min_tree(sample_net, sample_store, "zz", 10)


def test_tree_bound_wraps_tree(sample_net, sample_store):
    h = make_heuristic(HeuristicKind.SP, sample_net, sample_store, "d", 22)
    assert isinstance(h, TreeBound)
    assert h.kind is HeuristicKind.SP
    assert h.get_min("q") == 5
    assert h.get_min("d") == 0


def test_straight_line_bound_formula(sample_net, sample_store):
    h = make_heuristic(HeuristicKind.BA, sample_net, sample_store, "d", 22)
    assert isinstance(h, StraightLineBound)
    assert h.kind is HeuristicKind.BA
    for nid in sample_net.node_ids:
        want = math.floor(
            sample_net.distance_m(nid, "d") / (sample_net.max_speed * sample_net.delta)
        )
        assert h.get_min(nid) == want
    assert h.get_min("d") == 0


def test_straight_line_bound_errors(sample_net):
    with pytest.raises(ValueError):
        StraightLineBound(sample_net, "zz")
    empty = Network([Node("a", 0, 0), Node("b", 0, 1)], [])
    with pytest.raises(ValueError):
        StraightLineBound(empty, "a")


def test_straight_line_never_exceeds_tree(sample_net, sample_store):
    tree = build_min_tree(sample_net, sample_store, "d", 10**6)
    line = StraightLineBound(sample_net, "d")
    for nid in sample_net.node_ids:
        assert line.get_min(nid) <= tree.get_min(nid)


def test_bounds_are_admissible_on_random_instances():
    # The tree is the exact minimum, and the straight line stays under
    # it, on generated networks as well.
    for seed in range(10):
        net, records = gen_instance(seed)
        store = build_store(net, records, min_support=10)
        rng = random.Random(seed)
        dest = rng.choice(list(net.node_ids))
        tree = build_min_tree(net, store, dest, 10**6)
        line = StraightLineBound(net, dest)
        for nid in net.node_ids:
            tmin = tree.get_min(nid)
            assert tmin is not None  # generated networks are strongly connected
            assert line.get_min(nid) <= tmin


def test_reach_indicator():
    assert reach_indicator(None, 100) == 0.0
    assert reach_indicator(5, 4) == 0.0
    assert reach_indicator(5, 5) == 1.0
    assert reach_indicator(5, 6) == 1.0
    assert reach_indicator(0, 0) == 1.0


def test_arrival_prob_goldens(pace_model):
    from spotar.network import Path
    from spotar.weights import path_cost

    c14 = path_cost(pace_model, Path(("e1", "e4")))  # at node q, min 5 to go
    assert arrival_prob(c14, 5, 22) == pytest.approx(0.8, abs=1e-9)
    c26 = path_cost(pace_model, Path(("e2", "e6")))
    assert arrival_prob(c26, 5, 22) == pytest.approx(0.7, abs=1e-9)
    c1 = path_cost(pace_model, Path(("e1",)))  # at node e, min 11 to go
    assert arrival_prob(c1, 11, 22) == pytest.approx(1.0, abs=1e-9)


def test_arrival_prob_unreachable_and_exhausted():
    h = Histogram({5: 1.0})
    assert arrival_prob(h, None, 100) == 0.0
    assert arrival_prob(h, 10, 12) == 0.0  # 5 spent, 10 to go, 12 allowed
    assert arrival_prob(h, 7, 12) == 1.0


def test_arrival_prob_equals_indicator_sum():
    rng = random.Random(513)
    for _ in range(200):
        h, _ = rand_hist(rng)
        node_min = rng.choice([None, 0, rng.randint(1, 20)])
        budget = rng.randint(1, 40)
        want = math.fsum(
            p * reach_indicator(node_min, budget - t) for t, p in h.items()
        )
        assert arrival_prob(h, node_min, budget) == pytest.approx(want, abs=1e-12)
