"""Reliable routing under travel-time uncertainty.

Learns per-edge and per-sub-path travel-time distributions from
trajectories, then finds the route that maximizes the probability of
arriving within a time budget.
"""

from .dist import Histogram, JointDist, convolve, dominates, joint_product, marginal, min_cost, to_cost
from .heuristic import HeuristicKind, arrival_prob, build_min_tree, make_heuristic
from .network import Edge, Network, Node, Path, Query, load_network, make_path, save_network
from .oracle import exact_spotar, gen_instance, mc_arrival_prob, verify_instances
from .solver import SolveResult, solve
from .weights import (
    CostModel,
    Mode,
    TrajectoryRecord,
    WeightStore,
    build_store,
    coarsest_combination,
    load_store,
    load_trajectories,
    path_cost,
    path_joint,
    save_store,
)

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "Edge",
    "HeuristicKind",
    "Histogram",
    "JointDist",
    "Mode",
    "Network",
    "Node",
    "Path",
    "Query",
    "SolveResult",
    "TrajectoryRecord",
    "WeightStore",
    "arrival_prob",
    "build_min_tree",
    "build_store",
    "coarsest_combination",
    "convolve",
    "dominates",
    "exact_spotar",
    "gen_instance",
    "joint_product",
    "load_network",
    "load_store",
    "load_trajectories",
    "make_heuristic",
    "make_path",
    "marginal",
    "mc_arrival_prob",
    "min_cost",
    "path_cost",
    "path_joint",
    "save_network",
    "save_store",
    "solve",
    "to_cost",
    "verify_instances",
    "__version__",
]
