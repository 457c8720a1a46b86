"""Best-first search for the most reliable path under a time budget.

Labels are node-simple partial paths ordered by their priority: the
probability mass that could still make the budget if the rest of the
trip took only its minimum time (see :func:`spotar.heuristic.arrival_prob`).
Extensions that reach the destination immediately challenge the
incumbent answer and are never queued; an incumbent update purges every
queued label that can no longer beat it, and the search stops as soon
as the best queued priority cannot either.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from . import dist
from .dist import Histogram, min_cost
from .heuristic import HeuristicKind, arrival_prob, make_heuristic
from .network import Network, Path, Query
from .weights import CostModel, path_cost


@dataclass
class Label:
    """A partial path under consideration.

    ``cost`` is the path's travel-time distribution (it always equals
    ``to_cost(path_joint(model, path))``); ``r`` is the queue priority;
    ``visited`` holds every node on the path for cycle avoidance.
    """

    path: Path
    end_node: str
    cost: Histogram
    r: float
    visited: frozenset[str]
    alive: bool = True


@dataclass(frozen=True)
class SearchEvent:
    """One step of the search, for transcripts and debugging."""

    kind: str
    path: tuple[str, ...] | None = None
    edge: str | None = None
    value: float | None = None
    ik_min: int | None = None
    path_min: int | None = None
    node_min: int | None = None
    count: int | None = None


@dataclass(frozen=True)
class SolveResult:
    """Answer plus the counters the benchmark reports."""

    path: Path | None
    probability: float
    explored_edges: int
    expanded_labels: int
    wall_time_s: float
    transcript: tuple[SearchEvent, ...]
    explored_edge_ids: frozenset[str]


class SearchQueue:
    """Max-priority label queue with lazy deletion and per-node views."""

    def __init__(self) -> None:
        self._heap: list[tuple[float, int, tuple[str, ...], int, Label]] = []
        self._by_node: dict[str, list[Label]] = {}
        self._serial = 0
        self._alive = 0

    def push(self, label: Label) -> None:
        self._serial += 1
        heapq.heappush(self._heap, (-label.r, len(label.path.edges), label.path.edges, self._serial, label))
        self._by_node.setdefault(label.end_node, []).append(label)
        self._alive += 1

    def pop(self) -> Label | None:
        """Remove and return the highest-priority live label, if any.

        Ties break toward shorter paths, then lexicographic edge ids,
        then insertion order, so runs are reproducible.
        """
        while self._heap:
            label = heapq.heappop(self._heap)[-1]
            if label.alive:
                label.alive = False
                self._alive -= 1
                return label
        return None

    def remove(self, label: Label) -> None:
        if label.alive:
            label.alive = False
            self._alive -= 1

    def labels_at(self, node_id: str) -> list[Label]:
        """Live labels ending at a node, oldest first."""
        found = [lab for lab in self._by_node.get(node_id, ()) if lab.alive]
        self._by_node[node_id] = found
        return found

    def purge_below(self, threshold: float) -> int:
        """Drop every live label whose priority is strictly below ``threshold``."""
        removed = 0
        for labels in self._by_node.values():
            for lab in labels:
                if lab.alive and lab.r < threshold:
                    lab.alive = False
                    self._alive -= 1
                    removed += 1
        return removed

    def __len__(self) -> int:
        return self._alive


def check_dominance(queue: SearchQueue, candidate: Label) -> tuple[str, list[Label]]:
    """Compare a candidate against queued labels at the same node.

    Returns ``("drop", [])`` when an existing label has the same cost or
    a first-order stochastically dominating one (the candidate can be
    discarded: with identical remaining choices it can never do
    better), ``("replace", dominated)`` when the candidate dominates
    existing labels (they are discarded instead), and ``("keep", [])``
    when the costs are incomparable.
    """
    dominated: list[Label] = []
    for other in queue.labels_at(candidate.end_node):
        if other.cost == candidate.cost or dist.dominates(other.cost, candidate.cost):
            return "drop", []
        if dist.dominates(candidate.cost, other.cost):
            dominated.append(other)
    if dominated:
        return "replace", dominated
    return "keep", []


def solve(net: Network, model: CostModel, heuristic: HeuristicKind, query: Query) -> SolveResult:
    """Find the path maximizing the chance of arriving within the budget.

    Returns a no-path result (probability 0) when nothing can make it.
    """
    t0 = time.perf_counter()
    for node_id in (query.source, query.dest):
        if not net.has_node(node_id):
            raise ValueError(f"unknown node {node_id!r}")
    store = model.store
    bound = make_heuristic(heuristic, net, store, query.dest, query.budget)
    events: list[SearchEvent] = []
    queue = SearchQueue()
    explored: set[str] = set()
    expanded = 0
    best_path: Path | None = None
    best_prob = 0.0

    def offer_incumbent(path: Path, cost: Histogram) -> None:
        nonlocal best_path, best_prob
        prob = cost.cdf(query.budget)
        events.append(SearchEvent("candidate", path=path.edges, value=prob))
        if prob > best_prob:
            best_path, best_prob = path, prob
            events.append(SearchEvent("incumbent", path=path.edges, value=prob))
            dropped = queue.purge_below(prob)
            events.append(SearchEvent("purge", value=prob, count=dropped))

    for e in net.out_edges(query.source):
        if e.to_node == query.source:
            events.append(SearchEvent("skip-cycle", path=(e.edge_id,), edge=e.edge_id))
            continue
        ik = min_cost(store.edge_weight(e.edge_id))
        node_min = bound.get_min(e.to_node)
        if node_min is None or ik + node_min > query.budget:
            events.append(
                SearchEvent("init-prune", edge=e.edge_id, ik_min=ik, node_min=node_min)
            )
            continue
        path = Path((e.edge_id,))
        cost = path_cost(model, path)
        explored.add(e.edge_id)
        if e.to_node == query.dest:
            offer_incumbent(path, cost)
            continue
        label = Label(
            path=path,
            end_node=e.to_node,
            cost=cost,
            r=arrival_prob(cost, node_min, query.budget),
            visited=frozenset((query.source, e.to_node)),
        )
        events.append(SearchEvent("push", path=path.edges, value=label.r))
        queue.push(label)

    while True:
        label = queue.pop()
        if label is None:
            break
        if best_path is not None and label.r <= best_prob:
            events.append(SearchEvent("break", path=label.path.edges, value=label.r))
            break
        expanded += 1
        events.append(SearchEvent("pop", path=label.path.edges, value=label.r))
        path_min = min_cost(label.cost)
        for e in net.out_edges(label.end_node):
            if e.to_node in label.visited:
                events.append(SearchEvent("skip-cycle", path=label.path.edges, edge=e.edge_id))
                continue
            ik = min_cost(store.edge_weight(e.edge_id))
            node_min = bound.get_min(e.to_node)
            if node_min is None or ik + path_min + node_min > query.budget:
                events.append(
                    SearchEvent(
                        "prune",
                        path=label.path.edges,
                        edge=e.edge_id,
                        ik_min=ik,
                        path_min=path_min,
                        node_min=node_min,
                    )
                )
                continue
            new_path = Path(label.path.edges + (e.edge_id,))
            cost = path_cost(model, new_path)
            explored.add(e.edge_id)
            if e.to_node == query.dest:
                offer_incumbent(new_path, cost)
                continue
            candidate = Label(
                path=new_path,
                end_node=e.to_node,
                cost=cost,
                r=arrival_prob(cost, node_min, query.budget),
                visited=label.visited | {e.to_node},
            )
            decision, dominated = check_dominance(queue, candidate)
            if decision == "drop":
                events.append(SearchEvent("dominated-drop", path=new_path.edges, value=candidate.r))
                continue
            for other in dominated:
                queue.remove(other)
                events.append(SearchEvent("dominated-out", path=other.path.edges))
            events.append(SearchEvent("push", path=new_path.edges, value=candidate.r))
            queue.push(candidate)

    return SolveResult(
        path=best_path,
        probability=best_prob,
        explored_edges=len(explored),
        expanded_labels=expanded,
        wall_time_s=time.perf_counter() - t0,
        transcript=tuple(events),
        explored_edge_ids=frozenset(explored),
    )
