"""Travel-time weight stores learned from trajectories.

A weight store holds one histogram per edge plus, optionally, joint
distributions for frequently traversed sub-paths.  A cost model wraps a
store with an evaluation mode: ``EDGE`` treats edges as independent and
convolves their histograms; ``PACE`` covers a path with the longest
stored sub-paths available and fuses them on their overlaps, preserving
the correlations the store has evidence for.

Raw trajectory times are in seconds; they are snapped to the network's
time grid (``delta`` seconds per unit, round half up, minimum 1 unit)
when loaded.
"""

from __future__ import annotations

import enum
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .dist import (
    Histogram,
    JointDist,
    convolve,
    from_edge,
    marginal,
    point_mass,
)
from .network import Network, Path, PathError, make_path

STORE_FORMAT = "spotar-weights"
STORE_VERSION = 1
_FUSE_TOL = 1e-12


class StoreError(ValueError):
    """Raised for lookups or constructions that violate store rules."""


class StoreFormatError(StoreError):
    """Raised when a serialized store fails to parse or validate."""


class InconsistentWeightsError(StoreError):
    """Raised when overlapping stored weights share no probability mass."""


class TrajectoryFormatError(ValueError):
    """Raised when a trajectory file fails to parse or validate."""


class Mode(enum.Enum):
    """How path costs are assembled from stored weights."""

    EDGE = "edge"
    PACE = "pace"

    @classmethod
    def parse(cls, text: str) -> Mode:
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown mode {text!r}; expected 'edge' or 'pace'") from None


def grid_seconds(seconds: float, delta: float) -> int:
    """Snap a duration in seconds to the time grid (half-up, minimum 1)."""
    if seconds < 0:
        raise ValueError(f"negative duration {seconds!r}")
    return max(1, math.floor(seconds / delta + 0.5))


@dataclass(frozen=True)
class TrajectoryRecord:
    """One observed traversal pattern: a path, per-edge times in units,
    and how many trips showed exactly this pattern."""

    path: Path
    times: tuple[int, ...]
    count: int = 1

    def __post_init__(self) -> None:
        if len(self.times) != len(self.path.edges):
            raise ValueError(
                f"{len(self.times)} times for {len(self.path.edges)} edges"
            )
        for t in self.times:
            if isinstance(t, bool) or not isinstance(t, int) or t < 1:
                raise ValueError(f"travel time {t!r} is not a positive integer")
        if isinstance(self.count, bool) or not isinstance(self.count, int) or self.count < 1:
            raise ValueError(f"count {self.count!r} is not a positive integer")


def load_trajectories(net: Network, path: str) -> list[TrajectoryRecord]:
    """Read trajectories from text: ``count,edge:seconds;edge:seconds``.

    One record per line; blank lines and ``#`` comments are skipped.
    Edges must form a valid path in ``net``; times are snapped to the
    network's grid.  Errors carry 1-based line numbers.
    """
    records: list[TrajectoryRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, sep, rest = line.partition(",")
            if not sep:
                raise TrajectoryFormatError(f"line {lineno}: expected 'count,edge:seconds;...'")
            try:
                count = int(head)
                edge_ids: list[str] = []
                units: list[int] = []
                for step in rest.split(";"):
                    eid, sep2, sec = step.partition(":")
                    if not sep2:
                        raise ValueError(f"step {step!r} is missing ':'")
                    edge_ids.append(eid.strip())
                    units.append(grid_seconds(float(sec), net.delta))
                record = TrajectoryRecord(make_path(net, edge_ids), tuple(units), count)
            except (ValueError, PathError) as exc:
                raise TrajectoryFormatError(f"line {lineno}: {exc}") from None
            records.append(record)
    return records


class WeightStore:
    """Edge histograms plus joint weights for stored sub-paths."""

    __slots__ = (
        "delta",
        "min_support",
        "max_unit_len",
        "mode",
        "fallback_edges",
        "_edge_weights",
        "_path_weights",
        "_by_first",
    )

    def __init__(
        self,
        *,
        delta: float,
        min_support: int,
        max_unit_len: int,
        mode: Mode,
        edge_weights: Mapping[str, Histogram],
        path_weights: Mapping[tuple[str, ...], JointDist],
        fallback_edges: Iterable[str] = (),
    ) -> None:
        self.delta = float(delta)
        self.min_support = int(min_support)
        self.max_unit_len = int(max_unit_len)
        self.mode = mode
        self._edge_weights = dict(sorted(edge_weights.items()))
        self._path_weights = dict(sorted(path_weights.items()))
        self.fallback_edges = frozenset(fallback_edges)
        for eid, h in self._edge_weights.items():
            if h.delta != self.delta:
                raise StoreError(f"edge {eid!r} has resolution {h.delta}, store has {self.delta}")
        for key, j in self._path_weights.items():
            if j.edges != key:
                raise StoreError(f"stored weight keyed {key!r} covers {j.edges!r}")
            if len(key) < 2:
                raise StoreError(f"stored path weight {key!r} must span at least 2 edges")
            if j.delta != self.delta:
                raise StoreError(f"stored weight {key!r} has resolution {j.delta}")
            for i, eid in enumerate(key):
                h = self._edge_weights.get(eid)
                if h is None:
                    raise StoreError(f"stored weight {key!r} uses edge {eid!r} with no weight")
                support = set(h.times())
                if any(row[i] not in support for row, _ in j.rows()):
                    raise StoreError(
                        f"stored weight {key!r} has times for {eid!r} outside its edge weight"
                    )
        by_first: dict[str, list[tuple[str, ...]]] = {}
        for key in self._path_weights:
            by_first.setdefault(key[0], []).append(key)
        self._by_first = {eid: tuple(sorted(keys)) for eid, keys in by_first.items()}

    def edge_weight(self, edge_id: str) -> Histogram:
        try:
            return self._edge_weights[edge_id]
        except KeyError:
            raise StoreError(f"no weight for edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_weights

    def edge_ids(self) -> tuple[str, ...]:
        return tuple(self._edge_weights)

    def path_weight(self, edges: Sequence[str]) -> JointDist:
        try:
            return self._path_weights[tuple(edges)]
        except KeyError:
            raise StoreError(f"no stored weight for path {tuple(edges)!r}") from None

    def has_path_weight(self, edges: Sequence[str]) -> bool:
        return tuple(edges) in self._path_weights

    def stored_paths(self) -> tuple[tuple[str, ...], ...]:
        return tuple(self._path_weights)

    def units_starting_with(self, edge_id: str) -> tuple[tuple[str, ...], ...]:
        """Stored path keys whose first edge is ``edge_id``."""
        return self._by_first.get(edge_id, ())

    @property
    def max_stored_len(self) -> int:
        """Edge span of the longest stored path weight (1 if none)."""
        return max((len(k) for k in self._path_weights), default=1)

    def __repr__(self) -> str:
        return (
            f"WeightStore({len(self._edge_weights)} edges, "
            f"{len(self._path_weights)} stored paths, mode={self.mode.value})"
        )


def build_store(
    net: Network,
    records: Iterable[TrajectoryRecord],
    *,
    min_support: int = 10,
    mode: Mode = Mode.PACE,
    max_unit_len: int = 8,
) -> WeightStore:
    """Aggregate trajectories into a weight store.

    Every edge observation feeds that edge's histogram.  In ``PACE``
    mode, every contiguous window of 2..``max_unit_len`` edges inside a
    trajectory feeds a joint candidate; candidates traversed end-to-end
    by at least ``min_support`` trips are kept.  Edges with no
    observations at all fall back to a point mass at their speed-limit
    travel time.
    """
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    if max_unit_len < 2:
        raise ValueError(f"max_unit_len must be >= 2, got {max_unit_len}")
    per_edge: dict[str, dict[int, int]] = {}
    per_path: dict[tuple[str, ...], dict[tuple[int, ...], int]] = {}
    for rec in records:
        for eid, t in zip(rec.path.edges, rec.times):
            if not net.has_edge(eid):
                raise StoreError(f"trajectory uses unknown edge {eid!r}")
            per_edge.setdefault(eid, {}).setdefault(t, 0)
            per_edge[eid][t] += rec.count
        if mode is Mode.PACE:
            n = len(rec.path.edges)
            for span in range(2, min(n, max_unit_len) + 1):
                for s in range(n - span + 1):
                    key = rec.path.edges[s : s + span]
                    row = rec.times[s : s + span]
                    per_path.setdefault(key, {}).setdefault(row, 0)
                    per_path[key][row] += rec.count
    edge_weights: dict[str, Histogram] = {}
    fallback: set[str] = set()
    for eid in net.edge_ids:
        counts = per_edge.get(eid)
        if counts:
            total = sum(counts.values())
            edge_weights[eid] = Histogram({t: c / total for t, c in counts.items()}, net.delta)
        else:
            fallback.add(eid)
            e = net.edge(eid)
            edge_weights[eid] = point_mass(grid_seconds(e.length / e.speed_limit, net.delta), net.delta)
    path_weights: dict[tuple[str, ...], JointDist] = {}
    for key, counts in per_path.items():
        total = sum(counts.values())
        if total >= min_support:
            path_weights[key] = JointDist(
                key, {row: c / total for row, c in counts.items()}, net.delta
            )
    return WeightStore(
        delta=net.delta,
        min_support=min_support,
        max_unit_len=max_unit_len,
        mode=mode,
        edge_weights=edge_weights,
        path_weights=path_weights,
        fallback_edges=fallback,
    )


def save_store(store: WeightStore, path: str) -> None:
    """Write a store as deterministic JSON (sorted keys, fixed layout)."""
    doc = {
        "format": STORE_FORMAT,
        "version": STORE_VERSION,
        "delta": store.delta,
        "min_support": store.min_support,
        "max_unit_len": store.max_unit_len,
        "mode": store.mode.value,
        "fallback_edges": sorted(store.fallback_edges),
        "edge_weights": {
            eid: [[t, p] for t, p in store.edge_weight(eid).items()]
            for eid in store.edge_ids()
        },
        "path_weights": [
            {
                "edges": list(key),
                "rows": [[list(row), p] for row, p in store.path_weight(key).rows()],
            }
            for key in store.stored_paths()
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_store(path: str) -> WeightStore:
    """Read a store written by :func:`save_store`, validating as it goes."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StoreFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != STORE_FORMAT:
        raise StoreFormatError("missing or wrong format marker")
    if doc.get("version") != STORE_VERSION:
        raise StoreFormatError(f"unsupported version {doc.get('version')!r}")
    try:
        delta = float(doc["delta"])
        mode = Mode.parse(doc["mode"])
        edge_weights = {
            eid: Histogram({int(t): float(p) for t, p in pairs}, delta)
            for eid, pairs in doc["edge_weights"].items()
        }
        path_weights = {}
        for entry in doc["path_weights"]:
            key = tuple(entry["edges"])
            rows = {tuple(int(t) for t in row): float(p) for row, p in entry["rows"]}
            path_weights[key] = JointDist(key, rows, delta)
        return WeightStore(
            delta=delta,
            min_support=int(doc["min_support"]),
            max_unit_len=int(doc["max_unit_len"]),
            mode=mode,
            edge_weights=edge_weights,
            path_weights=path_weights,
            fallback_edges=doc["fallback_edges"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StoreFormatError):
            raise
        raise StoreFormatError(f"malformed store: {exc}") from None


@dataclass(frozen=True)
class CostModel:
    """A weight store plus the mode used to evaluate path costs."""

    store: WeightStore
    mode: Mode

    def __post_init__(self) -> None:
        if self.mode is Mode.PACE and self.store.mode is not Mode.PACE:
            raise StoreError("store was built without path weights; cannot evaluate in pace mode")


def _cover(store: WeightStore, edges: tuple[str, ...]) -> list[tuple[int, tuple[str, ...]]]:
    """Greedy left-to-right cover of ``edges`` by stored units.

    Returns (start index, unit edges) pairs.  Each step considers stored
    units that start inside the covered prefix (strictly after the
    previous unit's start) and extend coverage, picking the one reaching
    furthest, breaking ties toward the larger overlap; single edges fill
    in when no stored unit helps.
    """
    n = len(edges)
    units: list[tuple[int, tuple[str, ...]]] = []
    covered = 0
    prev_start = -1
    while covered < n:
        best: tuple[int, int] | None = None
        best_unit: tuple[int, tuple[str, ...]] | None = None
        for s in range(prev_start + 1, covered + 1):
            for cand in store.units_starting_with(edges[s]):
                end = s + len(cand)
                if end <= covered or end > n:
                    continue
                if edges[s:end] != cand:
                    continue
                key = (end, covered - s)
                if best is None or key > best:
                    best = key
                    best_unit = (s, cand)
        if best_unit is None:
            best_unit = (covered, (edges[covered],))
        units.append(best_unit)
        prev_start = best_unit[0]
        covered = best_unit[0] + len(best_unit[1])
    return units


def coarsest_combination(store: WeightStore, path: Path) -> list[Path]:
    """The covering sub-paths used to evaluate ``path`` against a store."""
    return [Path(unit) for _, unit in _cover(store, path.edges)]


def _unit_joint(store: WeightStore, unit: tuple[str, ...]) -> JointDist:
    if len(unit) == 1:
        return from_edge(unit[0], store.edge_weight(unit[0]))
    return store.path_weight(unit)


def path_joint(model: CostModel, path: Path) -> JointDist:
    """Explicit joint distribution of a path's per-edge travel times.

    ``EDGE`` mode multiplies independent edge histograms.  ``PACE`` mode
    fuses the covering units: consecutive units are joined on their
    shared edges by conditioning the right unit on the overlap times,
    then the result is renormalized.  Overlapping units that agree on no
    overlap time raise :class:`InconsistentWeightsError`.

    The row count is the product of the units' row counts, so this is
    for inspection and small paths; use :func:`path_cost` for search.
    """
    store = model.store
    if model.mode is Mode.EDGE:
        units = [(i, (eid,)) for i, eid in enumerate(path.edges)]
    else:
        units = _cover(store, path.edges)
    acc: dict[tuple[int, ...], float] = {}
    first = _unit_joint(store, units[0][1])
    acc = first.as_dict()
    covered = len(units[0][1])
    for s, unit in units[1:]:
        uj = _unit_joint(store, unit)
        o = covered - s
        new: dict[tuple[int, ...], float] = {}
        if o == 0:
            for row, p in acc.items():
                for urow, up in uj.rows():
                    new[row + urow] = new.get(row + urow, 0.0) + p * up
        else:
            overlap_mass = marginal(uj, unit[:o]).as_dict()
            for row, p in acc.items():
                key = row[len(row) - o :]
                denom = overlap_mass.get(key)
                if denom is None:
                    continue
                for urow, up in uj.rows():
                    if urow[:o] != key:
                        continue
                    full = row + urow[o:]
                    new[full] = new.get(full, 0.0) + p * up / denom
            total = math.fsum(new.values())
            if total <= _FUSE_TOL:
                raise InconsistentWeightsError(
                    f"overlapping weights for {unit!r} share no mass with the prefix"
                )
            if abs(total - 1.0) > _FUSE_TOL:
                new = {row: p / total for row, p in new.items()}
        acc = new
        covered = s + len(unit)
    return JointDist(path.edges, acc, store.delta)


def path_cost(model: CostModel, path: Path) -> Histogram:
    """Distribution of a path's total travel time.

    Matches ``to_cost(path_joint(model, path))`` but never materializes
    the joint: the fold carries (elapsed time, recent per-edge times)
    states where the remembered window is one less than the longest
    stored unit, which is all a future overlap can reach back to.
    """
    store = model.store
    if model.mode is Mode.EDGE:
        cost = store.edge_weight(path.edges[0])
        for eid in path.edges[1:]:
            cost = convolve(cost, store.edge_weight(eid))
        return cost
    units = _cover(store, path.edges)
    window = store.max_stored_len - 1
    state: dict[tuple[int, tuple[int, ...]], float] = {}
    first = _unit_joint(store, units[0][1])
    for row, p in first.rows():
        tail = row[max(0, len(row) - window) :] if window else ()
        state[(sum(row) - sum(tail), tail)] = state.get((sum(row) - sum(tail), tail), 0.0) + p
    covered = len(units[0][1])
    for s, unit in units[1:]:
        uj = _unit_joint(store, unit)
        o = covered - s
        overlap_mass = marginal(uj, unit[:o]).as_dict() if o else {}
        new: dict[tuple[int, tuple[int, ...]], float] = {}
        for (done, tail), p in state.items():
            if o:
                key = tail[len(tail) - o :]
                denom = overlap_mass.get(key)
                if denom is None:
                    continue
            for urow, up in uj.rows():
                if o:
                    if urow[:o] != key:
                        continue
                    q = p * up / denom
                else:
                    q = p * up
                grown = tail + urow[o:]
                ntail = grown[max(0, len(grown) - window) :] if window else ()
                ndone = done + sum(grown) - sum(ntail)
                k = (ndone, ntail)
                new[k] = new.get(k, 0.0) + q
        total = math.fsum(new.values())
        if total <= _FUSE_TOL:
            raise InconsistentWeightsError(
                f"overlapping weights for {unit!r} share no mass with the prefix"
            )
        if abs(total - 1.0) > _FUSE_TOL:
            new = {k: p / total for k, p in new.items()}
        state = new
        covered = s + len(unit)
    out: dict[int, float] = {}
    for (done, tail), p in state.items():
        t = done + sum(tail)
        out[t] = out.get(t, 0.0) + p
    return Histogram(out, store.delta)


def extend_joint(model: CostModel, base: JointDist, edge_id: str) -> JointDist:
    """Joint for a path grown by one edge at the end.

    ``base`` must be the joint of a valid path and ``edge_id`` must
    extend it (adjacency is the caller's responsibility; reuse of an
    edge is rejected here).  Growing a path can change which stored
    units cover it, so the result is recomputed from the store rather
    than patched onto ``base``.
    """
    if edge_id in base.edges:
        raise PathError(f"edge {edge_id!r} already on the path")
    return path_joint(model, Path(base.edges + (edge_id,)))
