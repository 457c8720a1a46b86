"""Discrete travel-time distributions on an integer time grid.

A :class:`Histogram` maps integer travel times (multiples of a fixed
resolution ``delta``, in seconds per unit) to probabilities.  A
:class:`JointDist` extends this to whole paths: each row assigns one
travel time to every edge of the path, so correlations between edges
are preserved.  All operations are exact dictionary arithmetic on
sparse supports; nothing is binned or interpolated after construction.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping, Sequence

MASS_TOL = 1e-9
_DOM_EPS = 1e-12


class DistributionError(ValueError):
    """Raised for invalid supports, masses, or mismatched resolutions."""


def _check_delta(delta: float) -> float:
    if not delta > 0.0:
        raise DistributionError(f"resolution must be positive, got {delta!r}")
    return float(delta)


def _check_time(t: object) -> int:
    if isinstance(t, bool) or not isinstance(t, int):
        raise DistributionError(f"travel time {t!r} is not an integer")
    if t < 1:
        raise DistributionError(f"travel time {t} is below the grid minimum of 1")
    return t


class Histogram:
    """Probability mass over integer travel times.

    Zero-probability entries are dropped at construction; negative
    probabilities and non-positive or non-integer times are rejected,
    and the total mass must be 1 within ``MASS_TOL``.
    """

    __slots__ = ("_entries", "delta")

    def __init__(self, entries: Mapping[int, float], delta: float = 1.0) -> None:
        cleaned: dict[int, float] = {}
        for t, p in entries.items():
            _check_time(t)
            if p < 0.0:
                raise DistributionError(f"negative probability {p} at time {t}")
            if p > 0.0:
                cleaned[t] = cleaned.get(t, 0.0) + p
        if not cleaned:
            raise DistributionError("histogram has no probability mass")
        mass = math.fsum(cleaned.values())
        if abs(mass - 1.0) > MASS_TOL:
            raise DistributionError(f"total mass {mass!r} differs from 1 by more than {MASS_TOL}")
        self._entries = dict(sorted(cleaned.items()))
        self.delta = _check_delta(delta)

    def items(self) -> Iterator[tuple[int, float]]:
        """Yield (time, probability) pairs in increasing time order."""
        return iter(self._entries.items())

    def times(self) -> tuple[int, ...]:
        return tuple(self._entries)

    def prob(self, t: int) -> float:
        return self._entries.get(t, 0.0)

    def as_dict(self) -> dict[int, float]:
        return dict(self._entries)

    def mass(self) -> float:
        return math.fsum(self._entries.values())

    def cdf(self, t: int) -> float:
        """Probability of a travel time of at most ``t`` units."""
        return math.fsum(p for tt, p in self._entries.items() if tt <= t)

    def mean(self) -> float:
        return math.fsum(t * p for t, p in self._entries.items())

    def approx_eq(self, other: Histogram, tol: float = MASS_TOL) -> bool:
        """True if both histograms agree pointwise within ``tol``."""
        if self.delta != other.delta:
            return False
        times = set(self._entries) | set(other._entries)
        return all(abs(self.prob(t) - other.prob(t)) <= tol for t in times)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Histogram):
            return NotImplemented
        return self.delta == other.delta and self._entries == other._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"Histogram({self._entries!r}, delta={self.delta!r})"


def point_mass(t: int, delta: float = 1.0) -> Histogram:
    """Histogram that assigns probability 1 to a single travel time."""
    return Histogram({t: 1.0}, delta)


def min_cost(h: Histogram) -> int:
    """Smallest travel time carrying positive probability."""
    return next(iter(h.times()))


def convolve(a: Histogram, b: Histogram) -> Histogram:
    """Distribution of the sum of two independent travel times."""
    if a.delta != b.delta:
        raise DistributionError(f"resolution mismatch: {a.delta} vs {b.delta}")
    out: dict[int, float] = {}
    for ta, pa in a.items():
        for tb, pb in b.items():
            t = ta + tb
            out[t] = out.get(t, 0.0) + pa * pb
    return Histogram(out, a.delta)


def dominates(a: Histogram, b: Histogram) -> bool:
    """First-order stochastic dominance of ``a`` over ``b``.

    True when the cumulative distribution of ``a`` is at least that of
    ``b`` at every time and strictly greater somewhere, i.e. ``a`` is
    never slower and sometimes faster.  Equal distributions do not
    dominate each other.
    """
    if a.delta != b.delta:
        raise DistributionError(f"resolution mismatch: {a.delta} vs {b.delta}")
    grid = sorted(set(a.times()) | set(b.times()))
    cum_a = 0.0
    cum_b = 0.0
    strict = False
    for t in grid:
        cum_a += a.prob(t)
        cum_b += b.prob(t)
        if cum_a < cum_b - _DOM_EPS:
            return False
        if cum_a > cum_b + _DOM_EPS:
            strict = True
    return strict


def format_histogram(h: Histogram) -> str:
    """Plain-text dump: one ``time:probability`` line per entry, sorted."""
    return "\n".join(f"{t}:{p:.12g}" for t, p in h.items())


class JointDist:
    """Joint probability mass over the per-edge travel times of a path.

    ``edges`` fixes the coordinate order; every row is a tuple with one
    integer travel time per edge.  Rows follow the same validity rules
    as histogram entries and must sum to 1 within ``MASS_TOL``.
    """

    __slots__ = ("_edges", "_rows", "delta")

    def __init__(
        self,
        edges: Sequence[str],
        rows: Mapping[tuple[int, ...], float],
        delta: float = 1.0,
    ) -> None:
        edge_tuple = tuple(edges)
        if not edge_tuple:
            raise DistributionError("joint distribution needs at least one edge")
        if len(set(edge_tuple)) != len(edge_tuple):
            raise DistributionError(f"duplicate edges in {edge_tuple!r}")
        cleaned: dict[tuple[int, ...], float] = {}
        for row, p in rows.items():
            row = tuple(row)
            if len(row) != len(edge_tuple):
                raise DistributionError(
                    f"row {row!r} has {len(row)} times for {len(edge_tuple)} edges"
                )
            for t in row:
                _check_time(t)
            if p < 0.0:
                raise DistributionError(f"negative probability {p} at row {row!r}")
            if p > 0.0:
                cleaned[row] = cleaned.get(row, 0.0) + p
        if not cleaned:
            raise DistributionError("joint distribution has no probability mass")
        mass = math.fsum(cleaned.values())
        if abs(mass - 1.0) > MASS_TOL:
            raise DistributionError(f"total mass {mass!r} differs from 1 by more than {MASS_TOL}")
        self._edges = edge_tuple
        self._rows = dict(sorted(cleaned.items()))
        self.delta = _check_delta(delta)

    @property
    def edges(self) -> tuple[str, ...]:
        return self._edges

    def rows(self) -> Iterator[tuple[tuple[int, ...], float]]:
        """Yield (time-vector, probability) pairs in row-sorted order."""
        return iter(self._rows.items())

    def row_prob(self, row: tuple[int, ...]) -> float:
        return self._rows.get(tuple(row), 0.0)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(self._rows)

    def mass(self) -> float:
        return math.fsum(self._rows.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointDist):
            return NotImplemented
        return (
            self.delta == other.delta
            and self._edges == other._edges
            and self._rows == other._rows
        )

    def __len__(self) -> int:
        return len(self._rows)

    def __repr__(self) -> str:
        return f"JointDist({self._edges!r}, {self._rows!r}, delta={self.delta!r})"


def from_edge(edge_id: str, h: Histogram) -> JointDist:
    """Lift a single edge's histogram to a one-edge joint distribution."""
    return JointDist((edge_id,), {(t,): p for t, p in h.items()}, h.delta)


def joint_product(a: JointDist, b: JointDist) -> JointDist:
    """Independent combination of two joints over disjoint edge sets.

    The result covers ``a.edges + b.edges`` with row probabilities
    multiplied pairwise; correlation across the boundary is assumed
    absent (that is the point of the product).
    """
    if a.delta != b.delta:
        raise DistributionError(f"resolution mismatch: {a.delta} vs {b.delta}")
    overlap = set(a.edges) & set(b.edges)
    if overlap:
        raise DistributionError(f"edge sets overlap: {sorted(overlap)!r}")
    out: dict[tuple[int, ...], float] = {}
    for row_a, pa in a.rows():
        for row_b, pb in b.rows():
            out[row_a + row_b] = pa * pb
    return JointDist(a.edges + b.edges, out, a.delta)


def marginal(j: JointDist, sub_edges: Sequence[str]) -> JointDist:
    """Marginal of a joint on a contiguous run of its edges."""
    sub = tuple(sub_edges)
    if not sub:
        raise DistributionError("marginal needs at least one edge")
    try:
        start = j.edges.index(sub[0])
    except ValueError:
        raise DistributionError(f"{sub[0]!r} is not an edge of {j.edges!r}") from None
    if j.edges[start : start + len(sub)] != sub:
        raise DistributionError(f"{sub!r} is not a contiguous run of {j.edges!r}")
    out: dict[tuple[int, ...], float] = {}
    for row, p in j.rows():
        key = row[start : start + len(sub)]
        out[key] = out.get(key, 0.0) + p
    return JointDist(sub, out, j.delta)


def to_cost(j: JointDist) -> Histogram:
    """Collapse a joint to the distribution of total path travel time."""
    out: dict[int, float] = {}
    for row, p in j.rows():
        t = sum(row)
        out[t] = out.get(t, 0.0) + p
    return Histogram(out, j.delta)
