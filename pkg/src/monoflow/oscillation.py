"""Monotone-interval scanning and the non-oscillation verdict.

A sampled trajectory has an increasing interval [a, b] when x(a) < x(b) in
the cone order and a decreasing one when x(a) > x(b).  The scanner
classifies endpoint pairs over the sample grid (all pairs up to a budget,
then a deterministic stride subsample), the verdict reports whether both
kinds coexist, and ``steepen`` extracts the left-trimmed sub-interval whose
left endpoint is the only sample at-or-below the start.  A discrete-orbit
variant scans integer segments the same way.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .cones import Cone, OrderRelation, relation_from_slacks
from .errors import DegenerateInterval, DimensionMismatch
from .integrate import Trajectory

DEFAULT_MAX_PAIRS = 4_000_000
DEFAULT_ORDER_TOL = 1e-6


class IntervalKind(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


class VerdictStatus(enum.Enum):
    NO_INTERVALS = "no_intervals"
    INCREASING_ONLY = "increasing_only"
    DECREASING_ONLY = "decreasing_only"
    OSCILLATING = "oscillating"


@dataclass(frozen=True)
class MonotoneInterval:
    a: float
    b: float
    kind: IntervalKind
    strength: OrderRelation
    steeply: bool = False

    def overlaps(self, other: "MonotoneInterval") -> bool:
        return not (self.b <= other.a or other.b <= self.a)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "kind": self.kind.value,
                "strength": self.strength.value, "steeply": self.steeply}


@dataclass(frozen=True)
class OscillationVerdict:
    status: VerdictStatus
    witness_increasing: MonotoneInterval | None = None
    witness_decreasing: MonotoneInterval | None = None
    disjoint: bool = False

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "increasing": self.witness_increasing.to_json()
                          if self.witness_increasing else None,
            "decreasing": self.witness_decreasing.to_json()
                          if self.witness_decreasing else None,
            "disjoint": self.disjoint,
        }


@dataclass(frozen=True)
class DiscreteOrbit:
    """Consecutive iterates T^m z .. T^n z of a map T."""

    states: np.ndarray
    start_index: int = 0
    map_meta: str = ""

    def __post_init__(self):
        if len(self.states) < 2:
            raise DimensionMismatch("orbit needs at least two iterates")


def _pair_indices(m: int, max_pairs: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i < j) to examine: all of them while m^2 <= max_pairs,
    otherwise a stride subsample co-prime to the pair count (deterministic,
    covers short and long gaps alike)."""
    total = m * (m - 1) // 2
    if m * m <= max_pairs:
        idx = np.arange(total)
    else:
        take = max(1, max_pairs)
        stride = max(1, total // take)
        while np.gcd(stride, total) != 1:
            stride += 1
        idx = (np.arange(min(take, total)) * stride) % total
    # decode linear index into (i, j), i < j, lexicographic by i
    # count of pairs with first index < i is i*m - i*(i+1)/2
    i = np.floor((2 * m - 1 - np.sqrt((2 * m - 1) ** 2 - 8 * idx)) / 2).astype(np.int64)
    i = np.clip(i, 0, m - 2)
    # guard the float decode against off-by-one at block boundaries
    base = i * m - i * (i + 1) // 2
    too_low = idx < base
    i[too_low] -= 1
    base = i * m - i * (i + 1) // 2
    too_high = idx - base >= m - 1 - i
    i[too_high] += 1
    base = i * m - i * (i + 1) // 2
    j = (idx - base) + i + 1
    return i.astype(np.intp), j.astype(np.intp)


def _scan_pairs(times, states, cone: Cone, tol: float, max_pairs: int):
    """Vectorized pair classification; builds objects only for ordered pairs."""
    ii, jj = _pair_indices(len(times), max_pairs)
    d = states[jj] - states[ii]
    slacks = cone.slacks(d)
    absmax = np.abs(d).max(axis=1)
    nonzero = np.linalg.norm(d, axis=1) > tol
    smin = slacks.min(axis=1)
    smax = slacks.max(axis=1)
    inc_int = nonzero & (smin > tol)
    inc_str = nonzero & ~inc_int & (smin >= -tol) & (absmax > tol)
    dec_int = nonzero & (smax < -tol)
    dec_str = nonzero & ~dec_int & (smax <= tol) & (absmax > tol)
    out = []
    for mask, kind, strength in (
            (inc_int, IntervalKind.INCREASING, OrderRelation.STRICT_INTERIOR),
            (inc_str, IntervalKind.INCREASING, OrderRelation.STRICT),
            (dec_int, IntervalKind.DECREASING, OrderRelation.STRICT_INTERIOR),
            (dec_str, IntervalKind.DECREASING, OrderRelation.STRICT)):
        for k in np.nonzero(mask)[0]:
            out.append(MonotoneInterval(float(times[ii[k]]), float(times[jj[k]]),
                                        kind, strength))
    out.sort(key=lambda iv: (iv.a, iv.b))
    return out


def scan_monotone_intervals(traj: Trajectory, cone: Cone,
                            tol: float = DEFAULT_ORDER_TOL,
                            max_pairs: int = DEFAULT_MAX_PAIRS) -> list[MonotoneInterval]:
    """All detected monotone intervals between sample pairs, sorted by
    (a, b).  An empty list is a valid result."""
    return _scan_pairs(traj.times, traj.states, cone, tol, max_pairs)


def steepen(traj: Trajectory, cone: Cone, interval: MonotoneInterval,
            tol: float = DEFAULT_ORDER_TOL) -> MonotoneInterval:
    """Trim an increasing interval on the left to its steeply increasing
    tail [t0, b], t0 the last sample in [a, b] with x(t0) <= x(a).

    Raises DegenerateInterval when the trim consumes the whole interval on
    the grid (under-sampling, or the interval was not genuinely increasing).
    """
    if interval.kind is not IntervalKind.INCREASING:
        raise DegenerateInterval("only increasing intervals can be steepened")
    sel = np.nonzero((traj.times >= interval.a - 1e-15)
                     & (traj.times <= interval.b + 1e-15))[0]
    if sel.size < 2:
        raise DegenerateInterval("interval contains fewer than two samples")
    xa = traj.states[sel[0]]
    slacks = cone.slacks(traj.states[sel] - xa)
    below = slacks.max(axis=1) <= tol  # x(t) <= x(a) within tolerance
    below[0] = True
    t0_pos = int(np.nonzero(below)[0][-1])
    if t0_pos == sel.size - 1:
        raise DegenerateInterval("no strict increase left after trimming")
    t0_idx = sel[t0_pos]
    d = traj.states[sel[-1]] - traj.states[t0_idx]
    strength = relation_from_slacks(cone.slacks(d), float(np.abs(d).max()),
                                    float(np.linalg.norm(d)), tol)
    if strength not in (OrderRelation.STRICT, OrderRelation.STRICT_INTERIOR):
        raise DegenerateInterval("trimmed endpoints are no longer increasing")
    return MonotoneInterval(float(traj.times[t0_idx]), float(traj.times[sel[-1]]),
                            IntervalKind.INCREASING, strength, steeply=True)


def _verdict_from_intervals(intervals: list[MonotoneInterval]) -> OscillationVerdict:
    ups = [iv for iv in intervals if iv.kind is IntervalKind.INCREASING]
    downs = [iv for iv in intervals if iv.kind is IntervalKind.DECREASING]
    if ups and downs:
        # a disjoint pair exists iff the earliest-ending interval of one kind
        # ends at or before the latest-starting interval of the other
        up_end = min(ups, key=lambda iv: iv.b)
        down_start = max(downs, key=lambda iv: iv.a)
        if up_end.b <= down_start.a:
            return OscillationVerdict(VerdictStatus.OSCILLATING, up_end, down_start,
                                      disjoint=True)
        down_end = min(downs, key=lambda iv: iv.b)
        up_start = max(ups, key=lambda iv: iv.a)
        if down_end.b <= up_start.a:
            return OscillationVerdict(VerdictStatus.OSCILLATING, up_start, down_end,
                                      disjoint=True)
        return OscillationVerdict(VerdictStatus.OSCILLATING, ups[0], downs[0],
                                  disjoint=False)
    if ups:
        return OscillationVerdict(VerdictStatus.INCREASING_ONLY, ups[0], None)
    if downs:
        return OscillationVerdict(VerdictStatus.DECREASING_ONLY, None, downs[0])
    return OscillationVerdict(VerdictStatus.NO_INTERVALS)


def non_oscillation_verdict(traj: Trajectory, cone: Cone,
                            tol: float = DEFAULT_ORDER_TOL,
                            max_pairs: int = DEFAULT_MAX_PAIRS) -> OscillationVerdict:
    """Scan and report whether both interval kinds coexist, preferring a
    disjoint witness pair when one exists."""
    return _verdict_from_intervals(scan_monotone_intervals(traj, cone, tol, max_pairs))


def discrete_scan(orbit: DiscreteOrbit, cone: Cone,
                  tol: float = DEFAULT_ORDER_TOL,
                  max_pairs: int = DEFAULT_MAX_PAIRS) -> OscillationVerdict:
    """Non-oscillation verdict over integer segments of a map orbit."""
    states = np.asarray(orbit.states, dtype=float)
    indices = np.arange(orbit.start_index, orbit.start_index + len(states), dtype=float)
    return _verdict_from_intervals(_scan_pairs(indices, states, cone, tol, max_pairs))
