"""Compact subsets of the real line, their gaps and gap sums.

A :class:`CompactRealSet` is a finite union of disjoint closed intervals.
Points are degenerate intervals.  Internally a set is a left-to-right
sequence of *components*: explicit interval arrays, depth-truncated Cantor
blocks and equispaced point runs.  The structured components keep an exact
gap census even when the set has far too many intervals to list
(a depth-40 Cantor set has 2**40 of them).

The gap census is the central object here: the degree-``alpha`` gap sum, the
measure of parallel sets, Minkowski profiles and the box-index estimate are
all functions of the multiset of gap lengths.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CritfieldError, EmptySetError, ResolutionError

__all__ = [
    "CompactRealSet",
    "GapSequence",
    "TailReport",
    "BTReport",
    "MinkowskiProfile",
    "IndexFit",
    "gaps",
    "gap_sum",
    "is_bt",
    "parallel_measure",
    "parallel_measure_direct",
    "minkowski_profile",
    "bt_index_estimate",
    "split_bounded_gapsum",
    "holder_image_bound",
]

#: Run the interval-union oracle next to the gap-census formula in
#: :func:`parallel_measure`.  Off unless ``CRITFIELD_DEBUG`` is set.
DEBUG = bool(os.environ.get("CRITFIELD_DEBUG"))

#: Largest number of intervals we are willing to list explicitly.
MAX_MATERIALIZE = 1 << 24


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------


class _Intervals:
    """Explicit sorted, disjoint, non-touching closed intervals."""

    kind = "intervals"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)

    @property
    def min(self):
        return float(self.lo[0])

    @property
    def max(self):
        return float(self.hi[-1])

    @property
    def measure(self):
        return float(np.sum(self.hi - self.lo))

    @property
    def n_intervals(self):
        return int(self.lo.size)

    @property
    def is_null(self):
        return bool(np.all(self.lo == self.hi))

    def census(self):
        lengths = self.lo[1:] - self.hi[:-1]
        return lengths, np.ones_like(lengths)

    def materialize(self):
        return self.lo, self.hi

    def restrict(self, a, b):
        keep = (self.hi >= a) & (self.lo <= b)
        if not keep.any():
            return []
        lo = np.maximum(self.lo[keep], a)
        hi = np.minimum(self.hi[keep], b)
        return [_Intervals(lo, hi)]

    def gap_moment(self, alpha, p):
        lengths = self.lo[1:] - self.hi[:-1]
        return float(np.sum(lengths**alpha * self.hi[:-1] ** p))

    def to_json(self):
        return {"kind": "intervals", "intervals": np.stack([self.lo, self.hi], 1).tolist()}


class _Cantor:
    """``left + scale * C_depth(alpha)``: the depth-truncated middle-gap Cantor set.

    At level ``m`` each of the ``2**m`` intervals of length ``alpha**m`` loses
    its open middle part of proportional length ``1 - 2*alpha``.
    """

    kind = "cantor"

    def __init__(self, left, scale, alpha, depth):
        self.left = float(left)
        self.scale = float(scale)
        self.alpha = float(alpha)
        self.depth = int(depth)

    @property
    def min(self):
        return self.left

    @property
    def max(self):
        return self.left + self.scale

    @property
    def measure(self):
        return self.scale * (2.0 * self.alpha) ** self.depth

    @property
    def n_intervals(self):
        return 1 << self.depth

    is_null = False

    def census(self):
        m = np.arange(self.depth, dtype=float)
        lengths = self.scale * (1.0 - 2.0 * self.alpha) * self.alpha**m
        return lengths, 2.0**m

    def materialize(self):
        if self.depth > 30 or self.n_intervals > MAX_MATERIALIZE:
            raise ResolutionError(
                f"cantor block of depth {self.depth} has too many intervals to list"
            )
        lefts = np.zeros(1)
        a = self.alpha
        for m in range(self.depth):
            lefts = np.stack([lefts, lefts + (1.0 - a) * a**m], axis=1).ravel()
        lo = self.left + self.scale * lefts
        return lo, lo + self.scale * a**self.depth

    def _children(self):
        s = self.scale * self.alpha
        return (
            _Cantor(self.left, s, self.alpha, self.depth - 1),
            _Cantor(self.left + self.scale - s, s, self.alpha, self.depth - 1),
        )

    def restrict(self, a, b):
        if self.max < a or self.min > b:
            return []
        if a <= self.min and self.max <= b:
            return [self]
        if self.depth == 0:
            return [_Intervals([max(self.min, a)], [min(self.max, b)])]
        left, right = self._children()
        return left.restrict(a, b) + right.restrict(a, b)

    def gap_moment(self, alpha, p):
        lo, hi = self.materialize()
        return _Intervals(lo, hi).gap_moment(alpha, p)

    def to_json(self):
        return {
            "kind": "cantor",
            "left": self.left,
            "scale": self.scale,
            "alpha": self.alpha,
            "depth": self.depth,
        }


class _Run:
    """Equispaced points ``start + i*step`` for ``i = 0..count-1``."""

    kind = "run"

    def __init__(self, start, step, count):
        self.start = float(start)
        self.step = float(step)
        self.count = int(count)

    @property
    def min(self):
        return self.start

    @property
    def max(self):
        return self.start + (self.count - 1) * self.step

    measure = 0.0
    is_null = True

    @property
    def n_intervals(self):
        return self.count

    def census(self):
        if self.count < 2:
            return np.empty(0), np.empty(0)
        return np.array([self.step]), np.array([float(self.count - 1)])

    def materialize(self):
        if self.count > MAX_MATERIALIZE:
            raise ResolutionError(f"point run of {self.count} points is too large to list")
        pts = self.start + self.step * np.arange(self.count)
        return pts, pts.copy()

    def restrict(self, a, b):
        i0 = max(0, math.ceil((a - self.start) / self.step - 1e-9))
        i1 = min(self.count - 1, math.floor((b - self.start) / self.step + 1e-9))
        if i1 < i0:
            return []
        return [_Run(self.start + i0 * self.step, self.step, i1 - i0 + 1)]

    def gap_moment(self, alpha, p):
        n = self.count - 1
        if n <= 0:
            return 0.0
        if n <= 1_000_000:
            u = self.start + self.step * np.arange(n)
            return float(np.sum(self.step**alpha * u**p))
        # sum_{i<n} (q + i)^p via the Hurwitz zeta function
        import mpmath

        with mpmath.workdps(40):
            q = mpmath.mpf(self.start) / mpmath.mpf(self.step)
            s = mpmath.zeta(-p, q) - mpmath.zeta(-p, q + n)
            return float(mpmath.mpf(self.step) ** (alpha + p) * s)

    def to_json(self):
        return {"kind": "run", "start": self.start, "step": self.step, "count": self.count}


def _component_from_json(d):
    kind = d.get("kind", "intervals")
    if kind == "intervals":
        arr = np.asarray(d["intervals"], dtype=float).reshape(-1, 2)
        return _Intervals(arr[:, 0], arr[:, 1])
    if kind == "cantor":
        return _Cantor(d["left"], d["scale"], d["alpha"], d["depth"])
    if kind == "run":
        return _Run(d["start"], d["step"], d["count"])
    raise CritfieldError(f"unknown component kind {kind!r}")


def _merge_intervals(lo, hi):
    """Sort and merge overlapping or touching intervals."""
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    if lo.size == 0:
        return lo, hi
    run_hi = np.maximum.accumulate(hi)
    # new group starts where the interval begins strictly after everything so far
    starts = np.ones(lo.size, dtype=bool)
    starts[1:] = lo[1:] > run_hi[:-1]
    group = np.cumsum(starts) - 1
    out_lo = lo[starts]
    out_hi = np.full(out_lo.size, -np.inf)
    np.maximum.at(out_hi, group, hi)
    out_hi = np.maximum(out_hi, out_lo)
    return out_lo, out_hi


# ---------------------------------------------------------------------------
# tails, gap sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TailReport:
    """Analytic remainder attached to a depth-truncated infinite set.

    ``gap_sum(s)`` is the correction to add to the truncated set's degree-``s``
    gap sum to obtain the gap sum of the limit set; it may be ``inf``.
    ``limit_null`` declares that the limit set is Lebesgue null even though
    the truncation still has fat intervals.
    """

    fn: Callable[[float], float] = field(repr=False, compare=False)
    alpha: float = 0.5
    limit_null: bool = True
    label: str = ""

    def gap_sum(self, s: float | None = None) -> float:
        return float(self.fn(self.alpha if s is None else s))

    @classmethod
    def fixed(cls, alpha: float, bound: float, limit_null: bool = True) -> "TailReport":
        """A tail known at a single exponent only (as read back from JSON)."""

        def fn(s):
            if not math.isclose(s, alpha, rel_tol=0, abs_tol=1e-15):
                raise CritfieldError(f"tail bound only known for alpha={alpha}")
            return bound

        return cls(fn, alpha, limit_null, "fixed")

    def to_json(self):
        return {"alpha": self.alpha, "bound": self.gap_sum(), "limit_null": self.limit_null}


@dataclass(frozen=True)
class GapSequence:
    """Gap lengths in non-increasing order, stored with multiplicities."""

    lengths: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if self.lengths.size and np.any(self.lengths <= 0):
            raise CritfieldError("gap lengths must be positive")
        if self.lengths.size > 1 and np.any(np.diff(self.lengths) > 0):
            raise CritfieldError("gap lengths must be non-increasing")

    @property
    def total(self) -> float:
        return float(np.sum(self.counts))

    def __len__(self):
        return int(round(self.total))

    def power_sum(self, alpha: float) -> float:
        if self.lengths.size == 0:
            return 0.0
        return float(np.sum(self.counts * self.lengths**alpha))

    def expand(self, limit: int = MAX_MATERIALIZE) -> np.ndarray:
        if self.total > limit:
            raise ResolutionError(f"{self.total:.0f} gaps exceed the listing limit")
        return np.repeat(self.lengths, self.counts.astype(np.int64))


# ---------------------------------------------------------------------------
# the set type
# ---------------------------------------------------------------------------


class CompactRealSet:
    """A compact subset of the line given as a finite union of closed intervals.

    Parameters
    ----------
    intervals : iterable of (lo, hi) pairs
        Closed intervals in any order.  Overlapping or touching intervals are
        merged, so after construction every gap has positive length.
    tail : TailReport, optional
        Analytic remainder when this set truncates an infinite one.

    Use :meth:`from_points` for finite point sets.  Generators build sets out
    of structured components with :meth:`from_components`.
    """

    def __init__(self, intervals: Iterable[Sequence[float]] = (), *, tail: TailReport | None = None):
        arr = np.asarray(list(intervals) if not isinstance(intervals, np.ndarray) else intervals, dtype=float)
        arr = arr.reshape(-1, 2)
        if np.any(~np.isfinite(arr)):
            raise CritfieldError("interval endpoints must be finite")
        if np.any(arr[:, 0] > arr[:, 1]):
            raise CritfieldError("interval with lo > hi")
        lo, hi = _merge_intervals(arr[:, 0], arr[:, 1])
        self._components = (_Intervals(lo, hi),) if lo.size else ()
        self.tail = tail

    @classmethod
    def from_points(cls, points: Iterable[float], *, tail: TailReport | None = None) -> "CompactRealSet":
        pts = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float).ravel()
        return cls(np.stack([pts, pts], axis=1), tail=tail)

    @classmethod
    def from_components(cls, components, *, tail: TailReport | None = None) -> "CompactRealSet":
        """Assemble a set from left-to-right components.

        Consecutive components may touch (share an endpoint) but not overlap.
        """
        comps = [c for c in components if c.n_intervals > 0]
        for prev, nxt in zip(comps, comps[1:]):
            if nxt.min < prev.max:
                raise CritfieldError("components overlap or are out of order")
        obj = cls.__new__(cls)
        obj._components = tuple(comps)
        obj.tail = tail
        return obj

    def with_tail(self, tail: TailReport | None) -> "CompactRealSet":
        return CompactRealSet.from_components(self._components, tail=tail)

    # -- basic properties -------------------------------------------------

    @property
    def components(self):
        return self._components

    @property
    def is_empty(self) -> bool:
        return not self._components

    def _require_nonempty(self):
        if self.is_empty:
            raise EmptySetError()

    @property
    def min(self) -> float:
        self._require_nonempty()
        return self._components[0].min

    @property
    def max(self) -> float:
        self._require_nonempty()
        return self._components[-1].max

    @property
    def lebesgue(self) -> float:
        return float(sum(c.measure for c in self._components))

    @property
    def is_null(self) -> bool:
        """True when every interval of the representation is degenerate."""
        return all(c.is_null for c in self._components)

    @property
    def n_intervals(self) -> int:
        n = sum(c.n_intervals for c in self._components)
        # touching components share one merged interval
        for prev, nxt in zip(self._components, self._components[1:]):
            if nxt.min == prev.max:
                n -= 1
        return n

    def __repr__(self):
        if self.is_empty:
            return "CompactRealSet([])"
        kinds = ",".join(c.kind for c in self._components)
        return (
            f"CompactRealSet(n_intervals={self.n_intervals}, range=[{self.min:g}, {self.max:g}], "
            f"components={kinds}{', tail' if self.tail else ''})"
        )

    # -- listing ----------------------------------------------------------

    def intervals(self, limit: int = MAX_MATERIALIZE) -> np.ndarray:
        """All intervals as an ``(n, 2)`` array."""
        if self.n_intervals > limit:
            raise ResolutionError(f"{self.n_intervals} intervals exceed the listing limit")
        if self.is_empty:
            return np.empty((0, 2))
        parts = [c.materialize() for c in self._components]
        lo = np.concatenate([p[0] for p in parts])
        hi = np.concatenate([p[1] for p in parts])
        lo, hi = _merge_intervals(lo, hi)
        return np.stack([lo, hi], axis=1)

    def points(self, limit: int = MAX_MATERIALIZE) -> np.ndarray:
        """The elements of a null-represented set, increasing."""
        if not self.is_null:
            raise CritfieldError("set has intervals of positive length")
        return self.intervals(limit)[:, 0]

    def endpoints(self) -> "CompactRealSet":
        """The null set of all interval endpoints (a subset of the set)."""
        iv = self.intervals()
        return CompactRealSet.from_points(np.unique(iv.ravel()))

    def gap_census(self) -> GapSequence:
        """All gap lengths with multiplicities, longest first."""
        lengths, counts = [], []
        for c in self._components:
            l, n = c.census()
            lengths.append(l)
            counts.append(n)
        for prev, nxt in zip(self._components, self._components[1:]):
            g = nxt.min - prev.max
            if g > 0:
                lengths.append(np.array([g]))
                counts.append(np.array([1.0]))
        if not lengths:
            return GapSequence(np.empty(0), np.empty(0))
        lengths = np.concatenate(lengths)
        counts = np.concatenate(counts)
        keep = lengths > 0
        lengths, counts = lengths[keep], counts[keep]
        order = np.argsort(-lengths, kind="stable")
        return GapSequence(lengths[order], counts[order])

    def restrict(self, lo: float, hi: float) -> "CompactRealSet":
        """``B ∩ [lo, hi]`` (structured components stay structured)."""
        comps = []
        for c in self._components:
            if c.max < lo or c.min > hi:
                continue
            comps.extend(c.restrict(lo, hi))
        return CompactRealSet.from_components(comps)

    def gap_moment(self, alpha: float, p: float) -> float:
        """``sum |I|**alpha * u**p`` over gaps ``I = (u, v)``."""
        total = sum(c.gap_moment(alpha, p) for c in self._components)
        for prev, nxt in zip(self._components, self._components[1:]):
            g = nxt.min - prev.max
            if g > 0:
                total += g**alpha * prev.max**p
        return float(total)

    def union(self, *others: "CompactRealSet") -> "CompactRealSet":
        sets = [self, *others]
        ivs = [s.intervals() for s in sets if not s.is_empty]
        if not ivs:
            return CompactRealSet()
        return CompactRealSet(np.concatenate(ivs))

    def contains(self, x: float, tol: float = 0.0) -> bool:
        iv = self.intervals()
        i = np.searchsorted(iv[:, 0], x + tol, side="right") - 1
        return bool(i >= 0 and x <= iv[i, 1] + tol)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        """JSON description: explicit ``intervals`` when listable, else ``components``."""
        out: dict = {}
        if self.n_intervals <= 200_000:
            out["intervals"] = self.intervals().tolist()
        else:
            out["components"] = [c.to_json() for c in self._components]
        if self.tail is not None:
            out["tail_gap_sum"] = self.tail.to_json()
        return out

    @classmethod
    def from_json(cls, d: dict) -> "CompactRealSet":
        tail = None
        if "tail_gap_sum" in d and d["tail_gap_sum"] is not None:
            t = d["tail_gap_sum"]
            tail = TailReport.fixed(float(t["alpha"]), float(t["bound"]), bool(t.get("limit_null", True)))
        if "components" in d:
            return cls.from_components([_component_from_json(c) for c in d["components"]], tail=tail)
        if "points" in d:
            return cls.from_points(d["points"], tail=tail)
        return cls(d.get("intervals", []), tail=tail)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def gaps(B: CompactRealSet) -> np.ndarray:
    """Bounded components of the complement, left to right, as ``(u, v)`` rows."""
    if B.is_empty:
        raise EmptySetError()
    iv = B.intervals()
    return np.stack([iv[:-1, 1], iv[1:, 0]], axis=1)


def gap_sum(B: CompactRealSet, alpha: float) -> float:
    """Degree-``alpha`` gap sum: the sum of ``|I|**alpha`` over all gaps ``I``.

    Only the finite representation is summed; a declared tail is not added.
    """
    if B.is_empty:
        raise EmptySetError()
    if alpha <= 0:
        raise CritfieldError("alpha must be positive")
    return B.gap_census().power_sum(alpha)


@dataclass(frozen=True)
class BTReport:
    alpha: float
    null: bool
    gap_sum: float
    tail: float
    is_bt: bool

    @property
    def total(self) -> float:
        return self.gap_sum + self.tail


def is_bt(B: CompactRealSet, alpha: float, tail_bound: float | None = None) -> tuple[bool, BTReport]:
    """Decide whether ``B`` is null with finite degree-``alpha`` gap sum.

    A finite representation always has a finite gap sum, so the verdict for
    truncated infinite sets rests on ``tail_bound`` (or on the tail attached
    to ``B`` when ``tail_bound`` is omitted).  If the attached tail declares a
    null limit, nullness refers to that limit set.
    """
    if B.is_empty:
        rep = BTReport(alpha, True, 0.0, 0.0, True)
        return True, rep
    g = gap_sum(B, alpha)
    if tail_bound is None:
        tail = B.tail.gap_sum(alpha) if B.tail is not None else 0.0
    else:
        if tail_bound < 0:
            raise CritfieldError("tail bound must be non-negative")
        tail = float(tail_bound)
    null = B.is_null or (B.tail is not None and B.tail.limit_null)
    ok = bool(null and math.isfinite(g + tail))
    return ok, BTReport(alpha, null, g, tail, ok)


def parallel_measure_direct(B: CompactRealSet, r: float) -> float:
    """Measure of the closed ``r``-parallel set by merging fattened intervals."""
    iv = B.intervals()
    lo, hi = _merge_intervals(iv[:, 0] - r, iv[:, 1] + r)
    return float(np.sum(hi - lo))


def _parallel_from_census(census: GapSequence, r: float, lebesgue: float) -> float:
    # gaps longer than 2r stay (partially) open: each contributes 2r, the rest fill in
    a, n = census.lengths, census.counts
    wide = a > 2.0 * r
    i = float(np.sum(n[wide]))
    rest = float(np.sum(n[~wide] * a[~wide]))
    return lebesgue + 2.0 * r + 2.0 * r * i + rest


def parallel_measure(B: CompactRealSet, r: float, check: bool | None = None) -> float:
    """Lebesgue measure of ``B_r = {x : dist(x, B) <= r}``.

    Computed from the gap census: with gap lengths ``a_1 >= a_2 >= ...`` and
    ``i`` the number of gaps longer than ``2r``, the measure is
    ``|B| + 2r + 2ri + sum_{j>i} a_j``.  With ``check`` (default: module
    :data:`DEBUG`) the result is compared with :func:`parallel_measure_direct`
    and a mismatch above ``1e-12`` relative raises ``AssertionError``.
    """
    if B.is_empty:
        raise EmptySetError()
    if r <= 0:
        raise CritfieldError("r must be positive")
    value = _parallel_from_census(B.gap_census(), r, B.lebesgue)
    if check is None:
        check = DEBUG
    if check and B.n_intervals <= MAX_MATERIALIZE:
        direct = parallel_measure_direct(B, r)
        if abs(direct - value) > 1e-12 * max(abs(direct), abs(value)):
            raise AssertionError(f"parallel measure mismatch: census {value!r} vs direct {direct!r}")
    return value


@dataclass(frozen=True)
class MinkowskiProfile:
    """Tabulated ``|B_r| / r**(1-s)``; min and max bracket the content."""

    s: float
    r: np.ndarray
    measure: np.ndarray
    ratio: np.ndarray

    @property
    def lower(self) -> float:
        return float(np.min(self.ratio))

    @property
    def upper(self) -> float:
        return float(np.max(self.ratio))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "measure", "ratio"])
        for row in zip(self.r, self.measure, self.ratio):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def minkowski_profile(B: CompactRealSet, s: float, r_grid: Sequence[float]) -> MinkowskiProfile:
    """Evaluate ``|B_r| / r**(1-s)`` along a strictly decreasing grid of radii.

    Truncations of null sets are accepted: their interval lengths enter the
    measure, which matters only for radii comparable to those lengths.
    """
    if B.is_empty:
        raise EmptySetError()
    if not 0 < s < 1:
        raise CritfieldError("s must lie in (0, 1)")
    r = np.asarray(r_grid, dtype=float)
    if r.size == 0 or np.any(r <= 0) or np.any(np.diff(r) >= 0):
        raise CritfieldError("r_grid must be strictly decreasing positive radii")
    census = B.gap_census()
    meas = np.array([_parallel_from_census(census, float(x), B.lebesgue) for x in r])
    return MinkowskiProfile(s, r, meas, meas / r ** (1.0 - s))


@dataclass(frozen=True)
class IndexFit:
    """Least-squares fit behind :func:`bt_index_estimate`."""

    slope: float
    stderr: float
    log_inv_t: np.ndarray
    log_count: np.ndarray


def bt_index_estimate(B: CompactRealSet, full: bool = False):
    """Estimate the gap-sum index ``inf{alpha : G_alpha(B) < inf}``.

    Fits the slope of ``log N(t)`` against ``-log t`` where ``N(t)`` counts
    gaps of length at least ``t`` and ``t`` runs over powers of two from the
    longest gap to one step below the shortest.  This is an estimator of the
    upper Minkowski dimension of the represented set, not an exact value.
    With ``full=True`` an :class:`IndexFit` carrying the slope's standard
    error is returned instead of the bare slope.
    """
    if B.is_empty:
        raise EmptySetError()
    if not (B.is_null or (B.tail is not None and B.tail.limit_null)):
        raise CritfieldError("bt_index_estimate needs a null set")
    census = B.gap_census()
    if census.total < 16:
        raise ResolutionError("insufficient resolution")
    a, n = census.lengths, census.counts
    j0 = math.ceil(-math.log2(a[0]))
    j1 = max(math.ceil(-math.log2(a[-1])), j0 + 1)
    j = np.arange(j0, j1 + 1)
    t = np.ldexp(1.0, -j)
    cum = np.cumsum(n)
    # number of gaps with length >= t (lengths are sorted descending)
    idx = np.searchsorted(-a, -t, side="right")
    counts = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
    keep = counts > 0
    x = j[keep] * math.log(2.0)
    y = np.log(counts[keep])
    if x.size < 2:
        raise ResolutionError("insufficient resolution")
    coef, cov = np.polyfit(x, y, 1, cov=True) if x.size > 2 else (np.polyfit(x, y, 1), np.zeros((2, 2)))
    slope = float(coef[0])
    if not full:
        return slope
    return IndexFit(slope, float(math.sqrt(max(cov[0, 0], 0.0))), x, y)


def split_bounded_gapsum(K: CompactRealSet, delta: float) -> list[CompactRealSet]:
    """Cut ``K ⊂ [delta/2, delta]`` into pieces of half-gap-sum at most ``2*sqrt(delta)``.

    Thresholds ``t_k = max{t in K : G_{1/2}(K ∩ [delta/2, t]) <= k*sqrt(delta)}``
    define the pieces ``K ∩ [t_{k-1}, t_k]``; there are at most
    ``G_{1/2}(K)/sqrt(delta) + 1`` of them.
    """
    if K.is_empty:
        raise EmptySetError()
    if delta <= 0:
        raise CritfieldError("delta must be positive")
    if K.min < delta / 2 or K.max > delta:
        raise CritfieldError("K must lie in [delta/2, delta]")
    if not K.is_null:
        raise CritfieldError("K must be null-represented")
    root = math.sqrt(delta)
    total = gap_sum(K, 0.5)
    if total <= 2 * root:
        return [K]
    pts = K.points()
    g = np.concatenate([[0.0], np.cumsum(np.sqrt(np.diff(pts)))])
    thresholds = [delta / 2]
    k = 1
    while thresholds[-1] < pts[-1]:
        i = int(np.searchsorted(g, k * root * (1 + 1e-15), side="right")) - 1
        thresholds.append(float(pts[i]))
        k += 1
    pieces = [
        CompactRealSet.from_points(pts[(pts >= lo) & (pts <= hi)])
        for lo, hi in zip(thresholds, thresholds[1:])
    ]
    p = len(pieces)
    assert p <= total / root + 1 + 1e-12, "piece count bound violated"
    for piece in pieces:
        assert gap_sum(piece, 0.5) <= 2 * root * (1 + 1e-12), "piece gap sum bound violated"
    return pieces


def holder_image_bound(points: Sequence[float], values: Sequence[float], alpha: float) -> tuple[float, float]:
    """Compare the gap sum of ``f(F)`` with the sum of ``|f(a_{i+1}) - f(a_i)|**alpha``.

    Returns ``(bound, actual)``; ``actual <= bound`` always holds.
    """
    a = np.asarray(points, dtype=float)
    f = np.asarray(values, dtype=float)
    if a.shape != f.shape or a.ndim != 1:
        raise CritfieldError("points and values must be 1-D of equal length")
    if a.size and np.any(np.diff(a) <= 0):
        raise CritfieldError("points must be strictly increasing")
    if np.unique(f).size != f.size:
        raise CritfieldError("values must be injective")
    if alpha <= 0:
        raise CritfieldError("alpha must be positive")
    bound = float(np.sum(np.abs(np.diff(f)) ** alpha))
    actual = gap_sum(CompactRealSet.from_points(f), alpha) if f.size else 0.0
    return bound, actual
