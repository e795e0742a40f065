"""Planar sets whose distance function has a prescribed set of critical values.

Given a compact null ``K ⊂ [a, b]`` with ``a > 0``, put
``g(y) = sqrt(2b) * G_{1/2}(K ∩ [a, y])`` and ``F = {(g(y), ±y) : y ∈ K}``.
For every ``v ∈ K`` the axis point ``(g(v), 0)`` has exactly the two nearest
points ``(g(v), ±v)``, so it is critical with value ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .distfield import PlanarCompactSet, distance_field
from .errors import CritfieldError
from .realsets import CompactRealSet, gap_sum, split_bounded_gapsum

__all__ = [
    "FerryConstruction",
    "build_ferry_set",
    "projection_check",
    "exterior_check",
    "CheckReport",
    "GapWitness",
    "gap_witness",
    "Assembly",
    "assemble_translates",
    "realize_bands",
]


@dataclass(frozen=True)
class FerryConstruction:
    """The planar set built from ``K`` together with its horizontal profile ``g``."""

    K: CompactRealSet
    y: np.ndarray
    g: np.ndarray
    F: PlanarCompactSet

    @property
    def a(self) -> float:
        return float(self.y[0])

    @property
    def b(self) -> float:
        return float(self.y[-1])

    def g_at(self, v: float) -> float:
        i = self._index(v)
        return float(self.g[i])

    def _index(self, v: float) -> int:
        i = int(np.searchsorted(self.y, v))
        if i >= len(self.y) or self.y[i] != v:
            raise CritfieldError(f"{v!r} is not a point of the representation")
        return i

    def axis_point(self, v: float) -> np.ndarray:
        """``(g(v), 0)``, the critical point with value ``v``."""
        return np.array([self.g_at(v), 0.0])

    @property
    def radius_bound(self) -> float:
        return self.b + math.sqrt(2.0 * self.b) * gap_sum(self.K, 0.5)


def build_ferry_set(K: CompactRealSet, *, seed: int = 0, pair_samples: int = 10_000) -> FerryConstruction:
    """Build ``F = {(g(y), ±y)}`` from a null point set ``K`` with ``min K > 0``.

    Verified on construction: ``g`` strictly increasing, ``F`` inside the
    ball of radius ``b + sqrt(2b) G_{1/2}(K)``, and
    ``v - u <= (g(v) - g(u))**2 / (2b)`` on consecutive pairs and on
    ``pair_samples`` random pairs.  For a depth-truncated set pass its
    :meth:`~critfield.realsets.CompactRealSet.endpoints`.
    """
    if K.is_empty:
        raise CritfieldError("K must be nonempty")
    if not K.is_null:
        raise CritfieldError("K must be null-represented (use K.endpoints() for truncations)")
    y = K.points()
    if y[0] <= 0:
        raise CritfieldError("min K must be positive")
    b = float(y[-1])
    c = math.sqrt(2.0 * b)
    g = np.concatenate([[0.0], c * np.cumsum(np.sqrt(np.diff(y)))])
    if np.any(np.diff(g) <= 0):
        raise AssertionError("g is not strictly increasing")
    F = PlanarCompactSet(np.concatenate([np.stack([g, y], 1), np.stack([g, -y], 1)]))
    out = FerryConstruction(K, y, g, F)
    R = out.radius_bound
    if np.max(np.hypot(g, y)) > R * (1 + 1e-12):
        raise AssertionError("F leaves the ball of radius b + sqrt(2b) G_1/2(K)")
    if len(y) > 1:
        rng = np.random.default_rng(seed)
        i = np.arange(len(y) - 1)
        j = i + 1
        if len(y) > 2:
            u = rng.integers(0, len(y), (2, pair_samples))
            i, j = np.concatenate([i, u.min(0)]), np.concatenate([j, u.max(0)])
            keep = i < j
            i, j = i[keep], j[keep]
        lhs = y[j] - y[i]
        rhs = (g[j] - g[i]) ** 2 / (2.0 * b)
        if np.any(lhs > rhs * (1 + 1e-12) + 1e-15 * b):
            raise AssertionError("quadratic growth of g fails")
    return out


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    margin: float
    detail: str = ""

    def __bool__(self):
        return self.passed


def projection_check(c: FerryConstruction, v: float) -> CheckReport:
    """Brute-force check that ``(g(v), 0)`` has exactly the nearest points ``(g(v), ±v)``.

    ``margin`` is the distance from ``(g(v), 0)`` to the rest of ``F`` minus ``v``.
    """
    i = c._index(v)
    x = np.array([c.g[i], 0.0])
    P = c.F.points
    d = np.hypot(P[:, 0] - x[0], P[:, 1] - x[1])
    n = len(c.y)
    pair = np.zeros(len(P), dtype=bool)
    pair[[i, n + i]] = True
    exact = bool(np.all(d[pair] == v))
    others = d[~pair]
    margin = float(others.min() - v) if others.size else math.inf
    return CheckReport(exact and margin > 0, margin)


def exterior_check(c: FerryConstruction, v: float, z: float) -> CheckReport:
    """Check ``dist((z, 0), F) > v`` for ``z > g(v)``; ``margin`` is the excess."""
    gv = c.g_at(v)
    if not z > gv:
        raise CritfieldError("z must exceed g(v)")
    d = float(distance_field(c.F, np.array([z, 0.0])))
    return CheckReport(d > v, d - v)


@dataclass(frozen=True)
class GapWitness:
    """A point ``x < y`` of ``K`` and a gap ``(u, w) ⊂ (x, y)`` with ``|I| >= factor (y - x)``."""

    x: float
    gap: tuple[float, float]
    ratio: float
    eps: float
    levels: tuple[tuple[float, float], ...] = field(default=())


def gap_witness(
    K: CompactRealSet, y: float, b: float, *, min_eps: float | None = None
) -> GapWitness | None:
    """Search for left gaps of ``K`` near ``y`` that are long relative to their distance.

    For ``eps = (y - min K) / 2**j`` down to ``min_eps`` (default
    ``1e-6 * (y - min K)``) the best ratio ``|I| / (y - x)`` over gaps
    ``I = (x, w)`` with ``y - eps < x`` and ``w <= y`` is computed.  A
    witness is returned only when every level has one with ratio at least
    ``4y/b``; the returned witness is the one found at the smallest ``eps``.
    ``levels`` lists ``(eps, best ratio)`` for all levels.
    """
    if K.is_empty:
        raise CritfieldError("K must be nonempty")
    if not K.contains(y):
        raise CritfieldError("y must be a point of K")
    iv = K.intervals()
    lo, hi = iv[:-1, 1], iv[1:, 0]
    need = 4.0 * y / b
    span = y - float(iv[0, 0])
    if span <= 0:
        return None
    if min_eps is None:
        min_eps = 1e-6 * span
    left = hi <= y
    lo, hi = lo[left], hi[left]
    levels = []
    best = None
    eps = span
    while eps >= min_eps:
        sel = lo > y - eps
        if not sel.any():
            return None
        ratios = (hi[sel] - lo[sel]) / (y - lo[sel])
        k = int(np.argmax(ratios))
        r = float(ratios[k])
        levels.append((eps, r))
        if r < need:
            return None
        best = (float(lo[sel][k]), (float(lo[sel][k]), float(hi[sel][k])), r, eps)
        eps /= 2.0
    x, gap, r, e = best
    return GapWitness(x, gap, r, e, tuple(levels))


@dataclass(frozen=True)
class Assembly:
    """Translated copies of parts with their guard-ball centres."""

    F: PlanarCompactSet
    centers: np.ndarray
    radii: np.ndarray
    mode: str
    area_budget: float
    rectangle: tuple[float, float] | None
    verified: bool


def assemble_translates(
    parts: Sequence[tuple[PlanarCompactSet, float]],
    mode: str = "bounded",
    *,
    rectangle: tuple[float, float] | None = None,
    samples: int = 41,
) -> Assembly:
    """Place translated copies of parts so that they do not interact at small scales.

    Parameters
    ----------
    parts : sequence of (PlanarCompactSet, delta)
        Each part must lie in ``B̄(0, 4 delta)``.
    mode : {"bounded", "closed"}
        ``bounded``: greedy shelf packing, by decreasing ``delta``, of squares
        of side ``19 delta`` whose inscribed guard balls ``B(c, 9 delta)`` are
        then pairwise disjoint.  ``closed``: parts placed along the x-axis so
        that any two are at least ``4 max(diam) + 1`` apart.
    rectangle : (width, height), optional
        Bounded-mode container; by default a square of twice the total
        square area.

    After placement, ``d_whole == d_part`` is checked wherever
    ``d_part <= delta`` on a grid of each ``B(c, 7 delta)``, and
    ``d_whole > delta`` elsewhere on that grid.

    Raises
    ------
    CritfieldError
        If the parts do not fit the rectangle; the message reports the
        required area.
    """
    if not parts:
        raise CritfieldError("no parts")
    if mode not in ("bounded", "closed"):
        raise CritfieldError("mode must be 'bounded' or 'closed'")
    deltas = np.array([float(d) for _, d in parts])
    if np.any(deltas <= 0):
        raise CritfieldError("radii must be positive")
    for P, d in parts:
        if np.max(np.hypot(*P.vertices().T)) > 4.0 * d * (1 + 1e-12):
            raise CritfieldError("each part must lie in the closed ball of radius 4*delta")
    budget = float(np.sum(81.0 * math.pi * deltas**2))
    centers = np.zeros((len(parts), 2))
    rect = None
    if mode == "bounded":
        sides = 19.0 * deltas
        if rectangle is None:
            w = math.sqrt(2.0 * float(np.sum(sides**2)))
            w = max(w, float(sides.max()))
            rectangle = (w, w)
        W, H = map(float, rectangle)
        order = np.argsort(-deltas, kind="stable")
        x = y = row_h = 0.0
        for k in order:
            s = sides[k]
            if x + s > W:
                x, y, row_h = 0.0, y + row_h, 0.0
            if s > W or y + s > H:
                need = float(np.sum(sides**2))
                raise CritfieldError(
                    f"packing failed in {W:g} x {H:g}; squares need area >= {need:g}"
                )
            centers[k] = (x + s / 2, y + s / 2)
            x += s
            row_h = max(row_h, s)
        rect = (W, H)
    else:
        diams = np.array([P.diam for P, _ in parts])
        boxes = [P.bbox for P, _ in parts]
        right = None
        for k, (P, d) in enumerate(parts):
            x0, _, x1, _ = boxes[k]
            if right is None:
                shift = 0.0
            else:
                space = 4.0 * float(diams[: k + 1].max()) + 1.0
                shift = right + space - x0
            centers[k] = (shift, 0.0)
            right = x1 + shift
    placed = [P.translate(c) for (P, _), c in zip(parts, centers)]
    whole = placed[0].union(*placed[1:])
    ok = True
    t = np.linspace(-1.0, 1.0, samples)
    grid = np.stack(np.meshgrid(t, t), -1).reshape(-1, 2)
    grid = grid[np.sum(grid**2, 1) <= 1.0]
    for (P, d), c, Q in zip(parts, centers, placed):
        X = c + 7.0 * d * grid
        dw = distance_field(whole, X)
        dp = distance_field(Q, X)
        near = dp <= d
        if np.any(dw[near] != dp[near]) or np.any(dw[~near] <= d):
            ok = False
    if not ok:
        raise AssertionError("translated parts interact inside their guard balls")
    return Assembly(whole, centers, deltas, mode, budget, rect, ok)


def realize_bands(K: CompactRealSet, D: float, **kwargs) -> tuple[Assembly, list[FerryConstruction]]:
    """Realize ``K ⊂ (0, D]`` band by band.

    ``K`` is cut along the dyadic bands ``[D 2**-(n+1), D 2**-n]``, each band
    is split into pieces of half-gap-sum at most ``2 sqrt(delta_n)``, every
    piece becomes a Ferry construction, and the constructions are packed in
    bounded mode.
    """
    if K.is_empty:
        raise CritfieldError("K must be nonempty")
    if K.min <= 0 or K.max > D:
        raise CritfieldError("K must lie in (0, D]")
    pts = K.points()
    # band n holds the points of (D 2**-(n+1), D 2**-n]
    band_of = np.floor(np.log2(D / pts)).astype(int)
    band_of = np.where(pts > D * 2.0 ** -band_of.astype(float), band_of - 1, band_of)
    band_of = np.where(pts <= D * 2.0 ** -(band_of + 1.0), band_of + 1, band_of)
    parts, cons = [], []
    for n in np.unique(band_of):
        delta = D * 2.0 ** -float(n)
        band = CompactRealSet.from_points(pts[band_of == n])
        for piece in split_bounded_gapsum(band, delta):
            c = build_ferry_set(piece)
            cons.append(c)
            parts.append((c.F, delta))
    return assemble_translates(parts, "bounded", **kwargs), cons
