"""Distance functions of finite planar sets and their critical points.

A :class:`PlanarCompactSet` is a finite union of points and straight
segments.  Off the set, the generalized gradient of ``d_F`` at ``x`` is the
convex hull of the unit vectors ``(x - p)/|x - p|`` over the nearest points
``p``; ``x`` is critical when that hull contains the origin.  In the plane
this reduces to an angular test: the directions are critical exactly when no
open half-plane contains them all, i.e. when the largest angular gap between
consecutive directions is at most ``pi``.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import ConvexHull, cKDTree
from scipy.spatial.distance import pdist

from .errors import CritfieldError, EmptySetError
from .realsets import CompactRealSet

__all__ = [
    "PlanarCompactSet",
    "SubdiffHull",
    "CriticalRecord",
    "ScanResult",
    "FerryReport",
    "distance",
    "distance_field",
    "clarke_hull",
    "is_critical",
    "descent_witness",
    "directional_derivative",
    "scan_critical",
    "critical_values",
    "ferry_check",
    "semiconcavity_probe",
    "restriction_check",
    "hull_residual",
]

TWO_PI = 2.0 * math.pi


def _workers() -> int:
    n = int(os.environ.get("CRITFIELD_THREADS", "0") or 0)
    return n if n > 0 else -1


# ---------------------------------------------------------------------------
# the set type
# ---------------------------------------------------------------------------


class PlanarCompactSet:
    """Finitely many points and closed straight segments in the plane.

    Parameters
    ----------
    points : array_like, shape (n, 2)
    segments : array_like, shape (m, 2, 2)
        Segment endpoints.  Degenerate segments are stored as points.

    Sites are indexed points first, then segments.
    """

    def __init__(self, points=(), segments=()):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        seg = np.asarray(segments, dtype=float).reshape(-1, 2, 2)
        degenerate = np.all(seg[:, 0] == seg[:, 1], axis=1)
        if degenerate.any():
            pts = np.concatenate([pts, seg[degenerate, 0]])
            seg = seg[~degenerate]
        if pts.size + seg.size == 0:
            raise EmptySetError()
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(seg))):
            raise CritfieldError("coordinates must be finite")
        self.points = pts
        self.segments = seg
        self._tree = cKDTree(pts) if len(pts) else None

    @property
    def n_sites(self) -> int:
        return len(self.points) + len(self.segments)

    def vertices(self) -> np.ndarray:
        """Points together with segment endpoints."""
        return np.concatenate([self.points, self.segments.reshape(-1, 2)])

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        v = self.vertices()
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    @property
    def diam(self) -> float:
        v = np.unique(self.vertices(), axis=0)
        if len(v) < 2:
            return 0.0
        if len(v) > 3:
            try:
                v = v[ConvexHull(v).vertices]
            except Exception:  # collinear input: the extreme pair suffices
                pass
        return float(pdist(v).max())

    def translate(self, c) -> "PlanarCompactSet":
        c = np.asarray(c, dtype=float)
        return PlanarCompactSet(self.points + c, self.segments + c)

    def union(self, *others: "PlanarCompactSet") -> "PlanarCompactSet":
        sets = [self, *others]
        return PlanarCompactSet(
            np.concatenate([s.points for s in sets]), np.concatenate([s.segments for s in sets])
        )

    def restrict_disk(self, a, R: float) -> "PlanarCompactSet | None":
        """``F ∩ B̄(a, R)``; segments are clipped to the disk."""
        a = np.asarray(a, dtype=float)
        pts = self.points[np.linalg.norm(self.points - a, axis=1) <= R]
        segs = []
        for p, q in self.segments:
            d = q - p
            f = p - a
            A, B, C = d @ d, 2 * f @ d, f @ f - R * R
            disc = B * B - 4 * A * C
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            t0, t1 = max((-B - sq) / (2 * A), 0.0), min((-B + sq) / (2 * A), 1.0)
            if t0 > t1:
                continue
            s0 = p if t0 == 0.0 else p + t0 * d
            s1 = q if t1 == 1.0 else p + t1 * d
            segs.append((s0, s1))
        if len(pts) == 0 and not segs:
            return None
        return PlanarCompactSet(pts, np.asarray(segs).reshape(-1, 2, 2))

    # -- nearest-point machinery -----------------------------------------

    def site_point(self, idx: int, x) -> np.ndarray:
        """The point of site ``idx`` nearest to ``x``."""
        n = len(self.points)
        if idx < n:
            return self.points[idx]
        p, q = self.segments[idx - n]
        return _project_segment(np.asarray(x, dtype=float)[None], p[None], q[None])[0]

    def site_distances(self, x) -> np.ndarray:
        """Distances from one point ``x`` to every site."""
        x = np.asarray(x, dtype=float)
        d = [np.hypot(*(self.points - x).T)] if len(self.points) else []
        if len(self.segments):
            proj = _project_segment(x[None], self.segments[:, 0], self.segments[:, 1])
            d.append(np.hypot(*(proj - x).T))
        return np.concatenate(d)

    def candidates(self, X: np.ndarray, k: int = 8):
        """Nearest-site candidates for many query points.

        Returns ``(dist, idx, points)`` of shapes ``(N, c)``, ``(N, c)`` and
        ``(N, c, 2)``, sorted by distance, holding the ``k`` nearest point
        sites and every segment site.
        """
        X = np.asarray(X, dtype=float).reshape(-1, 2)
        cols_d, cols_i, cols_p = [], [], []
        n = len(self.points)
        if n:
            kk = min(k, n)
            d, i = self._tree.query(X, k=kk, workers=_workers())
            d = d.reshape(len(X), kk)
            i = i.reshape(len(X), kk)
            cols_d.append(d)
            cols_i.append(i)
            cols_p.append(self.points[i])
        if len(self.segments):
            P = _project_segment(X[:, None, :], self.segments[None, :, 0], self.segments[None, :, 1])
            cols_p.append(P)
            cols_d.append(np.hypot(P[..., 0] - X[:, None, 0], P[..., 1] - X[:, None, 1]))
            cols_i.append(np.broadcast_to(n + np.arange(len(self.segments)), (len(X), len(self.segments))))
        d = np.concatenate(cols_d, axis=1)
        i = np.concatenate(cols_i, axis=1)
        p = np.concatenate(cols_p, axis=1)
        order = np.argsort(d, axis=1, kind="stable")
        take = np.take_along_axis
        return take(d, order, 1), take(i, order, 1), take(p, order[..., None], 1)

    def to_json(self) -> dict:
        out = {"points": self.points.tolist()}
        if len(self.segments):
            out["segments"] = self.segments.tolist()
        return out

    @classmethod
    def from_json(cls, d: dict) -> "PlanarCompactSet":
        return cls(d.get("points", []), d.get("segments", []))

    def __repr__(self):
        return f"PlanarCompactSet(points={len(self.points)}, segments={len(self.segments)})"


def _project_segment(X, P, Q):
    """Nearest points of segments ``[P, Q]`` to ``X`` (broadcasting)."""
    D = Q - P
    t = np.sum((X - P) * D, axis=-1) / np.sum(D * D, axis=-1)
    t = np.clip(t, 0.0, 1.0)[..., None]
    return P + t * D


def distance_field(F: PlanarCompactSet, X) -> np.ndarray:
    """``d_F`` at every row of ``X`` (any leading shape, last axis 2)."""
    X = np.asarray(X, dtype=float)
    shape = X.shape[:-1]
    flat = X.reshape(-1, 2)
    out = np.full(len(flat), np.inf)
    if len(F.points):
        out, _ = F._tree.query(flat, k=1, workers=_workers())
    for p, q in F.segments:
        P = _project_segment(flat, p, q)
        out = np.minimum(out, np.hypot(*(P - flat).T))
    return np.asarray(out, dtype=float).reshape(shape)


def _default_tol(d: float) -> float:
    return 1e-9 * max(d, 1e-300)


def distance(F: PlanarCompactSet, x, tol: float | None = None) -> tuple[float, np.ndarray]:
    """``d_F(x)`` and every nearest point within ``d + tol``.

    ``tol`` defaults to ``1e-9 * d``.  Distinct sites may share a nearest
    point (e.g. two segments with a common endpoint); duplicates are removed.
    """
    x = np.asarray(x, dtype=float)
    ds = F.site_distances(x)
    d = float(ds.min())
    t = _default_tol(d) if tol is None else tol
    idx = np.flatnonzero(ds <= d + t)
    near = np.array([F.site_point(i, x) for i in idx])
    return d, np.unique(near, axis=0)


# ---------------------------------------------------------------------------
# generalized gradient
# ---------------------------------------------------------------------------


def hull_residual(directions) -> tuple[float, np.ndarray]:
    """Distance from 0 to the convex hull of unit vectors, and the closest hull point.

    The hull misses 0 exactly when some angular gap between consecutive
    directions exceeds ``pi``; then the closest point is the midpoint of the
    chord joining the two directions bounding that gap.
    """
    U = np.asarray(directions, dtype=float).reshape(-1, 2)
    if len(U) == 0:
        raise CritfieldError("no directions")
    ang = np.sort(np.arctan2(U[:, 1], U[:, 0]))
    gaps = np.diff(np.concatenate([ang, [ang[0] + TWO_PI]]))
    j = int(np.argmax(gaps))
    if gaps[j] <= math.pi:
        return 0.0, np.zeros(2)
    a, b = ang[j], ang[(j + 1) % len(ang)]
    w = 0.5 * (np.array([math.cos(a), math.sin(a)]) + np.array([math.cos(b), math.sin(b)]))
    return math.cos(0.5 * (TWO_PI - gaps[j])), w


def _batch_residual(U: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Row-wise :func:`hull_residual` for direction arrays ``(N, c, 2)`` with a mask."""
    ang = np.arctan2(U[..., 1], U[..., 0])
    ang = np.where(valid, ang, np.nan)
    ang = np.sort(ang, axis=1)
    last = np.nanmax(ang, axis=1)
    first = ang[:, 0]
    ang = np.where(np.isnan(ang), last[:, None], ang)
    gaps = np.diff(ang, axis=1)
    maxgap = np.maximum(gaps.max(axis=1) if gaps.shape[1] else 0.0, first + TWO_PI - last)
    return np.where(maxgap <= math.pi, 0.0, np.cos(0.5 * (TWO_PI - maxgap)))


@dataclass(frozen=True)
class SubdiffHull:
    """Convex hull of the unit directions from ``x`` to its nearest points."""

    x: np.ndarray
    value: float
    nearest: np.ndarray
    directions: np.ndarray
    residual: float
    closest: np.ndarray

    @property
    def contains_origin(self) -> bool:
        return self.residual == 0.0

    @property
    def vertices(self) -> np.ndarray:
        """Hull vertices in counter-clockwise order (1 or 2 rows when degenerate)."""
        U = np.unique(self.directions, axis=0)
        if len(U) <= 2:
            return U
        try:
            return U[ConvexHull(U).vertices]
        except Exception:
            ang = np.arctan2(U[:, 1], U[:, 0])
            return U[[np.argmin(ang), np.argmax(ang)]]


def clarke_hull(F: PlanarCompactSet, x, tol: float | None = None) -> SubdiffHull:
    """Generalized gradient of ``d_F`` at ``x`` as a :class:`SubdiffHull`.

    Raises
    ------
    CritfieldError
        If ``x`` lies on the set ("on the set").
    """
    x = np.asarray(x, dtype=float)
    d, near = distance(F, x, tol)
    if d == 0.0:
        raise CritfieldError("on the set")
    diff = x - near
    U = diff / np.hypot(diff[:, 0], diff[:, 1])[:, None]
    res, w = hull_residual(U)
    return SubdiffHull(x, d, near, U, res, w)


def is_critical(F: PlanarCompactSet, x, tol: float | None = None) -> tuple[bool, float]:
    """Whether 0 lies in the generalized gradient at ``x``, and the hull residual.

    ``tol`` is both the nearest-point slack and the accepted residual;
    it defaults to ``1e-9 * d_F(x)``.
    """
    H = clarke_hull(F, x, tol)
    t = _default_tol(H.value) if tol is None else tol
    return bool(H.residual <= t), H.residual


def directional_derivative(F: PlanarCompactSet, x, v, tol: float | None = None) -> float:
    """One-sided derivative of ``d_F`` at ``x`` along ``v``: ``min <u_p, v>`` over nearest ``p``."""
    H = clarke_hull(F, x, tol)
    return float(np.min(H.directions @ np.asarray(v, dtype=float)))


def descent_witness(F: PlanarCompactSet, x, tol: float | None = None, check: bool = True) -> np.ndarray:
    """Unit direction of steepest guaranteed decrease at a regular point.

    The direction is ``-w/|w|`` with ``w`` the point of the hull closest to
    0, which maximizes the separation margin ``|w|``.  With ``check`` the
    finite-difference slope at ``t = (1e-3, 1e-4, 1e-5) * d_F(x)`` is
    verified to lie below ``-|w|/2``.

    Raises
    ------
    CritfieldError
        If ``x`` is critical.
    """
    H = clarke_hull(F, x, tol)
    t_acc = _default_tol(H.value) if tol is None else tol
    if H.residual <= t_acc:
        raise CritfieldError("x is a critical point; no descent direction")
    v = -H.closest / np.linalg.norm(H.closest)
    if check:
        eps = 0.5 * H.residual
        for s in (1e-3, 1e-4, 1e-5):
            t = s * H.value
            slope = (distance_field(F, x + t * v) - H.value) / t
            if not slope < -eps:
                raise AssertionError(f"descent check failed at t={t:g}: slope {slope:g}")
    return v


# ---------------------------------------------------------------------------
# scanning for critical points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalRecord:
    """A detected critical point of ``d_F`` off ``F``."""

    location: np.ndarray
    value: float
    witnesses: np.ndarray
    residual: float

    def as_row(self) -> tuple[float, float, float, float]:
        return float(self.location[0]), float(self.location[1]), self.value, self.residual


class ScanResult(list):
    """List of :class:`CriticalRecord` with the scan parameters attached.

    Grid detection is never claimed exhaustive; ``h`` and ``unresolved``
    (refined cells with no certified critical point nearby) are reported.
    """

    def __init__(self, records=(), *, h=float("nan"), window=None, n_cells=0, unresolved=0):
        super().__init__(records)
        self.h = h
        self.window = window
        self.n_cells = n_cells
        self.unresolved = unresolved

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self])

    @property
    def locations(self) -> np.ndarray:
        return np.array([r.location for r in self]).reshape(-1, 2)

    def to_csv(self) -> str:
        lines = ["x,y,value,residual"]
        for r in self:
            lines.append(",".join(repr(float(v)) for v in r.as_row()))
        return "\n".join(lines) + "\n"


def _cell_filter(F: PlanarCompactSet, C: np.ndarray, rho: float, k: int):
    """Keep cells of half-diagonal ``rho`` centred at ``C`` that may contain a critical point.

    For ``x`` in the cell, every nearest site of ``x`` lies within
    ``d(c) + 2 rho`` of the centre ``c``, and its direction moves by at most
    ``2 rho / (d(c) - rho)``.  A cell survives when at least two sites are
    within that radius and their directions from ``c`` leave a hull residual
    of at most twice that bound.
    """
    keep = np.zeros(len(C), dtype=bool)
    if len(C) == 0:
        return keep
    kk = k
    todo = np.arange(len(C))
    while len(todo):
        d, idx, P = F.candidates(C[todo], k=kk)
        d0 = d[:, :1]
        within = d <= d0 + 2.0 * rho
        n_pts = len(F.points)
        # all k nearest point sites inside the radius: more may hide beyond them
        full = ((within & (idx < n_pts)).sum(axis=1) >= min(kk, n_pts)) & (kk < n_pts)
        diff = C[todo, None, :] - P
        norm = np.hypot(diff[..., 0], diff[..., 1])
        ok = norm > 0
        U = diff / np.where(ok, norm, 1.0)[..., None]
        valid = within & ok
        res = _batch_residual(U, valid | ~np.any(valid, axis=1, keepdims=True))
        dd = d0[:, 0]
        bound = np.where(dd > rho, 4.0 * rho / np.maximum(dd - rho, 1e-300), np.inf)
        cnt = within.sum(axis=1)
        hit = (cnt >= 2) & (res <= bound)
        done = ~full
        keep[todo[done]] = hit[done]
        todo = todo[full]
        kk *= 4
    return keep


def _polish_candidates(F: PlanarCompactSet, c: np.ndarray, sites: Sequence[int]) -> list[np.ndarray]:
    """Exact critical-point candidates from pairs and triples of nearby sites.

    Point pairs give midpoints and point triples give circumcentres.  Pairs
    and triples involving segments are solved by the fixed-point iteration
    ``x <- centre(nearest points of the chosen sites at x)``.
    """
    out = []
    sites = list(sites)
    n = len(F.points)
    for combo in itertools.chain(itertools.combinations(sites, 2), itertools.combinations(sites, 3)):
        if all(i < n for i in combo):
            pts = F.points[list(combo)]
            x = _centre(pts)
            if x is not None:
                out.append(x)
            continue
        x = c.copy()
        for _ in range(200):
            pts = np.array([F.site_point(i, x) for i in combo])
            nx = _centre(pts)
            if nx is None:
                break
            if np.linalg.norm(nx - x) <= 1e-15 * (1.0 + np.linalg.norm(x)):
                x = nx
                break
            x = nx
        if x is not None and np.all(np.isfinite(x)):
            out.append(x)
    return out


def _centre(pts: np.ndarray) -> np.ndarray | None:
    if len(pts) == 2:
        return 0.5 * (pts[0] + pts[1])
    a, b, c = pts
    bx, by = b - a
    cx, cy = c - a
    den = 2.0 * (bx * cy - by * cx)
    if den == 0.0:
        return None
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    return a + np.array([(cy * b2 - by * c2) / den, (bx * c2 - cx * b2) / den])


def _site_sample(F: PlanarCompactSet, c: np.ndarray, radius: float, limit: int = 12) -> list[int]:
    """Sites within ``radius`` of ``c``; thinned by angle when there are many."""
    ds = F.site_distances(c)
    idx = np.flatnonzero(ds <= radius)
    if len(idx) <= limit:
        return idx.tolist()
    pts = np.array([F.site_point(i, c) for i in idx])
    ang = np.arctan2(pts[:, 1] - c[1], pts[:, 0] - c[0])
    order = idx[np.argsort(ang)]
    spread = order[np.linspace(0, len(order) - 1, limit // 2, dtype=int)]
    nearest = idx[np.argsort(ds[idx])[: limit // 2]]
    return sorted(set(spread.tolist()) | set(nearest.tolist()))


def scan_critical(
    F: PlanarCompactSet,
    window: Sequence[float] | None = None,
    h: float | None = None,
    tol: float = 1e-9,
    *,
    max_cells: int = 200_000,
) -> ScanResult:
    """Detect critical points of ``d_F`` off ``F`` inside a rectangle.

    Parameters
    ----------
    F : PlanarCompactSet
    window : (xmin, ymin, xmax, ymax), optional
        Search rectangle; defaults to the bounding box of ``F`` (critical
        points lie in the convex hull of ``F``).
    h : float, optional
        Grid step; defaults to ``diam(F) / 500``.
    tol : float
        Relative tolerance: nearest-point slack and accepted residual are
        ``tol * d_F(x)``.
    max_cells : int
        Cap on the number of cells kept per refinement level.

    Returns
    -------
    ScanResult
        Records sorted by value then location, deduplicated within ``h``.

    Notes
    -----
    Cells are kept by a conservative residual bound and bisected down to
    side ``1e-3 * h``.  Each surviving cluster is then solved exactly over
    pairs and triples of nearby sites, and only candidates that pass
    :func:`is_critical` against the whole set are recorded.
    """
    D = F.diam
    if h is None:
        h = D / 500 if D > 0 else 1.0
    if h <= 0:
        raise CritfieldError("grid step h must be positive")
    bx0, by0, bx1, by1 = F.bbox
    if window is None:
        window = (bx0, by0, bx1, by1)
    wx0, wy0, wx1, wy1 = map(float, window)
    x0, y0, x1, y1 = max(wx0, bx0), max(wy0, by0), min(wx1, bx1), min(wy1, by1)
    if x0 > x1 or y0 > y1 or D == 0:
        if D > 0:
            warnings.warn("scan window misses the convex hull of the set", RuntimeWarning, stacklevel=2)
        return ScanResult(h=h, window=tuple(window))
    nx = max(1, math.ceil((x1 - x0) / h))
    ny = max(1, math.ceil((y1 - y0) / h))
    cx = x0 + h * (np.arange(nx) + 0.5)
    cy = y0 + h * (np.arange(ny) + 0.5)
    C = np.stack(np.meshgrid(cx, cy, indexing="xy"), -1).reshape(-1, 2)
    n_cells = len(C)
    side = h
    keep_parts = []
    for start in range(0, len(C), 100_000):
        block = C[start : start + 100_000]
        keep_parts.append(block[_cell_filter(F, block, side / math.sqrt(2), 8)])
    C = np.concatenate(keep_parts) if keep_parts else C[:0]
    min_side = 1e-3 * h
    while side > min_side and len(C):
        side /= 2.0
        offs = np.array([[-1, -1], [1, -1], [-1, 1], [1, 1]]) * (side / 2.0)
        C = (C[:, None, :] + offs[None]).reshape(-1, 2)
        C = C[_cell_filter(F, C, side / math.sqrt(2), 8)]
        if len(C) > max_cells:
            d = distance_field(F, C)
            C = C[np.argsort(-d, kind="stable")[:max_cells]]
    records: list[CriticalRecord] = []
    unresolved = 0
    if len(C):
        # cluster surviving cells within h
        tree = cKDTree(C)
        labels = -np.ones(len(C), dtype=int)
        for i in range(len(C)):
            if labels[i] >= 0:
                continue
            members = tree.query_ball_point(C[i], h)
            labels[members] = np.where(labels[members] < 0, i, labels[members])
        for lab in np.unique(labels):
            cluster = C[labels == lab]
            c = cluster[len(cluster) // 2]
            d_c = float(distance_field(F, c))
            rad = d_c + 2.0 * (h + side)
            found = False
            for x in _polish_candidates(F, c, _site_sample(F, c, rad)):
                if np.linalg.norm(x - c) > 2.0 * h or not (x0 - h <= x[0] <= x1 + h and y0 - h <= x[1] <= y1 + h):
                    continue
                d_x, near = distance(F, x, tol * max(distance_field(F, x), 1e-300))
                if d_x <= 0:
                    continue
                ok, res = is_critical(F, x, tol * d_x)
                if ok:
                    records.append(CriticalRecord(np.asarray(x, float), d_x, near, res))
                    found = True
            if not found:
                unresolved += 1
    records = _dedupe(records, h)
    return ScanResult(records, h=h, window=(wx0, wy0, wx1, wy1), n_cells=n_cells, unresolved=unresolved)


def _dedupe(records: list[CriticalRecord], radius: float) -> list[CriticalRecord]:
    records = sorted(records, key=lambda r: (r.residual, r.value, float(r.location[0]), float(r.location[1])))
    kept: list[CriticalRecord] = []
    for r in records:
        if all(np.linalg.norm(r.location - k.location) > radius for k in kept):
            kept.append(r)
    kept.sort(key=lambda r: (r.value, float(r.location[0]), float(r.location[1])))
    return kept


def critical_values(
    F: PlanarCompactSet,
    eps: float,
    h: float | None = None,
    tol: float = 1e-9,
    window: Sequence[float] | None = None,
    records: Iterable[CriticalRecord] | None = None,
) -> CompactRealSet:
    """Values ``>= eps`` of detected critical points, as a finite point set.

    Values agreeing to ``1e-12 * diam(F)`` are identified.  Pass ``records``
    to reuse an earlier scan.
    """
    if eps <= 0:
        raise CritfieldError("eps must be positive")
    if records is None:
        records = scan_critical(F, window, h, tol)
    vals = np.sort(np.array([r.value for r in records if r.value >= eps]))
    D = F.diam
    if vals.size:
        keep = np.ones(vals.size, dtype=bool)
        keep[1:] = np.diff(vals) > 1e-12 * D
        vals = vals[keep]
        assert vals[-1] <= D * (1 + 1e-12), "critical value above the diameter"
    return CompactRealSet.from_points(vals)


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FerryReport:
    n_pairs: int
    violations: int
    worst_ratio: float
    worst_pair: tuple[int, int] | None
    slack: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def ferry_check(records: Sequence[CriticalRecord], tol: float = 1e-9) -> FerryReport:
    """Check ``|d(v) - d(w)| <= |v - w|**2 / (2 min(d(v), d(w)))`` on all pairs.

    The slack is ``10 * tol``; ``worst_ratio`` is the largest
    ``|d(v) - d(w)| / bound`` (0 when all values agree).
    """
    recs = list(records)
    n = len(recs)
    slack = 10.0 * tol
    if n < 2:
        return FerryReport(0, 0, 0.0, None, slack)
    X = np.array([r.location for r in recs])
    v = np.array([r.value for r in recs])
    i, j = np.triu_indices(n, 1)
    lhs = np.abs(v[i] - v[j])
    sq = np.sum((X[i] - X[j]) ** 2, axis=1)
    bound = sq / (2.0 * np.minimum(v[i], v[j]))
    viol = lhs > bound + slack
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs == 0, 0.0, lhs / bound)
    k = int(np.argmax(ratio))
    return FerryReport(len(i), int(viol.sum()), float(ratio[k]), (int(i[k]), int(j[k])), slack)


@dataclass(frozen=True)
class ProbeReport:
    samples: int
    violations: int
    worst: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def semiconcavity_probe(F: PlanarCompactSet, a, samples: int = 1000, seed: int = 0) -> ProbeReport:
    """Midpoint convexity of ``(2/delta)|x - a|**2 - d_F(x)`` on ``B(a, delta/2)``.

    ``delta = d_F(a)``; random collinear triples (left, mid, right) are drawn
    inside the ball.  ``worst`` is the largest ``g(mid) - mean(g(ends))``.
    """
    a = np.asarray(a, dtype=float)
    delta = float(distance_field(F, a))
    if delta <= 0:
        raise CritfieldError("a must lie off the set")
    rng = np.random.default_rng(seed)
    R = 0.5 * delta
    rad = R * np.sqrt(rng.random(samples))
    th = rng.random(samples) * TWO_PI
    m = a + np.stack([rad * np.cos(th), rad * np.sin(th)], 1)
    phi = rng.random(samples) * TWO_PI
    u = np.stack([np.cos(phi), np.sin(phi)], 1)
    # largest half-length keeping both ends inside the ball
    mu = np.sum((m - a) * u, axis=1)
    reach = np.sqrt(np.maximum(R * R - np.sum((m - a) ** 2, 1) + mu**2, 0.0)) - np.abs(mu)
    s = reach * rng.random(samples)
    left, right = m - s[:, None] * u, m + s[:, None] * u

    def g(x):
        return (2.0 / delta) * np.sum((x - a) ** 2, axis=1) - distance_field(F, x)

    excess = g(m) - 0.5 * (g(left) + g(right))
    return ProbeReport(samples, int(np.sum(excess > 1e-10)), float(excess.max()))


def restriction_check(F: PlanarCompactSet, a, r: float, n: int = 41) -> bool:
    """``d_F = d_{F ∩ B̄(a, 3r)}`` on a sample grid of ``B(a, r)``.

    Raises
    ------
    CritfieldError
        If ``B(a, r)`` misses ``F``.
    """
    a = np.asarray(a, dtype=float)
    if r <= 0 or float(distance_field(F, a)) >= r:
        raise CritfieldError("B(a, r) must meet the set")
    G = F.restrict_disk(a, 3.0 * r)
    t = np.linspace(-r, r, n)
    X = np.stack(np.meshgrid(t, t), -1).reshape(-1, 2)
    X = a + X[np.sum(X**2, 1) < r * r]
    d_full = distance_field(F, X)
    d_loc = distance_field(G, X)
    scale = 1e-12 * (r + float(np.max(np.abs(a))))
    return bool(np.all(np.abs(d_full - d_loc) <= (0.0 if len(F.segments) == 0 else scale)))
