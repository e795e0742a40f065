"""Level curves ``{d_F = r}`` by marching squares, with topology diagnostics.

Grid nodes with ``d_F - r >= 0`` count as outside.  Ambiguous (saddle)
cells are resolved by evaluating ``d_F`` exactly at the cell centre.  A
crossing that falls on a grid node is shared by every edge through that
node, so a pinch point of the level set shows up as a vertex of degree 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .distfield import PlanarCompactSet, distance_field
from .errors import CritfieldError

__all__ = ["LevelCurveSet", "Anomaly", "ManifoldReport", "extract", "manifold_diagnostic"]

# crossings closer than this fraction of a cell to a node are snapped onto it
_SNAP = 1e-9


@dataclass(frozen=True)
class Anomaly:
    kind: str  # "degree" or "subgrid"
    location: tuple[float, float]
    degree: int = 0


@dataclass
class LevelCurveSet:
    """Polylines approximating ``S_r(F)`` inside a window.

    Attributes
    ----------
    polylines : list of (k, 2) arrays
        Vertex chains, split at vertices of degree other than 2.
    closed : list of bool
    component : list of int
        Component label of each polyline.
    n_components : int
    bboxes : (n_components, 4) array
    anomalies : list of Anomaly
    max_vertex_error : float
        ``max |d_F(vertex) - r|``.
    """

    r: float
    window: tuple[float, float, float, float]
    h: tuple[float, float]
    polylines: list = field(default_factory=list)
    closed: list = field(default_factory=list)
    component: list = field(default_factory=list)
    n_components: int = 0
    bboxes: np.ndarray = field(default_factory=lambda: np.empty((0, 4)))
    anomalies: list = field(default_factory=list)
    max_vertex_error: float = 0.0
    vertices: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    edges: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=int))
    vertex_component: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))


# corner order: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); edges 0=bottom 1=right 2=top 3=left
_EDGE_CORNERS = ((0, 1), (1, 2), (3, 2), (0, 3))


def _cell_segments(sign, center_out):
    """Pairs of crossing edges for one cell; ``sign[c]`` is True for outside corners."""
    crossing = [e for e, (a, b) in enumerate(_EDGE_CORNERS) if sign[a] != sign[b]]
    if len(crossing) == 2:
        return [tuple(crossing)]
    if len(crossing) != 4:
        return []
    # saddle: corners 0 and 2 share a sign, 1 and 3 the other
    if center_out == sign[0]:
        # the diagonal 0-2 is connected through the centre: cut off corners 1 and 3
        return [(0, 1), (2, 3)]
    return [(0, 3), (1, 2)]


def extract(
    F: PlanarCompactSet,
    r: float,
    window: Sequence[float],
    h: float | Sequence[float],
) -> LevelCurveSet:
    """Marching-squares approximation of ``{x : d_F(x) = r}`` in ``window``.

    Parameters
    ----------
    r : float
        Level, positive.
    window : (xmin, ymin, xmax, ymax)
    h : float or (hx, hy)
        Grid step; a pair gives an anisotropic grid.

    Returns
    -------
    LevelCurveSet
        Empty when the window misses the level set.
    """
    if r <= 0:
        raise CritfieldError("r must be positive")
    hx, hy = (float(h), float(h)) if np.isscalar(h) else map(float, h)
    if hx <= 0 or hy <= 0:
        raise CritfieldError("h must be positive")
    x0, y0, x1, y1 = map(float, window)
    nx = max(1, int(round((x1 - x0) / hx)))
    ny = max(1, int(round((y1 - y0) / hy)))
    xs = x0 + hx * np.arange(nx + 1)
    ys = y0 + hy * np.arange(ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    f = distance_field(F, np.stack([X, Y], -1)) - r
    out = f >= 0
    centers = np.stack(np.meshgrid(xs[:-1] + hx / 2, ys[:-1] + hy / 2, indexing="ij"), -1)
    fc = distance_field(F, centers) - r
    cout = fc >= 0

    corner = np.stack([out[:-1, :-1], out[1:, :-1], out[1:, 1:], out[:-1, 1:]], -1)
    n_out = corner.sum(-1)
    mixed = (n_out > 0) & (n_out < 4)
    anomalies: list[Anomaly] = []
    uniform_flip = ((n_out == 4) & ~cout) | ((n_out == 0) & cout)
    for i, j in zip(*np.nonzero(uniform_flip)):
        anomalies.append(Anomaly("subgrid", (float(centers[i, j, 0]), float(centers[i, j, 1]))))

    vid: dict = {}
    coords: list = []

    def vertex(kind, i, j):
        # kind 'h': edge (i,j)-(i+1,j); kind 'v': edge (i,j)-(i,j+1)
        if kind == "h":
            fa, fb = f[i, j], f[i + 1, j]
        else:
            fa, fb = f[i, j], f[i, j + 1]
        t = fa / (fa - fb)
        if t <= _SNAP:
            key = ("n", i, j)
        elif t >= 1 - _SNAP:
            key = ("n", i + 1, j) if kind == "h" else ("n", i, j + 1)
        else:
            key = (kind, i, j)
        k = vid.get(key)
        if k is None:
            k = len(coords)
            vid[key] = k
            if key[0] == "n":
                coords.append((xs[key[1]], ys[key[2]]))
            elif kind == "h":
                coords.append((xs[i] + t * hx, ys[j]))
            else:
                coords.append((xs[i], ys[j] + t * hy))
        return k

    edges = set()
    for i, j in zip(*np.nonzero(mixed)):
        segs = _cell_segments(corner[i, j], cout[i, j])
        ids = {
            0: lambda: vertex("h", i, j),
            1: lambda: vertex("v", i + 1, j),
            2: lambda: vertex("h", i, j + 1),
            3: lambda: vertex("v", i, j),
        }
        for a, b in segs:
            va, vb = ids[a](), ids[b]()
            if va != vb:
                edges.add((min(va, vb), max(va, vb)))

    res = LevelCurveSet(r=r, window=(x0, y0, x1, y1), h=(hx, hy), anomalies=anomalies)
    if not coords:
        return res
    V = np.array(coords, dtype=float)
    E = np.array(sorted(edges), dtype=int).reshape(-1, 2)
    # a vertex whose only cells collapse onto it carries no edge; drop it
    used_v = np.unique(E.ravel())
    remap = -np.ones(len(V), dtype=int)
    remap[used_v] = np.arange(len(used_v))
    V, E = V[used_v], remap[E]
    n = len(V)
    if n == 0:
        return res
    deg = np.bincount(E.ravel(), minlength=n)
    on_border = (
        np.isclose(V[:, 0], x0, atol=1e-12 * hx)
        | np.isclose(V[:, 0], xs[-1], atol=1e-12 * hx)
        | np.isclose(V[:, 1], y0, atol=1e-12 * hy)
        | np.isclose(V[:, 1], ys[-1], atol=1e-12 * hy)
    )
    for k in np.flatnonzero((deg != 2) & ~(on_border & (deg == 1))):
        anomalies.append(Anomaly("degree", (float(V[k, 0]), float(V[k, 1])), int(deg[k])))

    A = coo_matrix((np.ones(len(E)), (E[:, 0], E[:, 1])), shape=(n, n))
    ncomp, labels = connected_components(A, directed=False)
    # relabel deterministically by first vertex
    first = {}
    for v, lab in enumerate(labels):
        first.setdefault(lab, len(first))
    labels = np.array([first[l] for l in labels])

    polylines, closed, comp = _chains(V, E, deg, labels)
    bboxes = np.array(
        [[*V[labels == c].min(0), *V[labels == c].max(0)] for c in range(ncomp)], dtype=float
    )
    err = np.abs(distance_field(F, V) - r)
    res.polylines, res.closed, res.component = polylines, closed, comp
    res.n_components = int(ncomp)
    res.bboxes = bboxes
    res.max_vertex_error = float(err.max())
    res.vertices, res.edges, res.vertex_component = V, E, labels
    return res


def _chains(V, E, deg, labels):
    adj: dict[int, list[int]] = {}
    for a, b in E:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    used = set()
    polylines, closed, comp = [], [], []

    def walk(start, nxt):
        chain = [start, nxt]
        used.add((min(start, nxt), max(start, nxt)))
        prev, cur = start, nxt
        while deg[cur] == 2:
            cand = [w for w in adj[cur] if (min(cur, w), max(cur, w)) not in used]
            if not cand:
                break
            prev, cur = cur, cand[0]
            used.add((min(prev, cur), max(prev, cur)))
            chain.append(cur)
        return chain

    for s in sorted(adj):
        if deg[s] == 2:
            continue
        for w in adj[s]:
            if (min(s, w), max(s, w)) not in used:
                ch = walk(s, w)
                polylines.append(V[ch])
                closed.append(ch[0] == ch[-1])
                comp.append(int(labels[s]))
    for s in sorted(adj):
        for w in adj[s]:
            if (min(s, w), max(s, w)) not in used:
                ch = walk(s, w)
                polylines.append(V[ch])
                closed.append(ch[0] == ch[-1])
                comp.append(int(labels[s]))
    return polylines, closed, comp


@dataclass(frozen=True)
class ManifoldReport:
    """Manifold signature of a level set at grid resolution (not a proof)."""

    degree_anomalies: tuple
    subgrid_anomalies: tuple
    n_components: int
    focus: tuple[float, float] | None = None
    window_radius: float | None = None
    extra_components: int | None = None

    @property
    def clean(self) -> bool:
        return not self.degree_anomalies and not self.subgrid_anomalies


def _segment_distance(P, A, B):
    D = B - A
    L = np.sum(D * D, axis=1)
    t = np.clip(np.sum((P - A) * D, axis=1) / np.where(L > 0, L, 1.0), 0.0, 1.0)
    Q = A + t[:, None] * D
    return np.hypot(*(Q - P).T)


def manifold_diagnostic(
    curves: LevelCurveSet,
    focus: Sequence[float] | None = None,
    window_radius: float | None = None,
    contain_tol: float | None = None,
) -> ManifoldReport:
    """Vertex-degree anomalies and, around ``focus``, the count of foreign components.

    A component *contains* the focus when one of its segments passes within
    ``contain_tol`` (default twice the larger grid step) of it.
    ``extra_components`` counts components meeting ``B(focus, window_radius)``
    that do not contain the focus.
    """
    deg = tuple(a for a in curves.anomalies if a.kind == "degree")
    sub = tuple(a for a in curves.anomalies if a.kind == "subgrid")
    if focus is None:
        return ManifoldReport(deg, sub, curves.n_components)
    if window_radius is None or window_radius <= 0:
        raise CritfieldError("window_radius must be positive when focus is given")
    p = np.asarray(focus, dtype=float)
    if contain_tol is None:
        contain_tol = 2.0 * max(curves.h)
    extra = 0
    if len(curves.edges):
        A = curves.vertices[curves.edges[:, 0]]
        B = curves.vertices[curves.edges[:, 1]]
        d = _segment_distance(p[None, :], A, B)
        lab = curves.vertex_component[curves.edges[:, 0]]
        for c in range(curves.n_components):
            dc = d[lab == c]
            if dc.size and dc.min() <= window_radius and dc.min() > contain_tol:
                extra += 1
    return ManifoldReport(deg, sub, curves.n_components, (float(p[0]), float(p[1])), window_radius, extra)
