"""Distance functions on the hyperbolic plane of constant curvature ``k < 0``.

Points live in the Poincaré unit disk, stored as complex numbers.  With
``kappa = sqrt(-1/k)`` the distance is ``2 kappa artanh|T_p(q)|`` where
``T_p(z) = (z - p)/(1 - conj(p) z)`` is the disk isometry sending ``p`` to 0.
Since ``T_p`` has positive real derivative at ``p``, the initial direction of
the geodesic from ``p`` to ``q`` is simply the direction of ``T_p(q)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distfield import hull_residual
from .errors import CritfieldError

__all__ = [
    "HPoint",
    "TangentFan",
    "kappa_of",
    "mobius",
    "hdist",
    "exp_map",
    "log_direction",
    "law_of_cosines_residual",
    "triangle_from_angle",
    "hyp_distance_field",
    "hyp_critical",
    "hyp_critical_points",
    "cosine_formula_check",
    "riemannian_ferry_check",
    "cosh_inequality_check",
    "to_disk",
    "from_disk",
    "tie_configuration",
    "random_sites",
]


def kappa_of(k: float) -> float:
    if not k < 0:
        raise CritfieldError("curvature must be negative")
    return math.sqrt(-1.0 / k)


@dataclass(frozen=True)
class HPoint:
    """A point of the disk model together with its curvature ``k``."""

    z: complex
    k: float = -1.0

    def __post_init__(self):
        if not abs(self.z) < 1.0:
            raise CritfieldError("disk coordinates must have modulus < 1")
        if not self.k < 0:
            raise CritfieldError("curvature must be negative")

    @property
    def kappa(self) -> float:
        return kappa_of(self.k)


def mobius(p: complex, z):
    """``T_p(z) = (z - p)/(1 - conj(p) z)``; ``T_p(p) = 0``."""
    return (z - p) / (1.0 - np.conj(p) * z)


def _inv_mobius(p: complex, w):
    return (w + p) / (1.0 + np.conj(p) * w)


def _raw_dist(p, q, kappa):
    # sinh(d / 2 kappa) = |p - q| / sqrt((1 - |p|^2)(1 - |q|^2)); better conditioned than artanh|T_p(q)|
    # when both points sit near the boundary
    ap, aq = np.abs(p), np.abs(q)
    den = np.sqrt((1.0 - ap) * (1.0 + ap) * (1.0 - aq) * (1.0 + aq))
    return 2.0 * kappa * np.arcsinh(np.abs(np.subtract(p, q)) / den)


def hdist(p: HPoint, q: HPoint) -> float:
    """Geodesic distance; both points must share the curvature parameter."""
    if p.k != q.k:
        raise CritfieldError("curvature mismatch")
    return float(_raw_dist(p.z, q.z, p.kappa))


def exp_map(p: HPoint, s: float, theta: float) -> HPoint:
    """Point at distance ``s`` from ``p`` along the geodesic leaving at angle ``theta``."""
    w = math.tanh(s / (2.0 * p.kappa)) * complex(math.cos(theta), math.sin(theta))
    return HPoint(complex(_inv_mobius(p.z, w)), p.k)


def log_direction(p: HPoint, q: HPoint) -> np.ndarray:
    """Unit initial direction (Euclidean angle in the disk) of the geodesic from ``p`` to ``q``."""
    w = mobius(p.z, q.z)
    if w == 0:
        raise CritfieldError("points coincide")
    w = w / abs(w)
    return np.array([w.real, w.imag])


def to_disk(x, kappa: float) -> complex:
    """Normal coordinates at 0: the planar vector ``x`` is sent to ``exp_0(x)``."""
    x = np.asarray(x, dtype=float)
    r = float(np.hypot(*x))
    if r == 0:
        return 0j
    t = math.tanh(r / (2.0 * kappa)) / r
    return complex(x[0] * t, x[1] * t)


def from_disk(z: complex, kappa: float) -> np.ndarray:
    """Inverse of :func:`to_disk`."""
    r = abs(z)
    if r == 0:
        return np.zeros(2)
    t = 2.0 * kappa * math.atanh(r) / r
    return np.array([z.real * t, z.imag * t])


# ---------------------------------------------------------------------------
# trigonometry
# ---------------------------------------------------------------------------


def law_of_cosines_residual(a: float, b: float, c: float, gamma: float, kappa: float) -> float:
    """``cosh(c/k) - cosh(a/k) cosh(b/k) + sinh(a/k) sinh(b/k) cos(gamma)``.

    Scaled by ``cosh(a/k) cosh(b/k)``, the largest term, so that rounding in
    the cancelling products is not mistaken for a geometric error.
    """
    lhs = math.cosh(c / kappa)
    big = math.cosh(a / kappa) * math.cosh(b / kappa)
    rhs = big - math.sinh(a / kappa) * math.sinh(b / kappa) * math.cos(gamma)
    return (lhs - rhs) / big


def triangle_from_angle(a: float, b: float, gamma: float, k: float = -1.0) -> tuple[HPoint, HPoint, HPoint, float]:
    """Triangle with sides ``a, b`` from the origin enclosing angle ``gamma``; returns vertices and the third side."""
    o = HPoint(0j, k)
    q = exp_map(o, a, 0.0)
    r = exp_map(o, b, gamma)
    return o, q, r, hdist(q, r)


# ---------------------------------------------------------------------------
# distance function and criticality
# ---------------------------------------------------------------------------


def _site_array(F: Sequence[HPoint]) -> tuple[np.ndarray, float]:
    if len(F) == 0:
        raise CritfieldError("empty site set")
    ks = {f.k for f in F}
    if len(ks) != 1:
        raise CritfieldError("curvature mismatch")
    return np.array([f.z for f in F], dtype=complex), F[0].k


def hyp_distance_field(F: Sequence[HPoint], x: HPoint) -> tuple[float, np.ndarray]:
    """``d_F(x)`` and the distances to every site."""
    Z, k = _site_array(F)
    if x.k != k:
        raise CritfieldError("curvature mismatch")
    d = _raw_dist(x.z, Z, x.kappa)
    return float(d.min()), d


@dataclass(frozen=True)
class TangentFan:
    """Unit directions at ``base`` of the geodesics to the nearest sites."""

    base: HPoint
    value: float
    sites: np.ndarray
    directions: np.ndarray
    residual: float


def hyp_critical(F: Sequence[HPoint], x: HPoint, tol: float | None = None) -> tuple[bool, TangentFan]:
    """Whether 0 lies in the convex hull of the directions to the nearest sites.

    ``tol`` (default ``1e-9 d_F(x)``) is both the nearest-site slack and the
    accepted residual.  In two dimensions this is the same as every unit
    vector making an angle of at most ``pi/2`` with some nearest direction.
    """
    d, ds = hyp_distance_field(F, x)
    if d == 0:
        raise CritfieldError("on the set")
    t = 1e-9 * d if tol is None else tol
    Z, _ = _site_array(F)
    near = np.flatnonzero(ds <= d + t)
    W = mobius(x.z, Z[near])
    U = np.stack([W.real, W.imag], 1) / np.abs(W)[:, None]
    res, _ = hull_residual(U)
    fan = TangentFan(x, d, Z[near], U, res)
    return bool(res <= t), fan


def _to_hyperboloid(z):
    z = np.asarray(z, dtype=complex)
    s = np.abs(z) ** 2
    return np.stack([(1 + s), 2 * z.real, 2 * z.imag], -1) / (1 - s)[..., None]


def _from_hyperboloid(X):
    return complex(X[1], X[2]) / (1.0 + X[0])


def _mink(a, b):
    return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def hyp_critical_points(F: Sequence[HPoint], tol: float | None = None) -> list[tuple[HPoint, float, float]]:
    """All critical points off ``F`` for a finite site set.

    Every critical point is equidistant from two or three nearest sites
    whose directions already surround 0, so it is a geodesic midpoint or a
    hyperbolic circumcentre.  Candidates are computed on the hyperboloid and
    kept when :func:`hyp_critical` accepts them.  Returns
    ``(point, value, residual)`` triples, deduplicated.
    """
    Z, k = _site_array(F)
    X = _to_hyperboloid(Z)
    # time coordinate minus one, kept separately so that differences of nearby
    # lifts do not cancel when the sites sit close to the origin
    s2 = np.abs(Z) ** 2
    X0m1 = 2.0 * s2 / (1.0 - s2)
    out: list[tuple[HPoint, float, float]] = []
    cands = []
    for i, j in itertools.combinations(range(len(Z)), 2):
        m = X[i] + X[j]
        cands.append(m / math.sqrt(-_mink(m, m)))
    for i, j, l in itertools.combinations(range(len(Z)), 3):
        a, b = X[i] - X[j], X[i] - X[l]
        a[0], b[0] = X0m1[i] - X0m1[j], X0m1[i] - X0m1[l]
        # Minkowski normal to both differences
        n = np.array([-(a[1] * b[2] - a[2] * b[1]), a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
        q = _mink(n, n)
        if not q < 0:
            continue
        n = n / math.sqrt(-q)
        if n[0] < 0:
            n = -n
        cands.append(n)
    for c in cands:
        z = _from_hyperboloid(c)
        if not abs(z) < 1:
            continue
        x = HPoint(z, k)
        d, _ = hyp_distance_field(F, x)
        if d <= 0:
            continue
        ok, fan = hyp_critical(F, x, tol)
        if ok and all(abs(mobius(p.z, z)) > 1e-9 for p, _, _ in out):
            out.append((x, d, fan.residual))
    return out


# ---------------------------------------------------------------------------
# first-order formula and quadratic control
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CosineReport:
    alpha: float
    predicted: float
    t: np.ndarray
    slopes: np.ndarray
    errors: np.ndarray

    @property
    def max_error(self) -> float:
        return float(self.errors.max())


def cosine_formula_check(F: Sequence[HPoint], x: HPoint, v: float, t_grid: Sequence[float] = (1e-4,)) -> CosineReport:
    """Finite-difference slope of ``d_F`` along the geodesic from ``x`` at angle ``v``.

    Compared with ``-cos(alpha)``, ``alpha`` the smallest angle between ``v``
    and a direction to a nearest site.
    """
    d, ds = hyp_distance_field(F, x)
    if d == 0:
        raise CritfieldError("on the set")
    _, fan = hyp_critical(F, x)
    u = np.array([math.cos(v), math.sin(v)])
    cosines = np.clip(fan.directions @ u, -1.0, 1.0)
    alpha = float(np.arccos(cosines.max()))
    pred = -math.cos(alpha)
    t = np.asarray(t_grid, dtype=float)
    slopes = np.array([(hyp_distance_field(F, exp_map(x, s, v))[0] - d) / s for s in t])
    return CosineReport(alpha, pred, t, slopes, np.abs(slopes - pred))


@dataclass(frozen=True)
class RiemannFerryReport:
    C: float
    R: float
    n_pairs: int
    violations: int
    worst_ratio: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def riemannian_ferry_check(
    records: Sequence[tuple[HPoint, float]],
    R: float | None = None,
    kappa: float | None = None,
    tol: float = 1e-9,
) -> RiemannFerryReport:
    """Check ``|d(x)**2 - d(y)**2| <= C dist(x, y)**2`` with ``C = cosh(2R/kappa)**2``.

    ``records`` holds ``(point, value)`` pairs of critical points.  ``R``
    defaults to the diameter of the records plus the largest value.  A pair
    violates the inequality when the excess is above ``tol`` relative to the
    larger squared value.
    """
    recs = list(records)
    if not recs:
        return RiemannFerryReport(1.0, 0.0, 0, 0, 0.0)
    if kappa is None:
        kappa = recs[0][0].kappa
    P = [r[0] for r in recs]
    vals = np.array([r[1] for r in recs], dtype=float)
    n = len(recs)
    dist = np.zeros((n, n))
    for i, j in itertools.combinations(range(n), 2):
        dist[i, j] = dist[j, i] = hdist(P[i], P[j])
    if R is None:
        R = float(dist.max()) + float(vals.max())
    C = math.cosh(2.0 * R / kappa) ** 2
    viol, worst, pairs = 0, 0.0, 0
    for i, j in itertools.combinations(range(n), 2):
        pairs += 1
        lhs = abs(vals[i] ** 2 - vals[j] ** 2)
        rhs = C * dist[i, j] ** 2
        if lhs > rhs + tol * max(vals[i], vals[j]) ** 2:
            viol += 1
        if lhs > 0:
            worst = max(worst, lhs / rhs if rhs > 0 else math.inf)
    return RiemannFerryReport(C, R, pairs, viol, worst)


def cosh_inequality_check(u: float, v: float, rtol: float = 1e-12) -> tuple[bool, bool]:
    """``cosh u - 1 <= (u**2/2) cosh u`` and ``|u**2 - v**2| <= 2 |cosh u - cosh v|``."""
    # divided through by the polynomial side: cosh u - 1 = 2 sinh^2(u/2) and
    # cosh u - cosh v = 2 sinh((u+v)/2) sinh((u-v)/2), so both reduce to sinh(x)/x bounds
    a = _shc(u / 2) ** 2 <= math.cosh(u) * (1 + rtol)
    b = _shc((u + v) / 2) * _shc((u - v) / 2) >= 1.0 - rtol
    return a, b


def _shc(x: float) -> float:
    return 1.0 if x == 0 else math.sinh(x) / x


# ---------------------------------------------------------------------------
# random configurations
# ---------------------------------------------------------------------------


def tie_configuration(
    rng: np.random.Generator, k: float, n_near: int = 3, n_far: int = 2
) -> tuple[list[HPoint], HPoint, float]:
    """Sites at one exact common distance from a base point, plus farther sites.

    The common distance ``d`` is drawn from ``[kappa, 3 kappa]`` and the far
    sites lie at least ``kappa/2`` beyond it, so nearest-site sets are stable
    under the small steps of a finite-difference check.  Returns the sites,
    the base point and a random direction angle.
    """
    kappa = kappa_of(k)
    x = HPoint(complex(*rng.uniform(-0.4, 0.4, 2)), k)
    d = kappa * rng.uniform(1.0, 3.0)
    m = int(rng.integers(1, n_near + 1))
    F = [exp_map(x, d, th) for th in rng.uniform(0, 2 * math.pi, m)]
    F += [exp_map(x, d + kappa * rng.uniform(0.5, 1.5), th) for th in rng.uniform(0, 2 * math.pi, n_far)]
    return F, x, float(rng.uniform(0, 2 * math.pi))


def random_sites(rng: np.random.Generator, k: float, n: int, radius: float = 0.8) -> list[HPoint]:
    """``n`` sites uniform in the Euclidean disk of the given radius."""
    r = radius * np.sqrt(rng.random(n))
    th = rng.uniform(0, 2 * math.pi, n)
    return [HPoint(complex(a * math.cos(b), a * math.sin(b)), k) for a, b in zip(r, th)]
