"""Quantitative checks linking gap sums, critical values and dyadic bands.

All verdicts are finite-depth statements: a partial quantity is either
"bounded" (stays below a threshold at depth ``N``) or "exceeds" it.
Divergence is never certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate
from scipy.spatial import cKDTree

from .construct import build_ferry_set
from .distfield import (
    CriticalRecord,
    PlanarCompactSet,
    critical_values,
    distance_field,
    scan_critical,
)
from .errors import CritfieldError
from .realsets import CompactRealSet, gap_sum, is_bt

__all__ = [
    "SeriesReport",
    "dyadic_sum_check",
    "BandSeriesReport",
    "band_gap_sums",
    "band_series",
    "DyadicProfile",
    "annulus_packing",
    "LengthProfile",
    "critical_length_profile",
    "LocalGapsumReport",
    "local_gapsum_check",
    "ExclusionReport",
    "exclusion_count",
    "exclusion_bound",
    "PorosityProfile",
    "porosity_probe",
    "RoundTripReport",
    "realization_round_trip",
]


# ---------------------------------------------------------------------------
# dyadic series versus integral
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeriesReport:
    """Partial values of the three dyadic conditions.

    ``weighted`` is ``sum g(delta_k) delta_k**alpha``, ``increments`` is
    ``sum (g(delta_{k+1}) - g(delta_k)) delta_k**alpha`` and ``integral``
    is ``int_{delta_N}^D g(x) x**(alpha-1) dx`` split into band integrals
    ``I_k``.
    """

    alpha: float
    D: float
    N: int
    weighted: np.ndarray
    increments: np.ndarray
    band_integrals: np.ndarray
    thresholds: tuple[float, float, float]
    verdicts: tuple[str, str, str]
    sandwich_ok: bool
    sandwich_lower: np.ndarray = field(repr=False)
    sandwich_upper: np.ndarray = field(repr=False)

    @property
    def partial_sums(self) -> tuple[float, float, float]:
        return float(self.weighted.sum()), float(self.increments.sum()), float(self.band_integrals.sum())

    @property
    def agree(self) -> bool:
        return len(set(self.verdicts)) == 1


def _verdict(terms: np.ndarray, T: float | None, factor: float) -> tuple[str, float]:
    nz = terms[np.abs(terms) > 0]
    if T is None:
        T = factor * float(nz[0]) if nz.size else 0.0
    total = float(terms.sum())
    return ("bounded" if total <= T else "exceeds"), T


def dyadic_sum_check(
    g: Callable[[np.ndarray], np.ndarray],
    alpha: float,
    D: float = 1.0,
    N: int = 20,
    T: float | None = None,
    *,
    factor: float = 1e3,
    samples: int = 4096,
) -> SeriesReport:
    """Compare the three dyadic conditions for a nonincreasing ``g`` on ``(0, D]``.

    Parameters
    ----------
    g : callable
        Vectorized, nonincreasing, with ``g(D) = 0``.
    alpha : float
        At least 1.
    D, N : float, int
        Bands ``[D 2**-(k+1), D 2**-k]`` for ``k < N``.
    T : float, optional
        Common threshold; by default each quantity uses ``factor`` times its
        first nonzero term.

    Also checks ``2**-alpha g(d_k) d_k**alpha <= I_k <= 2**(alpha-1) g(d_{k+1}) d_{k+1}**alpha``.

    Raises
    ------
    CritfieldError
        If ``g`` increases on the sample grid or ``g(D) != 0``.
    """
    if alpha < 1:
        raise CritfieldError("alpha must be >= 1")
    if D <= 0 or N < 1:
        raise CritfieldError("need D > 0 and N >= 1")
    x = np.geomspace(D * 2.0**-N, D, samples)
    gx = np.asarray(g(x), dtype=float)
    if np.any(np.diff(gx) > 1e-12 * np.maximum(np.abs(gx[:-1]), 1.0)):
        raise CritfieldError("g must be nonincreasing")
    if abs(float(g(np.array([D]))[0])) > 1e-12:
        raise CritfieldError("g(D) must be 0")
    k = np.arange(N)
    d = D * 2.0 ** -k.astype(float)
    d1 = d / 2.0
    gd, gd1 = np.asarray(g(d), float), np.asarray(g(d1), float)
    weighted = gd * d**alpha
    increments = (gd1 - gd) * d**alpha
    I = np.array(
        [integrate.quad(lambda t: float(g(np.array([t]))[0]) * t ** (alpha - 1), lo, hi, epsrel=1e-12, limit=200)[0]
         for lo, hi in zip(d1, d)]
    )
    lower = 2.0**-alpha * gd * d**alpha
    upper = 2.0 ** (alpha - 1) * gd1 * d1**alpha
    rtol = 1e-9
    ok = bool(np.all(lower <= I * (1 + rtol) + 1e-300) and np.all(I <= upper * (1 + rtol) + 1e-300))
    v1, t1 = _verdict(weighted, T, factor)
    v2, t2 = _verdict(increments, T, factor)
    v3, t3 = _verdict(I, T, factor)
    return SeriesReport(alpha, D, N, weighted, increments, I, (t1, t2, t3), (v1, v2, v3), ok, lower, upper)


# ---------------------------------------------------------------------------
# band series
# ---------------------------------------------------------------------------


def _band_count(K: CompactRealSet, D: float) -> int:
    pos = K.restrict(np.nextafter(0.0, 1.0), D)
    if pos.is_empty:
        return 1
    return max(1, int(math.ceil(math.log2(D / pos.min))) + 1)


def band_gap_sums(K: CompactRealSet, D: float, alpha: float, N: int | None = None) -> np.ndarray:
    """``G_alpha(K ∩ [D 2**-(n+1), D 2**-n])`` for ``n = 0..N-1``."""
    if N is None:
        N = _band_count(K, D)
    out = np.zeros(N)
    for n in range(N):
        band = K.restrict(D * 2.0 ** -(n + 1), D * 2.0**-n)
        out[n] = gap_sum(band, alpha) if not band.is_empty else 0.0
    return out


@dataclass(frozen=True)
class BandSeriesReport:
    """Weighted band series ``S`` and the tail integral of ``G_{1/2}(K ∩ [r, inf))``.

    Each is "bounded" when it stays below ``factor`` times its first nonzero
    contribution; ``verdict`` is "consistent" when both get the same label.
    """

    D: float
    S: float
    integral: float
    terms: np.ndarray
    band_sums: np.ndarray
    verdict: str
    sandwich_ok: bool


def band_series(K: CompactRealSet, D: float, N: int | None = None, *, factor: float = 1e3) -> BandSeriesReport:
    """``S = sum delta_n**1.5 G_{1/2}(K ∩ [delta_{n+1}, delta_n])`` and its integral form.

    The integral ``int_0^inf G_{1/2}(K ∩ [r, inf)) sqrt(r) dr`` is evaluated
    in closed form as ``(2/3) sum |I|**0.5 u**1.5`` over gaps ``I = (u, w)``.
    The function ``g(r) = G_{1/2}(K ∩ [r, inf))`` is checked against its band
    increments: ``G(band_k) <= g(d_{k+1}) - g(d_k) <= G(band_k) + sqrt(D)``.

    Raises
    ------
    CritfieldError
        If ``K`` is not inside ``[0, D]``.
    """
    if K.is_empty:
        raise CritfieldError("K must be nonempty")
    if K.min < 0 or K.max > D:
        raise CritfieldError("K must lie in [0, D]")
    if N is None:
        N = _band_count(K, D)
    bands = band_gap_sums(K, D, 0.5, N)
    d = D * 2.0 ** -np.arange(N, dtype=float)
    terms = d**1.5 * bands
    S = float(terms.sum())
    integral = (2.0 / 3.0) * K.gap_moment(0.5, 1.5)

    def g(r):
        part = K.restrict(r, K.max)
        return 0.0 if part.is_empty else gap_sum(part, 0.5)

    gd = np.array([g(x) for x in np.concatenate([d, [d[-1] / 2]])])
    inc = gd[1:] - gd[:-1]
    tol = 1e-9 * max(1.0, float(gd.max()))
    ok = bool(np.all(inc >= bands - tol) and np.all(inc <= bands + math.sqrt(D) + tol))
    # the integral splits into band pieces comparable to the series terms
    first_band = K.restrict(D / 2, D)
    first_int = (2.0 / 3.0) * first_band.gap_moment(0.5, 1.5) if not first_band.is_empty else 0.0
    v_S, _ = _verdict(terms, None, factor)
    v_I = "bounded" if integral <= factor * (first_int if first_int > 0 else integral) else "exceeds"
    verdict = "consistent" if v_S == v_I else "inconsistent"
    return BandSeriesReport(D, S, float(integral), terms, bands, verdict, ok)


# ---------------------------------------------------------------------------
# annulus packing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicProfile:
    """Per-band packing counts for the shells ``delta_{n+1} <= d_F <= delta_n``."""

    D: float
    deltas: np.ndarray
    counts: np.ndarray
    covered: np.ndarray
    disjoint: np.ndarray
    min_separation: np.ndarray

    @property
    def weighted_sum(self) -> float:
        return float(np.sum(self.counts * self.deltas**2))

    @property
    def bound(self) -> float:
        return 1e5 * self.D**2

    @property
    def margin(self) -> float:
        return self.bound / self.weighted_sum if self.weighted_sum > 0 else math.inf

    @property
    def passed(self) -> bool:
        return bool(self.weighted_sum <= self.bound and self.covered.all() and self.disjoint.all())


def _site_neighbourhood_lattice(F: PlanarCompactSet, R: float, s: float) -> np.ndarray:
    """Lattice points ``s Z^2`` within ``R`` of some site (points or segment boxes)."""
    m = int(math.ceil(R / s))
    u = np.arange(-m, m + 1)
    U = np.stack(np.meshgrid(u, u, indexing="ij"), -1).reshape(-1, 2)
    U = U[np.hypot(U[:, 0], U[:, 1]) * s <= R + s]
    blocks = []
    if len(F.points):
        base = np.round(F.points / s).astype(np.int64)
        blocks.append((base[:, None, :] + U[None]).reshape(-1, 2))
    for p, q in F.segments:
        lo = np.floor((np.minimum(p, q) - R) / s).astype(np.int64)
        hi = np.ceil((np.maximum(p, q) + R) / s).astype(np.int64)
        gx, gy = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij")
        blocks.append(np.stack([gx.ravel(), gy.ravel()], 1))
    idx = np.unique(np.concatenate(blocks), axis=0)
    return idx * s


def _random_near(F: PlanarCompactSet, R: float, n_per_site: int, rng) -> np.ndarray:
    V = F.vertices()
    base = V[rng.integers(0, len(V), n_per_site * max(1, len(F.points) + len(F.segments)))]
    rad = R * np.sqrt(rng.random(len(base)))
    th = rng.random(len(base)) * 2 * math.pi
    return base + np.stack([rad * np.cos(th), rad * np.sin(th)], 1)


def annulus_packing(
    F: PlanarCompactSet, D: float | None = None, N: int = 12, *, seed: int = 0, probes_per_site: int = 400
) -> DyadicProfile:
    """Separated point sets ``P_n`` in the shells ``H_n = {delta_{n+1} <= d_F <= delta_n}``.

    ``P_n`` starts from the lattice of spacing ``delta_n/19.9`` inside
    ``H_n`` and is completed greedily on random probes, so that the balls
    ``B(x, delta_n/40)``, ``x ∈ P_n``, are pairwise disjoint.  Coverage of
    ``H_n`` by ``B(x, delta_n/8)`` is then tested on fresh random probes.
    The profile records ``p_n = |P_n|`` for ``n = 0..N``.
    """
    if D is None:
        D = F.diam
    if D <= 0 or D < F.diam * (1 - 1e-12):
        raise CritfieldError("need D >= diam F > 0")
    rng = np.random.default_rng(seed)
    deltas = D * 2.0 ** -np.arange(N + 1, dtype=float)
    counts = np.zeros(N + 1, dtype=np.int64)
    covered = np.zeros(N + 1, dtype=bool)
    disjoint = np.zeros(N + 1, dtype=bool)
    min_sep = np.zeros(N + 1)
    for n, delta in enumerate(deltas):
        lo, hi = delta / 2.0, delta
        sep = delta / 20.0
        L = _site_neighbourhood_lattice(F, hi, delta / 19.9)
        dL = distance_field(F, L)
        P = L[(dL >= lo) & (dL <= hi)]
        Q = _random_near(F, hi, probes_per_site, rng)
        dQ = distance_field(F, Q)
        Q = Q[(dQ >= lo) & (dQ <= hi)]
        if len(P):
            far = cKDTree(P).query(Q, k=1)[0] > sep
            Q = Q[far]
        extra = []
        for q in Q:
            if all(np.hypot(*(q - e)) > sep for e in extra):
                extra.append(q)
        if extra:
            P = np.concatenate([P, np.array(extra)]) if len(P) else np.array(extra)
        counts[n] = len(P)
        if len(P) >= 2:
            dd = cKDTree(P).query(P, k=2)[0][:, 1]
            min_sep[n] = float(dd.min())
        else:
            min_sep[n] = math.inf
        disjoint[n] = min_sep[n] > 2.0 * delta / 40.0
        T = _random_near(F, hi, probes_per_site, rng)
        dT = distance_field(F, T)
        T = T[(dT >= lo) & (dT <= hi)]
        if len(T) == 0:
            covered[n] = True
        elif len(P) == 0:
            covered[n] = False
        else:
            covered[n] = bool(np.all(cKDTree(P).query(T, k=1)[0] <= delta / 8.0))
    return DyadicProfile(float(D), deltas, counts, covered, disjoint, min_sep)


# ---------------------------------------------------------------------------
# critical length profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LengthProfile:
    """Box-count estimate of the length of critical points above each level.

    ``length[i]`` is ``s`` times the number of boxes of side ``s`` holding a
    detection with value ``> r[i]``.  This is an indicator, not a measure.
    """

    r: np.ndarray
    length: np.ndarray
    box: float
    integral: float


def critical_length_profile(
    F: PlanarCompactSet,
    r_grid: Sequence[float],
    s: float,
    *,
    h: float | None = None,
    records: Sequence[CriticalRecord] | None = None,
) -> LengthProfile:
    """Tabulate the box-count length estimate of ``{x critical : d_F(x) > r}``.

    The integral over ``r`` uses the trapezoid rule on the sorted grid with
    the profile set to 0 at ``diam F``, beyond which no critical value lies.
    """
    if s <= 0:
        raise CritfieldError("box side s must be positive")
    if records is None:
        records = scan_critical(F, h=h)
    r = np.sort(np.asarray(r_grid, dtype=float))
    X = np.array([rec.location for rec in records]).reshape(-1, 2)
    v = np.array([rec.value for rec in records])
    boxes = np.floor(X / s).astype(np.int64)
    length = np.array([s * len({tuple(b) for b in boxes[v > t]}) for t in r], dtype=float)
    D = F.diam
    rr, ll = r, length
    if r.size and r[-1] < D:
        rr, ll = np.append(r, D), np.append(length, 0.0)
    integral = float(np.trapezoid(ll, rr)) if rr.size > 1 else 0.0
    return LengthProfile(r, length, s, integral)


# ---------------------------------------------------------------------------
# local gap-sum bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalGapsumReport:
    delta: float
    values: np.ndarray
    gap_sum: float
    bound: float
    n_records: int

    @property
    def passed(self) -> bool:
        return self.gap_sum <= self.bound

    @property
    def margin(self) -> float:
        return self.bound / self.gap_sum if self.gap_sum > 0 else math.inf


def local_gapsum_check(
    F: PlanarCompactSet,
    a,
    tol: float = 1e-9,
    *,
    h: float | None = None,
    records: Sequence[CriticalRecord] | None = None,
) -> LocalGapsumReport:
    """Half-power gap sum of critical values in ``B̄(a, delta/3)``, ``delta = d_F(a)``.

    Compared with ``6e4 sqrt(delta)``.  A fresh scan of the square around
    the ball is run unless ``records`` is given.
    """
    a = np.asarray(a, dtype=float)
    delta = float(distance_field(F, a))
    if delta <= 0:
        raise CritfieldError("a must lie off the set")
    R = delta / 3.0
    if records is None:
        step = h if h is not None else R / 100.0
        records = scan_critical(F, (a[0] - R, a[1] - R, a[0] + R, a[1] + R), step, tol)
    inside = [rec for rec in records if np.hypot(*(rec.location - a)) <= R]
    vals = np.unique(np.array([rec.value for rec in inside]))
    G = gap_sum(CompactRealSet.from_points(vals), 0.5) if vals.size else 0.0
    return LocalGapsumReport(delta, vals, G, 6e4 * math.sqrt(delta), len(inside))


# ---------------------------------------------------------------------------
# exclusion count
# ---------------------------------------------------------------------------


def exclusion_count(D, alpha, beta) -> int:
    """``floor(1e25 D**4 / ((beta - alpha) beta**1.5)) + 3`` in exact arithmetic.

    Rational inputs (``int``, ``Fraction`` or decimal strings) are handled
    exactly; ``beta**1.5`` is exact when ``beta`` is a rational square,
    otherwise it is evaluated with 80 significant digits.
    """
    D, a, b = (Fraction(str(t)) if isinstance(t, float) else Fraction(t) for t in (D, alpha, beta))
    if not 0 < a < b:
        raise CritfieldError("need 0 < alpha < beta")
    num = Fraction(10) ** 25 * D**4
    root = _exact_sqrt(b)
    if root is not None:
        return math.floor(num / ((b - a) * b * root)) + 3
    with mpmath.workdps(80):
        val = mpmath.mpf(num.numerator) / num.denominator
        den = (mpmath.mpf((b - a).numerator) / (b - a).denominator) * (
            mpmath.mpf(b.numerator) / b.denominator
        ) ** mpmath.mpf(1.5)
        return int(mpmath.floor(val / den)) + 3


def _exact_sqrt(q: Fraction) -> Fraction | None:
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


@dataclass(frozen=True)
class ExclusionReport:
    p: int
    band: int
    interval: tuple[float, float]
    band_product: float
    bound: float
    forced_lower: float
    verdict: str
    trivial: bool


def exclusion_bound(D: float, alpha: float, beta: float, cv: CompactRealSet) -> ExclusionReport:
    """Check that ``p`` equispaced values in ``[alpha, beta]`` cannot all be critical values.

    The band ``n`` is chosen so that ``[c, d] = [alpha, beta] ∩ [delta_{n+1},
    delta_n]`` has ``d - c >= (beta - alpha)/4`` and ``delta_n >= beta/2``.
    The supplied ``cv`` must satisfy ``G_{1/2}(cv ∩ band) delta_n**1.5 <=
    1e10 D**2``.  If the ``p`` points were all in ``cv``, the same product
    would be at least ``(p - 1)**0.5 (beta - alpha)**0.5 beta**1.5 / 8``.
    The verdict is ``"excluded"`` when that lower bound exceeds ``1e10 D**2``,
    ``"inconclusive"`` when it does not (the chain only closes for
    ``beta`` above about 0.0075 regardless of ``D``), and
    ``"band bound violated"`` when ``cv`` itself breaks the band bound.
    """
    p = exclusion_count(D, alpha, beta)
    bound = 1e10 * D**2
    if alpha >= D:
        return ExclusionReport(p, -1, (alpha, beta), 0.0, bound, math.inf, "excluded", True)
    b = min(beta, D)
    k = 0
    while not (D * 2.0 ** -(k + 1) < b <= D * 2.0**-k):
        k += 1
    n = k if b - D * 2.0 ** -(k + 1) >= (beta - alpha) / 4 else k + 1
    dn = D * 2.0**-n
    c, d = max(alpha, dn / 2), min(b, dn)
    if not (d - c >= (beta - alpha) / 4 * (1 - 1e-12) and dn >= b / 2):
        raise AssertionError("band choice fails its length conditions")
    band = cv.restrict(dn / 2, dn) if not cv.is_empty else cv
    G = gap_sum(band, 0.5) if not band.is_empty else 0.0
    prod = G * dn**1.5
    with mpmath.workdps(50):
        lower = float(mpmath.sqrt(p - 1) * mpmath.sqrt(beta - alpha) * mpmath.mpf(beta) ** 1.5 / 8)
    if prod > bound:
        verdict = "band bound violated"
    elif lower > bound:
        verdict = "excluded"
    else:
        verdict = "inconclusive"
    return ExclusionReport(p, n, (c, d), prod, bound, lower, verdict, band.is_empty)


# ---------------------------------------------------------------------------
# porosity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PorosityProfile:
    r: np.ndarray
    largest_gap: np.ndarray
    ratio: np.ndarray


def porosity_probe(cv: CompactRealSet, r_grid: Sequence[float]) -> PorosityProfile:
    """Largest component of ``(0, r) \\ cv`` and its ratio to ``r**5``.

    Values of ``cv`` are only known down to the detection cutoff, so small
    ``r`` reflect that cutoff rather than the true set.
    """
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0):
        raise CritfieldError("radii must be positive")
    pts = cv.intervals() if not cv.is_empty else np.empty((0, 2))
    out = np.zeros(len(r))
    for i, t in enumerate(r):
        iv = pts[(pts[:, 1] > 0) & (pts[:, 0] < t)]
        lo = np.concatenate([[0.0], np.minimum(iv[:, 1], t)])
        hi = np.concatenate([np.maximum(iv[:, 0], 0.0), [t]])
        out[i] = float(np.max(hi - lo))
    return PorosityProfile(r, out, out / r**5)


# ---------------------------------------------------------------------------
# realization round trip
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundTripReport:
    target: np.ndarray
    recovered: np.ndarray
    missing: np.ndarray
    max_error: float
    cv_is_bt: bool
    h: float

    @property
    def passed(self) -> bool:
        return self.missing.size == 0 and self.cv_is_bt


def realization_round_trip(
    A: CompactRealSet, eps: float | None = None, h: float | None = None, tol: float = 1e-9, match: float = 1e-6
) -> RoundTripReport:
    """Build a planar set realizing ``A``, rescan it, and compare critical values with ``A``."""
    c = build_ferry_set(A)
    if eps is None:
        eps = 0.5 * float(A.min)
    cv = critical_values(c.F, eps, h, tol)
    rec = cv.points() if not cv.is_empty else np.empty(0)
    tgt = A.points()
    if rec.size:
        err = np.min(np.abs(tgt[:, None] - rec[None, :]), axis=1)
    else:
        err = np.full(tgt.size, np.inf)
    missing = tgt[err > match]
    ok = is_bt(cv, 0.5)[0] if not cv.is_empty else True
    return RoundTripReport(tgt, rec, missing, float(err.max()) if err.size else 0.0, ok, h or c.F.diam / 500)
