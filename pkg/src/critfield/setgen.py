"""Generators for structured compact null sets with exact tail accounting.

Every generator returns a :class:`~critfield.realsets.CompactRealSet` built
from structured components, with a :class:`~critfield.realsets.TailReport`
attached that converts gap sums of the finite truncation into gap sums of
the infinite limit set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import CritfieldError, ResolutionError
from .realsets import CompactRealSet, TailReport, _Cantor, _Run

__all__ = [
    "GeneratorSpec",
    "cantor",
    "cantor_gap_sum",
    "cantor_assembly",
    "assembly_alpha",
    "dyadic_lattice_set",
    "lattice_count",
    "MAX_LATTICE_LEVEL",
    "finite",
    "generate",
]

#: Largest level whose point count ``2**(4n) // n**4 + 1`` fits in a signed 64-bit integer.
MAX_LATTICE_LEVEL = 20


def cantor_gap_sum(alpha: float, s: float, scale: float = 1.0, start_level: int = 0) -> float:
    """Degree-``s`` gap sum of the levels ``>= start_level`` of ``scale * C(alpha)``.

    Level ``m`` contributes ``2**m`` gaps of length ``scale*(1-2*alpha)*alpha**m``,
    so the sum is geometric with ratio ``2*alpha**s``; it is ``inf`` when that
    ratio is at least one.
    """
    q = 2.0 * alpha**s
    if q >= 1.0:
        return math.inf
    return (scale * (1.0 - 2.0 * alpha)) ** s * q**start_level / (1.0 - q)


def _check_alpha(alpha):
    if not 0.0 < alpha < 0.5:
        raise CritfieldError("cantor ratio alpha must lie in (0, 1/2)")


def cantor(alpha: float, depth: int, *, left: float = 0.0, scale: float = 1.0) -> CompactRealSet:
    """Depth-``depth`` truncation of the middle-gap Cantor set ``C(alpha)``.

    Parameters
    ----------
    alpha : float
        Ratio in ``(0, 1/2)``; each step keeps two outer pieces of relative
        length ``alpha``.
    depth : int
        Number of removal steps.  The result has ``2**depth`` intervals of
        length ``alpha**depth``.
    left, scale : float
        The set is placed at ``left + scale * C(alpha)``.

    Returns
    -------
    CompactRealSet
        With a tail giving the exact gap sum of all deeper levels.

    Examples
    --------
    >>> cantor(1/3, 1).intervals().tolist()
    [[0.0, 0.3333333333333333], [0.6666666666666667, 1.0]]
    """
    _check_alpha(alpha)
    if depth < 1:
        raise CritfieldError("depth must be >= 1")
    tail = TailReport(
        lambda s: cantor_gap_sum(alpha, s, scale, depth),
        alpha=0.5,
        limit_null=True,
        label=f"cantor(alpha={alpha}, depth={depth})",
    )
    return CompactRealSet.from_components([_Cantor(left, scale, alpha, depth)], tail=tail)


def assembly_alpha(n: int) -> float:
    """Cantor ratio of block ``n`` in :func:`cantor_assembly`."""
    return 0.25 - 1.0 / (5.0 * n)


def _default_depth(n: int) -> int:
    return n + 8


def cantor_assembly(n_max: int, depth_rule: Callable[[int], int] = _default_depth) -> CompactRealSet:
    """Blocks ``1 + 2**-n + 2**-n * C(1/4 - 1/(5n))`` for ``n <= n_max``, plus ``{1, 16}``.

    Block ``n`` occupies ``[1 + 2**-n, 1 + 2**(1-n)]``; consecutive blocks
    touch, the points accumulate only at 1, and the big gap ``(2, 16)`` is
    always present.  Blocks are truncated at ``depth_rule(n)`` levels.

    The attached tail adds the deeper levels of every truncated block, the
    blocks beyond ``n_max``, and removes the gap ``(1, 1 + 2**-n_max)`` that
    exists only in the truncation.
    """
    if n_max < 1:
        raise CritfieldError("n_max must be >= 1")
    depths = {n: int(depth_rule(n)) for n in range(1, n_max + 1)}
    if min(depths.values()) < 1:
        raise CritfieldError("depth_rule must give depths >= 1")
    comps = [_Run(1.0, 1.0, 1)]
    for n in range(n_max, 0, -1):
        comps.append(_Cantor(1.0 + 2.0**-n, 2.0**-n, assembly_alpha(n), depths[n]))
    comps.append(_Run(16.0, 1.0, 1))

    def correction(s: float) -> float:
        total = 0.0
        for n, d in depths.items():
            total += cantor_gap_sum(assembly_alpha(n), s, 2.0**-n, d)
        n = n_max + 1
        while True:
            term = cantor_gap_sum(assembly_alpha(n), s, 2.0**-n)
            if not math.isfinite(term):
                return math.inf
            total += term
            if term < 1e-18 * max(total, 1e-300) or n > n_max + 20000:
                break
            n += 1
        return total - 2.0 ** (-n_max * s)

    tail = TailReport(correction, alpha=0.5, limit_null=True, label=f"cantor_assembly(n_max={n_max})")
    return CompactRealSet.from_components(comps, tail=tail)


def lattice_count(n: int) -> int:
    """``floor((n * 2**-n)**-4) + 1`` in exact integer arithmetic."""
    if n < 1:
        raise CritfieldError("level must be >= 1")
    return (1 << (4 * n)) // n**4 + 1


def dyadic_lattice_set(n_max: int) -> CompactRealSet:
    """``{0}`` plus equispaced partitions of the dyadic bands ``[2**-(n+1), 2**-n]``.

    Band ``n`` carries ``k_n + 1`` points splitting it into ``k_n`` equal
    gaps, with ``k_n = lattice_count(n)``.  Adjacent bands share their common
    endpoint.  The bracket ``(n 2**-n)**-4 <= k_n <= 2 (n 2**-n)**-4`` is
    checked exactly on construction.

    The per-band half-power gap sum grows like ``2**(3n/2) / n**2``, so the
    limit set has infinite gap sums for every exponent ``s <= 4/5``; the
    attached tail reports ``inf`` there.

    Raises
    ------
    ResolutionError
        If ``n_max`` exceeds :data:`MAX_LATTICE_LEVEL` ("resolution overflow").
    """
    if n_max < 1:
        raise CritfieldError("n_max must be >= 1")
    if n_max > MAX_LATTICE_LEVEL:
        raise ResolutionError(
            f"resolution overflow: k_n exceeds 64-bit integers beyond n = {MAX_LATTICE_LEVEL}"
        )
    comps = [_Run(0.0, 1.0, 1)]
    counts = {}
    for n in range(n_max, 0, -1):
        k = lattice_count(n)
        base = 1 << (4 * n)
        if not (base <= n**4 * k <= 2 * base):
            raise AssertionError(f"count bracket fails at n={n}")
        counts[n] = k
        delta = 2.0**-n
        # band n omits its top point, which is the bottom point of band n-1
        comps.append(_Run(delta / 2, delta / (2 * k), k + (1 if n == 1 else 0)))

    def correction(s: float) -> float:
        if s <= 0.8:
            return math.inf
        total = 0.0
        n = n_max + 1
        while True:
            k = (1 << (4 * n)) // n**4 + 1
            term = k * (2.0**-n / (2 * k)) ** s
            total += term
            if term < 1e-18 * total or n > n_max + 100000:
                break
            n += 1
        return total - 2.0 ** (-(n_max + 1) * s)

    tail = TailReport(correction, alpha=0.5, limit_null=True, label=f"dyadic_lattice_set(n_max={n_max})")
    return CompactRealSet.from_components(comps, tail=tail)


def finite(points: Sequence[float]) -> CompactRealSet:
    """A finite point set (its own limit; no tail)."""
    return CompactRealSet.from_points(points)


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of a generated set.

    ``kind`` is one of ``cantor``, ``tf_assembly``, ``t45`` or ``finite``.
    """

    kind: str
    alpha: float | None = None
    depth: int | None = None
    n_max: int | None = None
    points: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind == "cantor":
            if self.alpha is None or self.depth is None:
                raise CritfieldError("cantor needs alpha and depth")
            _check_alpha(self.alpha)
            if self.depth < 1:
                raise CritfieldError("depth must be >= 1")
        elif self.kind in ("tf_assembly", "t45"):
            if self.n_max is None or self.n_max < 1:
                raise CritfieldError("n_max must be >= 1")
        elif self.kind != "finite":
            raise CritfieldError(f"unknown generator kind {self.kind!r}")


def generate(spec: GeneratorSpec) -> CompactRealSet:
    if spec.kind == "cantor":
        return cantor(spec.alpha, spec.depth)
    if spec.kind == "tf_assembly":
        return cantor_assembly(spec.n_max)
    if spec.kind == "t45":
        return dyadic_lattice_set(spec.n_max)
    return finite(spec.points)
