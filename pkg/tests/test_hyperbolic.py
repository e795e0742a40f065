import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from critfield.distfield import PlanarCompactSet, is_critical, scan_critical
from critfield.errors import CritfieldError
from critfield.hyperbolic import (
    HPoint,
    cosh_inequality_check,
    cosine_formula_check,
    exp_map,
    from_disk,
    hdist,
    hyp_critical,
    hyp_critical_points,
    kappa_of,
    law_of_cosines_residual,
    mobius,
    random_sites,
    riemannian_ferry_check,
    tie_configuration,
    to_disk,
    triangle_from_angle,
)

disk_points = st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi)).map(
    lambda t: complex(t[0] * math.cos(t[1]), t[0] * math.sin(t[1]))
)


def hyperboloid_distance(p, q, kappa):
    """Oracle on the hyperboloid: <X-Y, X-Y> = 4 sinh^2(d / 2 kappa)."""

    def lift(z):
        s = abs(z) ** 2
        return np.array([1 + s, 2 * z.real, 2 * z.imag]) / (1 - s)

    X, Y = lift(p), lift(q)
    D = X - Y
    q = max(0.0, D[1] ** 2 + D[2] ** 2 - D[0] ** 2)
    return 2 * kappa * math.asinh(math.sqrt(q) / 2)


class TestDistance:
    def test_closed_form(self):
        assert hdist(HPoint(0j), HPoint(0.5 + 0j)) == pytest.approx(math.log(3), abs=1e-15)

    def test_geodesic_integration(self):
        val, _ = quad(lambda x: 2 / (1 - x * x), 0, 0.5)
        assert hdist(HPoint(0j), HPoint(0.5 + 0j)) == pytest.approx(val, rel=1e-13)

    def test_zero(self):
        p = HPoint(0.3 - 0.2j)
        assert hdist(p, p) == 0

    def test_scaling(self):
        kappa = 3.0
        p, q = 0.2 + 0.1j, -0.4 + 0.5j
        assert hdist(HPoint(p, -1 / kappa**2), HPoint(q, -1 / kappa**2)) == pytest.approx(
            kappa * hdist(HPoint(p), HPoint(q)), rel=1e-14
        )

    def test_mismatch(self):
        with pytest.raises(CritfieldError, match="curvature mismatch"):
            hdist(HPoint(0j, -1), HPoint(0j, -2))

    def test_outside_disk(self):
        with pytest.raises(CritfieldError):
            HPoint(1.0 + 0j)

    @settings(max_examples=200, deadline=None)
    @given(disk_points, disk_points)
    def test_matches_hyperboloid(self, p, q):
        assert hdist(HPoint(p), HPoint(q)) == pytest.approx(hyperboloid_distance(p, q, 1.0), rel=1e-7, abs=1e-7)

    @settings(max_examples=300, deadline=None)
    @given(disk_points, disk_points, disk_points)
    def test_triangle_inequality(self, a, b, c):
        A, B, C = HPoint(a), HPoint(b), HPoint(c)
        assert hdist(A, C) <= hdist(A, B) + hdist(B, C) + 1e-12 * (1 + hdist(A, C))

    def test_exp_map_distance_and_direction(self):
        p = HPoint(0.3 + 0.4j, -0.5)
        q = exp_map(p, 1.7, 2.0)
        assert hdist(p, q) == pytest.approx(1.7, rel=1e-13)
        w = mobius(p.z, q.z)
        assert math.atan2(w.imag, w.real) == pytest.approx(2.0, abs=1e-12)


class TestCosines:
    def test_degenerate_angles(self):
        _, _, _, c0 = triangle_from_angle(1.2, 0.5, 0.0)
        _, _, _, cpi = triangle_from_angle(1.2, 0.5, math.pi)
        assert c0 == pytest.approx(0.7, abs=1e-12) and cpi == pytest.approx(1.7, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 4), st.floats(0.01, 4), st.floats(0, math.pi), st.floats(-4, -0.25))
    def test_random_triangles(self, a, b, gamma, k):
        _, _, _, c = triangle_from_angle(a, b, gamma, k)
        assert abs(law_of_cosines_residual(a, b, c, gamma, kappa_of(k))) <= 1e-10


class TestCriticality:
    def test_symmetric_pair(self):
        x = HPoint(0.1 + 0.2j)
        F = [exp_map(x, 0.8, 0.3), exp_map(x, 0.8, 0.3 + math.pi)]
        ok, fan = hyp_critical(F, x)
        assert ok and len(fan.directions) == 2

    def test_single_site(self):
        F = [HPoint(0.5j)]
        rng = np.random.default_rng(0)
        for z in rng.uniform(-0.6, 0.6, (50, 2)):
            assert not hyp_critical(F, HPoint(complex(*z)))[0]

    def test_three_sites(self):
        x = HPoint(-0.2 + 0.1j, -2.0)
        F = [exp_map(x, 1.0, t) for t in (0.0, 2.1, 4.2)]
        assert hyp_critical(F, x)[0]

    def test_three_sites_in_half_plane(self):
        x = HPoint(0j)
        F = [exp_map(x, 1.0, t) for t in (0.0, 0.5, 1.0)]
        assert not hyp_critical(F, x)[0]

    def test_directions_are_unit(self):
        x = HPoint(0.3 + 0.3j)
        F = [exp_map(x, 1.0, t) for t in (0.0, 2.0, 4.0)]
        _, fan = hyp_critical(F, x)
        np.testing.assert_allclose(np.hypot(*fan.directions.T), 1.0, atol=1e-12)

    def test_on_set(self):
        with pytest.raises(CritfieldError, match="on the set"):
            hyp_critical([HPoint(0.1j)], HPoint(0.1j))

    @pytest.mark.parametrize("seed", range(5))
    def test_isometry_invariance(self, seed):
        rng = np.random.default_rng(seed)
        F = random_sites(rng, -1.0, 7)
        p = complex(*rng.uniform(-0.3, 0.3, 2))
        G = [HPoint(complex(mobius(p, f.z))) for f in F]
        a = sorted(v for _, v, _ in hyp_critical_points(F))
        b = sorted(v for _, v, _ in hyp_critical_points(G))
        np.testing.assert_allclose(a, b, rtol=1e-9)

    @pytest.mark.parametrize("seed", range(5))
    def test_critical_points_are_equidistant(self, seed):
        rng = np.random.default_rng(10 + seed)
        F = random_sites(rng, -1.0, 8)
        for x, d, res in hyp_critical_points(F):
            ds = sorted(hdist(x, f) for f in F)
            assert ds[1] - ds[0] <= 1e-9 * d and res <= 1e-9 * d


class TestCosineFormula:
    def test_pointing_at_site(self):
        x = HPoint(0.1j)
        f = exp_map(x, 1.0, 0.7)
        rep = cosine_formula_check([f], x, 0.7, (1e-4,))
        assert rep.alpha == pytest.approx(0, abs=1e-9) and rep.max_error <= 1e-8

    def test_orthogonal(self):
        x = HPoint(0.1j)
        f = exp_map(x, 1.0, 0.7)
        rep = cosine_formula_check([f], x, 0.7 + math.pi / 2, (1e-4,))
        assert abs(rep.slopes[0]) <= 1e-4

    def test_sixty_degrees(self):
        x = HPoint(0.2 - 0.1j, -1.0)
        f = exp_map(x, 1.5, 1.0)
        rep = cosine_formula_check([f], x, 1.0 + math.pi / 3, (1e-4,))
        assert rep.slopes[0] == pytest.approx(-0.5, abs=1e-4)

    def test_error_shrinks_linearly(self):
        rng = np.random.default_rng(3)
        F, x, v = tie_configuration(rng, -1.0)
        rep = cosine_formula_check(F, x, v, (1e-3, 1e-4, 1e-5))
        assert np.all(rep.errors <= 1.5 * rep.t)


class TestFerry:
    def test_equal_values(self):
        x = HPoint(0j)
        rep = riemannian_ferry_check([(x, 1.0), (HPoint(0.1 + 0j), 1.0)])
        assert rep.passed and rep.worst_ratio == 0

    def test_constant(self):
        rep = riemannian_ferry_check([(HPoint(0j), 1.0), (HPoint(0.2 + 0j), 1.1)], R=2.0, kappa=1.0)
        assert rep.C == pytest.approx(math.cosh(4.0) ** 2)

    def test_symmetric_configuration_near_centre(self):
        # pairs (g(y), +-y) scaled into the disk, the hyperbolic analogue of the planar construction
        kappa = 1.0
        ys = np.array([0.05, 0.07, 0.1])
        g = np.concatenate([[0], 2 * np.sqrt(2 * ys[-1]) * np.cumsum(np.sqrt(np.diff(ys)))]) / 2
        F = [HPoint(to_disk([gi, s * y], kappa)) for gi, y in zip(g, ys) for s in (1, -1)]
        cps = hyp_critical_points(F)
        rep = riemannian_ferry_check([(p, d) for p, d, _ in cps])
        assert rep.passed and len(cps) >= 3

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        rng = np.random.default_rng(seed)
        cps = hyp_critical_points(random_sites(rng, -1.0, 8))
        assert riemannian_ferry_check([(p, d) for p, d, _ in cps]).passed


class TestFlatLimit:
    @pytest.mark.parametrize("seed", range(3))
    def test_verdicts_match(self, seed):
        kappa = 1e3
        k = -1 / kappa**2
        rng = np.random.default_rng(seed)
        P = rng.uniform(-0.7, 0.7, (7, 2))
        E = PlanarCompactSet(P)
        H = [HPoint(to_disk(p, kappa), k) for p in P]
        for x in rng.uniform(-0.7, 0.7, (100, 2)):
            ok_e, res_e = is_critical(E, x)
            ok_h, fan = hyp_critical(H, HPoint(to_disk(x, kappa), k))
            assert ok_e == ok_h and abs(res_e - fan.residual) <= 1e-6
        cps = hyp_critical_points(H)
        for x, d, _ in cps:
            assert is_critical(E, from_disk(x.z, kappa), tol=1e-6)[0]
        # the planar scan merges critical points closer than its step, so match both ways within that step
        scan = scan_critical(E)
        A = np.array([from_disk(x.z, kappa) for x, _, _ in cps])
        B = np.array([r.location for r in scan])
        gaps = np.hypot(*(A[:, None] - B[None]).transpose(2, 0, 1))
        assert gaps.min(1).max() <= scan.h and gaps.min(0).max() <= scan.h

    def test_constant_tends_to_one(self):
        rep = riemannian_ferry_check([(HPoint(0j, -1e-6), 1.0), (HPoint(1e-4 + 0j, -1e-6), 1.2)])
        assert rep.C == pytest.approx(1.0, abs=1e-4)


class TestCosh:
    def test_zero(self):
        assert cosh_inequality_check(0.0, 0.0) == (True, True)

    def test_equal(self):
        assert cosh_inequality_check(1.7, 1.7)[1]

    @settings(max_examples=500, deadline=None)
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_random(self, u, v):
        assert cosh_inequality_check(u, v) == (True, True)
