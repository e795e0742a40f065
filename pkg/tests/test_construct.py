import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critfield.construct import (
    assemble_translates,
    build_ferry_set,
    exterior_check,
    gap_witness,
    projection_check,
    realize_bands,
)
from critfield.distfield import PlanarCompactSet, critical_values, distance, is_critical
from critfield.errors import CritfieldError
from critfield.realsets import CompactRealSet, gap_sum
from critfield.setgen import cantor, cantor_assembly

targets = st.lists(st.floats(0.5, 4.0), min_size=1, max_size=32, unique=True).filter(
    lambda xs: len(xs) == 1 or np.min(np.diff(np.sort(xs))) > 1e-9
)


class TestBuild:
    def test_singleton(self):
        c = build_ferry_set(CompactRealSet.from_points([0.7]))
        assert c.g.tolist() == [0.0]
        assert sorted(c.F.points.tolist()) == [[0, -0.7], [0, 0.7]]
        assert is_critical(c.F, [0, 0]) == (True, 0.0)

    def test_two_points(self):
        c = build_ferry_set(CompactRealSet.from_points([1, 2]))
        assert c.g.tolist() == [0.0, 2.0]
        d, near = distance(c.F, [2, 0])
        assert d == 2 and sorted(near.tolist()) == [[2, -2], [2, 2]]
        assert is_critical(c.F, [2, 0])[0]

    def test_nonpositive_min(self):
        with pytest.raises(CritfieldError):
            build_ferry_set(CompactRealSet.from_points([0, 1]))

    def test_fat_set(self):
        with pytest.raises(CritfieldError):
            build_ferry_set(CompactRealSet([[1, 2]]))

    def test_assembly_truncation_values_detected(self):
        K = cantor_assembly(1, depth_rule=lambda n: 3).endpoints()
        c = build_ferry_set(K)
        cv = critical_values(c.F, 0.5 * K.min, h=c.F.diam / 1000)
        for v in K.points():
            assert cv.contains(v, tol=1e-9)

    def test_refinement_grows_g(self):
        coarse = cantor(0.2, 3, left=1.0).endpoints()
        fine = cantor(0.2, 6, left=1.0).endpoints()
        cc, cf = build_ferry_set(coarse), build_ferry_set(fine)
        for v in coarse.points():
            # same point, computed along a different path in the finer representation
            i = int(np.argmin(np.abs(cf.y - v)))
            assert abs(cf.y[i] - v) < 1e-12
            assert cf.g[i] >= cc.g_at(v) - 1e-12

    @settings(max_examples=40, deadline=None)
    @given(targets)
    def test_invariants(self, pts):
        K = CompactRealSet.from_points(pts)
        c = build_ferry_set(K)
        y = c.y
        assert np.all(np.diff(c.g) > 0)
        assert np.max(np.hypot(*c.F.points.T)) <= c.radius_bound * (1 + 1e-12)
        i, j = np.triu_indices(len(y), 1)
        assert np.all(y[j] - y[i] <= (c.g[j] - c.g[i]) ** 2 / (2 * c.b) * (1 + 1e-12))
        for v in y:
            assert projection_check(c, v)
            assert is_critical(c.F, c.axis_point(v)) == (True, 0.0)

    def test_translation_invariance(self):
        c = build_ferry_set(CompactRealSet.from_points([1, 1.3, 2]))
        a = critical_values(c.F, 0.5).points()
        b = critical_values(c.F.translate([5.0, -3.0]), 0.5).points()
        np.testing.assert_allclose(a, b, rtol=1e-12)


class TestChecks:
    def test_projection_margin(self):
        c = build_ferry_set(CompactRealSet.from_points([1, 2]))
        rep = projection_check(c, 2)
        assert rep.passed and rep.margin == pytest.approx(math.sqrt(5) - 2, rel=1e-14)

    def test_projection_singleton(self):
        assert projection_check(build_ferry_set(CompactRealSet.from_points([3])), 3)

    def test_exterior(self):
        c = build_ferry_set(CompactRealSet.from_points([1, 2]))
        assert exterior_check(c, 1, 0.1)
        assert exterior_check(c, 2, c.g_at(2) + 10)

    def test_exterior_random(self):
        rng = np.random.default_rng(4)
        c = build_ferry_set(CompactRealSet.from_points(rng.uniform(0.5, 4, 20)))
        for _ in range(100):
            v = float(rng.choice(c.y))
            z = c.g_at(v) + float(rng.exponential(1.0)) + 1e-9
            assert exterior_check(c, v, z)

    def test_exterior_precondition(self):
        c = build_ferry_set(CompactRealSet.from_points([1, 2]))
        with pytest.raises(CritfieldError):
            exterior_check(c, 2, 1.0)


class TestWitness:
    def test_assembly_block_point(self):
        K = cantor_assembly(4)
        w = gap_witness(K, 2.0, 16.0)
        assert w is not None and w.ratio >= 0.5 and all(r >= 0.5 for _, r in w.levels)

    def test_isolated_point(self):
        K = CompactRealSet.from_points([1.0, 2.0, 3.0])
        assert gap_witness(K, 2.0, 3.0, min_eps=1e-3) is None

    def test_cantor_block_end(self):
        # y = 0.2 ends the left block of C(0.2); at every scale the nearest left gap
        # covers 0.6 of the distance from its left end to y
        w = gap_witness(cantor(0.2, 14), 0.2, 2.0)
        assert w is not None
        np.testing.assert_allclose([r for _, r in w.levels], 0.75, rtol=1e-7)

    def test_gap_right_end_is_isolated_from_left(self):
        assert gap_witness(cantor(0.2, 12), 0.8, 2.0) is None


class TestAssemble:
    def test_two_singletons_closed(self):
        P = PlanarCompactSet([[0, 0.1], [0, -0.1]])
        asm = assemble_translates([(P, 0.1), (P, 0.1)], "closed")
        assert asm.verified
        gap = asm.centers[1, 0] - asm.centers[0, 0]
        assert gap >= 4 * P.diam + 1

    def test_budget(self):
        P = PlanarCompactSet([[0, 0.1]])
        asm = assemble_translates([(P, 0.1), (P, 0.05), (P, 0.025)])
        assert asm.area_budget == pytest.approx(81 * math.pi * (0.1**2 + 0.05**2 + 0.025**2))
        d = np.hypot(*(asm.centers[:, None] - asm.centers[None]).transpose(2, 0, 1))
        r = asm.radii
        i, j = np.triu_indices(len(r), 1)
        assert np.all(d[i, j] >= 9 * (r[i] + r[j]) * (1 - 1e-12))

    def test_rectangle_too_small(self):
        P = PlanarCompactSet([[0, 0.1]])
        with pytest.raises(CritfieldError, match="need area"):
            assemble_translates([(P, 1.0), (P, 1.0)], rectangle=(20.0, 20.0))

    def test_part_outside_ball(self):
        with pytest.raises(CritfieldError):
            assemble_translates([(PlanarCompactSet([[5, 0]]), 1.0)])

    def test_realize_bands(self):
        rng = np.random.default_rng(8)
        K = CompactRealSet.from_points(np.concatenate([rng.uniform(0.5, 1, 6), rng.uniform(0.25, 0.5, 6)]))
        asm, cons = realize_bands(K, 1.0)
        assert asm.verified
        for c, center in zip(cons, asm.centers):
            for v in c.y:
                ok, res = is_critical(asm.F, center + c.axis_point(v))
                assert ok and res == 0
                assert distance(asm.F, center + c.axis_point(v))[0] == pytest.approx(v, rel=1e-12)
        assert all(gap_sum(c.K, 0.5) <= 2 * math.sqrt(2 * c.K.max) + 1e-12 for c in cons)
