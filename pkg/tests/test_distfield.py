import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critfield.distfield import (
    PlanarCompactSet,
    clarke_hull,
    critical_values,
    descent_witness,
    directional_derivative,
    distance,
    distance_field,
    ferry_check,
    hull_residual,
    is_critical,
    restriction_check,
    scan_critical,
    semiconcavity_probe,
)
from critfield.errors import CritfieldError, EmptySetError

TWO = PlanarCompactSet([[-1, 0], [1, 0]])
TRIANGLE = PlanarCompactSet([[1, 0], [-0.5, math.sqrt(3) / 2], [-0.5, -math.sqrt(3) / 2]])


def brute_distance(P, x):
    return float(np.min(np.hypot(*(np.asarray(P) - x).T)))


def angular_criticality(P, x, rel=1e-9):
    """Oracle: critical iff the nearest-site angles leave no gap larger than pi."""
    P = np.asarray(P, dtype=float)
    d = np.hypot(*(P - x).T)
    near = P[d <= d.min() * (1 + rel)]
    ang = np.sort(np.arctan2(near[:, 1] - x[1], near[:, 0] - x[0]))
    if len(ang) < 2:
        return False
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    return gaps.max() <= math.pi * (1 + 1e-9)


def enumerate_critical(P):
    """Oracle: every critical point of a finite point set is a pair midpoint or a circumcentre."""
    P = np.asarray(P, dtype=float)
    cands = [(P[i] + P[j]) / 2 for i, j in itertools.combinations(range(len(P)), 2)]
    for i, j, k in itertools.combinations(range(len(P)), 3):
        a, b, c = P[i], P[j], P[k]
        den = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(den) < 1e-14:
            continue
        ux = (a @ a * (b[1] - c[1]) + b @ b * (c[1] - a[1]) + c @ c * (a[1] - b[1])) / den
        uy = (a @ a * (c[0] - b[0]) + b @ b * (a[0] - c[0]) + c @ c * (b[0] - a[0])) / den
        cands.append(np.array([ux, uy]))
    out = []
    for x in cands:
        if angular_criticality(P, x) and all(np.hypot(*(x - y)) > 1e-9 for y in out):
            out.append(x)
    return np.array(out).reshape(-1, 2)


class TestPlanarSet:
    def test_empty(self):
        with pytest.raises(EmptySetError):
            PlanarCompactSet([])

    def test_degenerate_segment_becomes_point(self):
        F = PlanarCompactSet([], [[[1, 1], [1, 1]]])
        assert len(F.segments) == 0 and F.points.tolist() == [[1, 1]]

    def test_diam_matches_pairwise(self):
        rng = np.random.default_rng(1)
        P = rng.normal(size=(40, 2))
        F = PlanarCompactSet(P)
        oracle = max(np.hypot(*(a - b)) for a, b in itertools.combinations(P, 2))
        assert F.diam == pytest.approx(oracle, rel=1e-14)

    def test_json_round_trip(self):
        F = PlanarCompactSet([[0, 0]], [[[1, 0], [2, 0]]])
        G = PlanarCompactSet.from_json(F.to_json())
        assert np.array_equal(F.points, G.points) and np.array_equal(F.segments, G.segments)


class TestDistance:
    def test_two_points(self):
        d, near = distance(TWO, [0, 0])
        assert d == 1 and len(near) == 2

    def test_circle(self):
        t = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
        F = PlanarCompactSet(np.stack([np.cos(t), np.sin(t)], 1))
        d, _ = distance(F, [0, 0])
        assert abs(d - 1) <= 4e-7

    def test_single_point(self):
        d, near = distance(PlanarCompactSet([[0, 0]]), [3, 4])
        assert d == 5 and near.tolist() == [[0, 0]]

    def test_segment(self):
        F = PlanarCompactSet([], [[[-1, 0], [1, 0]]])
        assert distance(F, [0.3, 2])[0] == pytest.approx(2, abs=1e-15)
        assert distance(F, [4, 4])[0] == pytest.approx(5, abs=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000))
    def test_field_matches_brute_force_and_is_lipschitz(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(int(rng.integers(1, 60)), 2))
        F = PlanarCompactSet(P)
        X = rng.normal(scale=2, size=(50, 2))
        d = distance_field(F, X)
        np.testing.assert_allclose(d, [brute_distance(P, x) for x in X], rtol=1e-14, atol=1e-15)
        Y = X + rng.normal(scale=0.3, size=X.shape)
        assert np.all(np.abs(distance_field(F, Y) - d) <= np.hypot(*(Y - X).T) * (1 + 1e-12))


class TestHull:
    def test_opposite(self):
        H = clarke_hull(TWO, [0, 0])
        assert H.contains_origin and H.residual == 0

    def test_above(self):
        H = clarke_hull(TWO, [0, 1])
        np.testing.assert_allclose(np.sort(H.directions[:, 0]), [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
        assert not H.contains_origin

    def test_equilateral_centroid(self):
        H = clarke_hull(TRIANGLE, [0, 0])
        assert H.contains_origin and len(H.directions) == 3

    def test_on_set(self):
        with pytest.raises(CritfieldError, match="on the set"):
            clarke_hull(TWO, [1, 0])

    def test_directions_unit(self):
        H = clarke_hull(TRIANGLE, [0.1, 0.2])
        np.testing.assert_allclose(np.hypot(*H.directions.T), 1, atol=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=8))
    def test_residual_matches_angular_gap(self, angles):
        U = np.stack([np.cos(angles), np.sin(angles)], 1)
        res, _ = hull_residual(U)
        a = np.sort(np.mod(angles, 2 * math.pi))
        gap = np.diff(np.concatenate([a, [a[0] + 2 * math.pi]])).max()
        expected = 0.0 if gap <= math.pi else math.cos((2 * math.pi - gap) / 2)
        assert res == pytest.approx(expected, abs=1e-12)


class TestCriticality:
    def test_two_points_origin(self):
        assert is_critical(TWO, [0, 0]) == (True, 0.0)

    def test_two_points_above(self):
        ok, res = is_critical(TWO, [0, 0.5])
        assert not ok and res == pytest.approx(0.5 / math.sqrt(1.25), rel=1e-14)

    def test_ferry_pair(self):
        F = PlanarCompactSet([[0, 1], [0, -1], [2, 2], [2, -2]])
        assert is_critical(F, [2, 0])[0]

    def test_descent_single(self):
        v = descent_witness(PlanarCompactSet([[0, 0]]), [1, 0])
        np.testing.assert_allclose(v, [-1, 0], atol=1e-15)
        assert directional_derivative(PlanarCompactSet([[0, 0]]), [1, 0], v) == pytest.approx(-1)

    def test_descent_two(self):
        v = descent_witness(TWO, [0, 1])
        np.testing.assert_allclose(v, [0, -1], atol=1e-12)
        assert directional_derivative(TWO, [0, 1], v) == pytest.approx(-math.sqrt(0.5), rel=1e-12)

    def test_descent_segment(self):
        F = PlanarCompactSet([], [[[-5, 0], [5, 0]]])
        np.testing.assert_allclose(descent_witness(F, [0.5, 1]), [0, -1], atol=1e-12)

    def test_descent_at_critical(self):
        with pytest.raises(CritfieldError):
            descent_witness(TWO, [0, 0])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10_000))
    def test_verdict_matches_angular_oracle(self, seed):
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(int(rng.integers(2, 12)), 2))
        F = PlanarCompactSet(P)
        for x in enumerate_critical(P):
            assert is_critical(F, x)[0]
        x = rng.normal(size=2)
        assert is_critical(F, x)[0] == angular_criticality(P, x)

    def test_residual_stable_under_perturbation(self):
        F = PlanarCompactSet(TRIANGLE.points + 1e-10)
        _, res = is_critical(F, [0, 0], tol=1e-8)
        assert res <= 1e-8


class TestScan:
    def test_two_points(self):
        recs = scan_critical(TWO)
        assert len(recs) == 1
        np.testing.assert_allclose(recs[0].location, [0, 0], atol=recs.h)
        assert recs[0].value == pytest.approx(1, abs=1e-9)

    def test_equilateral(self):
        recs = scan_critical(TRIANGLE)
        expected = enumerate_critical(TRIANGLE.points)
        assert len(recs) == len(expected) == 4  # centroid and three edge midpoints
        for x in expected:
            assert np.min(np.hypot(*(recs.locations - x).T)) <= recs.h

    def test_circle_centre(self):
        t = np.linspace(0, 2 * math.pi, 3600, endpoint=False)
        F = PlanarCompactSet(np.stack([np.cos(t), np.sin(t)], 1))
        recs = scan_critical(F, window=(-0.2, -0.2, 0.2, 0.2), h=0.004)
        values = recs.values
        k = int(np.argmin(np.hypot(*recs.locations.T)))
        assert np.hypot(*recs.locations[k]) <= 0.004 and values[k] == pytest.approx(1, abs=1e-6)

    def test_segment_and_point(self):
        F = PlanarCompactSet([[0, 1]], [[[-3, 0], [3, 0]]])
        recs = scan_critical(F)
        assert any(np.allclose(r.location, [0, 0.5], atol=recs.h) for r in recs)

    def test_window_missing_bbox_warns(self):
        with pytest.warns(RuntimeWarning):
            assert len(scan_critical(TWO, window=(10, 10, 11, 11), h=0.01)) == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_enumeration_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        P = rng.random((12, 2))
        F = PlanarCompactSet(P)
        recs = scan_critical(F)
        oracle = enumerate_critical(P)
        assert len(recs) == len(oracle)
        for x in oracle:
            assert np.min(np.hypot(*(recs.locations - x).T)) <= recs.h
        assert np.all(recs.values <= F.diam)

    def test_csv(self):
        assert scan_critical(TWO).to_csv().splitlines()[0] == "x,y,value,residual"


class TestValues:
    def test_two_points(self):
        assert critical_values(TWO, 0.5).points().tolist() == [1.0]

    def test_single_point(self):
        assert critical_values(PlanarCompactSet([[0, 0]]), 0.1).is_empty

    def test_ferry_equal_values(self):
        recs = scan_critical(TWO)
        assert ferry_check(list(recs) * 2).violations == 0

    def test_ferry_random(self):
        rng = np.random.default_rng(7)
        F = PlanarCompactSet(rng.random((50, 2)))
        rep = ferry_check(scan_critical(F))
        assert rep.passed and rep.worst_ratio <= 1 + 1e-9


class TestProbes:
    def test_semiconcavity_single(self):
        assert semiconcavity_probe(PlanarCompactSet([[0, 0]]), [1, 0]).passed

    def test_semiconcavity_two(self):
        assert semiconcavity_probe(TWO, [0, 0.7]).passed

    def test_semiconcavity_random(self):
        rng = np.random.default_rng(2)
        F = PlanarCompactSet(rng.random((50, 2)))
        assert semiconcavity_probe(F, [0.5, 1.3], samples=10_000).passed

    def test_restriction_identity(self):
        assert restriction_check(TWO, [1, 0], 0.4)

    def test_restriction_clusters(self):
        rng = np.random.default_rng(3)
        near = rng.normal(scale=0.1, size=(20, 2))
        far = rng.normal(scale=0.1, size=(20, 2)) + [10, 0]
        F = PlanarCompactSet(np.vstack([near, far]))
        assert restriction_check(F, [0, 0], 0.5)
        G = PlanarCompactSet(np.vstack([near, far + rng.normal(scale=0.5, size=far.shape)]))
        assert restriction_check(G, [0, 0], 0.5)

    def test_restriction_precondition(self):
        with pytest.raises(CritfieldError):
            restriction_check(TWO, [0, 5], 0.5)
