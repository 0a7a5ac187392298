#!/usr/bin/env python3
"""
Tests for SIDER-n curves and knot validation.
"""

import numpy as np
import pytest

from conftest import random_knots
from modules.derivatives import continuity_jumps
from modules.errors import AmbiguousAntipode, RecursionDepth, WindowSize
from modules.geodesic_interp import KnotSequence, Method, count_slerp_calls
from modules.quaternion_core import geodesic_angle, pure, vector_part
from modules.sider import (
    BlendSchedule,
    centered_stencil,
    point_curve,
    prepare_knots,
    sider2,
    sider2_controls,
    sider3,
    sider_curve,
    sider_n,
    validate_knots,
)


class TestControls:
    def test_reflected_control(self):
        half = np.sqrt(2) / 2
        controls = sider2_controls(*pure(np.array([[1.0, 0, 0], [half, half, 0], [0, 1.0, 0]])))
        assert np.allclose(controls.c_2b, [0, 1, 0], atol=1e-15)

    def test_repeated_point(self, rng):
        p = rng.normal(size=3)
        p /= np.linalg.norm(p)
        controls = sider2_controls(*pure(np.array([[1.0, 0, 0], p, p])))
        assert np.allclose(controls.c_2a, p, atol=1e-12)

    def test_control_doubles_the_angle(self, rng):
        for _ in range(50):
            q = random_knots(rng, 3).points
            controls = sider2_controls(*pure(q))
            assert np.isclose(geodesic_angle(q[0], controls.c_2b), 2 * geodesic_angle(q[0], q[1]), atol=1e-12)
            assert np.isclose(geodesic_angle(q[2], controls.c_2a), 2 * geodesic_angle(q[2], q[1]), atol=1e-12)


class TestSider2:
    def test_interpolates_dataset(self, three_point):
        q = three_point.quaternions
        out = vector_part(sider2(*q, np.array([0.0, 0.5, 1.0])))
        assert np.allclose(out, three_point.points, atol=1e-12)

    def test_reversal_traces_same_path(self, three_point):
        t = np.linspace(0, 1, 101)
        forward = point_curve(three_point.points, t)
        backward = point_curve(three_point.points[::-1], 1 - t)
        assert np.allclose(forward, backward, atol=1e-12)

    def test_counts_three_calls(self, three_point):
        with count_slerp_calls() as tally:
            sider2(*three_point.quaternions, np.linspace(0, 1, 30))
        assert tally.calls == Method.SIDER2.slerp_calls

    def test_smooth_inside(self, rng):
        knots = random_knots(rng, 3, dt=0.5)
        curve = sider_curve(knots, 2)
        for t in rng.uniform(0.1, 0.9, 5):
            jumps = continuity_jumps(curve, t, max_order=2, steps={1: 1e-4, 2: 1e-4})
            assert max(jumps.values()) <= 1e-2


class TestSider3:
    def test_interpolates_dataset(self, four_point):
        out = vector_part(sider3(*four_point.quaternions, np.array([0.0, 1 / 3, 2 / 3, 1.0])))
        assert np.allclose(out, four_point.points, atol=1e-12)

    def test_counts_seven_calls(self, four_point):
        with count_slerp_calls() as tally:
            sider3(*four_point.quaternions, np.linspace(0, 1, 30))
        assert tally.calls == Method.SIDER3.slerp_calls == 7

    def test_smooth_across_interior_knot(self, four_point):
        jumps = continuity_jumps(sider_curve(four_point, 3), four_point.times[1], max_order=3)
        assert max(jumps.values()) <= 1e-3


class TestSiderN:
    def test_order_two_matches_sider2(self, three_point):
        t = np.linspace(0, 1, 17)
        assert np.allclose(sider_n(three_point.quaternions, t), sider2(*three_point.quaternions, t), atol=1e-15)

    def test_schedule(self):
        schedule = BlendSchedule.for_order(4)
        assert np.isclose(schedule.g(0.75), 1.0)
        assert np.isclose(schedule.h(0.25), 0.0)
        assert np.isclose(schedule.f(0.3), 0.3)

    def test_order_four(self, rng):
        knots = random_knots(rng, 5)
        with count_slerp_calls() as tally:
            out = vector_part(sider_n(knots.quaternions, np.arange(5) / 4))
        assert np.allclose(out, knots.points, atol=1e-10)
        assert tally.calls == Method.SIDER4.slerp_calls == 15

    def test_recursion_cap(self, rng):
        knots = random_knots(rng, 10)
        with pytest.raises(RecursionDepth):
            sider_n(knots.quaternions, 0.5)

    def test_too_few_knots(self, three_point):
        with pytest.raises(WindowSize):
            sider_n(three_point.quaternions[:2], 0.5)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_random_sets_hit_knots_and_stay_unit(self, rng, n):
        t = np.linspace(0, 1, 1000)
        for _ in range(100):
            knots = random_knots(rng, n + 1)
            q = knots.quaternions
            hits = vector_part(sider_n(q, np.arange(n + 1) / n))
            assert np.max(np.abs(hits - knots.points)) <= 1e-10
            dense = sider_n(q[:, None, :], t)
            assert np.max(np.abs(np.linalg.norm(dense, axis=-1) - 1.0)) <= 1e-10


class TestPiecewise:
    def test_most_centered_stencil(self):
        assert [centered_stencil(i, 3, 7) for i in range(6)] == [0, 0, 1, 2, 3, 3]
        assert [centered_stencil(i, 2, 5) for i in range(4)] == [0, 0, 1, 2]

    def test_long_sequence_hits_knots(self, rng):
        knots = random_knots(rng, 9, dt=0.125)
        for n in (2, 3, 4):
            assert np.allclose(sider_curve(knots, n)(knots.times), knots.points, atol=1e-10)

    def test_unsupported_order(self, four_point):
        with pytest.raises(WindowSize):
            sider_curve(four_point, 5)


class TestValidation:
    def test_flip(self):
        report = validate_knots(np.array([[1.0, 0, 0], [-0.8, -0.6, 0], [0.6, 0.8, 0]]))
        assert report.flips == [1]
        assert np.allclose(report.canonical_points[1], [0.8, 0.6, 0])
        assert not report.fatal

    def test_great_circle_warning(self):
        knots = KnotSequence(np.array([[1.0, 0, 0], [0.8, 0.6, 0], [0.6, 0.8, 0]]))
        report = validate_knots(knots)
        assert report.great_circle
        assert any("GreatCircle" in w for w in report.warnings)

    def test_ambiguous_pair(self):
        knots = KnotSequence(np.array([[1.0, 0, 0], [0.0, 1.0, 0], [0.0, 0.6, 0.8]]))
        report = validate_knots(knots)
        assert report.ambiguous == [0]
        with pytest.raises(AmbiguousAntipode):
            prepare_knots(knots)

    def test_control_spread(self, three_point):
        report = validate_knots(three_point)
        assert report.control_spread == [p.index for p in report.pairs if 2 * p.angle > np.pi / 2]

    def test_prepare_flips_sequence(self):
        knots = KnotSequence(np.array([[1.0, 0, 0], [-0.8, -0.6, 0], [0.6, 0.8, 0]]))
        prepared = prepare_knots(knots)
        assert np.allclose(prepared.points[1], [0.8, 0.6, 0])
        assert np.allclose(sider_curve(prepared, 2)(prepared.times), prepared.points, atol=1e-12)
