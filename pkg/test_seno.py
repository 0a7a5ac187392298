#!/usr/bin/env python3
"""
Tests for least-variation stencil selection (SENO2, SENO3).
"""

import numpy as np
import pytest

from conftest import random_knots
from modules.datasets import load_dataset
from modules.errors import DomainError, WindowSize
from modules.geodesic_interp import KnotSequence, Method, count_slerp_calls, piecewise_slerp
from modules.harness import CurveKind, GeneratingCurve, synthesize_knots
from modules.quaternion_core import geodesic_angle
from modules.seno import seno_curve, seno_select, seno_selections, variation
from modules.sider import sider_curve

SELECTION_CASES = ["seno2_case_a", "seno2_case_b", "seno3_six_point"]


class TestVariation:
    def test_arc_length_of_geodesic(self, three_point):
        pair = three_point.window(0, 2)
        estimate = variation(piecewise_slerp(pair), pair.t0, pair.t_end, k=3)
        assert np.isclose(estimate.length, geodesic_angle(*pair.points), rtol=0, atol=1e-12)

    def test_constant_curve(self):
        knots = KnotSequence(np.array([[0.0, 0.6, 0.8]] * 2))
        assert variation(piecewise_slerp(knots), 0.0, 1.0).length <= 1e-15

    def test_outside_domain(self, three_point):
        with pytest.raises(DomainError):
            variation(piecewise_slerp(three_point), 0.5, 1.5)


class TestSelection:
    @pytest.mark.parametrize("name", SELECTION_CASES)
    def test_expected_stencil(self, name):
        dataset = load_dataset(name)
        assert seno_select(dataset.knots, dataset.order).start_index == dataset.expected_start

    @pytest.mark.parametrize("name", SELECTION_CASES)
    def test_doubling_quadrature_keeps_choice(self, name):
        dataset = load_dataset(name)
        coarse = seno_select(dataset.knots, dataset.order, k=3).start_index
        fine = seno_select(dataset.knots, dataset.order, k=6).start_index
        assert coarse == fine

    @pytest.mark.parametrize("name", SELECTION_CASES)
    def test_batched_selection_agrees(self, name):
        dataset = load_dataset(name)
        n = dataset.order
        central = seno_selections(dataset.knots, n)[n - 1]
        assert central.start_index == seno_select(dataset.knots, n).start_index
        assert sorted(central.variations) == list(range(n))

    def test_slerp_calls(self):
        with count_slerp_calls() as tally:
            seno_select(load_dataset("seno2_case_a").knots, 2)
        assert tally.calls == Method.SENO2.slerp_calls == 6
        with count_slerp_calls() as tally:
            seno_select(load_dataset("seno3_six_point").knots, 3)
        assert tally.calls == Method.SENO3.slerp_calls == 21

    def test_window_size(self, four_point):
        with pytest.raises(WindowSize):
            seno_select(four_point, 3)
        with pytest.raises(WindowSize):
            seno_selections(four_point.window(0, 3), 3)

    @pytest.mark.parametrize("n", [2, 3])
    def test_optimal_and_bounded_below(self, rng, n):
        for _ in range(20):
            knots = random_knots(rng, 9)
            for selection in seno_selections(knots, n):
                lengths = selection.variations
                assert lengths[selection.start_index] <= min(lengths.values()) + 1e-12
                floor = geodesic_angle(knots.points[selection.interval], knots.points[selection.interval + 1])
                assert min(lengths.values()) >= floor - 1e-9

    def test_boundary_intervals_use_available_stencils(self, rng):
        selections = seno_selections(random_knots(rng, 7), 3)
        assert list(selections[0].variations) == [0]
        assert list(selections[-1].variations) == [3]


class TestSenoCurve:
    @pytest.mark.parametrize("n", [2, 3])
    def test_passes_through_knots(self, rng, n):
        for _ in range(100):
            knots = random_knots(rng, 8, dt=0.1)
            assert np.max(np.abs(seno_curve(knots, n)(knots.times) - knots.points)) <= 1e-10

    def test_smooth_data_matches_single_sider(self):
        knots = synthesize_knots(GeneratingCurve(CurveKind.SMOOTH), 256)
        t = np.linspace(knots.t0, knots.t_end, 4001)
        assert np.max(np.abs(seno_curve(knots, 3)(t) - sider_curve(knots, 3)(t))) <= 1e-6

    @pytest.mark.parametrize("n", [2, 3])
    def test_stencils_avoid_kink(self, n):
        knots = synthesize_knots(GeneratingCurve(CurveKind.KINKED), 256)
        kink = int(np.argmin(np.abs(knots.times)))
        for selection in seno_selections(knots, n):
            j = selection.start_index
            assert not j < kink < j + n, f"interval {selection.interval} uses stencil {j}"

    def test_deterministic(self, rng):
        knots = random_knots(rng, 10)
        t = np.linspace(knots.t0, knots.t_end, 301)
        assert np.array_equal(seno_curve(knots, 3)(t), seno_curve(knots, 3)(t))

    def test_unsupported_order(self, four_point):
        with pytest.raises(WindowSize):
            seno_curve(four_point, 4)
