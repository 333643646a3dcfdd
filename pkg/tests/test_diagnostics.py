"""
Tests for virial, tightness, scattering and space-time diagnostics
Tests para los diagnosticos viriales, de dispersion y espacio-temporales
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.diagnostics import (
    RECORD_COLUMNS,
    DiagnosticsError,
    MassLeftGridError,
    RecordBuilder,
    SpaceTimeAccumulator,
    VirialWeight,
    far_center_deviation,
    l10_accumulator,
    scattering_detector,
    small_data_indicator,
    tightness_radius,
    tightness_tail,
    virial_budget,
    virial_quantity,
    virial_rate,
)
from modules.grid_fields import ComplexField, Grid3D, RadialGrid, h1dot_norm_sq, integrate, potential
from modules.solver import SimulationState, StepParams, cfl_timestep, free_propagate, strang_step


@pytest.fixture(scope="module")
def grid():
    return RadialGrid.uniform(n=1023, r_max=40.0)


def gauss(grid, amplitude=1.0):
    return ComplexField(grid, amplitude * np.exp(-grid.radius() ** 2))


class TestVirialWeight:

    def test_pure_weight(self):
        r = np.array([0.5, 1.0, 3.0])
        a, a1, a2, a3, a4 = VirialWeight().derivatives(r)
        assert np.allclose(a, r ** 2)
        assert np.allclose(a1, 2 * r)
        assert np.allclose(a2, 2.0)
        assert np.allclose(a3, 0.0) and np.allclose(a4, 0.0)

    def test_localized_weight_is_smooth_at_the_joins(self):
        weight = VirialWeight(radius=2.0)
        eps = 1e-7
        for join in (2.0, 4.0):
            below = weight.derivatives(np.array([join - eps]))
            above = weight.derivatives(np.array([join + eps]))
            for lower, upper in zip(below, above):
                assert lower[0] == pytest.approx(upper[0], abs=1e-5)

    def test_localized_weight_shape(self):
        weight = VirialWeight(radius=2.0)
        a, a1, _, _, _ = weight.derivatives(np.array([1.0, 10.0]))
        assert a[0] == pytest.approx(1.0)
        assert a[1] == pytest.approx(weight.plateau * 4.0)
        assert a1[1] == 0.0
        assert weight.plateau > 1.0

    def test_blend_derivatives_are_consistent(self):
        weight = VirialWeight(radius=1.0)
        r = np.linspace(1.05, 1.95, 19)
        h = 1e-5
        for k in range(4):
            numeric = (weight.derivatives(r + h)[k] - weight.derivatives(r - h)[k]) / (2 * h)
            assert np.allclose(numeric, weight.derivatives(r)[k + 1], atol=1e-4)

    def test_bounds(self):
        weight = VirialWeight(radius=3.0)
        bounds = weight.derivative_bounds()
        assert len(bounds) == 5
        assert bounds[0] == pytest.approx(weight.plateau, rel=1e-3)
        assert weight.moment_bound() > 0
        with pytest.raises(DiagnosticsError):
            VirialWeight().derivative_bounds()

    def test_invalid_radius(self):
        with pytest.raises(DiagnosticsError):
            VirialWeight(radius=0.0)


class TestVirial:

    def test_real_field_has_no_virial(self, grid):
        assert virial_quantity(gauss(grid)) == pytest.approx(0.0, abs=1e-12)

    def test_chirped_gaussian(self, grid):
        b = 0.1
        r = grid.nodes
        u = ComplexField(grid, np.exp(-r ** 2 + 1j * b * r ** 2))
        expected = 8.0 * b * integrate(grid, r ** 2 * np.exp(-2 * r ** 2))
        assert virial_quantity(u) == pytest.approx(expected, rel=1e-6)

    def test_pure_rate_is_kinetic_minus_potential(self, grid):
        u = gauss(grid, 0.5)
        expected = 8.0 * h1dot_norm_sq(u) - 8.0 * potential(u)
        assert virial_rate(u, sign=1) == pytest.approx(expected, rel=1e-6)

    def test_defocusing_rate_is_larger(self, grid):
        u = gauss(grid, 1.0)
        assert virial_rate(u, sign=-1) > virial_rate(u, sign=1)

    @pytest.mark.parametrize("radius", [None, 3.0])
    def test_rate_matches_time_difference(self, grid, radius):
        weight = VirialWeight(radius)
        u = gauss(grid, 0.5)
        dt = cfl_timestep(grid)
        steps = 10
        forward = SimulationState.start(u)
        backward = SimulationState.start(u, direction=-1)
        for _ in range(steps):
            forward = strang_step(forward, StepParams(dt=dt))
            backward = strang_step(backward, StepParams(dt=dt, direction=-1))
        centered = (virial_quantity(forward.field, weight) - virial_quantity(backward.field, weight)) / (2 * steps * dt)
        assert centered == pytest.approx(virial_rate(u, weight), rel=1e-3)

    def test_localized_rate_is_controlled_by_the_tails(self, grid):
        rng = np.random.default_rng(7)
        r = grid.nodes
        for _ in range(8):
            width = rng.uniform(1.0, 3.0)
            amplitude = rng.uniform(0.2, 2.0)
            chirp = rng.uniform(-0.5, 0.5)
            u = ComplexField(grid, amplitude * np.exp(-(r / width) ** 2 + 1j * chirp * r ** 2))
            tails = tightness_tail(u, width)
            difference = abs(virial_rate(u, VirialWeight(width)) - virial_rate(u))
            assert tails.total > 0
            assert difference <= 100.0 * tails.total


class TestTightness:

    def test_tail_limits(self, grid):
        u = gauss(grid)
        far = tightness_tail(u, 20.0)
        assert far.total < 1e-12
        near = tightness_tail(u, 0.0)
        assert near.gradient == pytest.approx(h1dot_norm_sq(u, spectral=False))
        assert near.potential == pytest.approx(potential(u))

    def test_tightness_radius_covers_the_mass(self, grid):
        u = gauss(grid)
        whole = tightness_tail(u, 0.0).total
        radius = tightness_radius(u, covered=0.99)
        assert tightness_tail(u, radius).total <= 0.01 * whole
        previous = grid.nodes[np.searchsorted(grid.nodes, radius) - 1]
        assert tightness_tail(u, previous).total > 0.01 * whole
        assert tightness_radius(u, covered=0.9) <= radius

    def test_tightness_radius_errors(self, grid):
        with pytest.raises(DiagnosticsError):
            tightness_radius(ComplexField.zeros(grid))
        with pytest.raises(DiagnosticsError):
            tightness_radius(gauss(grid), covered=1.0)


class TestScatteringDetector:

    def test_free_evolution_is_dispersed(self, grid):
        u = gauss(grid)
        history = [(t, free_propagate(u, t)) for t in np.linspace(0.0, 2.0, 9)]
        verdict = scattering_detector(history, min_time=1.0)
        assert verdict.dispersed
        assert verdict.max_deviation < 1e-8
        assert verdict.radiation_clean
        assert np.allclose(verdict.candidate.values, u.values, atol=1e-8)

    def test_static_field_is_not_dispersed(self, grid):
        u = gauss(grid)
        verdict = scattering_detector([(0.0, u), (1.0, u), (2.0, u)], min_time=1.0)
        assert not verdict.dispersed
        assert "moving" in verdict.reason

    def test_minimum_time(self, grid):
        u = gauss(grid)
        history = [(t, free_propagate(u, t)) for t in (0.0, 0.25, 0.5)]
        verdict = scattering_detector(history, min_time=1.0)
        assert not verdict.dispersed
        assert "minimum time" in verdict.reason

    def test_mass_at_the_edge(self, grid):
        shell = ComplexField(grid, np.exp(-(grid.nodes - 38.0) ** 2))
        verdict = scattering_detector([(1.0, shell), (1.5, free_propagate(shell, 0.5))], min_time=0.0)
        assert not verdict.radiation_clean
        assert not verdict.dispersed

    def test_needs_two_samples(self, grid):
        with pytest.raises(DiagnosticsError):
            scattering_detector([(0.0, gauss(grid))])

    def test_window_is_capped(self, grid):
        u = gauss(grid)
        history = [(t, free_propagate(u, t)) for t in np.linspace(0.0, 1.0, 400)]
        verdict = scattering_detector(history, window=1.0, max_samples=16)
        assert verdict.window_samples <= 16


class TestSpaceTime:

    def test_constant_density(self, grid):
        u = gauss(grid)
        accumulator = SpaceTimeAccumulator()
        for t in (0.0, 0.5, 1.0):
            accumulator.add(t, u)
        density = integrate(grid, np.abs(u.values) ** 10)
        assert accumulator.l10 == pytest.approx(density)
        assert accumulator.saturation_ratio() == pytest.approx(0.5)
        assert accumulator.l10_totals == sorted(accumulator.l10_totals)

    def test_saturated_history(self, grid):
        u = gauss(grid)
        accumulator = SpaceTimeAccumulator()
        accumulator.add(0.0, u)
        accumulator.add(1.0, ComplexField.zeros(grid))
        for t in (2.0, 3.0, 4.0):
            accumulator.add(t, ComplexField.zeros(grid))
        assert accumulator.saturated(0.01)

    def test_backward_times_count_forward(self, grid):
        u = gauss(grid)
        forward, backward = SpaceTimeAccumulator(), SpaceTimeAccumulator()
        for t in (0.0, 0.5):
            forward.add(t, u)
            backward.add(-t, u)
        assert backward.l10 == pytest.approx(forward.l10)

    def test_l10_needs_uniform_sampling(self, grid):
        u = gauss(grid)
        with pytest.raises(DiagnosticsError):
            l10_accumulator([(0.0, u), (0.1, u), (0.5, u)])
        assert l10_accumulator([(0.0, u), (0.5, u), (1.0, u)]) > 0

    def test_small_data_indicator_is_homogeneous(self, grid):
        u = gauss(grid, 0.1)
        small = small_data_indicator(u, 1.0, samples=8)
        assert small_data_indicator(u.scaled(2.0), 1.0, samples=8) == pytest.approx(2.0 * small, rel=1e-9)


class TestRecords:

    def test_record_builder(self, grid):
        builder = RecordBuilder()
        u = gauss(grid, 0.5)
        first = builder.sample(0.0, u)
        second = builder.sample(0.1, free_propagate(u, 0.1))
        assert first.deviation == 0.0
        assert first.l10 == 0.0
        assert second.l10 > 0.0
        assert second.deviation < 1e-10
        assert 0.0 <= first.tail_fraction < 1e-6
        assert list(first.to_row()) == RECORD_COLUMNS

    def test_virial_budget(self, grid):
        builder = RecordBuilder()
        u = gauss(grid, 0.5)
        records = [builder.sample(t, free_propagate(u, t)) for t in (0.0, 0.05, 0.1)]
        budget = virial_budget(records)
        assert budget.a_priori_bound is None
        assert budget.sup_kinetic == pytest.approx(h1dot_norm_sq(u), rel=1e-9)
        with pytest.raises(DiagnosticsError):
            virial_budget(records[:1])

    def test_localized_budget_has_bound(self, grid):
        weight = VirialWeight(radius=2.0)
        builder = RecordBuilder(weight=weight)
        u = gauss(grid, 0.5)
        records = [builder.sample(t, free_propagate(u, t)) for t in (0.0, 0.1)]
        budget = virial_budget(records, weight)
        assert budget.within_bound


class TestFarCenter:

    @pytest.fixture(scope="class")
    def box(self):
        return Grid3D(half_width=8.0, points=32)

    def test_zero_amplitude(self, box):
        assert far_center_deviation(0.0, 1.5, 0.0, 0.25, box) == 0.0

    def test_deviation_shrinks_away_from_origin(self, box):
        near = far_center_deviation(0.0, 1.5, 1.0, 0.25, box, dt=0.01)
        far = far_center_deviation(5.0, 1.5, 1.0, 0.25, box, dt=0.01)
        assert 0.0 < far < near

    def test_mass_at_the_edge(self, box):
        with pytest.raises(MassLeftGridError):
            far_center_deviation(7.5, 1.5, 1.0, 0.25, box, dt=0.01)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
