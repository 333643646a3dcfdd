"""
Tests for grids, fields and integral functionals
Tests para mallas, campos y funcionales integrales
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.grid_fields import (
    HARDY,
    ComplexField,
    FieldError,
    Grid3D,
    RadialGrid,
    WeightedNormSpec,
    dealias,
    gradient,
    h1dot_norm_sq,
    hardy_ratio,
    mass,
    mass_boundary_fraction,
    potential,
    radial_derivative,
    spectral_basis,
    spectral_fill,
    weighted_integral,
    weighted_integral_report,
)

# Closed forms for u = exp(-r^2)
GAUSS_MASS = (np.pi / 2.0) ** 1.5
GAUSS_KINETIC = 3.0 * np.pi ** 1.5 / (2.0 * np.sqrt(2.0))
GAUSS_POTENTIAL = np.pi / 2.0
GAUSS_HARDY = 4.0 * np.pi * np.sqrt(np.pi / 8.0)


def gauss(grid):
    return ComplexField(grid, np.exp(-grid.radius() ** 2))


@pytest.fixture(scope="module")
def uniform():
    return RadialGrid.uniform(n=1023, r_max=20.0)


@pytest.fixture(scope="module")
def mapped():
    return RadialGrid.mapped(n_panels=4096, map_scale=2.0)


@pytest.fixture(scope="module")
def box():
    return Grid3D(half_width=8.0, points=64)


class TestGrids:

    def test_uniform_nodes(self, uniform):
        assert uniform.n_r == 1023
        assert uniform.nodes[0] == pytest.approx(uniform.spacing)
        assert uniform.nodes[-1] == pytest.approx(20.0 - uniform.spacing)

    def test_mapped_nodes_increase(self, mapped):
        assert np.all(np.diff(mapped.nodes) > 0)
        assert mapped.nodes[0] > 0
        assert mapped.r_max > 1000

    def test_refined(self, uniform, mapped):
        assert uniform.refined(2).n_r == 2047
        assert mapped.refined(2).n_r == 8192

    def test_invalid_grids(self):
        with pytest.raises(FieldError):
            RadialGrid.uniform(n=2)
        with pytest.raises(FieldError):
            RadialGrid.mapped(n_panels=64, map_scale=0.0)
        with pytest.raises(FieldError):
            Grid3D(half_width=8.0, points=24)

    def test_box_axis_avoids_origin(self, box):
        assert np.min(box.radius()) > 0
        assert box.axis[0] == pytest.approx(-8.0 + 0.125)

    def test_describe(self, uniform, box):
        assert uniform.describe()["layout"] == "uniform"
        assert box.describe()["points"] == 64


class TestComplexField:

    def test_shape_mismatch(self, uniform):
        with pytest.raises(FieldError):
            ComplexField(uniform, np.zeros(10))

    def test_different_grids(self, uniform, mapped):
        with pytest.raises(FieldError):
            _ = gauss(uniform) - gauss(mapped)

    def test_arithmetic(self, uniform):
        u = gauss(uniform)
        assert np.allclose((u + u).values, 2.0 * u.values)
        assert (u - u).is_zero()
        assert np.allclose(u.scaled(1j).conjugate().values, -1j * u.values)


class TestIntegrals:

    @pytest.mark.parametrize("grid_name", ["uniform", "mapped", "box"])
    def test_gaussian_mass(self, grid_name, request):
        grid = request.getfixturevalue(grid_name)
        assert mass(gauss(grid)) == pytest.approx(GAUSS_MASS, rel=1e-6)

    @pytest.mark.parametrize("grid_name", ["uniform", "box"])
    def test_gaussian_kinetic_spectral(self, grid_name, request):
        grid = request.getfixturevalue(grid_name)
        assert h1dot_norm_sq(gauss(grid)) == pytest.approx(GAUSS_KINETIC, rel=1e-6)

    def test_gaussian_kinetic_finite_differences(self, mapped):
        assert h1dot_norm_sq(gauss(mapped)) == pytest.approx(GAUSS_KINETIC, rel=1e-4)

    @pytest.mark.parametrize("grid_name", ["uniform", "mapped"])
    def test_gaussian_potential(self, grid_name, request):
        grid = request.getfixturevalue(grid_name)
        assert potential(gauss(grid)) == pytest.approx(GAUSS_POTENTIAL, rel=1e-3)

    def test_gaussian_hardy(self, mapped):
        assert weighted_integral(gauss(mapped), HARDY) == pytest.approx(GAUSS_HARDY, rel=1e-3)
        assert hardy_ratio(gauss(mapped)) == pytest.approx(GAUSS_HARDY / GAUSS_KINETIC, rel=1e-3)
        assert hardy_ratio(gauss(mapped)) < 4.0

    def test_hardy_bound_on_random_fields(self, mapped):
        rng = np.random.default_rng(11)
        r = mapped.radius()
        for _ in range(10):
            a = rng.uniform(0.3, 3.0, size=3)
            b = rng.uniform(0.0, 1.0, size=3)
            c = rng.uniform(-1.0, 1.0, size=3) + 1j * rng.uniform(-1.0, 1.0, size=3)
            values = sum(cj * np.exp(-aj * r ** 2) * (1.0 + bj * r ** 2) for aj, bj, cj in zip(a, b, c))
            assert hardy_ratio(ComplexField(mapped, values)) <= 4.0 * (1.0 + 1e-3)

    def test_critical_scaling_invariance(self, mapped):
        r = mapped.radius()
        reference = gauss(mapped)
        kinetic, pot = h1dot_norm_sq(reference), potential(reference)
        for lam in (0.25, 0.5, 2.0, 4.0):
            scaled = ComplexField(mapped, np.sqrt(lam) * np.exp(-(lam * r) ** 2))
            assert h1dot_norm_sq(scaled) == pytest.approx(kinetic, rel=0.01)
            assert potential(scaled) == pytest.approx(pot, rel=0.01)

    def test_hardy_of_zero_field(self, uniform):
        with pytest.raises(FieldError):
            hardy_ratio(ComplexField.zeros(uniform))

    def test_weight_whitelist(self):
        with pytest.raises(FieldError):
            WeightedNormSpec(2, 4)

    def test_slow_decay_flag(self):
        grid = RadialGrid.uniform(n=255, r_max=10.0)
        slow = ComplexField(grid, 1.0 / (1.0 + grid.nodes))
        assert weighted_integral_report(slow, HARDY, tail_correction=True).slow_decay
        assert not weighted_integral_report(gauss(grid), HARDY, tail_correction=True).slow_decay

    def test_mass_boundary_fraction(self, box):
        assert mass_boundary_fraction(gauss(box)) < 1e-12
        flat = ComplexField(box, np.ones(box.shape))
        assert mass_boundary_fraction(flat) == pytest.approx(np.mean(box.outer_region(0.1)))


class TestDerivatives:

    def test_spectral_radial_derivative(self, uniform):
        r = uniform.nodes
        expected = -2.0 * r * np.exp(-r ** 2)
        assert np.allclose(radial_derivative(gauss(uniform)), expected, atol=1e-6)

    def test_mapped_radial_derivative(self, mapped):
        r = mapped.nodes
        expected = -2.0 * r * np.exp(-r ** 2)
        assert np.allclose(radial_derivative(gauss(mapped)), expected, atol=1e-4)

    def test_box_gradient(self, box):
        x, _, _ = box.axis_coordinates()
        components = gradient(gauss(box))
        assert len(components) == 3
        expected = -2.0 * x * np.exp(-box.radius() ** 2)
        assert np.allclose(components[0].values, expected, atol=1e-6)

    def test_radial_derivative_needs_radial_grid(self, box):
        with pytest.raises(FieldError):
            radial_derivative(gauss(box))


class TestSpectral:

    def test_round_trip(self, uniform, box):
        for grid in (uniform, box):
            basis = spectral_basis(grid)
            u = gauss(grid)
            assert np.allclose(basis.inverse(basis.forward(u.values)), u.values, atol=1e-12)

    def test_no_basis_on_mapped_grid(self, mapped):
        with pytest.raises(FieldError):
            spectral_basis(mapped)

    def test_smooth_field_has_little_fill(self, box):
        assert spectral_fill(gauss(box)) < 0.1

    def test_checkerboard_fills_the_spectrum(self, box):
        i = np.arange(box.points)
        sign = (-1.0) ** (i[:, None, None] + i[None, :, None] + i[None, None, :])
        checker = ComplexField(box, sign.astype(complex))
        assert spectral_fill(checker) == pytest.approx(1.0)
        assert np.allclose(dealias(checker).values, 0.0, atol=1e-12)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
