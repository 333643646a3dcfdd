"""
Tests for the variational toolkit
Tests para las herramientas variacionales
"""

import numpy as np
import pytest
import sys
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.grid_fields import ComplexField, RadialGrid, h1dot_norm_sq, potential
from modules.ground_state import Q_KINETIC, evaluate_q
from modules.variational import (
    DEFOCUSING,
    FOCUSING,
    coercivity_margin,
    delta_bound,
    energy,
    energy_lower_bound,
    report,
    subthreshold,
    trapping_check,
)


@pytest.fixture(scope="module")
def grid():
    return RadialGrid.uniform(n=1023, r_max=20.0)


@pytest.fixture(scope="module")
def mapped():
    return RadialGrid.mapped(n_panels=4096, map_scale=2.0)


def gauss(grid, amplitude):
    return ComplexField(grid, amplitude * np.exp(-grid.nodes ** 2))


class TestEnergy:

    def test_focusing_and_defocusing(self, grid):
        u = gauss(grid, 0.5)
        kinetic, pot = h1dot_norm_sq(u), potential(u)
        assert energy(u, FOCUSING) == pytest.approx(0.5 * kinetic - 0.25 * pot)
        assert energy(u, DEFOCUSING) == pytest.approx(0.5 * kinetic + 0.25 * pot)

    def test_invalid_sign(self, grid):
        with pytest.raises(ValueError):
            energy(gauss(grid, 0.5), 0)

    def test_phase_invariance(self, grid):
        u = gauss(grid, 0.7)
        assert energy(u.scaled(np.exp(0.3j))) == pytest.approx(energy(u))

    def test_sharp_lower_bound(self, grid):
        for amplitude in (0.3, 1.0, 2.5):
            u = gauss(grid, amplitude)
            assert energy_lower_bound(u) <= energy(u)


class TestThreshold:

    def test_small_gaussian_is_subthreshold(self, grid):
        assert subthreshold(gauss(grid, 0.5))

    def test_large_gaussian_is_not(self, grid):
        assert not subthreshold(gauss(grid, 2.0))

    def test_scaled_ground_state(self, mapped):
        q = evaluate_q(mapped)
        assert subthreshold(q.scaled(0.9))
        assert not subthreshold(q.scaled(1.01))

    def test_delta_bound_vanishes_at_threshold(self):
        assert delta_bound(Q_KINETIC) == pytest.approx(0.0, abs=1e-12)
        assert delta_bound(0.0) == 1.0


class TestTrapping:

    def test_trapping_holds_below_threshold(self, grid):
        check = trapping_check(gauss(grid, 0.5))
        assert check.holds
        assert check.ratio >= 0.25
        assert check.violation is None

    def test_precondition_violation_is_reported(self, grid):
        check = trapping_check(gauss(grid, 2.0))
        assert not check.holds
        assert "threshold" in check.violation

    def test_zero_field(self, grid):
        check = trapping_check(ComplexField.zeros(grid))
        assert check.holds
        assert check.ratio is None


class TestCoercivity:

    def test_fraction_above_delta_bound(self, grid):
        margin = coercivity_margin(gauss(grid, 0.5))
        assert margin.margin > 0
        assert margin.fraction >= margin.delta_bound

    def test_zero_field(self, grid):
        margin = coercivity_margin(ComplexField.zeros(grid))
        assert margin.fraction is None
        assert margin.violation


def test_report(grid):
    data = report(gauss(grid, 0.5), DEFOCUSING).to_dict()
    assert data["sign"] == -1
    assert data["subthreshold"] is True
    assert data["energy"] > data["kinetic"] / 2
    assert data["mass"] == pytest.approx(0.25 * (np.pi / 2) ** 1.5, rel=1e-6)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
