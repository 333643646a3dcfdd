"""
Solver - Split-step integration of i u_t + Delta u + mu |x|^-1 |u|^2 u = 0
Integracion por pasos fraccionados de la ecuacion de Schrodinger inhomogenea

Both flows of the splitting are solved exactly:
- free flow: multiplication by exp(-i t |xi|^2) in the spectral basis of the grid
  (Fourier on Grid3D, sine series of v = r u on uniform radial grids)
- nonlinear flow: u -> u exp(i mu tau w |u|^2), with w = |x|^-1 (capped on Grid3D)
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .grid_fields import (
    ComplexField,
    Grid,
    Grid3D,
    RadialGrid,
    h1dot_norm_sq,
    spectral_basis,
    spectral_fill,
)

logger = logging.getLogger(__name__)

# dt = CFL * h^2 unless the config fixes dt
DEFAULT_CFL = 0.5


class SimulationError(RuntimeError):
    """Exception raised when a simulation cannot advance"""
    pass


class Status(str, Enum):
    RUNNING = "running"
    DISPERSED = "dispersed"
    BLOWUP_SUSPECTED = "blowup_suspected"
    UNDERRESOLVED = "underresolved"
    TIME_EXHAUSTED = "time_exhausted"

    @property
    def is_terminal(self) -> bool:
        return self is not Status.RUNNING


@dataclass(frozen=True)
class StepParams:
    """
    Timestep dt > 0, equation sign (+1 focusing, -1 defocusing), dealias flag
    and time direction (-1 integrates toward negative times).

    dealias=None means: on for Grid3D, off for radial grids.
    """
    dt: float
    sign: int = 1
    dealias: Optional[bool] = None
    direction: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"Timestep must be positive, got {self.dt}")
        if self.sign not in (1, -1):
            raise ValueError(f"Equation sign must be +1 or -1, got {self.sign}")
        if self.direction not in (1, -1):
            raise ValueError(f"Time direction must be +1 or -1, got {self.direction}")

    @property
    def signed_dt(self) -> float:
        return self.direction * self.dt

    def dealias_for(self, grid: Grid) -> bool:
        if self.dealias is None:
            return isinstance(grid, Grid3D)
        return self.dealias


@dataclass(frozen=True)
class DetectorThresholds:
    """Tolerances of the status detectors / Tolerancias de los detectores"""
    growth_factor: float = 10.0
    spectral_fill: float = 0.1
    scatter_tolerance: float = 1e-3
    scatter_window: float = 0.25
    scatter_max_samples: int = 64
    scatter_min_time: float = 1.0
    boundary_fraction: float = 0.1
    boundary_mass: float = 0.01
    saturation: float = 0.01

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class SimulationState:
    """
    Elapsed time t >= 0, field, step count and status. The physical time is
    direction * t. Kinetic energy and spectral fill are refreshed every step.
    """
    t: float
    field: ComplexField
    steps: int = 0
    status: Status = Status.RUNNING
    direction: int = 1
    initial_kinetic: float = 0.0
    kinetic: float = 0.0
    fill: float = 0.0

    @classmethod
    def start(cls, field: ComplexField, direction: int = 1) -> "SimulationState":
        kinetic = h1dot_norm_sq(field)
        return cls(
            t=0.0,
            field=field,
            direction=direction,
            initial_kinetic=kinetic,
            kinetic=kinetic,
            fill=spectral_fill(field),
        )

    @property
    def physical_time(self) -> float:
        return self.direction * self.t

    def with_status(self, status: Status) -> "SimulationState":
        """Terminal states absorb: once left, RUNNING is never re-entered"""
        if self.status.is_terminal or status == self.status:
            return self
        if status != Status.RUNNING:
            logger.info(f"Status {self.status.value} -> {status.value} at t={self.physical_time:.6g} "
                        f"(step {self.steps})")
        return replace(self, status=status)


def cfl_timestep(grid: Grid, cfl: float = DEFAULT_CFL) -> float:
    """dt = cfl * h^2 with h the grid spacing in r (or x)"""
    if isinstance(grid, RadialGrid) and not grid.supports_sine_series:
        raise SimulationError("The radial solver needs a uniform radial grid")
    return cfl * grid.spacing ** 2


def _propagator(grid: Grid, t: float) -> np.ndarray:
    return np.exp(-1j * t * spectral_basis(grid).symbol)


def free_propagate(field: ComplexField, t: float) -> ComplexField:
    """
    e^{it Delta} applied to a field (t may be negative)
    Propagador libre e^{it Delta}
    """
    if t == 0.0:
        return field
    basis = spectral_basis(field.grid)
    return field.with_values(basis.inverse(basis.forward(field.values) * _propagator(field.grid, t)))


def nonlinear_phase_step(field: ComplexField, tau: float, sign: int = 1) -> ComplexField:
    """Exact flow of i u_t = -sign w |u|^2 u over a time tau"""
    if tau == 0.0:
        return field
    weight = field.grid.inverse_radius_power(1)
    u = field.values
    return field.with_values(u * np.exp(1j * sign * tau * weight * (u.real ** 2 + u.imag ** 2)))


def radial_transform_in(field: ComplexField) -> ComplexField:
    """v = r u on the same radial nodes (v vanishes at r = 0 by construction)"""
    if not isinstance(field.grid, RadialGrid):
        raise SimulationError("radial_transform_in needs a radial field")
    return field.with_values(field.grid.nodes * field.values)


def radial_transform_out(v: ComplexField) -> ComplexField:
    if not isinstance(v.grid, RadialGrid):
        raise SimulationError("radial_transform_out needs a radial field")
    return v.with_values(v.values / v.grid.nodes)


def strang_step(state: SimulationState, params: StepParams) -> SimulationState:
    """
    Half nonlinear, full free, half nonlinear step
    Paso de Strang: medio no lineal, libre completo, medio no lineal

    On grids with dealiasing the 2/3 mask is applied after the second
    nonlinear half step. Kinetic energy and spectral fill are those of the
    returned field. A non-finite result marks the state underresolved.
    """
    if state.status.is_terminal:
        raise SimulationError(f"Cannot advance a {state.status.value} state")

    field = state.field
    grid = field.grid
    basis = spectral_basis(grid)
    half = 0.5 * params.signed_dt

    coefficients = basis.forward(nonlinear_phase_step(field, half, params.sign).values)
    coefficients = coefficients * _propagator(grid, params.signed_dt)
    advanced = nonlinear_phase_step(field.with_values(basis.inverse(coefficients)), half, params.sign)

    coefficients = basis.forward(advanced.values)
    if params.dealias_for(grid):
        coefficients = np.where(basis.mask, coefficients, 0.0)
        advanced = advanced.with_values(basis.inverse(coefficients))

    kinetic = basis.kinetic(coefficients)
    fill = basis.fill_fraction(coefficients)

    stepped = replace(state, t=state.t + params.dt, field=advanced, steps=state.steps + 1,
                      kinetic=kinetic, fill=fill)
    if not (advanced.is_finite() and np.isfinite(kinetic)):
        return stepped.with_status(Status.UNDERRESOLVED)
    return stepped


def detect(state: SimulationState, thresholds: DetectorThresholds = DetectorThresholds(),
           dispersed: bool = False) -> Status:
    """
    Status implied by the current state. `dispersed` carries the verdict of
    the scattering detector, which lives with the diagnostics.
    """
    if state.status.is_terminal:
        return state.status
    if not state.field.is_finite() or not np.isfinite(state.kinetic):
        return Status.UNDERRESOLVED
    # growth_factor bounds the H1-dot norm, kinetic is its square
    norm_ratio_sq = state.kinetic / state.initial_kinetic if state.initial_kinetic > 0 else 0.0
    if norm_ratio_sq > thresholds.growth_factor ** 2:
        return Status.BLOWUP_SUSPECTED
    if state.fill > thresholds.spectral_fill:
        return Status.UNDERRESOLVED
    if dispersed:
        return Status.DISPERSED
    return Status.RUNNING
