"""
Initial Data - Families of initial data on radial and box grids
Familias de datos iniciales en mallas radiales y cubicas
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .grid_fields import ComplexField, FieldError, Grid, RadialGrid
from .ground_state import GROUND_STATE

logger = logging.getLogger(__name__)

# Q-based data are cut off smoothly around this share of the domain
TAPER_CENTER = 0.7
TAPER_WIDTH = 0.025

# Number of cosine modes of the seeded perturbation
NOISE_MODES = 4

Center = Union[float, Sequence[float]]


def _outer_radius(grid: Grid) -> float:
    return grid.r_max if isinstance(grid, RadialGrid) else grid.half_width


def _center_vector(center: Center) -> np.ndarray:
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.size == 1:
        return np.array([c[0], 0.0, 0.0])
    if c.size != 3:
        raise FieldError(f"Center must be a scalar or have three coordinates, got {c.size}")
    return c


def _distance(grid: Grid, center: Center) -> np.ndarray:
    c = _center_vector(center)
    if isinstance(grid, RadialGrid):
        if np.any(c):
            raise FieldError("Off-center data need a Grid3D")
        return grid.nodes
    x, y, z = grid.axis_coordinates()
    return np.sqrt((x - c[0]) ** 2 + (y - c[1]) ** 2 + (z - c[2]) ** 2)


def gaussian(grid: Grid, amplitude: float = 1.0, width: float = 1.0, center: Center = 0.0) -> ComplexField:
    """amplitude * exp(-|x - x0|^2 / width^2)"""
    if not width > 0:
        raise FieldError(f"Gaussian width must be positive, got {width}")
    d = _distance(grid, center)
    return ComplexField(grid, amplitude * np.exp(-(d / width) ** 2))


def taper(grid: Grid) -> np.ndarray:
    """Smooth cutoff 1/2 (1 - tanh((r - 0.7 R) / (0.025 R)))"""
    outer = _outer_radius(grid)
    return 0.5 * (1.0 - np.tanh((grid.radius() - TAPER_CENTER * outer) / (TAPER_WIDTH * outer)))


def rescaled_q(grid: Grid, factor: float = 1.0, scale: float = 1.0, tapered: bool = True) -> ComplexField:
    """factor * scale^-1/2 Q(x / scale), tapered before the outer part of the domain"""
    values = factor * scale ** -0.5 * GROUND_STATE(grid.radius() / scale)
    if tapered:
        values = values * taper(grid)
    return ComplexField(grid, values.astype(complex))


def from_samples(grid: Grid, path: Union[str, Path]) -> ComplexField:
    """
    Radial profile stored as an .npz archive with arrays `r` and `values`,
    interpolated by cubic splines onto the grid (zero beyond the last sample)
    """
    path = Path(path)
    if not path.exists():
        raise FieldError(f"Samples file not found: {path}")
    with np.load(path) as archive:
        if "r" not in archive or "values" not in archive:
            raise FieldError(f"Samples file {path} must contain arrays 'r' and 'values'")
        r = np.asarray(archive["r"], dtype=float)
        values = np.asarray(archive["values"], dtype=complex)

    if r.ndim != 1 or r.shape != values.shape or r.size < 4:
        raise FieldError(f"Samples file {path} needs matching 1-D arrays with at least 4 entries")
    if np.any(np.diff(r) <= 0):
        raise FieldError(f"Sample radii in {path} must be strictly increasing")

    re = CubicSpline(r, values.real)
    im = CubicSpline(r, values.imag)
    radius = grid.radius()
    out = re(radius) + 1j * im(radius)
    out[radius > r[-1]] = 0.0
    logger.debug(f"Loaded {r.size} samples from {path}")
    return ComplexField(grid, out)


def perturb(field: ComplexField, seed: int, strength: float) -> ComplexField:
    """
    Multiply by 1 + strength * eta(r), eta a sum of low cosine modes with
    complex normal coefficients drawn from `seed`
    """
    if strength == 0.0:
        return field
    rng = np.random.default_rng(seed)
    coefficients = rng.standard_normal(NOISE_MODES) + 1j * rng.standard_normal(NOISE_MODES)
    outer = _outer_radius(field.grid)
    r = field.grid.radius()
    eta = sum(c * np.cos((k + 1) * np.pi * r / outer) for k, c in enumerate(coefficients))
    return field.with_values(field.values * (1.0 + strength * eta / NOISE_MODES))


def build_initial_data(section, grid: Grid, seed: Optional[int] = None) -> ComplexField:
    """
    Initial field for a config `initial_data` section
    Campo inicial segun la seccion `initial_data` de la configuracion
    """
    family = section.family
    if family == "gaussian":
        field = gaussian(grid, section.amplitude, section.width, section.center)
    elif family == "rescaled_q":
        field = rescaled_q(grid, section.factor, section.scale)
    elif family == "samples":
        field = from_samples(grid, section.path)
    else:
        raise FieldError(f"Unknown initial data family: {family}")

    noise = getattr(section, "noise", 0.0)
    if noise and seed is not None:
        field = perturb(field, seed, noise)
    return field
