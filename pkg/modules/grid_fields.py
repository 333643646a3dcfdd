"""
Grid Fields - Grids, complex fields, spectral differentiation and integral functionals
Mallas, campos complejos, diferenciacion espectral y funcionales integrales
"""

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import fft as spfft
from scipy.special import roots_legendre

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi

# Worker threads for scipy.fft; transforms are split along axes so results
# do not depend on the worker count.
FFT_WORKERS = -1

# Two-thirds rule cutoff (fraction of the largest resolved wavenumber)
DEALIAS_FRACTION = 2.0 / 3.0

# Share of a weighted integral carried by the outermost cells above which the
# integrand is reported as slowly decaying.
SLOW_DECAY_FRACTION = 1e-2


class FieldError(ValueError):
    """Exception raised for invalid grids, fields or norm specifications"""
    pass


# Weighted integrals |x|^-s |u|^q used by the analysis (whitelist)
ALLOWED_WEIGHTS = {
    (0, 2): "mass",
    (1, 4): "potential",
    (2, 2): "hardy",
    (3, 4): "virial_remainder",
}


@dataclass(frozen=True)
class WeightedNormSpec:
    """Weight exponent s of |x|^-s and field exponent q"""
    s: int
    q: int

    def __post_init__(self):
        if (self.s, self.q) not in ALLOWED_WEIGHTS:
            allowed = ", ".join(f"({s},{q})" for s, q in ALLOWED_WEIGHTS)
            raise FieldError(f"Weighted norm (s={self.s}, q={self.q}) not allowed; use one of {allowed}")

    @property
    def name(self) -> str:
        return ALLOWED_WEIGHTS[(self.s, self.q)]


MASS = WeightedNormSpec(0, 2)
POTENTIAL = WeightedNormSpec(1, 4)
HARDY = WeightedNormSpec(2, 2)
VIRIAL_REMAINDER = WeightedNormSpec(3, 4)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """
    Discretization of (0, inf) for radial fields
    Discretizacion de (0, inf) para campos radiales

    Nodes are stored together with their coordinate in (0, 1) and the map
    derivatives dr/dt, d2r/dt2, so derivatives can be taken in the coordinate
    where the samples are smooth. Weights carry the 4 pi r^2 dr volume element.

    Layouts:
    - mapped: r = L t / (1 - t) with composite Gauss-Legendre panels in t
    - uniform: r_i = i h, i = 1..n, Dirichlet wall at r_max = (n + 1) h
    """
    nodes: np.ndarray
    weights: np.ndarray
    coords: np.ndarray
    jacobian: np.ndarray
    jacobian_derivative: np.ndarray
    r_max: float
    layout: str
    map_scale: float = 1.0
    panel_order: int = 1

    @classmethod
    def mapped(cls, n_panels: int = 4096, map_scale: float = 2.0, panel_order: int = 1) -> "RadialGrid":
        """Rational map r = L t/(1-t) with n_panels Gauss-Legendre panels of panel_order nodes"""
        if n_panels < 4 or panel_order < 1:
            raise FieldError("Mapped radial grid needs at least 4 panels and 1 node per panel")
        if map_scale <= 0:
            raise FieldError(f"Map scale must be positive, got {map_scale}")

        ref_nodes, ref_weights = roots_legendre(panel_order)
        panel_starts = np.arange(n_panels) / n_panels
        t = (panel_starts[:, None] + (ref_nodes[None, :] + 1.0) / (2.0 * n_panels)).ravel()
        wt = np.tile(ref_weights / (2.0 * n_panels), n_panels)

        r = map_scale * t / (1.0 - t)
        dr_dt = map_scale / (1.0 - t) ** 2
        d2r_dt2 = 2.0 * map_scale / (1.0 - t) ** 3

        return cls(
            nodes=r,
            weights=FOUR_PI * r ** 2 * dr_dt * wt,
            coords=t,
            jacobian=dr_dt,
            jacobian_derivative=d2r_dt2,
            r_max=float(r[-1]),
            layout="mapped",
            map_scale=float(map_scale),
            panel_order=panel_order,
        )

    @classmethod
    def uniform(cls, n: int = 1024, r_max: float = 40.0) -> "RadialGrid":
        """Equispaced interior nodes of (0, r_max); v = r u vanishes at both ends"""
        if n < 4:
            raise FieldError(f"Uniform radial grid needs at least 4 nodes, got {n}")
        if r_max <= 0:
            raise FieldError(f"Outer radius must be positive, got {r_max}")

        h = r_max / (n + 1)
        r = h * np.arange(1, n + 1)
        return cls(
            nodes=r,
            # trapezoid rule with zero end values
            weights=FOUR_PI * r ** 2 * h,
            coords=r / r_max,
            jacobian=np.full(n, float(r_max)),
            jacobian_derivative=np.zeros(n),
            r_max=float(r_max),
            layout="uniform",
            map_scale=float(r_max),
        )

    @property
    def n_r(self) -> int:
        return self.nodes.size

    @property
    def shape(self) -> Tuple[int]:
        return (self.nodes.size,)

    @property
    def spacing(self) -> float:
        """Node spacing in r (uniform) or in the mapped coordinate (mapped)"""
        if self.layout == "uniform":
            return self.r_max / (self.n_r + 1)
        return 1.0 / (self.n_r // self.panel_order)

    @property
    def cell_width(self) -> float:
        """Smallest physical node spacing"""
        return float(np.min(np.diff(self.nodes))) if self.n_r > 1 else float(self.nodes[0])

    @property
    def supports_sine_series(self) -> bool:
        return self.layout == "uniform"

    def radius(self) -> np.ndarray:
        return self.nodes

    def refined(self, factor: int = 2) -> "RadialGrid":
        """Same layout with factor times as many cells"""
        if self.layout == "uniform":
            return RadialGrid.uniform((self.n_r + 1) * factor - 1, self.r_max)
        return RadialGrid.mapped(self.n_r // self.panel_order * factor, self.map_scale, self.panel_order)

    def ball_volume(self, radius: float) -> float:
        """Quadrature volume of the ball of given radius"""
        return float(np.sum(self.weights[self.nodes <= radius]))

    def inverse_radius_power(self, s: int) -> np.ndarray:
        # no node sits at the origin, so no regularization is needed
        return self.nodes ** (-float(s))

    def outer_region(self, fraction: float = 0.1) -> np.ndarray:
        """Mask of the outer shell of the domain (outer `fraction` of r_max)"""
        return self.nodes > (1.0 - fraction) * self.r_max

    def describe(self) -> dict:
        return {
            "geometry": "radial",
            "layout": self.layout,
            "points": self.n_r,
            "r_max": self.r_max,
            "map_scale": self.map_scale,
        }


@dataclass(frozen=True, eq=False)
class Grid3D:
    """
    Periodic box [-L, L)^3 with N points per axis, offset by half a cell
    Caja periodica [-L, L)^3 con N puntos por eje, desplazada media celda
    """
    half_width: float
    points: int

    def __post_init__(self):
        if self.points < 4 or self.points & (self.points - 1):
            raise FieldError(f"Points per axis must be a power of two >= 4, got {self.points}")
        if self.half_width <= 0:
            raise FieldError(f"Box half-width must be positive, got {self.half_width}")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.points,) * 3

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def cell_width(self) -> float:
        return self.spacing

    @property
    def cell_volume(self) -> float:
        return self.spacing ** 3

    @property
    def supports_sine_series(self) -> bool:
        return False

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.half_width + (np.arange(self.points) + 0.5) * self.spacing

    def axis_coordinates(self) -> List[np.ndarray]:
        """Broadcastable coordinate arrays x, y, z"""
        a = self.axis
        return [a[:, None, None], a[None, :, None], a[None, None, :]]

    @cached_property
    def radius_array(self) -> np.ndarray:
        x, y, z = self.axis_coordinates()
        return np.sqrt(x ** 2 + y ** 2 + z ** 2)

    def radius(self) -> np.ndarray:
        return self.radius_array

    @cached_property
    def wavenumbers(self) -> List[np.ndarray]:
        k = 2.0 * np.pi * spfft.fftfreq(self.points, d=self.spacing)
        return [k[:, None, None], k[None, :, None], k[None, None, :]]

    @cached_property
    def laplacian_symbol(self) -> np.ndarray:
        kx, ky, kz = self.wavenumbers
        return kx ** 2 + ky ** 2 + kz ** 2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        cutoff = DEALIAS_FRACTION * np.pi / self.spacing
        masks = [np.abs(k) < cutoff for k in self.wavenumbers]
        return masks[0] & masks[1] & masks[2]

    @lru_cache(maxsize=4)
    def inverse_radius_power(self, s: int) -> np.ndarray:
        """|x|^-s capped at (h/2)^-s"""
        if s == 0:
            return np.ones(self.shape)
        cap = (0.5 * self.spacing) ** (-float(s))
        return np.minimum(self.radius_array ** (-float(s)), cap)

    def outer_region(self, fraction: float = 0.1) -> np.ndarray:
        """Mask of the frame of the box where some |x_j| exceeds (1 - fraction) L"""
        edge = (1.0 - fraction) * self.half_width
        x, y, z = self.axis_coordinates()
        return (np.abs(x) > edge) | (np.abs(y) > edge) | (np.abs(z) > edge)

    def describe(self) -> dict:
        return {"geometry": "cartesian", "points": self.points, "half_width": self.half_width}


Grid = Union[RadialGrid, Grid3D]


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex samples u_i on a grid, one per node / Muestras complejas sobre una malla"""
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != tuple(self.grid.shape):
            raise FieldError(f"Field has shape {values.shape}, grid expects {tuple(self.grid.shape)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: Grid) -> "ComplexField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def with_values(self, values: np.ndarray) -> "ComplexField":
        return ComplexField(self.grid, values)

    def scaled(self, factor: complex) -> "ComplexField":
        return ComplexField(self.grid, factor * self.values)

    def conjugate(self) -> "ComplexField":
        return ComplexField(self.grid, np.conj(self.values))

    def __add__(self, other: "ComplexField") -> "ComplexField":
        _require_same_grid(self, other)
        return ComplexField(self.grid, self.values + other.values)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        _require_same_grid(self, other)
        return ComplexField(self.grid, self.values - other.values)


def _require_same_grid(a: ComplexField, b: ComplexField) -> None:
    if a.grid is not b.grid:
        raise FieldError("Fields live on different grids")


# ---------------------------------------------------------------------------
# Spectral bases
# ---------------------------------------------------------------------------

def _real_to_real(transform, values: np.ndarray, **kwargs) -> np.ndarray:
    """Apply a real-to-real transform to real and imaginary parts"""
    return transform(values.real, **kwargs) + 1j * transform(values.imag, **kwargs)


class SpectralBasis:
    """
    Spectral representation tied to a grid / Representacion espectral de una malla

    Grid3D: periodic Fourier series (symbol |xi|^2).
    Uniform RadialGrid: sine series of v = r u with Dirichlet walls, whose
    symbol (pi k / r_max)^2 is the exact spectrum of the radial Laplacian.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        if isinstance(grid, Grid3D):
            self.symbol = grid.laplacian_symbol
            self.mask = grid.dealias_mask
            # Parseval: integral = h^3 / N^3 * sum over modes
            self.mode_weight = grid.cell_volume / grid.points ** 3
        elif isinstance(grid, RadialGrid) and grid.supports_sine_series:
            k = np.pi * np.arange(1, grid.n_r + 1) / grid.r_max
            self.wavenumber = k
            self.symbol = k ** 2
            self.mask = np.arange(1, grid.n_r + 1) < DEALIAS_FRACTION * grid.n_r
            self.mode_weight = FOUR_PI * grid.spacing
        else:
            raise FieldError(f"No spectral basis for a {getattr(grid, 'layout', 'unknown')} grid")

    def forward(self, values: np.ndarray) -> np.ndarray:
        if isinstance(self.grid, Grid3D):
            return spfft.fftn(values, workers=FFT_WORKERS)
        v = self.grid.nodes * values
        return _real_to_real(spfft.dst, v, type=1, norm="ortho")

    def inverse(self, coefficients: np.ndarray) -> np.ndarray:
        if isinstance(self.grid, Grid3D):
            return spfft.ifftn(coefficients, workers=FFT_WORKERS)
        v = _real_to_real(spfft.idst, coefficients, type=1, norm="ortho")
        return v / self.grid.nodes

    def l2_norm_sq(self, coefficients: np.ndarray) -> float:
        return float(self.mode_weight * np.sum(np.abs(coefficients) ** 2))

    def kinetic(self, coefficients: np.ndarray) -> float:
        return float(self.mode_weight * np.sum(self.symbol * np.abs(coefficients) ** 2))

    def fill_fraction(self, coefficients: np.ndarray) -> float:
        """Share of the H1-dot mass carried by modes above the dealiasing cutoff"""
        density = self.symbol * np.abs(coefficients) ** 2
        total = float(np.sum(density))
        if total == 0.0:
            return 0.0
        return float(np.sum(density[~self.mask])) / total

    def radial_derivative(self, values: np.ndarray) -> np.ndarray:
        """d/dr of u from the cosine series of v_r (uniform radial grids only)"""
        grid = self.grid
        c = self.forward(values)
        padded = np.zeros(grid.n_r + 2, dtype=complex)
        padded[1:-1] = c * self.wavenumber
        # DCT-I with zero end entries gives 2 * sum_k x_k cos(pi k i / (n + 1))
        series = _real_to_real(spfft.dct, padded, type=1)
        v_r = np.sqrt(2.0 / (grid.n_r + 1)) * 0.5 * series[1:-1]
        return (v_r - values) / grid.nodes


@lru_cache(maxsize=16)
def spectral_basis(grid: Grid) -> SpectralBasis:
    """Cached spectral basis for a grid (grids hash by identity)"""
    return SpectralBasis(grid)


def has_spectral_basis(grid: Grid) -> bool:
    return isinstance(grid, Grid3D) or grid.supports_sine_series


def dealias(field: ComplexField) -> ComplexField:
    """Apply the two-thirds mask"""
    basis = spectral_basis(field.grid)
    coefficients = basis.forward(field.values)
    return field.with_values(basis.inverse(np.where(basis.mask, coefficients, 0.0)))


def spectral_fill(field: ComplexField) -> float:
    basis = spectral_basis(field.grid)
    return basis.fill_fraction(basis.forward(field.values))


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def _coordinate_derivative(values: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Second-order centered differences, one-sided second-order closures"""
    return np.gradient(values, coords, edge_order=2)


def second_coordinate_derivative(values: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Three-point second difference on (possibly nonuniform) coordinates"""
    out = np.empty_like(values)
    h_minus = coords[1:-1] - coords[:-2]
    h_plus = coords[2:] - coords[1:-1]
    out[1:-1] = 2.0 * (
        (values[2:] - values[1:-1]) / h_plus - (values[1:-1] - values[:-2]) / h_minus
    ) / (h_plus + h_minus)
    out[0] = out[1]
    out[-1] = out[-2]
    return out


def radial_derivative(field: ComplexField, spectral: Optional[bool] = None) -> np.ndarray:
    """
    d/dr of a radial field
    Derivada radial de un campo radial

    Finite differences in the mapped coordinate by default; the sine series
    is used on uniform grids when spectral is True (or None).
    """
    grid = field.grid
    if not isinstance(grid, RadialGrid):
        raise FieldError("radial_derivative needs a RadialGrid")
    if spectral is None:
        spectral = grid.supports_sine_series
    if spectral:
        return spectral_basis(grid).radial_derivative(field.values)
    return _coordinate_derivative(field.values, grid.coords) / grid.jacobian


def gradient(field: ComplexField, spectral: Optional[bool] = None) -> List[ComplexField]:
    """
    Gradient of a field: three components on Grid3D, d/dr on RadialGrid
    Gradiente de un campo

    On RadialGrid the default is second-order centered differences; pass
    spectral=True to use the sine series of a uniform grid.
    """
    grid = field.grid
    if isinstance(grid, Grid3D):
        coefficients = spfft.fftn(field.values, workers=FFT_WORKERS)
        return [
            field.with_values(spfft.ifftn(1j * k * coefficients, workers=FFT_WORKERS))
            for k in grid.wavenumbers
        ]
    return [field.with_values(radial_derivative(field, spectral=bool(spectral)))]


def gradient_modulus_sq(field: ComplexField, spectral: Optional[bool] = None) -> np.ndarray:
    return sum(np.abs(component.values) ** 2 for component in gradient(field, spectral))


# ---------------------------------------------------------------------------
# Integrals
# ---------------------------------------------------------------------------

def quadrature_weights(grid: Grid) -> np.ndarray:
    if isinstance(grid, Grid3D):
        return np.full(grid.shape, grid.cell_volume)
    return grid.weights


def integrate(grid: Grid, density: np.ndarray, mask: Optional[np.ndarray] = None) -> float:
    """Quadrature of a pointwise density over the grid (optionally over a mask)"""
    if isinstance(grid, Grid3D):
        values = density if mask is None else density[mask]
        return float(grid.cell_volume * np.sum(values))
    weights = grid.weights
    if mask is not None:
        return float(np.sum(weights[mask] * density[mask]))
    return float(np.sum(weights * density))


@dataclass
class QuadratureReport:
    """Weighted integral with its outer-cell share / Integral ponderada con su cola"""
    value: float
    tail_fraction: float
    slow_decay: bool
    tail_correction: float = 0.0


def _outer_cells(grid: Grid) -> np.ndarray:
    if isinstance(grid, Grid3D):
        return grid.outer_region(0.1)
    mask = np.zeros(grid.n_r, dtype=bool)
    mask[-max(1, grid.panel_order):] = True
    return mask


def _power_law_tail(grid: RadialGrid, density: np.ndarray) -> Tuple[float, bool]:
    """
    Analytic tail beyond the last node for g(r) = 4 pi r^2 density ~ c r^-p.
    Returns (tail, convergent).
    """
    r = grid.nodes[-2:]
    g = FOUR_PI * r ** 2 * density[-2:]
    if g[0] <= 0.0 or g[1] <= 0.0:
        return 0.0, True
    p = -np.log(g[1] / g[0]) / np.log(r[1] / r[0])
    if p <= 1.0:
        return float("inf"), False
    r_end = grid.r_max + 0.5 * grid.spacing if grid.layout == "uniform" else r[1]
    return float(g[1] * r[1] ** p * r_end ** (1.0 - p) / (p - 1.0)), True


def weighted_integral_report(field: ComplexField, spec: WeightedNormSpec,
                             tail_correction: bool = False) -> QuadratureReport:
    """
    Integral of |x|^-s |u|^q with a slow-decay flag
    Integral de |x|^-s |u|^q con indicador de decaimiento lento
    """
    if not isinstance(spec, WeightedNormSpec):
        raise FieldError("spec must be a WeightedNormSpec")
    grid = field.grid
    density = grid.inverse_radius_power(spec.s) * np.abs(field.values) ** spec.q
    value = integrate(grid, density)
    outer = integrate(grid, density, _outer_cells(grid))
    tail_fraction = outer / value if value > 0.0 else 0.0
    slow_decay = tail_fraction > SLOW_DECAY_FRACTION

    correction = 0.0
    if tail_correction and isinstance(grid, RadialGrid) and grid.layout == "uniform":
        correction, convergent = _power_law_tail(grid, density)
        if not convergent:
            slow_decay = True
            correction = 0.0
        elif value > 0.0 and correction / value > SLOW_DECAY_FRACTION:
            slow_decay = True

    if slow_decay:
        logger.warning("Slow decay in %s integral: outer share %.3g", spec.name, tail_fraction)
    return QuadratureReport(value=value + correction, tail_fraction=tail_fraction,
                            slow_decay=slow_decay, tail_correction=correction)


def weighted_integral(field: ComplexField, spec: WeightedNormSpec, tail_correction: bool = False) -> float:
    """Integral of |x|^-s |u|^q over the grid (truncated value, see the report for the tail)"""
    return weighted_integral_report(field, spec, tail_correction).value


def mass(field: ComplexField) -> float:
    return weighted_integral(field, MASS)


def potential(field: ComplexField) -> float:
    """P(u) = integral of |x|^-1 |u|^4"""
    return weighted_integral(field, POTENTIAL)


def h1dot_norm_sq(field: ComplexField, spectral: Optional[bool] = None) -> float:
    """
    Kinetic energy: integral of |grad u|^2
    Energia cinetica: integral de |grad u|^2

    Spectral on Grid3D and (by default) on uniform radial grids, where it
    uses the same symbol as the free propagator; quadrature of the
    finite-difference derivative otherwise.
    """
    grid = field.grid
    if spectral is None:
        spectral = has_spectral_basis(grid)
    if spectral:
        basis = spectral_basis(grid)
        return basis.kinetic(basis.forward(field.values))
    return integrate(grid, gradient_modulus_sq(field, spectral=False))


def hardy_ratio(field: ComplexField) -> float:
    """||u/|x|||^2 / ||grad u||^2 (sharp bound 4 in three dimensions)"""
    if field.is_zero():
        raise FieldError("Hardy ratio is undefined for the zero field")
    kinetic = h1dot_norm_sq(field)
    if kinetic == 0.0:
        raise FieldError("Hardy ratio is undefined for a field with zero gradient")
    return weighted_integral(field, HARDY) / kinetic


def lebesgue_integral(field: ComplexField, exponent: float) -> float:
    """Integral of |u|^p"""
    return integrate(field.grid, np.abs(field.values) ** exponent)


def gradient_lebesgue_norm(field: ComplexField, exponent: float) -> float:
    """||grad u||_{L^p}"""
    density = gradient_modulus_sq(field) ** (0.5 * exponent)
    return integrate(field.grid, density) ** (1.0 / exponent)


def h1dot_distance(a: ComplexField, b: ComplexField) -> float:
    return float(np.sqrt(h1dot_norm_sq(a - b)))


def mass_boundary_fraction(field: ComplexField, fraction: float = 0.1) -> float:
    """Share of the mass in the outer `fraction` of the domain"""
    density = np.abs(field.values) ** 2
    total = integrate(field.grid, density)
    if total == 0.0:
        return 0.0
    return integrate(field.grid, density, field.grid.outer_region(fraction)) / total
