"""
Diagnostics - Virial functionals, tightness tails, scattering detection and space-time accumulators
Funcionales viriales, colas de localizacion, deteccion de dispersion y acumuladores espacio-temporales
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import trapezoid

from .grid_fields import (
    HARDY,
    ComplexField,
    Grid3D,
    gradient,
    gradient_lebesgue_norm,
    gradient_modulus_sq,
    h1dot_distance,
    h1dot_norm_sq,
    integrate,
    lebesgue_integral,
    mass,
    mass_boundary_fraction,
    potential,
    radial_derivative,
    spectral_basis,
    weighted_integral,
)
from .initial_data import Center, gaussian
from .solver import (
    DEFAULT_CFL,
    SimulationError,
    SimulationState,
    Status,
    StepParams,
    cfl_timestep,
    free_propagate,
    strang_step,
)
from .variational import energy_from_parts

logger = logging.getLogger(__name__)

# Frozen CSV column order (records format v1)
RECORD_COLUMNS = [
    "t", "mass", "energy", "kinetic", "potential", "M_a", "rate",
    "l10", "grad_strichartz", "tail_fraction", "deviation",
]

# Lebesgue exponent of the gradient norm in the Strichartz accumulator
STRICHARTZ_EXPONENT = 30.0 / 11.0


class DiagnosticsError(ValueError):
    """Exception raised when a diagnostic lacks the data it needs"""
    pass


class MassLeftGridError(SimulationError):
    """Raised when too much mass reaches the edge of the domain"""
    pass


# ---------------------------------------------------------------------------
# Virial weight
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _blend_profile() -> Polynomial:
    """
    Degree-7 profile g on [0, 1] with a'(r) = R g((r - R) / R) in the blend
    region: g = 2, g' = 2, g'' = g''' = 0 at 0 and g = g' = g'' = g''' = 0 at 1
    """
    basis = [Polynomial.basis(k) for k in range(8)]
    left = [2.0, 2.0, 0.0, 0.0]
    rows, rhs = [], []
    for order in range(4):
        rows.append([b.deriv(order)(0.0) for b in basis])
        rhs.append(left[order])
        rows.append([b.deriv(order)(1.0) for b in basis])
        rhs.append(0.0)
    return Polynomial(np.linalg.solve(np.array(rows), np.array(rhs)))


@dataclass(frozen=True)
class VirialWeight:
    """
    Radial virial weight a(|x|)
    Peso virial radial

    radius=None is the pure weight |x|^2. Otherwise a = |x|^2 on |x| <= R,
    a = C R^2 beyond 2R, and a C^4 polynomial blend in between.
    """
    radius: Optional[float] = None

    def __post_init__(self):
        if self.radius is not None and not self.radius > 0:
            raise DiagnosticsError(f"Virial radius must be positive, got {self.radius}")

    @property
    def is_pure(self) -> bool:
        return self.radius is None

    @property
    def plateau(self) -> Optional[float]:
        """C with a = C R^2 beyond 2R"""
        if self.is_pure:
            return None
        return 1.0 + float(_blend_profile().integ()(1.0))

    def derivatives(self, r: np.ndarray) -> Tuple[np.ndarray, ...]:
        """(a, a', a'', a''', a'''') as functions of r"""
        r = np.asarray(r, dtype=float)
        if self.is_pure:
            zero = np.zeros_like(r)
            return r ** 2, 2.0 * r, np.full_like(r, 2.0), zero, zero

        R = self.radius
        g = _blend_profile()
        sigma = np.clip((r - R) / R, 0.0, 1.0)
        inner = r <= R
        outer = r > 2.0 * R
        blend = ~(inner | outer)

        a = np.where(inner, r ** 2, R ** 2 * (1.0 + g.integ()(sigma)))
        a1 = np.where(inner, 2.0 * r, R * g(sigma))
        a2 = np.where(inner, 2.0, g.deriv(1)(sigma))
        a3 = np.where(blend, g.deriv(2)(sigma) / R, 0.0)
        a4 = np.where(blend, g.deriv(3)(sigma) / R ** 2, 0.0)
        a1 = np.where(outer, 0.0, a1)
        a2 = np.where(outer, 0.0, a2)
        return a, a1, a2, a3, a4

    def derivative_bounds(self, samples: int = 4096) -> List[float]:
        """max |a^(k)| R^(k-2), k = 0..4, sampled on (0, 3R]"""
        if self.is_pure:
            raise DiagnosticsError("The pure weight has no uniform derivative bounds")
        r = np.linspace(0.0, 3.0 * self.radius, samples + 1)[1:]
        return [float(np.max(np.abs(d))) * self.radius ** (k - 2)
                for k, d in enumerate(self.derivatives(r))]

    def moment_bound(self) -> Optional[float]:
        """max r |a'(r)|, which with Hardy gives |M_a| <= 4 max(r |a'|) ||grad u||^2"""
        if self.is_pure:
            return None
        r = np.linspace(0.0, 2.0 * self.radius, 4097)[1:]
        return float(np.max(r * np.abs(self.derivatives(r)[1])))


PURE_WEIGHT = VirialWeight()


def _radial_parts(field: ComplexField) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(r, d/dr u, |grad u|^2) on either grid geometry"""
    grid = field.grid
    if isinstance(grid, Grid3D):
        components = gradient(field)
        r = grid.radius_array
        x = grid.axis_coordinates()
        u_r = sum(xj * c.values for xj, c in zip(x, components)) / r
        grad_sq = sum(np.abs(c.values) ** 2 for c in components)
        return r, u_r, grad_sq
    u_r = radial_derivative(field)
    return grid.nodes, u_r, np.abs(u_r) ** 2


def virial_quantity(field: ComplexField, weight: VirialWeight = PURE_WEIGHT) -> float:
    """M_a = 2 Im integral of conj(u) grad u . grad a"""
    r, u_r, _ = _radial_parts(field)
    a1 = weight.derivatives(r)[1]
    return integrate(field.grid, 2.0 * np.imag(np.conj(field.values) * u_r) * a1)


def virial_rate(field: ComplexField, weight: VirialWeight = PURE_WEIGHT, sign: int = 1) -> float:
    """
    dM_a/dt from the virial identity
    Derivada temporal de M_a segun la identidad virial

    For a radial weight: a_jk u_j u_k = a''|u_r|^2 + a'/r (|grad u|^2 - |u_r|^2),
    Delta^2 a = a'''' + 4 a'''/r, Delta a = a'' + 2 a'/r, x . grad a = r a'.
    """
    r, u_r, grad_sq = _radial_parts(field)
    _, a1, a2, a3, a4 = weight.derivatives(r)
    u_sq = np.abs(field.values) ** 2
    radial_sq = np.abs(u_r) ** 2

    hessian = 4.0 * (a2 * radial_sq + (a1 / r) * (grad_sq - radial_sq))
    bilaplacian = u_sq * (a4 + 4.0 * a3 / r)
    # |x|^-1 |u|^4 Delta a + |x|^-3 |u|^4 x . grad a
    quartic = sign * u_sq ** 2 / r * (a2 + 3.0 * a1 / r)
    return integrate(field.grid, hessian - bilaplacian - quartic)


# ---------------------------------------------------------------------------
# Tightness
# ---------------------------------------------------------------------------

@dataclass
class TailIntegrals:
    """Integrals over |x| > R / Integrales sobre |x| > R"""
    gradient: float
    potential: float
    hardy: float

    @property
    def total(self) -> float:
        return self.gradient + self.potential + self.hardy


def tightness_tail(field: ComplexField, radius: float) -> TailIntegrals:
    """Tails of |grad u|^2, |x|^-1 |u|^4 and |x|^-2 |u|^2 beyond `radius`"""
    grid = field.grid
    r = grid.radius()
    outside = r > radius
    u_sq = np.abs(field.values) ** 2
    return TailIntegrals(
        gradient=integrate(grid, gradient_modulus_sq(field), outside),
        potential=integrate(grid, u_sq ** 2 / r, outside),
        hardy=integrate(grid, u_sq / r ** 2, outside),
    )


def tightness_radius(field: ComplexField, covered: float = 0.99) -> float:
    """
    Smallest node radius R whose tails (tightness_tail(field, R).total) hold
    at most 1 - covered of the whole tightness mass
    """
    if not 0.0 < covered < 1.0:
        raise DiagnosticsError(f"Covered fraction must lie in (0, 1), got {covered}")
    grid = field.grid
    r = grid.radius()
    u_sq = np.abs(field.values) ** 2
    density = gradient_modulus_sq(field) + u_sq ** 2 / r + u_sq / r ** 2
    allowed = (1.0 - covered) * integrate(grid, density)
    if not allowed > 0:
        raise DiagnosticsError("tightness_radius needs a nonzero field")

    radii = np.unique(r)
    low, high = 0, radii.size - 1
    while low < high:
        middle = (low + high) // 2
        if integrate(grid, density, r > radii[middle]) <= allowed:
            high = middle
        else:
            low = middle + 1
    return float(radii[low])


# ---------------------------------------------------------------------------
# Scattering detection
# ---------------------------------------------------------------------------

@dataclass
class ScatteringVerdict:
    """Cauchy-in-H1-dot test of the unwound states"""
    dispersed: bool
    max_deviation: float
    window_samples: int
    radiation_fraction: float
    radiation_clean: bool
    reason: str
    candidate: Optional[ComplexField] = None

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("candidate")
        return data


def _unwound_coefficients(t: float, field: ComplexField) -> np.ndarray:
    """Spectral coefficients of e^{-it Delta} u"""
    basis = spectral_basis(field.grid)
    return basis.forward(field.values) * np.exp(1j * t * basis.symbol)


def _trailing_window(history: Sequence[Tuple[float, ComplexField]], window: float,
                     max_samples: int) -> List[Tuple[float, ComplexField]]:
    count = max(2, math.ceil(window * len(history)))
    trailing = list(history[-count:])
    if len(trailing) > max_samples:
        picks = np.unique(np.linspace(0, len(trailing) - 1, max_samples).round().astype(int))
        trailing = [trailing[i] for i in picks]
    return trailing


def scattering_detector(history: Sequence[Tuple[float, ComplexField]], tolerance: float = 1e-3,
                        window: float = 0.25, max_samples: int = 64, boundary_fraction: float = 0.1,
                        boundary_mass: float = 0.01, min_time: float = 0.0) -> ScatteringVerdict:
    """
    Unwind each sampled state, psi(t) = e^{-it Delta} u(t), and test whether
    every pair in the trailing window is within `tolerance` in H1-dot,
    relative to the last unwound state. The verdict also needs a clean
    radiation monitor (little mass in the outer shell) and |t| >= min_time.
    """
    if len(history) < 2:
        raise DiagnosticsError(f"Scattering detection needs at least two samples, got {len(history)}")

    trailing = _trailing_window(history, window, max_samples)
    t_last, u_last = trailing[-1]
    basis = spectral_basis(u_last.grid)
    coefficients = [_unwound_coefficients(t, u) for t, u in trailing]

    reference = basis.kinetic(coefficients[-1])
    max_deviation = 0.0
    if reference > 0.0:
        for i in range(len(coefficients)):
            for j in range(i + 1, len(coefficients)):
                distance = basis.kinetic(coefficients[i] - coefficients[j])
                max_deviation = max(max_deviation, math.sqrt(distance / reference))

    radiation = mass_boundary_fraction(u_last, boundary_fraction)
    clean = radiation <= boundary_mass

    if abs(t_last) < min_time:
        reason = f"t={abs(t_last):.4g} below the minimum time {min_time:.4g}"
    elif not clean:
        reason = f"{100 * radiation:.2f}% of the mass in the outer shell"
    elif max_deviation >= tolerance:
        reason = f"unwound states still moving (deviation {max_deviation:.3e})"
    else:
        reason = "unwound states are Cauchy in H1-dot"

    dispersed = abs(t_last) >= min_time and clean and max_deviation < tolerance
    return ScatteringVerdict(
        dispersed=dispersed,
        max_deviation=max_deviation,
        window_samples=len(trailing),
        radiation_fraction=radiation,
        radiation_clean=clean,
        reason=reason,
        candidate=u_last.with_values(basis.inverse(coefficients[-1])),
    )


# ---------------------------------------------------------------------------
# Space-time accumulators
# ---------------------------------------------------------------------------

class SpaceTimeAccumulator:
    """
    Trapezoid-in-time accumulation of integral |u|^10 dx (the L^10 norm to the
    10th power) and of ||grad u||^5 in L^{30/11}. Both totals are nondecreasing.
    """

    def __init__(self):
        self.l10 = 0.0
        self.strichartz = 0.0
        self.times: List[float] = []
        self.l10_totals: List[float] = []
        self._last: Optional[Tuple[float, float, float]] = None

    def add(self, t: float, field: ComplexField) -> None:
        l10_density = lebesgue_integral(field, 10.0)
        strichartz_density = gradient_lebesgue_norm(field, STRICHARTZ_EXPONENT) ** 5
        elapsed = abs(t)
        if self._last is not None:
            step = elapsed - self._last[0]
            self.l10 += 0.5 * step * (l10_density + self._last[1])
            self.strichartz += 0.5 * step * (strichartz_density + self._last[2])
        self._last = (elapsed, l10_density, strichartz_density)
        self.times.append(elapsed)
        self.l10_totals.append(self.l10)

    def saturation_ratio(self) -> float:
        """Share of the L^10 total accumulated over the second half of the time span"""
        if self.l10 == 0.0 or len(self.times) < 2:
            return 0.0
        halfway = float(np.interp(0.5 * self.times[-1], self.times, self.l10_totals))
        return (self.l10 - halfway) / self.l10

    def saturated(self, fraction: float = 0.01) -> bool:
        return self.saturation_ratio() < fraction


def l10_accumulator(history: Sequence[Tuple[float, ComplexField]]) -> float:
    """Accumulated integral of |u|^10 over a uniformly sampled history"""
    if len(history) > 2:
        steps = np.diff([abs(t) for t, _ in history])
        if not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
            raise DiagnosticsError("l10_accumulator needs uniform sampling in time")
    accumulator = SpaceTimeAccumulator()
    for t, field in history:
        accumulator.add(t, field)
    return accumulator.l10


def small_data_indicator(initial: ComplexField, t_final: float, samples: int = 64) -> float:
    """
    ||e^{it Delta} u0||_{L^10} + ||grad e^{it Delta} u0||_{L^5 L^{30/11}} over [0, t_final]
    from free evolution samples; small values predict global existence
    """
    accumulator = SpaceTimeAccumulator()
    for t in np.linspace(0.0, t_final, samples + 1):
        accumulator.add(float(t), free_propagate(initial, float(t)))
    return accumulator.l10 ** 0.1 + accumulator.strichartz ** 0.2


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

@dataclass
class DiagnosticsRecord:
    """One sample of a trajectory / Una muestra de una trayectoria"""
    t: float
    mass: float
    energy: float
    kinetic: float
    potential: float
    virial: float
    rate: float
    l10: float
    grad_strichartz: float
    tail_fraction: float
    deviation: float

    def to_row(self) -> dict:
        row = asdict(self)
        row["M_a"] = row.pop("virial")
        return {column: row[column] for column in RECORD_COLUMNS}


class RecordBuilder:
    """
    Assembles DiagnosticsRecords along one trajectory; owns the accumulators
    and the previous unwound state
    """

    def __init__(self, weight: VirialWeight = PURE_WEIGHT, sign: int = 1,
                 tail_radius: Optional[float] = None):
        self.weight = weight
        self.sign = sign
        self.tail_radius = tail_radius
        self.accumulator = SpaceTimeAccumulator()
        self._previous_unwound: Optional[np.ndarray] = None

    def _tail_radius(self, field: ComplexField) -> float:
        if self.tail_radius is not None:
            return self.tail_radius
        if not self.weight.is_pure:
            return self.weight.radius
        return 0.5 * float(np.max(field.grid.radius()))

    def sample(self, t: float, field: ComplexField) -> DiagnosticsRecord:
        kinetic = h1dot_norm_sq(field)
        pot = potential(field)
        hardy = weighted_integral(field, HARDY)
        self.accumulator.add(t, field)

        tails = tightness_tail(field, self._tail_radius(field))
        whole = kinetic + pot + hardy
        tail_fraction = tails.total / whole if whole > 0 else 0.0

        basis = spectral_basis(field.grid)
        unwound = _unwound_coefficients(t, field)
        deviation = 0.0
        if self._previous_unwound is not None:
            norm = basis.kinetic(unwound)
            if norm > 0:
                deviation = math.sqrt(basis.kinetic(unwound - self._previous_unwound) / norm)
        self._previous_unwound = unwound

        return DiagnosticsRecord(
            t=t,
            mass=mass(field),
            energy=energy_from_parts(kinetic, pot, self.sign),
            kinetic=kinetic,
            potential=pot,
            virial=virial_quantity(field, self.weight),
            rate=virial_rate(field, self.weight, self.sign),
            l10=self.accumulator.l10,
            grad_strichartz=self.accumulator.strichartz,
            tail_fraction=tail_fraction,
            deviation=deviation,
        )


@dataclass
class VirialBudget:
    """Time integral of dM_a/dt against the size of M_a"""
    integrated_rate: float
    net_change: float
    sup_abs_virial: float
    sup_kinetic: float
    a_priori_bound: Optional[float]
    within_bound: Optional[bool]

    def to_dict(self) -> dict:
        return asdict(self)


def virial_budget(records: Sequence[DiagnosticsRecord], weight: VirialWeight = PURE_WEIGHT) -> VirialBudget:
    """
    Integrate the sampled rate over the run and compare with sup |M_a| and,
    for localized weights, with the bound 4 max(r |a'|) sup ||grad u||^2
    """
    if len(records) < 2:
        raise DiagnosticsError("virial_budget needs at least two records")
    times = np.array([abs(r.t) for r in records])
    rates = np.array([r.rate for r in records])
    virials = np.array([r.virial for r in records])
    sup_kinetic = max(r.kinetic for r in records)
    sup_abs = float(np.max(np.abs(virials)))

    moment = weight.moment_bound()
    bound = None if moment is None else 4.0 * moment * sup_kinetic
    return VirialBudget(
        integrated_rate=float(trapezoid(rates, times)),
        net_change=float(virials[-1] - virials[0]),
        sup_abs_virial=sup_abs,
        sup_kinetic=sup_kinetic,
        a_priori_bound=bound,
        within_bound=None if bound is None else sup_abs <= bound,
    )


# ---------------------------------------------------------------------------
# Far-center runs
# ---------------------------------------------------------------------------

def far_center_deviation(center: Center, width: float, amplitude: float, t_final: float,
                         grid: Grid3D, sign: int = 1, dt: Optional[float] = None,
                         cfl: float = DEFAULT_CFL, boundary_fraction: float = 0.1,
                         boundary_mass: float = 0.01) -> float:
    """
    ||u(T) - e^{iT Delta} u0||_{H1-dot} / ||u0||_{H1-dot} for an off-center Gaussian
    Desviacion relativa respecto de la evolucion libre para un dato descentrado

    Raises MassLeftGridError when more than `boundary_mass` of the mass sits in
    the outer frame of the box at the start or at the end.
    """
    initial = gaussian(grid, amplitude, width, center)
    if amplitude == 0.0:
        return 0.0

    def check_boundary(field: ComplexField, when: str) -> None:
        share = mass_boundary_fraction(field, boundary_fraction)
        if share > boundary_mass:
            raise MassLeftGridError(
                f"{100 * share:.2f}% of the mass reached the edge of the box {when} (center {center})")

    check_boundary(initial, "at the start")
    step = dt or cfl_timestep(grid, cfl)
    n_steps = max(1, math.ceil(t_final / step))
    params = StepParams(dt=t_final / n_steps, sign=sign)

    state = SimulationState.start(initial)
    for _ in range(n_steps):
        state = strang_step(state, params)
        if state.status == Status.UNDERRESOLVED:
            raise SimulationError(f"Far-center run underresolved at t={state.t:.4g} (center {center})")
    check_boundary(state.field, "at the final time")

    free = free_propagate(initial, t_final)
    deviation = h1dot_distance(state.field, free) / math.sqrt(h1dot_norm_sq(initial))
    logger.info(f"Far-center deviation {deviation:.4e} for center {center}")
    return deviation
