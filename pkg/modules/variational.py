"""
Variational - Energy functional, threshold classification, trapping and coercivity
Funcional de energia, clasificacion por umbral, atrapamiento y coercividad
"""

import logging
from dataclasses import asdict, dataclass
from typing import Optional

from .grid_fields import ComplexField, h1dot_norm_sq, mass, potential
from .ground_state import Q_ENERGY, Q_KINETIC, SHARP_CONSTANT

logger = logging.getLogger(__name__)

FOCUSING = 1
DEFOCUSING = -1

# Thresholds are the exact ground-state values, never re-measured per run
THRESHOLD_ENERGY = Q_ENERGY
THRESHOLD_KINETIC = Q_KINETIC

# Lower bound E >= kinetic / 4 below the threshold
TRAPPING_FLOOR = 0.25


def _check_sign(sign: int) -> None:
    if sign not in (FOCUSING, DEFOCUSING):
        raise ValueError(f"Equation sign must be +1 or -1, got {sign}")


def energy_from_parts(kinetic: float, pot: float, sign: int = FOCUSING) -> float:
    return 0.5 * kinetic - 0.25 * sign * pot


def energy(field: ComplexField, sign: int = FOCUSING) -> float:
    """E(u) = 1/2 ||grad u||^2 - sign/4 P(u)"""
    _check_sign(sign)
    return energy_from_parts(h1dot_norm_sq(field), potential(field), sign)


def is_subthreshold(kinetic: float, energy_value: float) -> bool:
    return energy_value < THRESHOLD_ENERGY and kinetic < THRESHOLD_KINETIC


def subthreshold(field: ComplexField) -> bool:
    """E(u) < E(Q) and ||u||_{H1-dot} < ||Q||_{H1-dot} (focusing sign, strict)"""
    kinetic = h1dot_norm_sq(field)
    return is_subthreshold(kinetic, energy_from_parts(kinetic, potential(field), FOCUSING))


def delta_bound(kinetic: float) -> float:
    """1 - C1 ||u||^2_{H1-dot}: lower bound for the coercivity fraction"""
    return 1.0 - SHARP_CONSTANT * kinetic


def energy_lower_bound(field: ComplexField) -> float:
    """1/2 K - (3 / 32 pi) K^2, the sharp-inequality bound on the focusing energy"""
    kinetic = h1dot_norm_sq(field)
    return 0.5 * kinetic - 0.25 * SHARP_CONSTANT * kinetic ** 2


@dataclass
class TrappingCheck:
    """Energy trapping result / Resultado del atrapamiento de energia"""
    holds: bool
    ratio: Optional[float]
    violation: Optional[str] = None


def trapping_check(field: ComplexField) -> TrappingCheck:
    """
    Check E(u) >= kinetic / 4 for sub-threshold data and return E / kinetic.
    A failed precondition is reported in `violation`, not raised.
    """
    kinetic = h1dot_norm_sq(field)
    e = energy_from_parts(kinetic, potential(field), FOCUSING)
    ratio = e / kinetic if kinetic > 0 else None

    if not is_subthreshold(kinetic, e):
        return TrappingCheck(holds=False, ratio=ratio,
                             violation="field is not below the ground-state threshold")
    if ratio is None:
        # the zero field is trivially trapped
        return TrappingCheck(holds=True, ratio=None)
    return TrappingCheck(holds=ratio >= TRAPPING_FLOOR, ratio=ratio)


@dataclass
class CoercivityMargin:
    """kinetic - potential and its share of kinetic / Margen de coercividad"""
    margin: float
    fraction: Optional[float]
    delta_bound: float
    violation: Optional[str] = None


def coercivity_from_parts(kinetic: float, pot: float) -> CoercivityMargin:
    margin = kinetic - pot
    if kinetic == 0.0:
        return CoercivityMargin(margin=margin, fraction=None, delta_bound=1.0,
                                violation="fraction undefined for the zero field")
    return CoercivityMargin(margin=margin, fraction=margin / kinetic, delta_bound=delta_bound(kinetic))


def coercivity_margin(field: ComplexField) -> CoercivityMargin:
    return coercivity_from_parts(h1dot_norm_sq(field), potential(field))


@dataclass
class VariationalReport:
    """All variational numbers of a field / Todos los numeros variacionales de un campo"""
    mass: float
    kinetic: float
    potential: float
    energy: float
    sign: int
    subthreshold: bool
    trapping_ratio: Optional[float]
    coercivity_margin: float
    coercivity_fraction: Optional[float]
    delta_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def report(field: ComplexField, sign: int = FOCUSING) -> VariationalReport:
    _check_sign(sign)
    kinetic = h1dot_norm_sq(field)
    pot = potential(field)
    e = energy_from_parts(kinetic, pot, sign)
    focusing_energy = energy_from_parts(kinetic, pot, FOCUSING)
    coercive = coercivity_from_parts(kinetic, pot)
    return VariationalReport(
        mass=mass(field),
        kinetic=kinetic,
        potential=pot,
        energy=e,
        sign=sign,
        subthreshold=is_subthreshold(kinetic, focusing_energy),
        trapping_ratio=focusing_energy / kinetic if kinetic > 0 else None,
        coercivity_margin=coercive.margin,
        coercivity_fraction=coercive.fraction,
        delta_bound=coercive.delta_bound,
    )
