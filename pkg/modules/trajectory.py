"""
Trajectory - Drives the split-step solver and samples diagnostics along a run
Conduce el integrador y muestrea los diagnosticos a lo largo de una corrida
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .diagnostics import (
    PURE_WEIGHT,
    DiagnosticsRecord,
    RecordBuilder,
    ScatteringVerdict,
    VirialWeight,
    scattering_detector,
)
from .grid_fields import ComplexField
from .solver import (
    DetectorThresholds,
    SimulationState,
    Status,
    StepParams,
    detect,
    strang_step,
)

logger = logging.getLogger(__name__)


@dataclass
class SimulationResult:
    """Outcome of one run / Resultado de una corrida"""
    status: Status
    final_state: SimulationState
    records: List[DiagnosticsRecord]
    history: List[Tuple[float, ComplexField]] = field(default_factory=list)
    verdict: Optional[ScatteringVerdict] = None
    l10_saturation: float = 0.0
    max_kinetic: float = 0.0
    duration_ms: int = 0

    @property
    def final_time(self) -> float:
        return self.final_state.physical_time

    def summary(self) -> dict:
        return {
            "status": self.status.value,
            "final_time": self.final_time,
            "steps": self.final_state.steps,
            "samples": len(self.records),
            "max_kinetic": self.max_kinetic,
            "l10": self.records[-1].l10 if self.records else 0.0,
            "l10_saturation": self.l10_saturation,
            "scatter_deviation": self.verdict.max_deviation if self.verdict else None,
            "duration_ms": self.duration_ms,
        }


def simulate(initial: ComplexField, params: StepParams, t_final: float, sample_every: int = 10,
             thresholds: DetectorThresholds = DetectorThresholds(),
             weight: VirialWeight = PURE_WEIGHT, tail_radius: Optional[float] = None,
             check_scattering: bool = True, stop_when_dispersed: bool = True) -> SimulationResult:
    """
    Integrate from t = 0 to direction * t_final with fixed steps, sampling a
    DiagnosticsRecord every `sample_every` steps (and at the start and end).
    The scattering detector runs on the sampled history once |t| reaches
    thresholds.scatter_min_time. A run still going at t_final ends as
    time_exhausted.
    """
    if not t_final > 0:
        raise ValueError(f"Final time must be positive, got {t_final}")
    if sample_every < 1:
        raise ValueError(f"sample_every must be at least 1, got {sample_every}")

    start_time = time.time()
    n_steps = max(1, round(t_final / params.dt))
    if not math.isclose(n_steps * params.dt, t_final, rel_tol=1e-9):
        logger.debug(f"t_final={t_final} is not a multiple of dt={params.dt}; "
                     f"running {n_steps} steps to t={n_steps * params.dt:.6g}")

    builder = RecordBuilder(weight=weight, sign=params.sign, tail_radius=tail_radius)
    state = SimulationState.start(initial, direction=params.direction)
    records = [builder.sample(state.physical_time, state.field)]
    history = [(state.physical_time, state.field)]
    verdict: Optional[ScatteringVerdict] = None
    max_kinetic = records[0].kinetic

    while state.steps < n_steps and not state.status.is_terminal:
        state = strang_step(state, params)
        state = state.with_status(detect(state, thresholds))
        if state.status in (Status.UNDERRESOLVED, Status.BLOWUP_SUSPECTED):
            break
        max_kinetic = max(max_kinetic, state.kinetic)

        if state.steps % sample_every and state.steps != n_steps:
            continue

        record = builder.sample(state.physical_time, state.field)
        records.append(record)
        history.append((state.physical_time, state.field))
        max_kinetic = max(max_kinetic, record.kinetic)

        if check_scattering and state.t >= thresholds.scatter_min_time:
            verdict = scattering_detector(
                history,
                tolerance=thresholds.scatter_tolerance,
                window=thresholds.scatter_window,
                max_samples=thresholds.scatter_max_samples,
                boundary_fraction=thresholds.boundary_fraction,
                boundary_mass=thresholds.boundary_mass,
                min_time=thresholds.scatter_min_time,
            )
            if verdict.dispersed and stop_when_dispersed:
                state = state.with_status(detect(state, thresholds, dispersed=True))

    if verdict is not None and verdict.dispersed:
        state = state.with_status(detect(state, thresholds, dispersed=True))
    state = state.with_status(Status.TIME_EXHAUSTED)

    result = SimulationResult(
        status=state.status,
        final_state=state,
        records=records,
        history=history,
        verdict=verdict,
        l10_saturation=builder.accumulator.saturation_ratio(),
        max_kinetic=max_kinetic,
        duration_ms=int((time.time() - start_time) * 1000),
    )
    logger.info(f"Run finished: {state.status.value} at t={state.physical_time:.6g} "
                f"after {state.steps} steps ({len(records)} samples)")
    return result
