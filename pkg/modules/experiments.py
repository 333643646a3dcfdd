"""
Experiments - Constants suite, threshold bisection, far-center sweep, defocusing suite, single runs
Experimentos: constantes, biseccion del umbral, barrido descentrado, caso desenfocante, corrida simple

Every experiment takes a RunConfig and returns an ExperimentSummary. Numerical
contract failures become assertion entries of the summary; they are never
raised.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .diagnostics import (
    PURE_WEIGHT,
    MassLeftGridError,
    VirialWeight,
    far_center_deviation,
    small_data_indicator,
    tightness_radius,
    virial_budget,
    virial_quantity,
    virial_rate,
)
from .grid_fields import ComplexField, Grid3D, RadialGrid, hardy_ratio
from .ground_state import (
    Q_ENERGY,
    Q_KINETIC,
    Q_POTENTIAL,
    SHARP_CONSTANT,
    elliptic_residual,
    evaluate_q,
    ground_state_constants,
    sharp_constant_via_optimization,
)
from .initial_data import build_initial_data, gaussian
from .records import Bracket, ConstantRow, ExperimentSummary, RunVerdict, write_records
from .run_config import ConfigError, RunConfig
from .solver import SimulationError, SimulationState, Status, StepParams, strang_step
from .trajectory import SimulationResult, simulate
from .variational import THRESHOLD_KINETIC, delta_bound, report

logger = logging.getLogger(__name__)

SCATTER = "scatter"
BLOWUP = "blowup"
INCONCLUSIVE = "inconclusive"

# An underresolved run counts as blowup evidence when its H1-dot norm grew this much
UNDERRESOLVED_GROWTH = 2.0

# Slack of the coercivity bound along the flow
COERCIVITY_SLACK = 1e-3

# Share of the initial tightness mass inside the radius of the localized virial weight
LOCALIZED_COVERAGE = 0.99

# Minimum observed order of the elliptic residual under refinement
ELLIPTIC_MIN_ORDER = 1.8

# Steps of the time-reversal mirror check
MIRROR_STEPS = 20


def _finite(value) -> Optional[float]:
    """JSON-safe float (None for NaN/inf)"""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _map_runs(function: Callable, items: Iterable, workers: int) -> List:
    """Run independent jobs, concurrently when workers > 1; results keep input order"""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(function, items))


def _new_summary(config: RunConfig) -> ExperimentSummary:
    return ExperimentSummary(
        kind=config.kind,
        name=config.experiment.name,
        seed=config.experiment.seed,
        config=config.describe(),
    )


def _finish(summary: ExperimentSummary, start: float) -> ExperimentSummary:
    summary.duration_ms = int((time.time() - start) * 1000)
    failed = [name for name, ok in summary.assertions.items() if not ok]
    if failed:
        logger.warning(f"{summary.kind}: failed assertions {failed}")
    else:
        logger.info(f"{summary.kind}: all {len(summary.assertions)} assertions hold")
    return summary


# ---------------------------------------------------------------------------
# Single trajectories
# ---------------------------------------------------------------------------

def _trajectory_metrics(result: SimulationResult, initial: ComplexField, sign: int) -> Dict:
    records = result.records
    masses = np.array([r.mass for r in records])
    energies = np.array([r.energy for r in records])
    kinetics = np.array([r.kinetic for r in records])
    potentials = np.array([r.potential for r in records])
    initial_report = report(initial, sign)

    mass0 = masses[0] if masses[0] > 0 else 1.0
    energy_scale = abs(energies[0]) if energies[0] != 0 else 1.0
    margins = kinetics - potentials
    bounds = np.array([delta_bound(k) for k in kinetics]) * kinetics

    metrics = {
        "status": result.status.value,
        "final_time": result.final_time,
        "steps": result.final_state.steps,
        "samples": len(records),
        "mass_drift": _finite(np.max(np.abs(masses - masses[0])) / mass0),
        "energy_drift": _finite(np.max(np.abs(energies - energies[0])) / energy_scale),
        "initial_kinetic": initial_report.kinetic,
        "initial_energy": initial_report.energy,
        "subthreshold_initial": initial_report.subthreshold,
        "max_kinetic": _finite(result.max_kinetic),
        "kinetic_below_threshold": bool(np.all(kinetics < THRESHOLD_KINETIC)),
        "coercive_along_flow": bool(np.all(margins >= bounds - COERCIVITY_SLACK)),
        "l10": _finite(records[-1].l10),
        "grad_strichartz": _finite(records[-1].grad_strichartz),
        "l10_saturation": _finite(result.l10_saturation),
        "scatter_deviation": _finite(result.verdict.max_deviation) if result.verdict else None,
        "scatter_reason": result.verdict.reason if result.verdict else None,
        "duration_ms": result.duration_ms,
    }
    metrics["virial_fd_mismatch"] = _finite(_virial_fd_mismatch(result))
    return metrics


def _virial_fd_mismatch(result: SimulationResult, weight: Optional[VirialWeight] = None,
                         sign: int = 1) -> Optional[float]:
    """
    max over interior samples of |centered difference of M_a - rate|,
    relative to max |rate|. Without a weight the recorded M_a and rate are
    used; with one they are recomputed from the sampled history.
    """
    if weight is None:
        samples = [(r.t, r.virial, r.rate) for r in result.records]
    else:
        samples = [(t, virial_quantity(u, weight), virial_rate(u, weight, sign)) for t, u in result.history]
    if len(samples) < 3:
        return None
    t, virial, rate = (np.array(column) for column in zip(*samples))
    centered = (virial[2:] - virial[:-2]) / (t[2:] - t[:-2])
    scale = float(np.max(np.abs(rate)))
    if scale == 0.0:
        return float(np.max(np.abs(centered)))
    return float(np.max(np.abs(centered - rate[1:-1])) / scale)


def run_trajectory(config: RunConfig, initial: ComplexField, run_id: str,
                   output_dir: Optional[Path] = None, direction: Optional[int] = None,
                   parameters: Optional[Dict] = None) -> Tuple[SimulationResult, RunVerdict]:
    """One configured simulation, its records file and its verdict row"""
    grid = initial.grid
    params = config.step_params(grid, direction=direction)
    result = simulate(
        initial,
        params,
        config.time.t_final,
        sample_every=config.time.sample_every,
        thresholds=config.thresholds(),
        weight=config.virial_weight(),
        tail_radius=config.diagnostics.tail_radius,
        check_scattering=config.diagnostics.check_scattering,
        stop_when_dispersed=config.diagnostics.stop_when_dispersed,
    )

    records_file = None
    if output_dir is not None and config.output.write_records:
        records_file = str(write_records(Path(output_dir) / f"{run_id}.csv", result.records))

    verdict = RunVerdict(
        run_id=run_id,
        status=result.status.value,
        parameters=parameters or {},
        metrics=_trajectory_metrics(result, initial, params.sign),
        resolution={**grid.describe(), "dt": params.dt, "direction": params.direction},
        tolerances=config.thresholds().to_dict(),
        records_file=records_file,
    )
    return result, verdict


def run_single(config: RunConfig, output_dir: Optional[Path] = None) -> ExperimentSummary:
    """
    One configured run with records, variational report and indicators
    Una corrida configurada con registros e indicadores
    """
    start = time.time()
    summary = _new_summary(config)
    grid = config.build_grid()
    initial = build_initial_data(config.initial_data, grid, config.experiment.seed)

    result, verdict = run_trajectory(config, initial, "single", output_dir)
    localized = VirialWeight(config.diagnostics.virial_radius or tightness_radius(initial, LOCALIZED_COVERAGE))
    verdict.metrics["virial_localized_radius"] = localized.radius
    verdict.metrics["virial_fd_mismatch_pure"] = _finite(_virial_fd_mismatch(result, PURE_WEIGHT, config.sign))
    verdict.metrics["virial_fd_mismatch_localized"] = _finite(_virial_fd_mismatch(result, localized, config.sign))
    verdict.metrics["small_data_indicator"] = _finite(small_data_indicator(initial, config.time.t_final, samples=32))
    if len(result.records) >= 2:
        verdict.metrics["virial_budget"] = virial_budget(result.records, config.virial_weight()).to_dict()
    summary.add_run(verdict)
    summary.metrics["initial"] = report(initial, config.sign).to_dict()

    resolved = result.status not in (Status.UNDERRESOLVED,)
    summary.assertions["finite"] = resolved
    if config.sign == 1 and verdict.metrics["subthreshold_initial"] and resolved:
        summary.assertions["kinetic_below_threshold"] = verdict.metrics["kinetic_below_threshold"]
        summary.assertions["coercive_along_flow"] = verdict.metrics["coercive_along_flow"]
    return _finish(summary, start)


# ---------------------------------------------------------------------------
# Constants suite
# ---------------------------------------------------------------------------

def _constant_rows(grid: RadialGrid, tolerance: float, tail_correction: bool) -> List[ConstantRow]:
    measured = ground_state_constants(grid, tail_correction=tail_correction)
    errors = measured.relative_errors()
    exact = {"kinetic": Q_KINETIC, "potential": Q_POTENTIAL, "energy": Q_ENERGY, "c1": SHARP_CONSTANT}
    rows = [
        ConstantRow(
            name=name,
            measured=getattr(measured, name),
            exact=value,
            relative_error=errors[name],
            within_tolerance=errors[name] <= tolerance,
        )
        for name, value in exact.items()
    ]
    balance = abs(measured.kinetic - measured.potential) / measured.kinetic
    rows.append(ConstantRow(name="balance", measured=measured.kinetic - measured.potential, exact=0.0,
                            relative_error=balance, within_tolerance=balance <= tolerance))
    return rows


def run_constants_suite(config: RunConfig, output_dir: Optional[Path] = None) -> ExperimentSummary:
    """
    Measured vs exact ground-state constants, elliptic residual convergence,
    Hardy ratios and the sharp constant by optimization
    Constantes medidas frente a exactas
    """
    start = time.time()
    summary = _new_summary(config)
    settings = config.constants

    grid = config.build_grid()
    if not isinstance(grid, RadialGrid):
        raise ConfigError("the constants suite needs a radial grid")

    rows = _constant_rows(grid, settings.tolerance, settings.tail_correction)
    refined_rows = _constant_rows(grid.refined(2), settings.tolerance, settings.tail_correction)
    summary.constants = rows

    base_error = max(row.relative_error for row in rows[:4])
    refined_error = max(row.relative_error for row in refined_rows[:4])
    summary.metrics["max_relative_error"] = base_error
    summary.metrics["refined_max_relative_error"] = refined_error
    summary.assertions["constants_within_tolerance"] = all(row.within_tolerance for row in rows)
    summary.assertions["errors_shrink_under_refinement"] = refined_error <= base_error

    grids = [grid]
    for _ in range(settings.refinements - 1):
        grids.append(grids[-1].refined(2))
    residuals = [elliptic_residual(g) for g in grids]
    orders = [math.log2(a / b) for a, b in zip(residuals, residuals[1:]) if a > 0 and b > 0]
    summary.metrics["elliptic_residuals"] = residuals
    summary.metrics["elliptic_orders"] = orders
    summary.assertions["elliptic_order_two"] = bool(orders) and min(orders) >= ELLIPTIC_MIN_ORDER

    q = evaluate_q(grid)
    summary.metrics["hardy_ratio_q"] = hardy_ratio(q)
    summary.metrics["hardy_ratio_gaussian"] = hardy_ratio(gaussian(grid))
    summary.assertions["hardy_below_four"] = (summary.metrics["hardy_ratio_q"] <= 4.0
                                              and summary.metrics["hardy_ratio_gaussian"] <= 4.0)

    if settings.optimizer:
        opt_grid = RadialGrid.mapped(settings.optimizer_panels, map_scale=2.0)
        result = sharp_constant_via_optimization(
            opt_grid,
            max_iterations=settings.optimizer_iterations,
            tolerance=settings.optimizer_tolerance,
        )
        error = abs(result.quotient - SHARP_CONSTANT) / SHARP_CONSTANT
        summary.constants.append(ConstantRow(name="c1_optimized", measured=result.quotient, exact=SHARP_CONSTANT,
                                             relative_error=error, within_tolerance=error <= 0.01))
        summary.metrics["optimizer_iterations"] = result.iterations
        summary.metrics["optimizer_converged"] = result.converged
        summary.assertions["optimizer_recovers_c1"] = error <= 0.01

    if output_dir is not None:
        table = pd.DataFrame([row.model_dump() for row in summary.constants])
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        table.to_csv(Path(output_dir) / "constants.csv", index=False, float_format="%.17g")

    for row in summary.constants:
        logger.info(f"{row.name}: measured {row.measured:.8g} exact {row.exact} rel.err {row.relative_error:.2e}")
    return _finish(summary, start)


# ---------------------------------------------------------------------------
# Dichotomy
# ---------------------------------------------------------------------------

def _is_blowup_evidence(result: SimulationResult) -> bool:
    if result.status == Status.BLOWUP_SUSPECTED:
        return True
    initial = result.records[0].kinetic if result.records else 0.0
    return (result.status == Status.UNDERRESOLVED and initial > 0
            and result.max_kinetic >= UNDERRESOLVED_GROWTH ** 2 * initial)


class DichotomyClassifier:
    """
    Classifies one amplitude as scatter / blowup / inconclusive. A blowup
    verdict needs blowup evidence at the configured resolution and again at
    confirm_scale times the resolution.
    """

    def __init__(self, config: RunConfig, output_dir: Optional[Path] = None):
        self.config = config
        self.fine_config = config.scaled(config.sweep.confirm_scale)
        self.output_dir = output_dir
        self.verdicts: Dict[str, RunVerdict] = {}

    def _run(self, config: RunConfig, amplitude: float, run_id: str) -> SimulationResult:
        grid = config.build_grid()
        data = config.initial_data.with_amplitude(amplitude)
        initial = build_initial_data(data, grid, config.experiment.seed)
        result, verdict = run_trajectory(config, initial, run_id, self.output_dir,
                                         parameters={"amplitude": amplitude})
        self.verdicts[run_id] = verdict
        return result

    def __call__(self, amplitude: float) -> str:
        run_id = f"amp_{amplitude:.6g}"
        result = self._run(self.config, amplitude, run_id)
        if result.status == Status.DISPERSED:
            verdict = SCATTER
        elif _is_blowup_evidence(result):
            fine = self._run(self.fine_config, amplitude, f"{run_id}_confirm")
            verdict = BLOWUP if _is_blowup_evidence(fine) else INCONCLUSIVE
        else:
            verdict = INCONCLUSIVE
        self.verdicts[run_id].metrics["verdict"] = verdict
        logger.info(f"Amplitude {amplitude:.6g}: {verdict} ({result.status.value})")
        return verdict


def bisect_threshold(classify: Callable[[float], str], low: float, high: float, tolerance: float,
                     max_iterations: int = 12, widen_factor: float = 2.0, max_widen: int = 4,
                     workers: int = 1) -> Bracket:
    """
    Bisect an amplitude between a scatter verdict (low) and a blowup verdict
    (high). Endpoints with the wrong verdict widen the bracket (low divided,
    high multiplied by widen_factor) up to max_widen times. An inconclusive
    midpoint stops the bisection.
    """
    low_verdict, high_verdict = _map_runs(classify, [low, high], workers)
    widened = 0
    while (low_verdict != SCATTER or high_verdict != BLOWUP) and widened < max_widen:
        widened += 1
        if low_verdict != SCATTER:
            low /= widen_factor
            low_verdict = classify(low)
        if high_verdict != BLOWUP:
            high *= widen_factor
            high_verdict = classify(high)
        logger.info(f"Widened bracket to [{low:.6g}, {high:.6g}] ({low_verdict}, {high_verdict})")

    bracket = Bracket(low=low, high=high, low_verdict=low_verdict, high_verdict=high_verdict, widened=widened)
    if low_verdict != SCATTER or high_verdict != BLOWUP:
        logger.warning(f"No scatter/blowup bracket after widening {widened} times")
        return bracket

    while bracket.high - bracket.low > tolerance and bracket.iterations < max_iterations:
        middle = 0.5 * (bracket.low + bracket.high)
        verdict = classify(middle)
        bracket.iterations += 1
        if verdict == SCATTER:
            bracket.low = middle
        elif verdict == BLOWUP:
            bracket.high = middle
        else:
            logger.warning(f"Inconclusive verdict at {middle:.6g}; stopping bisection")
            return bracket
        logger.info(f"Bisection step {bracket.iterations}: [{bracket.low:.6g}, {bracket.high:.6g}]")

    bracket.converged = bracket.high - bracket.low <= tolerance
    return bracket


def run_dichotomy_bisection(config: RunConfig, output_dir: Optional[Path] = None,
                            classifier: Optional[Callable[[float], str]] = None) -> ExperimentSummary:
    """
    Bracket the scatter/blowup transition in the data amplitude
    Acotar la transicion dispersion/explosion en la amplitud del dato
    """
    start = time.time()
    summary = _new_summary(config)
    if config.sign != 1:
        raise ConfigError("the dichotomy experiment needs the focusing sign (sign: 1)")
    sweep = config.sweep

    classify = classifier or DichotomyClassifier(config, output_dir)
    bracket = bisect_threshold(classify, sweep.low, sweep.high, sweep.tolerance, sweep.max_iterations,
                               sweep.widen_factor, sweep.max_widen, config.experiment.workers)
    summary.bracket = bracket

    verdicts = getattr(classify, "verdicts", {})
    for verdict in verdicts.values():
        summary.add_run(verdict)

    scatter_runs = [v for v in verdicts.values() if v.metrics.get("verdict") == SCATTER]
    summary.metrics["scatter_runs_subthreshold"] = all(
        v.metrics["subthreshold_initial"] and v.metrics["kinetic_below_threshold"] for v in scatter_runs)
    summary.metrics["bracket_width"] = bracket.width

    summary.assertions["bracket_consistent"] = bracket.consistent
    low_run = verdicts.get(f"amp_{bracket.low:.6g}")
    if low_run is not None and bracket.consistent:
        saturation = low_run.metrics.get("l10_saturation")
        summary.assertions["low_endpoint_saturates"] = (
            saturation is not None and saturation < config.detector.saturation)
    return _finish(summary, start)


# ---------------------------------------------------------------------------
# Far-center sweep
# ---------------------------------------------------------------------------

def run_far_center_sweep(config: RunConfig, output_dir: Optional[Path] = None) -> ExperimentSummary:
    """
    Deviation from free evolution for Gaussians centered farther and farther
    from the origin
    Desviacion respecto de la evolucion libre segun la distancia al origen
    """
    start = time.time()
    summary = _new_summary(config)
    grid = config.build_grid()
    if not isinstance(grid, Grid3D):
        raise ConfigError("the far-center sweep needs a box grid (geometry: box)")
    data = config.initial_data
    if data.family != "gaussian":
        raise ConfigError("the far-center sweep needs gaussian initial data")

    def deviation_for(center: float) -> RunVerdict:
        run_id = f"center_{center:g}"
        verdict = RunVerdict(
            run_id=run_id,
            status="completed",
            parameters={"center": center, "amplitude": data.amplitude, "width": data.width},
            resolution={**grid.describe(), "t_final": config.time.t_final},
            tolerances={"boundary_fraction": config.detector.boundary_fraction,
                        "boundary_mass": config.detector.boundary_mass},
        )
        try:
            verdict.metrics["deviation"] = far_center_deviation(
                center, data.width, data.amplitude, config.time.t_final, grid,
                sign=config.sign, dt=config.time.dt, cfl=config.time.cfl,
                boundary_fraction=config.detector.boundary_fraction,
                boundary_mass=config.detector.boundary_mass,
            )
        except MassLeftGridError as e:
            verdict.status, verdict.error = "mass_left_grid", str(e)
        except SimulationError as e:
            verdict.status, verdict.error = Status.UNDERRESOLVED.value, str(e)
        return verdict

    for verdict in _map_runs(deviation_for, config.sweep.centers, config.experiment.workers):
        summary.add_run(verdict)

    completed = [v for v in summary.runs.values() if v.status == "completed"]
    deviations = [v.metrics["deviation"] for v in completed]
    summary.metrics["centers"] = [v.parameters["center"] for v in completed]
    summary.metrics["deviations"] = deviations
    if deviations and deviations[0] > 0:
        summary.metrics["far_to_center_ratio"] = deviations[-1] / deviations[0]
        summary.assertions["monotone_decreasing"] = all(b < a for a, b in zip(deviations, deviations[1:]))
    else:
        summary.assertions["monotone_decreasing"] = all(d == 0.0 for d in deviations)
    summary.assertions["all_centers_completed"] = len(completed) == len(config.sweep.centers)

    if output_dir is not None:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        pd.DataFrame({"center": summary.metrics["centers"], "deviation": deviations}).to_csv(
            Path(output_dir) / "far_center.csv", index=False, float_format="%.17g")
    return _finish(summary, start)


# ---------------------------------------------------------------------------
# Defocusing suite
# ---------------------------------------------------------------------------

def time_reversal_mismatch(initial: ComplexField, params: StepParams, steps: int = MIRROR_STEPS) -> float:
    """
    Relative L2 distance between the backward run of u0 and the conjugate of
    the forward run of conj(u0), after the same number of steps
    """
    backward = SimulationState.start(initial, direction=-1)
    mirrored = SimulationState.start(initial.conjugate(), direction=1)
    back_params = StepParams(dt=params.dt, sign=params.sign, dealias=params.dealias, direction=-1)
    forward_params = StepParams(dt=params.dt, sign=params.sign, dealias=params.dealias, direction=1)
    for _ in range(steps):
        backward = strang_step(backward, back_params)
        mirrored = strang_step(mirrored, forward_params)
    difference = backward.field.values - np.conj(mirrored.field.values)
    scale = np.linalg.norm(backward.field.values)
    return float(np.linalg.norm(difference) / scale) if scale > 0 else float(np.linalg.norm(difference))


def run_defocusing_suite(config: RunConfig, output_dir: Optional[Path] = None) -> ExperimentSummary:
    """
    Forward and backward defocusing runs for each configured amplitude
    Corridas desenfocantes hacia adelante y hacia atras
    """
    start = time.time()
    summary = _new_summary(config)
    if config.sign != -1:
        raise ConfigError("the defocusing suite needs sign: -1")
    grid = config.build_grid()
    directions = (1, -1) if config.sweep.backward else (1,)

    jobs = [(amplitude, direction) for amplitude in config.sweep.amplitudes for direction in directions]

    def run_job(job: Tuple[float, int]) -> RunVerdict:
        amplitude, direction = job
        run_id = f"amp_{amplitude:g}_{'fwd' if direction == 1 else 'bwd'}"
        data = config.initial_data.with_amplitude(amplitude)
        initial = build_initial_data(data, grid, config.experiment.seed)
        _, verdict = run_trajectory(config, initial, run_id, output_dir, direction=direction,
                                    parameters={"amplitude": amplitude, "direction": direction})
        return verdict

    for verdict in _map_runs(run_job, jobs, config.experiment.workers):
        summary.add_run(verdict)

    resolved = [v for v in summary.runs.values() if v.status != Status.UNDERRESOLVED.value]
    excluded = [v.run_id for v in summary.runs.values() if v.status == Status.UNDERRESOLVED.value]
    summary.metrics["excluded_underresolved"] = excluded
    summary.assertions["all_dispersed"] = bool(resolved) and all(
        v.status == Status.DISPERSED.value for v in resolved)
    summary.assertions["l10_saturates"] = bool(resolved) and all(
        v.metrics["l10_saturation"] is not None and v.metrics["l10_saturation"] < config.detector.saturation
        for v in resolved)
    summary.metrics["max_energy_drift"] = max((v.metrics["energy_drift"] or 0.0) for v in resolved) if resolved else None

    if config.sweep.backward and config.sweep.amplitudes:
        data = config.initial_data.with_amplitude(config.sweep.amplitudes[0])
        initial = build_initial_data(data, grid, config.experiment.seed)
        mismatch = time_reversal_mismatch(initial, config.step_params(grid))
        summary.metrics["time_reversal_mismatch"] = mismatch
        summary.assertions["time_reversal_symmetry"] = mismatch < config.sweep.mirror_tolerance
    return _finish(summary, start)


EXPERIMENTS: Dict[str, Callable[..., ExperimentSummary]] = {
    "constants": run_constants_suite,
    "dichotomy": run_dichotomy_bisection,
    "farcenter": run_far_center_sweep,
    "defocusing": run_defocusing_suite,
    "single_run": run_single,
}
