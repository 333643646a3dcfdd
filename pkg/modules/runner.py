"""
Runner - Unified experiment entry point
Punto de entrada unificado para experimentos
"""

import logging
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from .check_engine import CheckEngine, CheckReport
from .condition_evaluator import ConditionEvaluationError
from .experiment_loader import load_experiment
from .experiments import EXPERIMENTS
from .grid_fields import FieldError
from .records import ExperimentSummary, write_summary
from .run_config import ConfigError, RunConfig, load_config

logger = logging.getLogger(__name__)

SUMMARY_FILENAME = "summary.json"


@dataclass
class RunResult:
    """Result of an experiment run / Resultado de un experimento"""
    success: bool
    trace_id: str
    summary: Optional[ExperimentSummary] = None
    summary_path: Optional[Path] = None
    checks: Optional[CheckReport] = None
    config_error: bool = False
    error: Optional[str] = None
    duration_ms: int = 0
    failed_assertions: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """0 all assertions pass, 1 assertion failure, 2 configuration error"""
        if self.config_error:
            return 2
        return 0 if self.success else 1


def run_experiment(
    config: RunConfig,
    checks: Optional[List[dict]] = None,
    output_dir: Optional[Path] = None,
    resolution_scale: Optional[float] = None,
    seed: Optional[int] = None,
) -> RunResult:
    """
    Run one experiment and persist its summary; never raises
    Ejecutar un experimento y guardar su resumen

    Args:
        config: Parsed RunConfig
        checks: Acceptance checks from the experiment manifest
        output_dir: Overrides the configured output directory
        resolution_scale: Multiplies node counts (dt follows h^2)
        seed: Overrides the configured seed

    Returns:
        RunResult with the summary, check report and exit code
    """
    start_time = time.time()
    trace_id = str(uuid.uuid4())

    def failed(message: str, config_error: bool) -> RunResult:
        logger.error(f"[{trace_id[:8]}] {message}")
        return RunResult(success=False, trace_id=trace_id, config_error=config_error, error=message,
                         duration_ms=int((time.time() - start_time) * 1000))

    try:
        config = config.with_overrides(
            resolution_scale=resolution_scale,
            seed=seed,
            output_dir=str(output_dir) if output_dir is not None else None,
        )
        experiment = EXPERIMENTS[config.kind]
        target = Path(config.output.directory) / (config.experiment.name or config.kind)
        logger.info(f"[{trace_id[:8]}] Running {config.kind} -> {target}")

        summary = experiment(config, target)

        report = CheckEngine(checks or []).evaluate(summary.flat_metrics())
        summary.checks = report.to_dict()
        summary_path = write_summary(target / SUMMARY_FILENAME, summary)

        failed_assertions = [name for name, ok in summary.assertions.items() if not ok]
        failed_assertions += [f"check:{hit.check_id}" for hit in report.failed]
        return RunResult(
            success=summary.passed,
            trace_id=trace_id,
            summary=summary,
            summary_path=summary_path,
            checks=report,
            duration_ms=int((time.time() - start_time) * 1000),
            failed_assertions=failed_assertions,
        )

    except (ConfigError, ValidationError, FieldError, ConditionEvaluationError) as e:
        return failed(f"Configuration error: {e}", config_error=True)

    except OSError as e:
        return failed(f"I/O error: {e}", config_error=False)

    except Exception as e:
        logger.exception(f"[{trace_id[:8]}] Experiment crashed")
        return failed(str(e), config_error=False)


def run_pack(experiment_id: str, **overrides) -> RunResult:
    """Run an experiment pack from config/yamls/<experiment_id>"""
    try:
        pack = load_experiment(experiment_id)
        config = pack.config
    except ConfigError as e:
        return RunResult(success=False, trace_id=str(uuid.uuid4()), config_error=True, error=str(e))
    return run_experiment(config, checks=pack.checks, **overrides)


def run_config_file(path: Path, kind: Optional[str] = None, checks: Optional[List[dict]] = None,
                    **overrides) -> RunResult:
    """Run a config file; `kind` must match the file's experiment kind when given"""
    try:
        config = load_config(path)
        if kind is not None and config.kind != kind:
            raise ConfigError(f"config {path} describes a '{config.kind}' experiment, not '{kind}'")
    except ConfigError as e:
        return RunResult(success=False, trace_id=str(uuid.uuid4()), config_error=True, error=str(e))
    return run_experiment(config, checks=checks, **overrides)
