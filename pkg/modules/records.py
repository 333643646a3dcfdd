"""
Records - Versioned CSV records and JSON experiment summaries
Registros CSV versionados y resumenes JSON de experimentos

CSV layout (v1): one header line `# inls-lab records v1`, then the frozen
column header and one row per sample, floats written with %.17g.
"""

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd
from pydantic import BaseModel, Field

from .diagnostics import RECORD_COLUMNS, DiagnosticsRecord

logger = logging.getLogger(__name__)

RECORDS_VERSION = "v1"
RECORDS_HEADER = f"# inls-lab records {RECORDS_VERSION}"
FLOAT_FORMAT = "%.17g"


class RecordsFormatError(ValueError):
    """Exception raised when a records file does not match the versioned layout"""
    pass


def records_frame(records: Sequence[DiagnosticsRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.to_row() for record in records], columns=RECORD_COLUMNS)


def write_records(path: Union[str, Path], records: Sequence[DiagnosticsRecord]) -> Path:
    """Write one CSV row per sample under the versioned header"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = records_frame(records)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(RECORDS_HEADER + "\n")
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} records to {path}")
    return path


def read_records(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().rstrip("\n")
    if first != RECORDS_HEADER:
        raise RecordsFormatError(f"{path} does not start with '{RECORDS_HEADER}'")
    frame = pd.read_csv(path, skiprows=1, float_precision="round_trip")
    if list(frame.columns) != RECORD_COLUMNS:
        raise RecordsFormatError(f"{path} has columns {list(frame.columns)}, expected {RECORD_COLUMNS}")
    return frame


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------

class RunVerdict(BaseModel):
    """One run of an experiment, keyed by run id"""
    run_id: str
    status: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    metrics: Dict[str, Any] = Field(default_factory=dict)
    resolution: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, Any] = Field(default_factory=dict)
    records_file: Optional[str] = None
    error: Optional[str] = None


class Bracket(BaseModel):
    """Dichotomy bracket [low, high] with the verdicts of its endpoints"""
    low: float
    high: float
    low_verdict: str
    high_verdict: str
    iterations: int = 0
    widened: int = 0
    converged: bool = False

    @property
    def width(self) -> float:
        return self.high - self.low

    @property
    def consistent(self) -> bool:
        """Scatter at the low end, blowup at the high end"""
        return self.low < self.high and self.low_verdict == "scatter" and self.high_verdict == "blowup"


class ConstantRow(BaseModel):
    name: str
    measured: float
    exact: Optional[float] = None
    relative_error: Optional[float] = None
    within_tolerance: Optional[bool] = None


class ExperimentSummary(BaseModel):
    """
    Summary of one experiment
    Resumen de un experimento
    """
    kind: str
    name: Optional[str] = None
    started_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    duration_ms: int = 0
    seed: int = 0
    config: Dict[str, Any] = Field(default_factory=dict)
    runs: Dict[str, RunVerdict] = Field(default_factory=dict)
    bracket: Optional[Bracket] = None
    constants: List[ConstantRow] = Field(default_factory=list)
    assertions: Dict[str, bool] = Field(default_factory=dict)
    metrics: Dict[str, Any] = Field(default_factory=dict)
    checks: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        checks_ok = self.checks is None or bool(self.checks.get("passed", True))
        return all(self.assertions.values()) and checks_ok

    def add_run(self, verdict: RunVerdict) -> None:
        self.runs[verdict.run_id] = verdict

    def flat_metrics(self) -> Dict[str, Any]:
        """Nested view used by manifest checks: metrics, runs, bracket, constants, assertions"""
        data = self.model_dump(mode="json", exclude={"config", "checks"})
        data["constants"] = {row["name"]: row for row in data["constants"]}
        return data


def write_summary(path: Union[str, Path], summary: ExperimentSummary) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    return path


def load_summary(path: Union[str, Path]) -> ExperimentSummary:
    return ExperimentSummary.model_validate_json(Path(path).read_text(encoding="utf-8"))
