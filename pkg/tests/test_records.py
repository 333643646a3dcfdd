"""
Tests for records files and experiment summaries
Tests para los registros y resumenes de experimentos
"""

import json
import pytest
import sys
from datetime import datetime, timedelta
from pathlib import Path

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from modules.diagnostics import RECORD_COLUMNS, DiagnosticsRecord
from modules.records import (
    RECORDS_HEADER,
    Bracket,
    ConstantRow,
    ExperimentSummary,
    RecordsFormatError,
    RunVerdict,
    load_summary,
    read_records,
    write_records,
    write_summary,
)

SCHEMA_PATH = PROJECT_ROOT / "schemas" / "records_v1.json"


@pytest.fixture
def records():
    return [
        DiagnosticsRecord(t=0.1 * i, mass=1.0, energy=0.5, kinetic=2.0, potential=1.0 / 3.0,
                          virial=0.1 * i, rate=1.0, l10=0.01 * i, grad_strichartz=0.02 * i,
                          tail_fraction=1e-9, deviation=0.0)
        for i in range(4)
    ]


class TestRecordsFile:

    def test_header_and_columns(self, records, tmp_path):
        path = write_records(tmp_path / "run.csv", records)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == RECORDS_HEADER
        assert lines[1].split(",") == RECORD_COLUMNS
        assert len(lines) == 2 + len(records)

    def test_values_keep_full_precision(self, records, tmp_path):
        path = write_records(tmp_path / "run.csv", records)
        frame = read_records(path)
        assert frame["potential"].iloc[0] == 1.0 / 3.0
        assert list(frame["M_a"]) == [r.virial for r in records]

    def test_wrong_header(self, records, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("t,mass\n0,1\n", encoding="utf-8")
        with pytest.raises(RecordsFormatError):
            read_records(path)

    def test_schema_matches_columns(self):
        schema = json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))
        assert schema["order"] == RECORD_COLUMNS
        assert schema["header"] == RECORDS_HEADER
        assert set(schema["columns"]) == set(RECORD_COLUMNS)
        assert "L^5_t L^{30/11}_x" in schema["columns"]["grad_strichartz"]["label"]


class TestSummary:

    def test_bracket(self):
        bracket = Bracket(low=0.5, high=0.75, low_verdict="scatter", high_verdict="blowup")
        assert bracket.width == pytest.approx(0.25)
        assert bracket.consistent
        assert not Bracket(low=0.5, high=0.75, low_verdict="scatter", high_verdict="scatter").consistent

    @pytest.mark.parametrize("low_verdict,high_verdict", [
        ("scatter", "inconclusive"),
        ("inconclusive", "blowup"),
        ("blowup", "scatter"),
    ])
    def test_bracket_needs_scatter_below_blowup(self, low_verdict, high_verdict):
        bracket = Bracket(low=0.5, high=0.75, low_verdict=low_verdict, high_verdict=high_verdict)
        assert not bracket.consistent

    def test_passed(self):
        summary = ExperimentSummary(kind="constants", assertions={"a": True})
        assert summary.passed
        summary.assertions["b"] = False
        assert not summary.passed

    def test_started_at_is_utc(self):
        started = datetime.fromisoformat(ExperimentSummary(kind="constants").started_at)
        assert started.utcoffset() == timedelta(0)

    def test_failed_checks_fail_the_summary(self):
        summary = ExperimentSummary(kind="constants", assertions={"a": True}, checks={"passed": False})
        assert not summary.passed

    def test_flat_metrics(self):
        summary = ExperimentSummary(kind="constants")
        summary.constants.append(ConstantRow(name="kinetic", measured=8.37, exact=8.377, relative_error=1e-3))
        summary.add_run(RunVerdict(run_id="single", status="dispersed", metrics={"mass_drift": 1e-12}))
        flat = summary.flat_metrics()
        assert flat["constants"]["kinetic"]["measured"] == 8.37
        assert flat["runs"]["single"]["metrics"]["mass_drift"] == 1e-12
        assert "config" not in flat

    def test_round_trip(self, tmp_path):
        summary = ExperimentSummary(kind="dichotomy", seed=4, metrics={"bracket_width": 0.01})
        summary.bracket = Bracket(low=1.0, high=1.01, low_verdict="scatter", high_verdict="blowup", converged=True)
        path = write_summary(tmp_path / "out" / "summary.json", summary)
        loaded = load_summary(path)
        assert loaded.bracket.converged
        assert loaded.seed == 4
        assert loaded.metrics == summary.metrics


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
