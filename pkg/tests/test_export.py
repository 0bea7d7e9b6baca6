"""
Tests for the export view.
"""

import json

import pytest

from starnet.exceptions import ExportError
from starnet.models.reports import EvaluationReport, SosReport, SweepPoint, SweepResult
from starnet.services.network import ratio_curve
from starnet.views.export import (
    BOUNDS_HEADER,
    SWEEP_HEADER,
    bounds_csv,
    evaluation_csv,
    export,
    format_value,
    load_report,
    read_csv,
    report_to_csv,
    sweep_csv,
)


def sample_evaluation() -> EvaluationReport:
    return EvaluationReport.from_values(
        n=2, m=2, copies=1, signed_values=[2.0, -2.0], classical_bound=2.0, quantum_optimum=2 * 2 ** 0.5
    )


def sample_sweep() -> SweepResult:
    return SweepResult(
        n=2,
        m=2,
        copies=1,
        alpha=2.0,
        grid=[SweepPoint(v=0.5, delta=1.5, violated=False), SweepPoint(v=1.0, delta=2.5, violated=True)],
        critical_v=0.75,
    )


class TestFormatting:
    """Test cell and table formatting."""

    @pytest.mark.parametrize("value, expected", [
        (True, "true"),
        (False, "false"),
        (12, "12"),
        (0.1 + 0.2, "0.3"),
        (2 * 2 ** 0.5, "2.82842712"),
        (1e-12, "1e-12"),
        ("none", "none"),
    ])
    def test_format_value(self, value, expected):
        """Booleans are lower case and floats carry 9 significant digits."""
        assert format_value(value) == expected

    def test_evaluation_csv(self):
        """One row per term with the fixed header."""
        lines = evaluation_csv(sample_evaluation()).splitlines()
        assert lines[0] == "n,m,copies,i,absJ,delta,alpha,qopt,ratio,violated"
        assert lines[1] == "2,2,1,1,2,2.82842712,2,2.82842712,1.41421356,true"
        assert lines[2].split(",")[3:5] == ["2", "2"]

    def test_sweep_csv(self):
        """Sweep rows repeat alpha on every line."""
        assert sweep_csv(sample_sweep()) == "v,delta,alpha,violated\n0.5,1.5,2,false\n1,2.5,2,true\n"

    def test_bounds_csv(self):
        """Bounds rows follow the m,alpha_m,qopt,ratio header."""
        lines = bounds_csv(ratio_curve([2, 3])).splitlines()
        assert lines[0].split(",") == BOUNDS_HEADER
        assert lines[2] == "3,6,6.92820323,1.15470054"

    def test_report_without_csv_form(self):
        """Certificates have no tabular rendering."""
        report = SosReport(n=2, m=2, omegas=[[1.0]], gamma=0.0, delta_q=1.0, slack_ok=True, tight=True)
        with pytest.raises(ExportError):
            report_to_csv(report)


class TestExport:
    """Test writing reports and manifests."""

    def test_json_round_trip_and_csv(self, tmp_path):
        """A JSON evaluation report loads back and re-renders as the same CSV."""
        report = sample_evaluation()
        data_path, manifest_path = export(report, tmp_path / "eval.json", "json", "quantum", {"n": 2, "m": 2})
        loaded = load_report(data_path)
        assert loaded == report
        assert report_to_csv(loaded) == evaluation_csv(report)
        assert manifest_path.name == "eval.json.manifest.json"

    def test_sweep_csv_file(self, tmp_path):
        """CSV files read back with the sweep header as keys."""
        data_path, _ = export(sample_sweep(), tmp_path / "sweep.csv", "csv", "sweep", {})
        rows = read_csv(data_path)
        assert list(rows[0].keys()) == SWEEP_HEADER
        assert [row["violated"] for row in rows] == ["false", "true"]

    def test_bounds_json(self, tmp_path):
        """Bounds rows export as a list of keyed records."""
        data_path, _ = export(ratio_curve([2]), tmp_path / "bounds.json", "json", "bounds", {})
        records = json.loads(data_path.read_text(encoding="utf-8"))
        assert records[0]["m"] == 2
        assert records[0]["alpha_m"] == 2

    def test_manifest_fields(self, tmp_path):
        """The manifest records command, parameters, seed, argv and outputs."""
        _, manifest_path = export(sample_sweep(), tmp_path / "s.json", "json", "sweep", {"steps": 2},
                                  seed=9, argv=["starnet", "sweep"])
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        assert manifest["command"] == "sweep"
        assert manifest["parameters"] == {"steps": 2}
        assert manifest["seed"] == 9
        assert manifest["argv"] == ["starnet", "sweep"]
        assert manifest["outputs"] == [str(tmp_path / "s.json")]
        assert manifest["version"]
        assert manifest["timestamp"]

    def test_data_is_byte_stable(self, tmp_path):
        """Exporting the same report twice gives identical data files."""
        first, _ = export(sample_evaluation(), tmp_path / "a.csv", "csv", "quantum", {})
        second, _ = export(sample_evaluation(), tmp_path / "b.csv", "csv", "quantum", {})
        assert first.read_bytes() == second.read_bytes()

    def test_unknown_format(self, tmp_path):
        """Only csv and json are written."""
        with pytest.raises(ExportError):
            export(sample_sweep(), tmp_path / "s.xml", "xml", "sweep", {})

    def test_unwritable_path(self, tmp_path):
        """A file in place of the parent directory raises ExportError."""
        blocker = tmp_path / "blocker"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(ExportError):
            export(sample_sweep(), blocker / "s.json", "json", "sweep", {})


class TestLoadReport:
    """Test reading reports back."""

    def test_unrecognized_report(self, tmp_path):
        """JSON without known fields is rejected."""
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"foo": 1}), encoding="utf-8")
        with pytest.raises(ExportError, match="unrecognized"):
            load_report(path)

    def test_invalid_json(self, tmp_path):
        """Malformed JSON is an export error."""
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ExportError):
            load_report(path)

    def test_sweep_report(self, tmp_path):
        """Sweep reports are recognized by their grid."""
        data_path, _ = export(sample_sweep(), tmp_path / "s.json", "json", "sweep", {})
        assert load_report(data_path) == sample_sweep()
