import csv
import json

import numpy as np

from report import REPORT_SCHEMA, IdentityRecord, IdentityReport, ReportWriter


def test_record_to_dict():
    record = IdentityRecord("disk", 1, "trace_formula", 2e-12, 1e-8, point=0.25 - 0.5j, point_index=3)
    data = record.to_dict()
    assert data["pass"] is True
    assert data["point"] == [0.25, -0.5]
    assert "witness" not in data


def test_failing_record_keeps_witness():
    record = IdentityRecord("disk", None, "desnanot_jacobi", 1e-3, 1e-9, witness={"size": 4})
    data = record.to_dict()
    assert data["pass"] is False
    assert data["k"] is None
    assert data["witness"] == {"size": 4}


def test_nan_residual_fails():
    record = IdentityRecord("disk", 2, "rank_bound", float("nan"), 1e-8)
    assert not record.passed
    assert record.to_dict()["max_residual"] == "nan"


def test_report_passes_only_when_everything_does():
    good = IdentityRecord("disk", 1, "trace_formula", 0.0, 1e-8)
    bad = IdentityRecord("disk", 1, "rank_bound", 1.0, 1e-8)
    assert IdentityReport("abc", [good]).passed
    assert not IdentityReport("abc", [good, bad]).passed
    assert IdentityReport("abc", [good, bad]).failures() == [bad]
    assert not IdentityReport("abc", [good], equivalence=[{"test": "descent", "consistent": False}]).passed


def test_identities_are_sorted():
    records = [
        IdentityRecord("plane", 1, "trace_formula", 0.0, 1e-8),
        IdentityRecord("disk", 2, "rank_bound", 0.0, 1e-8),
        IdentityRecord("disk", None, "gauge_covariance", 0.0, 1e-8),
        IdentityRecord("disk", 1, "rank_bound", 0.0, 1e-8),
    ]
    data = IdentityReport("abc", records).to_dict()
    order = [(r["model"], r["k"]) for r in data["identities"]]
    assert order == [("disk", None), ("disk", 1), ("disk", 2), ("plane", 1)]
    assert data["schema"] == REPORT_SCHEMA


def test_write_report(tmp_path):
    report = IdentityReport("abc", [IdentityRecord("disk", 1, "trace_formula", float("nan"), 1e-8)])
    path = ReportWriter(tmp_path / "nested").write_report(report)
    text = path.read_text(encoding="utf-8")
    assert text.endswith("}\n")
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data["passed"] is False
    assert data["identities"][0]["max_residual"] == "nan"


def test_write_curvature_table(tmp_path):
    rows = [(0j, np.array([[1.0 + 0j]])), (0.1 + 0.2j, np.array([[1 / 3 - 0.5j]]))]
    path = ReportWriter(tmp_path).write_curvature_table("disk", 1, rows)
    assert path.name == "disk_k1.csv"
    with open(path, newline="", encoding="utf-8") as f:
        lines = list(csv.reader(f))
    assert lines[0] == ["re_z", "im_z", "re_theta_0_0", "im_theta_0_0"]
    assert lines[2] == ["0.10000000000000001", "0.20000000000000001", "0.33333333333333331", "-0.5"]
    assert [float(x) for x in lines[2]] == [0.1, 0.2, 1 / 3, -0.5]


def test_rank_two_table_header(tmp_path):
    path = ReportWriter(tmp_path).write_curvature_table("pair", 2, [(0j, np.eye(2))])
    header = path.read_text(encoding="utf-8").splitlines()[0].split(",")
    assert len(header) == 2 + 2 * 4
    assert header[-1] == "im_theta_1_1"
