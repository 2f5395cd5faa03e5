import argparse
import json
import logging

import pytest

from catalog import CATALOG_SCHEMA
from main import EXIT_BAD_INPUT, EXIT_IDENTITY_FAILURE, EXIT_OK, main, parse_tolerance


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("JETCURV_LOG_LEVEL", "JETCURV_OUTPUT_DIR", "JETCURV_WORKERS"):
        monkeypatch.delenv(name, raising=False)


def test_run_writes_report_and_tables(tmp_path, config_path):
    out = tmp_path / "reports"
    assert main(["--output", str(out), "run", str(config_path)]) == EXIT_OK

    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["tables"]["disk"] == {"1": "disk_k1.csv", "2": "disk_k2.csv"}
    assert "product" not in report["tables"]
    assert (out / "pair_k2.csv").exists()

    identities = {(r["model"], r["identity"]) for r in report["identities"]}
    assert ("disk", "det_curvature") in identities
    assert ("pair", "det_curvature") not in identities
    assert ("product", "multivariable_routes") in identities
    assert [e["test"] for e in report["equivalence"]] == ["line", "det_bundle", "det_bundle", "descent"]
    assert all(e["equivalent"] for e in report["equivalence"] if e["test"] != "descent")


def test_run_is_reproducible(tmp_path, config_path):
    out = tmp_path / "reports"
    assert main(["--output", str(out), "run", str(config_path)]) == EXIT_OK
    first = (out / "report.json").read_bytes()
    assert main(["--output", str(out), "--workers", "3", "run", str(config_path)]) == EXIT_OK
    assert (out / "report.json").read_bytes() == first


def test_run_uses_configured_outputs(config_path):
    assert main(["run", str(config_path)]) == EXIT_OK
    assert (config_path.parent / "out" / "report.json").exists()


def test_output_dir_from_environment(tmp_path, config_path, monkeypatch):
    monkeypatch.setenv("JETCURV_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(config_path)]) == EXIT_OK
    assert (tmp_path / "env" / "report.json").exists()


def test_invalid_model_parameters(tmp_path, caplog):
    catalog = tmp_path / "catalog.json"
    catalog.write_text(
        json.dumps({"schema": CATALOG_SCHEMA, "models": {"broken": {"type": "power", "lam": -1.0}}}),
        encoding="utf-8",
    )
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"models": "catalog.json"}), encoding="utf-8")
    with caplog.at_level(logging.ERROR):
        assert main(["--output", str(tmp_path / "out"), "run", str(config)]) == EXIT_BAD_INPUT
    assert "λ must be positive" in caplog.text
    assert not (tmp_path / "out" / "report.json").exists()


def test_tight_tolerance_fails(tmp_path, config_path):
    out = tmp_path / "reports"
    code = main(["--output", str(out), "--tolerance", "oracle_agreement=0", "run", str(config_path)])
    assert code == EXIT_IDENTITY_FAILURE
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    failed = {r["identity"] for r in report["identities"] if not r["pass"]}
    assert failed == {"oracle_agreement"}


def test_missing_config(tmp_path):
    assert main(["--output", str(tmp_path), "run", str(tmp_path / "nope.json")]) == EXIT_BAD_INPUT


def test_verify_identities(tmp_path):
    out = tmp_path / "reports"
    assert main(["--output", str(out), "verify-identities", "--seed", "3", "--trials", "20"]) == EXIT_OK
    report = json.loads((out / "identities.json").read_text(encoding="utf-8"))
    names = [r["identity"] for r in report["identities"]]
    expected = {"desnanot_jacobi", "gram_quotient", "block_matrix", "cocycle", "frame_det", "frame_transform_law"}
    assert set(names) == expected
    assert all(r["model"] is None and r["k"] is None for r in report["identities"])


def test_verify_identities_needs_trials(tmp_path):
    assert main(["--output", str(tmp_path), "verify-identities", "--trials", "0"]) == EXIT_BAD_INPUT


def test_curvature_table(tmp_path, catalog_path):
    out = tmp_path / "tables"
    args = ["--output", str(out), "curvature", "disk", "--catalog", str(catalog_path), "--k", "1", "--points", "4"]
    assert main(args) == EXIT_OK
    lines = (out / "disk_k1.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 5
    assert lines[0].startswith("re_z,im_z,re_theta_0_0")


def test_curvature_unknown_model(tmp_path, catalog_path, caplog):
    args = ["--output", str(tmp_path), "curvature", "ghost", "--catalog", str(catalog_path)]
    with caplog.at_level(logging.ERROR):
        assert main(args) == EXIT_BAD_INPUT
    assert "ghost" in caplog.text


def test_bad_log_level(tmp_path, config_path):
    assert main(["--log-level", "chatty", "run", str(config_path)]) == EXIT_BAD_INPUT


def test_parse_tolerance():
    assert parse_tolerance("trace_formula=1e-6") == ("trace_formula", 1e-6)
    for text in ("trace_formula", "=1", "x=abc", "x=-1"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_tolerance(text)


def test_degenerate_model_names_model_and_point(tmp_path, caplog):
    catalog = tmp_path / "catalog.json"
    catalog.write_text(
        json.dumps({"schema": CATALOG_SCHEMA, "models": {"flat": {"type": "poly", "coeffs": [1.0]}}}),
        encoding="utf-8",
    )
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"models": "catalog.json", "grid": {"points": 4, "rings": 1}}), encoding="utf-8")
    with caplog.at_level(logging.ERROR):
        assert main(["--output", str(tmp_path / "out"), "run", str(config)]) == EXIT_BAD_INPUT
    assert "DegenerateJetMetric" in caplog.text
    assert "model=flat" in caplog.text
    assert "point=(0.5+0j)" in caplog.text


def test_run_includes_randomized_trials(tmp_path, config_path):
    out = tmp_path / "reports"
    assert main(["--output", str(out), "run", str(config_path)]) == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    trials = {r["identity"]: r["max_residual"] for r in report["identities"] if r["model"] is None}
    expected = {"desnanot_jacobi", "gram_quotient", "block_matrix", "cocycle", "frame_det", "frame_transform_law"}
    assert set(trials) == expected

    # same seed and trial count as the run configuration
    assert main(["--output", str(out), "verify-identities", "--seed", "7", "--trials", "10"]) == EXIT_OK
    verified = json.loads((out / "identities.json").read_text(encoding="utf-8"))
    assert trials == {r["identity"]: r["max_residual"] for r in verified["identities"]}


def test_run_without_trials(tmp_path, config_path):
    data = json.loads(config_path.read_text(encoding="utf-8"))
    data["trials"] = 0
    config_path.write_text(json.dumps(data), encoding="utf-8")
    out = tmp_path / "reports"
    assert main(["--output", str(out), "run", str(config_path)]) == EXIT_OK
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert all(r["model"] is not None for r in report["identities"])


def test_route_disagreement_still_writes_report(tmp_path):
    catalog = tmp_path / "catalog.json"
    catalog.write_text(json.dumps({"schema": CATALOG_SCHEMA, "models": {"fock": {"type": "exp"}}}), encoding="utf-8")
    config = tmp_path / "run.json"
    data = {
        "models": "catalog.json",
        "grid": {"shape": "polar", "radius": 6.0, "points": 4, "rings": 1},
        "jet_orders": [3],
        "trials": 0,
        "oracle_order": 0,
    }
    config.write_text(json.dumps(data), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["--output", str(out), "run", str(config)]) == EXIT_IDENTITY_FAILURE
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["passed"] is False
    routes = [r for r in report["identities"] if r["identity"] == "jet_route_consistency"]
    assert [(r["model"], r["k"], r["pass"]) for r in routes] == [("fock", 3, False)]
    assert (out / "fock_k3.csv").exists()
