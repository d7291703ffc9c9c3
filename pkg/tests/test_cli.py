import csv
import io
import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from bertrand_lab.cli import combine, main, tolerance_scale
from bertrand_lab.jobs import load_schema, run_job
from bertrand_lab.tolerances import DEFAULT

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = sorted((ROOT / "fixtures").glob("*.json"))
EXPECTED_STATUS = {
    "helix_frenet": 0,
    "helix_bertrand": 0,
    "helix_tangent_pair": 2,
    "malformed_expression": 1,
    "circle_planar_mate": 0,
    "binormal_normal_mate": 0,
    "ellipse_evolute": 0,
    "framed_example": 0,
    "framed_example_nu1_mu": 0,
    "framed_example_mu_mu": 2,
    "framed_missing_init": 1,
    "verify_quick": 0,
}


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def reports():
    """Every fixture run once through the library, keyed by stem."""
    return {p.stem: run_job(json.loads(p.read_text())) for p in FIXTURES}


def test_every_fixture_has_an_expected_status():
    assert {p.stem for p in FIXTURES} == set(EXPECTED_STATUS)


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.stem)
def test_fixture_exit_status(path, reports):
    assert reports[path.stem].status == EXPECTED_STATUS[path.stem]


def test_exit_codes_through_main():
    code, out, _ = _run(["--spec", ROOT / "fixtures/helix_bertrand.json"])
    assert code == 0 and json.loads(out)["mate"]["verdict"] == "Feasible"
    code, out, _ = _run(["--spec", ROOT / "fixtures/helix_tangent_pair.json"])
    assert code == 2 and json.loads(out)["status"] == "infeasible"
    code, out, err = _run(["--spec", ROOT / "fixtures/malformed_expression.json"])
    rep = json.loads(out)
    assert code == 1 and rep["status"] == "error"
    assert rep["error"]["path"] == "$.curve.x" and rep["error"]["offset"] == 5
    assert "malformed_expression.json" in err


def test_unreadable_and_invalid_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"mode\": ")
    code, out, _ = _run(["--spec", bad])
    assert code == 1 and json.loads(out)["error"]["type"] == "JSONDecodeError"
    code, out, _ = _run(["--spec", tmp_path / "missing.json"])
    assert code == 1


def test_schema_errors_name_the_field():
    rep = run_job({"mode": "frenet", "curve": {"x": "t", "y": "0", "z": "0", "t0": 1, "t1": 0, "n": 50}})
    assert rep.status == 1 and rep.report["error"]["path"] == "$.curve.t1"
    rep = run_job({"mode": "mate", "kind": "q-n", "curve": {"x": "t", "y": "t^2", "z": "0", "t0": 0, "t1": 1, "n": 50}})
    assert rep.report["error"]["path"] == "$.kind"
    rep = run_job({"mode": "frenet"})
    assert rep.status == 1 and rep.report["error"]["type"] == "SpecValidationError"


def test_worst_status_wins():
    assert combine([0, 2, 0]) == 2 and combine([2, 1, 0]) == 1 and combine([0, 0]) == 0


def test_batch_runs_are_byte_identical(tmp_path):
    args = ["--spec", *FIXTURES, "--format", "both"]
    a, b = tmp_path / "a", tmp_path / "b"
    code_a, _, _ = _run([*args, "--out", a])
    code_b, _, _ = _run([*args, "--out", b, "--jobs", "3"])
    assert code_a == code_b == 1
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert {Path(n).stem for n in names} == set(EXPECTED_STATUS)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_several_specs_need_out_dir():
    code, _, err = _run(["--spec", FIXTURES[0], FIXTURES[1]])
    assert code == 1 and "--out" in err


def test_tolerance_precedence(monkeypatch):
    assert tolerance_scale(None, {}) == 1.0
    assert tolerance_scale(None, {"BERTRAND_LAB_TOL": "10"}) == 10.0
    assert tolerance_scale(0.5, {"BERTRAND_LAB_TOL": "10"}) == 0.5
    for bad in ("0", "-1", "nan", "inf", "x"):
        with pytest.raises(ValueError):
            tolerance_scale(None, {"BERTRAND_LAB_TOL": bad})
    monkeypatch.setenv("BERTRAND_LAB_TOL", "-3")
    code, _, err = _run(["--spec", ROOT / "fixtures/helix_frenet.json"])
    assert code == 1 and "BERTRAND_LAB_TOL" in err
    code, _, _ = _run(["--spec", ROOT / "fixtures/helix_frenet.json", "--tol", "2"])
    assert code == 0


def test_loose_tolerance_changes_a_verdict():
    # a large factor widens the fit budget until the affine fit passes
    job = {
        "mode": "classify",
        "kind": "n-n",
        "intrinsic": {"kappa": "1 + 0.3*sin(t)", "tau": "1 + 0.5*cos(t)", "t0": 0, "t1": 6, "n": 601},
    }
    assert run_job(job).status == 2
    assert run_job(job, DEFAULT.scaled(1e7)).status == 0


def test_csv_has_round_trip_digits(tmp_path):
    src = tmp_path / "helix.json"
    shutil.copy(ROOT / "fixtures/helix_frenet.json", src)
    code, _, _ = _run(["--spec", src, "--out", tmp_path / "out", "--format", "csv"])
    assert code == 0
    text = (tmp_path / "out" / "helix.csv").read_text()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][:5] == ["t", "s", "x", "y", "z"]
    data = np.array(rows[1:], dtype=float)
    again = [[f"{v:.17g}" for v in row] for row in data]
    assert again == rows[1:]
    kappa = data[:, rows[0].index("kappa")]
    assert np.max(np.abs(kappa - 0.5)) < 1e-9


def test_json_reports_parse_and_reserialise(reports):
    for res in reports.values():
        text = res.json_text()
        assert json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n" == text
        assert "NaN" not in text and "Infinity" not in text


def test_packaged_schema_matches_docs():
    assert load_schema() == json.loads((ROOT / "docs/job.schema.json").read_text())


def _paths(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            p = f"{prefix}.{k}" if prefix else k
            yield p
            yield from _paths(v, p)
    elif isinstance(obj, list):
        for v in obj:
            yield from _paths(v, prefix + "[]")


def test_every_report_key_is_documented(reports):
    doc = (ROOT / "docs/formats.md").read_text()
    tokens = set()
    for chunk in doc.split("`")[1::2]:
        tokens.add(chunk)
    missing = set()
    for res in reports.values():
        for p in _paths(res.report):
            parts = p.split(".")
            documented = any(".".join(parts[:i]) in tokens for i in range(len(parts), 0, -1))
            if not documented:
                missing.add(p)
    assert not missing
    # leaf keys below a documented section still need a row of their own
    for res in reports.values():
        for section in ("frenet", "mate", "framed", "framed_mate", "verify"):
            for key in res.report.get(section, {}):
                assert f"{section}.{key}" in doc, f"{section}.{key}"
