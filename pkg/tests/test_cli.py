import io
import json
import subprocess
import sys

import pytest

from superlin.cli import render_text, run
from superlin.fileformat import parse_system_file

from helpers import SYSTEMS_DIR

BRUNTON = str(SYSTEMS_DIR / "brunton.json")
DEFECT = str(SYSTEMS_DIR / "brunton_defect.json")
ROTATION = str(SYSTEMS_DIR / "rotation.json")


def call(*argv):
    out = io.StringIO()
    report, code = run(list(argv), out=out)
    return report, code, out.getvalue()


def test_verify_worked_example():
    report, code, text = call("verify", BRUNTON)
    assert code == 0
    assert report["verdicts"] == {"system_form_ok": True, "necessary_ok": True, "sufficient_ok": True}
    assert "necessary_ok: true" in text and "sufficient_ok: true" in text


def test_canonicalize_worked_example():
    report, code, text = call("canonicalize", BRUNTON)
    cf = report["canonical_form"]
    assert code == 0
    assert cf["T_is_identity"] and cf["k"] == 1 and cf["q_prime"] == "1/1*x2^2"
    assert "T_is_identity: true" in text and "q_prime: 1/1*x2^2" in text


def test_defect_shows_residual():
    report, code, text = call("verify", DEFECT)
    assert code == 1
    assert report["verdicts"]["sufficient_ok"] is False
    assert any(r["residual"] == "1/1*x2^2" for r in report["residuals"])
    assert "residual: 1/1*x2^2" in text


def test_classify():
    report, code, _ = call("classify", ROTATION, "--discover")
    cls = report["classification"]
    assert code == 0 and cls["visible"] == [1] and cls["hidden"] == [2, 3] and cls["balanced"]


def test_missing_embedding_is_input_error():
    _, code, _ = call("canonicalize", ROTATION)
    assert code == 2


def test_discover_writes_file(tmp_path):
    target = tmp_path / "rot.json"
    report, code, _ = call("discover", ROTATION, "--output", str(target))
    assert code == 0 and report["observables"] == ["1/1*x2^2", "1/1*x2^1*x3^1", "1/1*x3^2"]
    sys_, emb = parse_system_file(target)
    assert emb.m == 3


def test_discover_not_found():
    report, code, _ = call("discover", str(SYSTEMS_DIR / "quadratic_blowup.json"), "--max-degree", "6")
    assert code == 1 and report["error"]["kind"] == "NotFound" and report["error"]["frontier"]


def test_simulate(tmp_path):
    csv_path = tmp_path / "t.csv"
    report, code, _ = call("simulate", BRUNTON, "--draws", "3", "--step", "1e-2", "--csv", str(csv_path))
    assert code == 0
    assert report["simulation"]["summary"]["max_diagram"] <= 1e-6
    assert csv_path.read_text().splitlines()[0] == "t,x_1,x_2,z_1,z_2,z_3"


def test_simulate_defect_fails():
    report, code, _ = call("simulate", DEFECT, "--draws", "3", "--step", "1e-2")
    assert code == 1 and not report["verdicts"]["diagram_within_tol"]


@pytest.mark.parametrize("content", ["{", '{"n": 2}', '{"n": 1, "f": [[]], "g": [[]], "m": 1, '
                                     '"embedding": {"A_ell": [], "B_ell": [], "D_ell": [], "p": []}}'])
def test_input_errors(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    report, code, _ = call("verify", str(path))
    assert code == 2 and report["status"] == "input-error"


def test_missing_file():
    _, code, _ = call("verify", "/nonexistent/system.json")
    assert code == 2


def test_json_report_is_deterministic(tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        call("simulate", BRUNTON, "--draws", "4", "--step", "1e-2", "--json", str(path))
        doc = json.loads(path.read_text())
        doc.pop("timing")
        reports.append(json.dumps(doc, indent=2))
    assert reports[0] == reports[1]


def test_text_and_json_agree(tmp_path):
    path = tmp_path / "r.json"
    report, _, text = call("canonicalize", BRUNTON, "--json", str(path))
    assert json.loads(path.read_text()) == report
    assert render_text(report) == text
    for key, value in report["verdicts"].items():
        assert f"  {key}: {'true' if value else 'false'}" in text


def test_selftest_small():
    report, code, _ = call("selftest", "--cases", "5")
    assert code == 0
    assert set(report["selftest"]) == {"ring_axioms", "lie_identities", "lemma_sweep",
                                       "roundtrip_canonicalization"}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "superlin.cli", "verify", BRUNTON],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "status: pass" in proc.stdout
