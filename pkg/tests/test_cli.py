from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from wallcross.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_compute_preset_reports_all_relations(capsys):
    code, out = run(capsys, "compute", "--preset", "dp4")
    assert code == 0
    report = json.loads(out)
    assert report["ok"] is True
    assert all(report["checks"].values())
    assert len(report["thetas"]) == 4
    assert len(report["relations"]["classical"]) == 2
    assert len(report["relations"]["quantum"]) == 8
    assert len(report["products"]) == 6
    rendered = [r["rendered"] for r in report["relations"]["classical"]]
    assert rendered[0] == (
        "th1th3 = t^{H-E1} + t^{2H-E1-E2-E3-E5} + t^{2H-E1-E2-E4-E5} + t^{H-E1-E2} th2 + t^{H-E1-E5} th4"
    )
    assert all(a["consistent"] for a in report["structure"]["audit"])
    assert set(report["elimination"]) == {"classical", "quantum"}


def test_compute_writes_files(tmp_path, capsys):
    code, out = run(capsys, "compute", "--out-dir", str(tmp_path))
    assert code == 0 and out == ""
    assert sorted(p.name for p in tmp_path.iterdir()) == ["equations.txt", "report.json", "structure.svg"]
    text = (tmp_path / "equations.txt").read_text(encoding="utf-8")
    assert "th1 = t^{E1-E5} x^{-1}y^{-2} + x^{-1}y^{-1} + t^{H-E4-E5} y^{-1}" in text
    assert "q^{1/2} Th3Th4 - q^{-1/2} Th4Th3 = (q^{1/2} - q^{-1/2}) t^{H-E2}" in text


def test_compute_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "compute", "--out-dir", str(a))
    run(capsys, "compute", "--out-dir", str(b))
    for name in ("report.json", "equations.txt", "structure.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_model_file_gives_the_same_report_as_the_preset(capsys):
    _, from_preset = run(capsys, "compute", "--preset", "dp4")
    _, from_file = run(capsys, "compute", "--model", str(ROOT / "models" / "dp4.json"))
    assert from_preset == from_file


def test_empty_model(capsys):
    code, out = run(capsys, "compute", "--model", str(ROOT / "models" / "empty.json"))
    assert code == 0
    report = json.loads(out)
    assert report["structure"]["walls"] == []
    assert all(len(th["expr"]) == 1 for th in report["thetas"])
    for rel in report["relations"]["quantum"]:
        if rel["kind"] == "qcommutator":
            # commutators of quantum monomials are multiples of a single quantum monomial
            assert len({(tuple(t["z"]), tuple(sorted(t["t"].items()))) for t in rel["constant"]}) <= 1


def test_endpoint_at_origin_is_an_error(capsys):
    code, out = run(capsys, "compute", "--preset", "dp4", "--endpoint", "0,0")
    assert code == 1
    err = json.loads(out)["error"]
    assert err["type"] == "GeometryError"
    assert "fan ray" in err["message"]
    assert err["point"] == [{"num": 0, "den": 1}, {"num": 0, "den": 1}]


def test_rational_endpoint(capsys):
    code, out = run(capsys, "compute", "--endpoint=-302/101,1/3", "--format", "text")
    assert code == 0
    assert "endpoint P = (-302/101, 1/3)" in out


def test_text_format(capsys):
    code, out = run(capsys, "compute", "--format", "text", "--mode", "classical")
    assert code == 0
    assert "classical relations:" in out and "quantum relations:" not in out


def test_check(capsys, tmp_path):
    code, out = run(capsys, "check", "--format", "text")
    assert code == 0
    assert out.startswith("16 walls, 8 intersection points")
    code, _ = run(capsys, "check", "--out-dir", str(tmp_path))
    data = json.loads((tmp_path / "audit.json").read_text(encoding="utf-8"))
    assert data["ok"] is True and len(data["audit"]) == 8


def test_check_with_low_bound_fails_loudly(capsys):
    code, out = run(capsys, "check", "--bound", "1")
    assert code == 1
    assert json.loads(out)["error"]["type"] == "ScatteringError"


def test_render(capsys):
    code, out = run(capsys, "render", "--stage", "initial")
    assert code == 0 and out.startswith("<?xml")
    code, out2 = run(capsys, "render")
    assert code == 0 and 'id="theta-paths"' in out2 and 'id="theta-paths"' not in out


def test_quantize(capsys):
    code, out = run(capsys, "quantize")
    assert code == 0
    data = json.loads(out)
    assert len(data["qthetas"]) == 4 and len(data["relations"]) == 8
    assert data["relations"][0]["rendered"].startswith("Th1Th3 = ")


def test_invalid_bound(capsys):
    code, out = run(capsys, "compute", "--bound", "0")
    assert code == 1
    assert "bound" in json.loads(out)["error"]["message"]


def test_preset_and_model_are_exclusive():
    with pytest.raises(SystemExit):
        main(["compute", "--preset", "dp4", "--model", "x.json"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "wallcross", "compute", "--endpoint", "0,0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["error"]["type"] == "GeometryError"
