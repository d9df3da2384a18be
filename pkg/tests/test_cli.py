import json
import math

import numpy as np
import pytest

from mengerline.cli import main
from mengerline.io import read_dataset


def _run(argv):
    return main([str(a) for a in argv])


def test_gen_segment_csv_roundtrip(tmp_path):
    out = tmp_path / "seg.csv"
    assert _run(["gen", "segment", "--n", 20, "--jitter", 1e-3,
                 "--seed", 5, "--out", out]) == 0
    text = out.read_text()
    assert text.splitlines()[0] == "x,y,weight"
    space, measure = read_dataset(out)
    assert space.size == 20
    # jitter lengthens the polyline gaps slightly, so only roughly 1
    assert measure.total == pytest.approx(1.0, rel=1e-3)


def test_gen_snowflake_matrix_json(tmp_path):
    out = tmp_path / "snow.json"
    assert _run(["gen", "snowflake", "--n", 12, "--exponent", 0.6,
                 "--out", out]) == 0
    payload = json.loads(out.read_text())
    assert "dist" in payload and "weights" in payload
    space, measure = read_dataset(out)
    assert space.size == 12


def test_gen_cantor_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert _run(["gen", "cantor4", "--generation", 2, "--out", out]) == 0
    space, measure = read_dataset(out)
    assert space.size == 16
    assert np.allclose(measure.weights, 1.0 / 16)


def test_energy_report(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 15, "--jitter", 1e-3, "--out", data])
    out = tmp_path / "energy.json"
    assert _run(["energy", data, "--k", 2, "--out", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["n"] == 15
    assert rep["c2_k"]["K"] == 2.0
    assert rep["cp"]["holds"] is True
    assert rep["beta"]["K"] is None


def test_energy_k_inf_serialization(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 10, "--out", data])
    out = tmp_path / "energy.json"
    assert _run(["energy", data, "--out", out]) == 0  # default K is inf
    rep = json.loads(out.read_text())
    assert rep["c2_k"]["K"] == "inf"
    assert rep["cp"] is None


def test_energy_subset(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 10, "--out", data])
    out = tmp_path / "e.json"
    assert _run(["energy", data, "--subset", "0,3,7", "--k", 3, "--out", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["subset"] == [0, 3, 7]


def test_build_report_structure(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 40, "--jitter", 1e-3, "--out", data])
    out = tmp_path / "build.json"
    assert _run(["build", data, "--out", out, "--epsilon", 0.1]) == 0
    rep = json.loads(out.read_text())
    for key in ("config", "n0", "n_max", "curve", "length_ok", "stopped",
                "steps", "checks", "check_failures", "warnings", "gate",
                "coverage", "density_variant"):
        assert key in rep
    assert rep["check_failures"] == 0
    assert rep["coverage"]["uncovered_fraction"] == 0.0
    assert len(rep["curve"]["vertices"]) == 40


def test_build_byte_deterministic(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 30, "--jitter", 1e-3, "--out", data])
    out1 = tmp_path / "b1.json"
    out2 = tmp_path / "b2.json"
    _run(["build", data, "--out", out1, "--epsilon", 0.05])
    _run(["build", data, "--out", out2, "--epsilon", 0.05])
    assert out1.read_bytes() == out2.read_bytes()


def test_build_ledger_reconciles(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 50, "--jitter", 1e-3, "--out", data])
    out = tmp_path / "b.json"
    ledger = tmp_path / "ledger.csv"
    assert _run(["build", data, "--out", out, "--ledger", ledger]) == 0
    rep = json.loads(out.read_text())
    lines = ledger.read_text().splitlines()
    assert lines[0] == "scale,step,kind,lambda,delta"
    deltas = [float(line.split(",")[4]) for line in lines[1:]]
    assert len(deltas) == rep["steps"]
    # the first snapshot is a single vertex with length 0, so the deltas
    # telescope to the final length exactly (they are written with repr)
    assert math.fsum(deltas) == pytest.approx(rep["curve"]["length"], rel=1e-9)


def test_build_dump_scales(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 25, "--jitter", 1e-3, "--out", data])
    dumps = tmp_path / "scales"
    assert _run(["build", data, "--out", tmp_path / "b.json",
                 "--dump-scales", dumps]) == 0
    files = sorted(dumps.glob("scale_*.json"))
    assert files
    payload = json.loads(files[0].read_text())
    assert "net" in payload and "curve" in payload


def test_build_svg(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 20, "--jitter", 1e-3, "--out", data])
    svg1 = tmp_path / "a.svg"
    svg2 = tmp_path / "b.svg"
    _run(["build", data, "--out", tmp_path / "r1.json", "--svg", svg1])
    _run(["build", data, "--out", tmp_path / "r2.json", "--svg", svg2])
    head = svg1.read_bytes()[:200]
    assert b"<?xml" in head or b"<svg" in head
    assert svg1.read_bytes() == svg2.read_bytes()


def test_build_screen_block(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 20, "--out", data])
    out = tmp_path / "b.json"
    assert _run(["build", data, "--out", out, "--screen"]) == 0
    rep = json.loads(out.read_text())
    assert rep["screen"]["ok"] is True


def test_coverage_subcommand_reads_build_report(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 30, "--jitter", 1e-3, "--out", data])
    build_out = tmp_path / "b.json"
    _run(["build", data, "--out", build_out])
    cov_out = tmp_path / "cov.json"
    assert _run(["coverage", data, build_out, "--epsilon", 0.1,
                 "--out", cov_out]) == 0
    rep = json.loads(cov_out.read_text())
    assert rep["coverage"]["uncovered_fraction"] == 0.0


def test_coverage_accepts_bare_vertex_list(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 10, "--out", data])
    curve = tmp_path / "curve.json"
    curve.write_text(json.dumps(list(range(10))))
    out = tmp_path / "cov.json"
    assert _run(["coverage", data, curve, "--epsilon", 0.2, "--out", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["coverage"]["uncovered_mass"] == 0.0


def test_missing_input_exit_2(tmp_path, capsys):
    assert _run(["energy", tmp_path / "nope.csv"]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_k_exit_2(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 10, "--out", data])
    assert _run(["energy", data, "--k", "0.5"]) == 2


def test_structural_abort_exit_3(tmp_path, capsys):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 20, "--out", data])
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("delta = 3.0\n")
    assert _run(["build", data, "--config", cfg, "--out", tmp_path / "b.json"]) == 3
    assert "structural abort" in capsys.readouterr().err


def test_config_file_json_and_lines(tmp_path):
    data = tmp_path / "seg.csv"
    _run(["gen", "segment", "--n", 25, "--jitter", 1e-3, "--out", data])
    cfg_json = tmp_path / "c.json"
    cfg_json.write_text('{"theta": 0.30, "K": 5}')
    cfg_lines = tmp_path / "c.txt"
    cfg_lines.write_text("theta = 0.30  # wider replace window\nK = 5\n")
    out1, out2 = tmp_path / "o1.json", tmp_path / "o2.json"
    assert _run(["build", data, "--config", cfg_json, "--out", out1]) == 0
    assert _run(["build", data, "--config", cfg_lines, "--out", out2]) == 0
    r1 = json.loads(out1.read_text())
    r2 = json.loads(out2.read_text())
    assert r1["config"]["theta"] == 0.30
    assert r1["curve"] == r2["curve"]


def test_csv_bad_line_reports_line_number(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,weight\n0,0,1\noops,3\n")
    assert _run(["energy", bad]) == 2
    err = capsys.readouterr().err
    assert "3" in err  # line number of the bad row


def test_json_matrix_dataset(tmp_path):
    mat = tmp_path / "m.json"
    dist = [[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]]
    mat.write_text(json.dumps({"dist": dist, "weights": [1, 1, 1]}))
    out = tmp_path / "e.json"
    assert _run(["energy", mat, "--k", 2, "--out", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["c2_k"]["value"] == 0.0  # collinear matrix
