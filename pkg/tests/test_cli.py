import csv
import json

import numpy as np
import pytest

from qpindex import zoo
from qpindex.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def paper2d_path():
    return str(zoo.zoo_path("paper-2d"))


@pytest.fixture(scope="module")
def eps_path():
    return str(zoo.zoo_path("trivial-eps"))


def test_check_symmetry_passes(capsys, paper2d_path):
    code, out, _ = run_cli(capsys, "--quiet", "check-symmetry",
                           "--model", paper2d_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["hermitian"]["ok"] and doc["inversion"]["ok"] and doc["chiral"]["ok"]


def test_indicator_reports_half_mu(capsys, paper2d_path):
    code, out, _ = run_cli(capsys, "--quiet", "indicator",
                           "--model", paper2d_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["mu"] == 2 and doc["half_mu"] == 1
    assert [e["n_minus"] for e in doc["entries"]] == [3, 1, 1, 1]


def test_indicator_3d(capsys):
    code, out, _ = run_cli(capsys, "--quiet", "indicator",
                           "--model", str(zoo.zoo_path("paper-3d")), "--dim", "3")
    assert code == 0
    assert json.loads(out)["half_mu"] == 1


def test_factorize_and_dump(capsys, paper2d_path, tmp_path):
    dump = tmp_path / "coeffs.json"
    code, out, _ = run_cli(capsys, "--quiet", "factorize",
                           "--model", paper2d_path, "--var", "z",
                           "--freeze", "w=1", "--dump-coeffs", str(dump))
    assert code == 0
    doc = json.loads(out)
    assert doc["residual"] < 1e-8
    coeffs = json.loads(dump.read_text())
    assert "plus" in coeffs and "minus" in coeffs
    assert coeffs["minus"][0]["k"] == 0


def test_ktable_verify(capsys):
    code, out, _ = run_cli(capsys, "--quiet", "ktable", "--verify")
    assert code == 0
    assert out.count("pass") == 4


def test_ktable_dump(capsys):
    code, out, _ = run_cli(capsys, "--quiet", "ktable", "--dump")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 13  # header plus twelve generators
    assert lines[0].startswith("generator,")


def test_missing_model_is_input_error(capsys):
    code, _, err = run_cli(capsys, "--quiet", "indicator",
                           "--model", "/nonexistent/model.json")
    assert code == 3


def test_builtin_model_is_input_error(capsys):
    code, _, err = run_cli(capsys, "--quiet", "indicator",
                           "--model", str(zoo.zoo_path("winding-ref")))
    assert code == 3
    assert "builtin" in err


def test_bad_symmetry_file_is_input_error(capsys, tmp_path):
    doc = json.loads(zoo.zoo_path("paper-2d").read_text())
    chi = doc["symmetry"]["chiral"]
    doc["symmetry"]["chiral"] = [[[1.0, 0.0] if i == j else [0.0, 0.0]
                                  for j in range(6)] for i in range(6)]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "--quiet", "check-symmetry",
                           "--model", str(bad))
    assert code == 3


def test_verify_trivial_model_exits_zero(capsys, eps_path):
    code, out, _ = run_cli(capsys, "--quiet", "verify", "--model", eps_path,
                           "--L", "12")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"]
    assert doc["theorem"]["pass"]
    assert doc["boundary"]["values"] == {"a": 0, "b": 0, "c": 0, "d": 0}
    assert "config" in doc


def test_verify_reports_are_byte_stable(capsys, eps_path):
    _, out1, _ = run_cli(capsys, "--quiet", "verify", "--model", eps_path,
                         "--L", "12")
    _, out2, _ = run_cli(capsys, "--quiet", "verify", "--model", eps_path,
                         "--L", "12")
    doc1 = json.loads(out1)
    doc2 = json.loads(out2)
    doc1.pop("timings")
    doc2.pop("timings")
    assert json.dumps(doc1, sort_keys=True) == json.dumps(doc2, sort_keys=True)


def test_spectrum_edge_csv(capsys, eps_path, tmp_path):
    out_path = tmp_path / "ribbon.csv"
    code, _, _ = run_cli(capsys, "--quiet", "spectrum", "--model", eps_path,
                         "--edge", "1", "--momenta", "16", "--width", "8",
                         "--out", str(out_path))
    assert code == 0
    with open(out_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16 * 8 * 6
    energies = {round(float(r["energy"]), 9) for r in rows}
    assert energies == {-1.0, 1.0}  # two flat bands
    params = [float(r["param"]) for r in rows]
    assert params == sorted(params)


def test_spectrum_edge_row_count_formula(capsys, paper2d_path, tmp_path):
    out_path = tmp_path / "ribbon2.csv"
    width = 10
    code, _, _ = run_cli(capsys, "--quiet", "spectrum", "--model", paper2d_path,
                         "--edge", "1", "--momenta", "12", "--width", str(width),
                         "--out", str(out_path))
    assert code == 0
    nrows = sum(1 for _ in open(out_path)) - 1
    assert nrows == 12 * 6 * width


def test_spectrum_hinge_csv(capsys, tmp_path):
    out_path = tmp_path / "hinge.csv"
    code, _, _ = run_cli(capsys, "--quiet", "spectrum",
                         "--model", str(zoo.zoo_path("paper-3d")),
                         "--hinge", "a", "--width", "8",
                         "--theta-samples", "24", "--out", str(out_path))
    assert code == 0
    with open(out_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 24 * 8
    # the tracked near-zero branches change sign across the sweep
    by_theta = {}
    for r in rows:
        by_theta.setdefault(float(r["param"]), []).append(float(r["energy"]))
    mins = [min(v) for _, v in sorted(by_theta.items())]
    maxs = [max(v) for _, v in sorted(by_theta.items())]
    assert min(mins) < 0 < max(maxs)


def test_gap_check_cli(capsys, eps_path):
    code, out, _ = run_cli(capsys, "--quiet", "gap-check", "--model", eps_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"]
    assert len(doc["entries"]) == 4
