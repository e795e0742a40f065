import json
import subprocess
import sys

import numpy as np
import pytest

from critfield.cli import main
from critfield.realsets import CompactRealSet


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def finite_set(tmp_path):
    path = tmp_path / "f.json"
    assert main(["setgen", "finite", "--points", "1", "2", "3", "--out", str(path)]) == 0
    return path


def test_setgen_cantor_round_trips_through_json(capsys):
    code, data = run_json(capsys, "setgen", "cantor", "--alpha", "0.2", "--depth", "4")
    assert code == 0
    K = CompactRealSet(data["intervals"])
    assert K.n_intervals == 16 and K.min == 0 and K.max == pytest.approx(1.0)


def test_gapsum_finite(capsys, finite_set):
    code, data = run_json(capsys, "gapsum", "--set", str(finite_set), "--alpha", "0.5")
    assert code == 0 and data["total"] == pytest.approx(2.0) and data["is_bt"]


def test_gapsum_minkowski_csv(capsys, finite_set):
    code, out = run(capsys, "gapsum", "--set", str(finite_set), "--minkowski", "0.5", "--n", "5")
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert code == 0 and len(rows) == 6
    assert all(len(r) == len(rows[0]) for r in rows)


def test_empty_set_exit_code(capsys, tmp_path):
    path = tmp_path / "e.json"
    main(["setgen", "finite", "--points", "--out", str(path)])
    code, _ = run(capsys, "gapsum", "--set", str(path))
    assert code == 3


def test_bad_radius_range(finite_set):
    with pytest.raises(SystemExit) as e:
        main(["gapsum", "--set", str(finite_set), "--minkowski", "0.5", "--rmin", "1", "--rmax", "0.1"])
    assert e.value.code == 2


def test_missing_file_is_usage_error(capsys, tmp_path):
    code, _ = run(capsys, "gapsum", "--set", str(tmp_path / "nope.json"))
    assert code == 2


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 2


def test_round_trip_ten_points(capsys, tmp_path):
    rng = np.random.default_rng(7)
    pts = [f"{v:.6f}" for v in rng.uniform(1, 2, 10)]
    path = tmp_path / "t.json"
    main(["setgen", "finite", "--points", *pts, "--out", str(path)])
    code, data = run_json(capsys, "verify", "round-trip", "--target", str(path))
    assert code == 0 and data["passed"] and not data["missing"]
    assert data["max_error"] <= 1e-6


def test_construct_and_scan(capsys, finite_set, tmp_path):
    F = tmp_path / "F.json"
    svg = tmp_path / "F.svg"
    assert main(["construct", "ferry", "--set", str(finite_set), "--out", str(F), "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    code, out = run(capsys, "field", "scan", "--set", str(F))
    values = [float(line.split(",")[2]) for line in out.strip().splitlines()[1:]]
    assert code == 0
    for v in (1.0, 2.0, 3.0):
        assert min(abs(np.array(values) - v)) <= 1e-9


def test_levelset(capsys, tmp_path):
    path = tmp_path / "P.json"
    path.write_text(json.dumps({"points": [[-1, 0], [1, 0]]}))
    code, data = run_json(capsys, "levelset", "--set", str(path), "--r", "0.5", "--window", "-2", "-2", "2", "2", "--step", "0.01")
    assert code == 0 and data["n_components"] == 2


def test_verify_aliases_agree(capsys):
    _, a = run_json(capsys, "verify", "konmn", "--D", "1", "--alpha", "0.5", "--beta", "1")
    _, b = run_json(capsys, "verify", "exclusion", "--D", "1", "--alpha", "0.5", "--beta", "1")
    assert a == b and a["p"] == "20000000000000000000000003"


@pytest.mark.parametrize("kind", ["cosine", "ferry", "cosh"])
def test_hyp_checks(capsys, kind):
    code, data = run_json(capsys, "hyp", "check", kind, "--n", "5", "--seed", "2")
    assert code == 0 and data["passed"]


def test_output_is_deterministic(capsys, finite_set):
    outs = [run(capsys, "verify", "round-trip", "--target", str(finite_set), "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_console_pipeline():
    gen = subprocess.run(
        [sys.executable, "-m", "critfield", "setgen", "cantor", "--alpha", "0.2", "--depth", "6"],
        capture_output=True, text=True, check=True,
    )
    res = subprocess.run(
        [sys.executable, "-m", "critfield", "gapsum", "--set", "-", "--alpha", "0.5"],
        input=gen.stdout, capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["is_bt"]
