import csv
import json
import math

import pytest

from mecs.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_measure_basic(capsys):
    code, out, _ = run(capsys, "measure", "--p", "0.5", "--theta", "0", "--n", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["pair_concurrence"] == pytest.approx(1 / 3, abs=1e-12)
    assert rep["n_tangle"] == pytest.approx(1 / 3, abs=1e-12)
    assert max(rep["oracle_deltas"].values()) < 1e-9


def test_measure_split(capsys):
    code, out, _ = run(capsys, "measure", "--p", "0", "--theta", "1.0", "--n", "5", "--split", "2")
    assert code == 0
    assert json.loads(out)["split_concurrence"] == 1.0


def test_measure_alpha_odd_cat(capsys):
    code, out, _ = run(capsys, "measure", "--alpha", "1.0", "--theta", "3.141592653589793", "--n", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["pair_concurrence"] == pytest.approx(1.0, abs=1e-12)
    assert rep["alpha"] == [1.0, 0.0]


def test_measure_json_round_trip(capsys):
    first = run(capsys, "measure", "--p", "0.37", "--theta-pi", "0.25", "--n", "4", "--split", "2")[1]
    rep = json.loads(first)
    again = run(capsys, "measure", "--p", repr(rep["p"]), "--theta", repr(rep["theta"]), "--n", str(rep["n"]), "--split", str(rep["k"]))[1]
    assert json.loads(again) == rep


def test_measure_theta_in_pi(capsys):
    code, out, _ = run(capsys, "measure", "--p", "0.5", "--theta-pi", "1", "--n", "4", "--no-oracle")
    assert code == 0
    rep = json.loads(out)
    assert rep["theta"] == pytest.approx(math.pi)
    assert rep["oracle_deltas"] == {}


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "--p", "1.5", "--theta", "0", "--n", "3"],
        ["measure", "--p", "0.5", "--n", "3"],
        ["measure", "--p", "0.5", "--theta", "0", "--n", "3", "--split", "3"],
        ["measure", "--p", "0.5", "--theta", "0", "--n", "1"],
        ["measure", "--p", "1", "--theta-pi", "1", "--n", "3", "--split", "1", "--no-oracle", "--alpha", "1"],
    ],
)
def test_measure_usage_errors(capsys, argv):
    # argparse exits by itself; domain errors come back as a return code
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert capsys.readouterr().err


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_concurrence_grid(tmp_path, capsys):
    out = tmp_path / "concurrence.csv"
    code, _, _ = run(capsys, "sweep", "--n", "3", "--p-steps", "100", "--theta-steps", "60", "--out", str(out))
    assert code == 0
    rows = _read_csv(out)
    assert len(rows) == 6000
    assert list(rows[0]) == ["p", "theta", "n", "concurrence", "n_tangle"]
    assert float(rows[0]["p"]) == 0.0 and float(rows[-1]["p"]) == 0.999
    best = max(rows, key=lambda r: float(r["concurrence"]))
    assert float(best["theta"]) == pytest.approx(math.pi)
    for r in rows:
        if float(r["theta"]) == pytest.approx(math.pi) and 0 < float(r["p"]):
            p = float(r["p"])
            assert float(r["concurrence"]) == pytest.approx((p - p**3) / (1 - p**3), abs=1e-12)


def test_sweep_is_byte_deterministic(tmp_path, capsys):
    args = ["sweep", "--n", "4", "--p-steps", "11", "--theta-steps", "4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_sweep_tangle_families(tmp_path, capsys):
    out = tmp_path / "tangle.csv"
    code, _, _ = run(
        capsys, "sweep", "--theta-list", "0,0.5,1", "--theta-in-pi", "--n-list", "3", "--out", str(out)
    )
    assert code == 0
    rows = _read_csv(out)
    assert len(rows) == 300
    assert all(float(r["n_tangle"]) == 1.0 for r in rows if float(r["p"]) == 0.0)
    w_curve = [float(r["n_tangle"]) for r in rows if float(r["theta"]) == pytest.approx(math.pi)]
    assert all(b < a for a, b in zip(w_curve, w_curve[1:]))
    # (1 - p^2)^3 / (1 - p^3)^2 at p = 0.999, i.e. about 8(1 - p)/9
    assert w_curve[-1] == pytest.approx(8.89333407296148e-4, rel=1e-12)


def test_sweep_odd_n_leaves_tangle_empty(tmp_path, capsys):
    out = tmp_path / "odd.csv"
    assert run(capsys, "sweep", "--n-list", "5", "--theta-list", "0", "--p-steps", "3", "--out", str(out))[0] == 0
    assert all(r["n_tangle"] == "" for r in _read_csv(out))


@pytest.mark.parametrize(
    "extra",
    [
        ["--n", "3"],
        ["--n", "3", "--theta-steps", "4", "--p-steps", "1"],
        ["--n", "3", "--theta-steps", "4", "--p-max", "1.5"],
        ["--theta-list", "0"],
        ["--n", "1", "--theta-steps", "4"],
    ],
)
def test_sweep_usage_errors(tmp_path, capsys, extra):
    code, _, err = run(capsys, "sweep", *extra, "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert err


def test_sweep_unwritable_path(tmp_path, capsys):
    code, _, err = run(capsys, "sweep", "--n", "3", "--theta-steps", "2", "--out", str(tmp_path / "no" / "x.csv"))
    assert code == 2


def test_simulate_explicit_outcome(capsys):
    code, out, _ = run(capsys, "simulate", "--alpha", "1", "--tau", "1.5707963", "--n", "3", "--pattern", "000", "--sign", "+")
    assert code == 0
    rep = json.loads(out)
    assert rep["status"] == "ok"
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert len(rep["collapsed"]) == 2


def test_simulate_zero_probability(capsys):
    code, out, _ = run(capsys, "simulate", "--alpha", "0", "--tau", "0.7", "--n", "2", "--pattern", "00", "--sign", "-")
    assert code == 0
    rep = json.loads(out)
    assert rep["status"] == "zero-probability"
    assert rep["probability"] == 0.0
    assert rep["collapsed"] is None


def test_simulate_sampling_reproducible(capsys):
    args = ["simulate", "--alpha", "0.8", "--tau", "1.1", "--n", "3", "--seed", "42"]
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second
    assert json.loads(first)["probability"] > 0


def test_simulate_usage_errors(capsys):
    assert run(capsys, "simulate", "--alpha", "1", "--tau", "1", "--n", "3")[0] == 2
    assert run(capsys, "simulate", "--alpha", "1", "--tau", "1", "--n", "3", "--pattern", "00")[0] == 2


def test_solve_max(capsys):
    code, out, _ = run(capsys, "solve-max", "--n", "3", "--theta", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["p_star"] == pytest.approx(0.5, abs=1e-12)
    assert rep["c_star"] == pytest.approx(1 / 3, abs=1e-12)
    rep = json.loads(run(capsys, "solve-max", "--n", "3", "--theta", "1.5707963")[1])
    assert rep["p_star"] == pytest.approx(3**-0.5, abs=1e-6)
    # the truncated phase moves C by ~2e-9
    assert rep["c_star"] == pytest.approx(2 * math.sqrt(3) / 9, abs=1e-8)


def test_solve_max_six_parties_matches_scan(capsys):
    rep = json.loads(run(capsys, "solve-max", "--n", "6", "--theta", "0")[1])
    grid = [i * 1e-5 for i in range(100_001)]
    scan = max(grid, key=lambda p: (p**4 - p**6) / (1 + p**6))
    assert abs(rep["p_star"] - scan) <= 1e-5


def test_solve_max_usage_error(capsys):
    assert run(capsys, "solve-max", "--n", "2", "--theta", "0")[0] == 2


@pytest.mark.parametrize("suite, count", [("table1", 6), ("wootters", 4), ("cnot", 4)])
def test_verify_suites(capsys, suite, count):
    code, out, err = run(capsys, "verify", "--suite", suite)
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["n_passed"] == rep["n_checks"] == count
    assert err.count("PASS") == count


def test_verify_failure_exit_code(capsys, monkeypatch):
    from mecs import cli, verify

    monkeypatch.setattr(cli, "run_suite", lambda name: [verify.Check("forced", 1.0, 0.5)])
    code, out, err = run(capsys, "verify", "--suite", "table1")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "FAIL forced" in err
