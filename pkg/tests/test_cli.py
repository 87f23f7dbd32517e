import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levyliouville import cli, persistence
from levyliouville import levy_core as lc
from levyliouville import wiener_inversion as wi


def run(tmp_path, *args):
    out = tmp_path / "report.json"
    code = cli.run([*args, "--out", str(out), "--no-timestamp"])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_discrete_report(tmp_path):
    code, rep, _ = run(tmp_path, "counterexample-discrete", "--level", "12", "--verify-window", "12")
    assert code == 0 and rep["passed"]
    assert rep["certificates"]["coefficients"][:3] == ["2/1", "14/1", "-8/1"]
    assert set(rep["certificates"]["window"].values()) == {"0/1"}
    assert rep["parameters"] == {"level": 12, "verify_window": 12, "threads": 1}
    assert "timestamp" not in rep and rep["rng"] is None


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.run(["exit-mc", "--paths", "500", "--seed", "3", "--out", str(p), "--no-timestamp"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timestamp_present_by_default(tmp_path):
    out = tmp_path / "r.json"
    cli.run(["deny", "--window", "3", "--out", str(out)])
    rep = json.loads(out.read_text())
    assert "timestamp" in rep and rep["duration"] >= 0


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"level": 5, "verify-window": 5}))
    _, rep, _ = run(tmp_path, "counterexample-discrete", "--config", str(cfg))
    assert rep["parameters"]["level"] == 5
    _, rep, _ = run(tmp_path, "counterexample-discrete", "--config", str(cfg), "--verify-window", "3")
    assert rep["parameters"]["verify_window"] == 3 and rep["parameters"]["level"] == 5


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "runs"))
    assert cli.run(["symbol", "--no-timestamp"]) == 0
    assert (tmp_path / "runs" / "symbol.json").exists()


def test_lambda_with_triplet_file(tmp_path):
    tf = tmp_path / "t.json"
    persistence.save(lc.brownian(1, -1), tf)
    code, rep, _ = run(tmp_path, "lambda", "--triplet", str(tf), "--bracket", "-5", "5", "--tol", "1e-10")
    assert code == 0
    assert rep["certificates"]["roots"] == pytest.approx([0.0, 1.0], abs=1e-10)


def test_weight_check_example(tmp_path):
    code, rep, _ = run(tmp_path, "weight-check", "--family", "power", "--alpha", "2", "--pairs", "10000",
                       "--seed", "7")
    assert code == 0 and rep["certificates"]["violation"] == 0


def test_certified_failure_exit_code(tmp_path):
    code, rep, _ = run(tmp_path, "radial-eps", "--scale", "10")
    assert code == 1 and rep["reason"] == "certificate-failed"


def test_math_obstruction_reason(tmp_path):
    grid = tmp_path / "box.csv"
    persistence.save(wi.GridFunction.sample(lambda x: (np.abs(x) <= 0.5).astype(float), -5, 5, 0.01), grid)
    code, rep, _ = run(tmp_path, "invert", "--grid", str(grid), "--K", "6.0", "6.6", "--N", "5")
    assert code == 1 and rep["reason"] == "inversion-impossible" and not rep["passed"]


def test_non_integrable_reason(tmp_path):
    code, rep, _ = run(tmp_path, "radial-eps", "--profile", "power:0.5")
    assert code == 1 and rep["reason"] == "non-integrable"


@pytest.mark.parametrize("argv", [
    ["counterexample-discrete", "--level", "3", "--verify-window", "4"],
    ["counterexample-continuous", "--level", "3", "--q", "5"],
    ["apply", "--function", "sqrt:2"],
    ["lambda", "--preset", "nope"],
    ["invert", "--grid", "/does/not/exist.csv"],
    ["no-such-command"],
    ["lambda", "--bracket", "1"],
])
def test_usage_errors(tmp_path, argv):
    assert cli.run([*argv, "--out", str(tmp_path / "x.json")]) == 2


def test_bad_config_is_usage_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("[1, 2")
    assert cli.run(["deny", "--config", str(cfg), "--out", str(tmp_path / "x.json")]) == 2


@pytest.mark.parametrize("argv", [
    ["symbol", "--xi", "pi"],
    ["apply", "--preset", "counterexample", "--function", "cos:1", "--x", "0"],
    ["counterexample-continuous", "--level", "1", "--q", "8"],
    ["mixture"],
    ["dynkin", "--paths", "400"],
    ["deny", "--h", "pow2", "--window", "6"],
    ["invert"],
    ["spectrum", "--input", "poly:1,0,1", "--expect", "concentrated"],
    ["spectrum", "--expect", "spread"],
])
def test_commands_pass(tmp_path, argv):
    code, rep, _ = run(tmp_path, *argv)
    assert code == 0 and rep["passed"] and rep["command"] == argv[0]


def test_console_script(tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run([sys.executable, "-m", "levyliouville.cli", "symbol", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["certificates"]["re"] == "1/1"


VOCAB = ["--level", "--verify-window", "--q", "--xi", "--x", "--function", "--preset", "--bracket", "--tol",
         "--paths", "--dt", "--a", "--b", "--x0", "--seed", "--window", "--h", "--alpha", "--family",
         "--K", "--N", "--r", "--spacing", "--radius", "--delta", "--expect", "--profile", "--dim", "--scale",
         "-1", "0", "1", "2", "3", "7", "0.5", "1e-3", "pi", "pi*2", "abc", "poly:1,2", "cos:2", "power",
         "log", "brownian", "counterexample", "pow2", "spread", "auto", "power:3"]


@settings(max_examples=60)
@given(st.sampled_from(sorted(cli.COMMANDS)), st.lists(st.sampled_from(VOCAB), max_size=5))
def test_exit_code_contract(tmp_path_factory, command, tokens):
    out = tmp_path_factory.mktemp("fuzz") / "r.json"
    argv = [command, *tokens, "--paths", "200", "--out", str(out), "--no-timestamp"] \
        if command in ("exit-mc", "dynkin") else [command, *tokens, "--out", str(out), "--no-timestamp"]
    code = cli.run(argv)
    assert code in (0, 1, 2)
    if code in (0, 1):
        rep = json.loads(out.read_text())
        assert rep["passed"] == (code == 0)
        assert (rep["reason"] is None) == (code == 0)


def test_csv_for_every_command(tmp_path):
    for argv in (["symbol"], ["deny", "--window", "3"], ["counterexample-continuous", "--level", "1", "--q", "8"],
                 ["exit-mc", "--paths", "100"], ["counterexample-discrete", "--level", "4", "--verify-window", "4"]):
        csv_path = tmp_path / f"{argv[0]}.csv"
        code, _, _ = run(tmp_path, *argv, "--csv", str(csv_path))
        assert code == 0 and csv_path.read_text().count("\n") >= 2


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.run(["symbol", "--out", str(blocker / "sub" / "r.json")]) == 2


def test_flag_prefixes_are_not_expanded(tmp_path):
    # "--h" must not silently turn into --help and exit 0 without a report
    code, _, _ = run(tmp_path, "apply", "--h")
    assert code == 2
