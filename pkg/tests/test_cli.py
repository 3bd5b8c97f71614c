import json
import re
import subprocess
import sys

import numpy as np

from triadops import BipartiteOperator, canonical
from triadops.cli import main


def run_cli(args, stdin_text=None):
    proc = subprocess.run(
        [sys.executable, "-m", "triadops.cli", *args],
        input=stdin_text,
        capture_output=True,
        text=True,
    )
    return proc


def test_generate_classify_pipeline():
    gen = run_cli(["generate", "--class", "canonical:classical_diag", "--k", "2"])
    assert gen.returncode == 0
    cls = run_cli(["classify", "-", "--json"], stdin_text=gen.stdout)
    assert cls.returncode == 0
    report = json.loads(cls.stdout)
    assert report["ppt"] and report["spc"] and report["invariant"]


def test_classify_bell_fixture():
    gen = run_cli(["generate", "--class", "canonical:bell", "--k", "2"])
    cls = run_cli(["classify", "-", "--json"], stdin_text=gen.stdout)
    report = json.loads(cls.stdout)
    assert report["ppt"] is False
    assert abs(report["ccnr_value"] - 2.0) <= 1e-9


def test_generate_round_trip_lossless(tmp_path):
    gen = run_cli(["generate", "--class", "density", "--k", "3", "--seed", "11"])
    data = json.loads(gen.stdout)
    op = BipartiteOperator.from_json(data)
    rewritten = json.loads(run_cli_format(op))
    back = BipartiteOperator.from_json(rewritten)
    assert np.max(np.abs(back.mat - op.mat)) <= 1e-15


def run_cli_format(op):
    from triadops.cli import _format_json

    return _format_json(op.to_json())


def test_json_prints_17_significant_digits():
    from triadops.cli import _format_json

    out = _format_json({"x": 1.0 / 3.0})
    match = re.search(r"0\.(\d+)", out)
    assert match and len(match.group(1)) == 17


def test_every_subcommand_parses_generated_matrix(tmp_path):
    gen = run_cli(["generate", "--class", "spc", "--k", "2", "--seed", "3"])
    path = tmp_path / "state.json"
    path.write_text(gen.stdout)
    for args in (
        ["classify", str(path), "--json"],
        ["bounds", str(path), "--json"],
        ["schmidt", str(path), "--json"],
        ["filter", str(path), "--mode", "symmetric", "--json"],
        ["decompose", str(path), "--json"],
        ["certify", str(path), "--json"],
    ):
        proc = run_cli(args)
        assert proc.returncode in (0, 2), (args, proc.stderr)
        json.loads(proc.stdout)  # valid JSON whenever --json is passed


def test_usage_errors_exit_1(tmp_path):
    assert run_cli(["classify", "/does/not/exist.json"]).returncode == 1
    assert run_cli(["frobnicate"]).returncode == 1
    assert run_cli(["generate", "--class", "nope", "--k", "2"]).returncode == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["classify", str(bad)]).returncode == 1


def test_numerical_failures_exit_2(tmp_path):
    gen = run_cli(["generate", "--class", "canonical:bell", "--k", "2"])
    path = tmp_path / "bell.json"
    path.write_text(gen.stdout)
    # symmetric mode on a non-SPC state is a numerical (class) failure
    proc = run_cli(["filter", str(path), "--mode", "symmetric"])
    assert proc.returncode == 2


def test_triad_seed_env(tmp_path, monkeypatch):
    a = run_cli(["generate", "--class", "density", "--k", "2"])
    proc = subprocess.run(
        [sys.executable, "-m", "triadops.cli", "generate", "--class", "density", "--k", "2"],
        capture_output=True,
        text=True,
        env={"TRIAD_SEED": "99", "PATH": "/usr/bin:/bin"},
    )
    assert proc.returncode == 0
    assert proc.stdout != a.stdout  # seed override changes the draw


def test_werner_parse():
    proc = run_cli(["generate", "--class", "canonical:werner(0.5)", "--k", "2"])
    assert proc.returncode == 0
    op = BipartiteOperator.from_json(json.loads(proc.stdout))
    expected = canonical("werner", 2, alpha=0.5)
    assert np.allclose(op.mat, expected.mat)


def test_selftest_quick():
    proc = run_cli(["selftest", "--quick"])
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "suites passed" in proc.stdout


def test_main_callable_directly(capsys):
    code = main(["generate", "--class", "canonical:bell", "--k", "2"])
    assert code == 0
    out = capsys.readouterr().out
    BipartiteOperator.from_json(json.loads(out))
