"""CLI behavior: exit codes, flag handling, output files, seed env var."""

import json
import os
import subprocess
import sys

import pytest

from qotsim.cli import main


def _cli(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "qotsim.cli", *args],
        capture_output=True, text=True, timeout=120, env=full_env,
    )


def test_oracle_subcommand_exact_value(capsys):
    code = main(["oracle", "--n", "3", "--m", "1", "--N", "6",
                 "--event", "correctness"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["probability"]["exact"] == "7/64"
    assert doc["probability"]["float"] == pytest.approx(7 / 64)


def test_bounds_subcommand_table_format(capsys):
    code = main(["bounds", "--n", "2", "--m", "1", "--format", "table"])
    out = capsys.readouterr().out
    assert code == 0
    assert "2*exp(-N/18)" in out


def test_run_requires_N_or_auto_N(capsys):
    code = main(["run", "--n", "3", "--m", "1", "--trials", "10"])
    assert code == 2
    assert "one of --N or --auto-N" in capsys.readouterr().err


def test_run_auto_N_picks_admissible(capsys):
    code = main(["run", "--n", "4", "--m", "1", "--auto-N", "36",
                 "--trials", "200", "--seed", "1"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["config"]["N"] == 40


def test_run_writes_out_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["run", "--n", "3", "--m", "1", "--N", "6", "--trials", "500",
                 "--seed", "3", "--out", str(out)])
    stdout = capsys.readouterr().out
    assert code == 0
    assert out.read_text() == stdout


def test_attack_exit_code_zero_on_pass(capsys):
    code = main(["attack", "--strategy", "greedy", "--n", "2", "--m", "1",
                 "--N", "6", "--trials", "3000", "--seed", "2"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert all(v["passed"] for v in doc["verdicts"])


def test_attack_rejects_honest_strategy():
    proc = _cli("attack", "--strategy", "honest", "--n", "2", "--m", "1",
                "--N", "6", "--trials", "10", "--seed", "0")
    assert proc.returncode == 2


def test_privacy_test_subcommand(capsys):
    code = main(["privacy-test", "--n", "3", "--m", "1", "--N", "6",
                 "--trials-per-choice", "800", "--seed", "4"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["independence"]["all_pass"] is True


def test_privacy_test_leaky_exit_code_one(capsys):
    code = main(["privacy-test", "--n", "3", "--m", "1", "--N", "6",
                 "--trials-per-choice", "800", "--seed", "4", "--leaky"])
    assert code == 1


def test_seed_env_var_sets_default():
    with_env = _cli("run", "--n", "3", "--m", "1", "--N", "6",
                    "--trials", "300", env={"QOTSIM_SEED": "99"})
    explicit = _cli("run", "--n", "3", "--m", "1", "--N", "6",
                    "--trials", "300", "--seed", "99")
    assert with_env.stdout == explicit.stdout


def test_inadmissible_params_error():
    proc = _cli("oracle", "--n", "2", "--m", "1", "--N", "7",
                "--event", "correctness")
    assert proc.returncode != 0
