"""Command-line surface tests: subcommands, exit codes, config handling and
deterministic exports."""

import os

import pytest

from talenti_neumann.cli import cli_main, main


def test_example_one_reports_constants(capsys):
    assert main(["example", "1", "--eps", "1e-3", "--cond", "1"]) == 0
    out = capsys.readouterr().out
    assert "c_star" in out
    assert "-0.353906943984" in out  # -sqrt(2)(1+eps)/4 at eps=1e-3
    assert "l2_sq_gap_limit" in out
    assert "overall: pass" in out


def test_theorem_subcommand(capsys):
    assert main(["theorem", "1.2", "--case", "two-disks-f1", "--cond", "2"]) == 0
    out = capsys.readouterr().out
    assert "pointwise" in out and "pass" in out


def test_sweep_subcommand(tmp_path, capsys):
    out_csv = tmp_path / "sweep.csv"
    code = main([
        "sweep", "--case", "1", "--param", "eps",
        "--values", "1e-2,1e-3", "--norm", "l2", "--out", str(out_csv),
    ])
    assert code == 0
    assert out_csv.exists()
    header = out_csv.read_text().splitlines()[0]
    assert header == "eps,u_norm_pow,v_norm_pow,gap"


def test_export_deterministic(tmp_path):
    paths = []
    for name in ("one", "two"):
        curves = tmp_path / f"{name}.csv"
        profile = tmp_path / f"{name}_prof.csv"
        code = main([
            "export", "--case", "1", "--eps", "1e-3",
            "--curves", str(curves), "--profile", str(profile), "--points", "64",
        ])
        assert code == 0
        paths.append((curves.read_bytes(), profile.read_bytes()))
    assert paths[0] == paths[1]
    first_line = paths[0][0].split(b"\n", 1)[0]
    assert first_line == b"t,mu,phi"


def test_config_file_defaults_and_flag_override(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("eps = 0.001\ncond = 1\n# comment\n")
    assert main(["example", "1", "--config", str(config)]) == 0
    out = capsys.readouterr().out
    assert "eps=0.001" in out
    # explicit flag wins over the config value
    assert main(["example", "1", "--config", str(config), "--eps", "1e-2"]) == 0
    out = capsys.readouterr().out
    assert "eps=0.01" in out


def test_exit_codes():
    assert main(["example", "99"]) == 2  # unknown case
    assert main(["--no-such-flag"]) == 2  # argparse usage error
    assert main(["sweep", "--case", "1", "--values", "abc"]) == 2  # malformed values


def test_malformed_config_rejected(tmp_path):
    config = tmp_path / "bad.cfg"
    config.write_text("resolution 512\n")
    assert main(["example", "1", "--config", str(config)]) == 2


def test_cli_main_alias():
    assert cli_main is main


def test_selftest_fast(capsys):
    assert main(["selftest", "--fast"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "FAIL" not in out
