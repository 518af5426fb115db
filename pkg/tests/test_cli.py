import os
import subprocess
import sys

import pytest

from picardcheck.cli import main, parse_args
from picardcheck.config import ConfigError, read_config_text


def run(tmp_path, *args):
    try:
        return main([*args, "--out", str(tmp_path)])
    except SystemExit as exc:
        # argparse-level errors leave through SystemExit
        return exc.code


def test_iterate_gallery(tmp_path, capsys):
    assert run(tmp_path, "iterate", "--gallery", "dottie_cos", "--x0", "1.0") == 0
    out = capsys.readouterr().out
    assert "verdict=converged" in out and "final=0.73908513321" in out
    lines = (tmp_path / "dottie_cos_trace.csv").read_text().splitlines()
    assert lines[1] == "n,x1,step_distance,residual"


def test_iterate_expression_budget(tmp_path):
    code = run(tmp_path, "iterate", "--expr", "x1 + 1/x1", "--lower", "1", "--upper", "inf",
               "--x0", "1", "--max-iter", "200", "--name", "xi")
    assert code == 3 and (tmp_path / "xi_trace.csv").exists()


def test_certify_pass_and_fail(tmp_path, capsys):
    assert run(tmp_path, "certify", "--gallery", "halving", "--cert", "banach", "--lambda", "0.6") == 0
    assert run(tmp_path, "certify", "--gallery", "halving", "--cert", "banach", "--lambda", "0.4") == 2
    text = (tmp_path / "halving_banach_report.txt").read_text()
    assert "fail" in text and "witness" in text


def test_certify_expression_moduli(tmp_path):
    code = run(tmp_path, "certify", "--expr", "x1/2", "--lower", "-1", "--upper", "1",
               "--cert", "compatible_pair_ef", "--E", "0.75*t", "--F", "identity", "--count", "300")
    assert code == 0


def test_verify_picard_and_counterexample(tmp_path):
    assert run(tmp_path, "verify", "--gallery", "halving", "--theorem", "banach", "--count", "300") == 0
    assert run(tmp_path, "verify", "--gallery", "x_plus_inv_x", "--as", "counterexample") == 0
    summary = (tmp_path / "x_plus_inv_x_verify_summary.csv").read_text().splitlines()
    assert summary[0] == "case,theorem,overall,worst_margin"
    assert summary[1].startswith("x_plus_inv_x:counterexample,counterexample,verified_empirically")


def test_verify_premise_failure_exit(tmp_path):
    code = run(tmp_path, "verify", "--expr", "x1/2", "--lower", "-1", "--upper", "1", "--theorem", "ef_main",
               "--E", "identity", "--F", "identity", "--starts", "0.5;-0.5", "--count", "200")
    assert code == 2


def test_classify(tmp_path, capsys):
    assert run(tmp_path, "classify", "--gallery", "halving", "--count", "300") == 0
    lines = (tmp_path / "halving_classify.csv").read_text().splitlines()
    assert lines[0] == "kind,verdict,detail" and lines[1].startswith("banach,pass")


def test_sweep(tmp_path):
    assert run(tmp_path, "sweep", "--gallery", "halving", "--theorem", "banach", "--seeds", "0,1,2",
               "--count", "200") == 0
    rows = (tmp_path / "halving_sweep.csv").read_text().splitlines()
    assert len(rows) == 4 and [r.split(",")[0] for r in rows[1:]] == ["0", "1", "2"]


@pytest.mark.parametrize("args", [
    ["iterate", "--expr", "x1 +", "--lower", "0", "--upper", "1", "--x0", "0"],
    ["iterate", "--expr", "x1/2", "--x0", "0"],
    ["iterate", "--gallery", "nope"],
    ["certify", "--expr", "x1/2", "--lower", "0", "--upper", "1", "--cert", "meir_keeler"],
    ["verify", "--expr", "x1/2", "--lower", "0", "--upper", "1", "--theorem", "banach", "--lambda", "0.5"],
    ["bogus"],
    ["iterate", "--gallery", "halving", "--count", "-3"],
    ["iterate", "--gallery", "halving", "--x0", "1,2"],
])
def test_usage_errors(tmp_path, args):
    assert run(tmp_path, *args) == 64


def test_syntax_error_message(tmp_path, capsys):
    assert run(tmp_path, "iterate", "--expr", "x1 +", "--lower", "0", "--upper", "1", "--x0", "0") == 64
    assert "syntax error at position 5" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[target]\ngallery = halving\n\n[certificate]\ncert = banach\nlam = 0.4\n")
    assert run(tmp_path, "certify", "--config", str(cfg)) == 2
    assert run(tmp_path, "certify", "--config", str(cfg), "--lambda", "0.6") == 0


def test_config_errors_name_key_and_line():
    with pytest.raises(ConfigError, match=r"exp.ini:3: bad value for key 'count'"):
        read_config_text("[sampler]\nseed = 1\ncount = many\n", "exp.ini")
    with pytest.raises(ConfigError, match=r"exp.ini:2: unknown key 'colour'"):
        read_config_text("[sampler]\ncolour = red\n", "exp.ini")
    with pytest.raises(ConfigError, match="unknown section"):
        read_config_text("[weird]\nseed = 1\n", "exp.ini")


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[iteration]\nmax_iter = 0\n")
    assert run(tmp_path, "iterate", "--config", str(cfg), "--gallery", "halving") == 64
    assert "max_iter" in capsys.readouterr().err


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PICARDCHECK_OUT", str(tmp_path / "envout"))
    assert parse_args(["iterate", "--gallery", "halving"]).out == str(tmp_path / "envout")
    assert main(["iterate", "--gallery", "halving"]) == 0
    assert (tmp_path / "envout" / "halving_trace.csv").exists()


def test_help_shows_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    assert "(default: 2000)" in out and "--lambda" in out and "--as" in out


def test_csv_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["verify", "--gallery", "babylonian_sqrt2", "--count", "300", "--out", str(d)]) == 0
    name = "babylonian_sqrt2_verify_summary.csv"
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "picardcheck.cli", "iterate", "--gallery", "babylonian_sqrt2",
                           "--out", str(tmp_path)], capture_output=True, text=True,
                          env={**os.environ, "PYTHONHASHSEED": "0"})
    assert proc.returncode == 0 and "final=1.41421356237309" in proc.stdout
