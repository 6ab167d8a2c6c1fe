import json

import pytest

from cstar_comp import cli
from cstar_comp.config import ConfigError, RunConfig, parse_config, parse_config_text


def test_defaults():
    cfg = parse_config_text("")
    assert cfg == RunConfig()
    assert cfg.trunc_sweep == (64, 128, 256) and cfg.window == 32
    assert len(cfg.fuchsian_group().generators) == 2


def test_parse_fields():
    cfg = parse_config_text("window = 16\ntrunc_sweep = 32, 64\nspaces = h2, a2:2\ntol.exact = 1e-8\n")
    assert cfg.window == 16 and cfg.trunc_sweep == (32, 64)
    assert cfg.spaces == ("h2", "a2:2") and cfg.tol("exact") == 1e-8


def test_window_too_large():
    with pytest.raises(ConfigError, match="window"):
        parse_config_text("window = 64\ntrunc_sweep = 64, 128\n")
    with pytest.raises(ConfigError):
        RunConfig(window=33)


def test_bad_group_names_line():
    with pytest.raises(ConfigError, match=":2"):
        parse_config_text("window = 16\ngroup = 1 0 5 0\n")


def test_unknown_field():
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config_text("colour = red\n")


def test_hash_ignores_output_dir():
    a = RunConfig()
    assert a.hash() == RunConfig(output_dir="elsewhere").hash()
    assert a.hash() != RunConfig(seed=1).hash()
    assert parse_config_text(a.to_text()) == a


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "none.cfg")


def test_cli_index(capsys):
    assert cli.main(["index"]) == 0
    assert capsys.readouterr().out.strip() == "-1"
    assert cli.main(["index", "--picture", "emerson", "--radius", "2"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_cli_limitset(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path), "limitset", "--max-len", "6"]) == 0
    assert (tmp_path / "limitset.svg").read_text().startswith("<svg")
    assert (tmp_path / "limitset.csv").exists()
    assert cli.main(["--out", str(tmp_path), "limitset", "--group", "rotation"]) == 0
    assert "warning" in capsys.readouterr().err


def test_cli_crossed(tmp_path, capsys):
    x = tmp_path / "x.txt"
    y = tmp_path / "y.txt"
    x.write_text("a : 0 -> 1 0\n")
    y.write_text("A : 0 -> 1 0\n")
    assert cli.main(["crossed", "--op", "multiply", "--lhs", str(x), "--rhs", str(y)]) == 0
    assert capsys.readouterr().out.startswith("e : 0 ->")
    assert cli.main(["crossed", "--op", "star", "--lhs", str(x)]) == 0
    assert capsys.readouterr().out.startswith("A : 0 ->")


def test_cli_bad_config_exit2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("window = 200\n")
    assert cli.main(["--config", str(cfg), "index"]) == 2
    assert "window" in capsys.readouterr().err
    assert cli.main(["--threads", "0", "index"]) == 2


def test_cli_verify_and_report(tmp_path, capsys):
    assert cli.main(["--out", str(tmp_path), "verify", "--suite", "emerson"]) == 0
    rep = json.loads((tmp_path / "emerson.json").read_text())
    assert rep["passed"] and rep["config_hash"] == RunConfig().hash()
    assert cli.main(["--out", str(tmp_path), "report"]) == 0
    assert "emerson" in capsys.readouterr().out
    assert cli.main(["--out", str(tmp_path / "empty"), "report"]) == 2


def test_cli_extract_shift(capsys):
    assert cli.main(["extract-shift", "--trunc", "64"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["residual_table"]) == 3
