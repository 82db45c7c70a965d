import json

import pytest

from chsh_reservoir import cli
from chsh_reservoir.analysis import ThresholdError
from chsh_reservoir.cli import ConfigError, RunConfig, main, parse_config
from chsh_reservoir.integrate import IntegrationError
from chsh_reservoir.params import regime


def test_sweep_defaults():
    cfg, _ = parse_config(["sweep", "--model", "analytic", "--S", "10"])
    assert cfg == RunConfig(command="sweep", model="analytic")
    assert cfg.grid.taus.size == 2001
    assert len(cfg.grid.r1_values) == 99


def test_threshold_defaults():
    cfg, _ = parse_config(["threshold"])
    assert cfg.model == "lindblad"
    assert (cfg.r1_min, cfg.r1_max, cfg.r1_steps) == (0.05, 0.95, 19)


def test_gamma_ratio_maps_to_rates():
    cfg, _ = parse_config(["trace", "--model", "lindblad", "--r1", "0.4", "--gammaS", "0.02"])
    params, decay = regime(cfg.S, cfg.r1, cfg.gammaS)
    assert decay.gamma1 == decay.gamma2 == pytest.approx(0.2 * params.lam)
    assert decay.gamma1 == pytest.approx(0.02 * decay.gamma0)


@pytest.mark.parametrize("argv, flag", [
    (["sweep", "--r1", "1.5"], "--r1"),
    (["sweep", "--S", "-1"], "--S"),
    (["sweep", "--tau-steps", "1"], "--tau-steps"),
    (["sweep", "--fock-cutoff", "7"], "--fock-cutoff"),
    (["trace", "--model", "analytic", "--gammaS", "0.02"], "--gammaS"),
    (["threshold", "--model", "analytic"], "--model"),
    (["sweep", "--r1-min", "0.9", "--r1-max", "0.1"], "--r1-steps"),
])
def test_config_errors_name_the_flag(argv, flag, capsys):
    assert main(argv) == 2
    assert flag in capsys.readouterr().err


def test_missing_command_is_config_error():
    with pytest.raises(ConfigError, match="command"):
        parse_config([])


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"command": "sweep", "bogus": 1}))
    assert main(["--config", str(path)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_flags_override_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"command": "trace", "r1": 0.3, "S": 5.0}))
    cfg, _ = parse_config(["--config", str(path), "--r1", "0.45"])
    assert cfg.r1 == 0.45 and cfg.S == 5.0 and cfg.command == "trace"


def test_dump_config_round_trip(tmp_path, capsys):
    argv = ["trace", "--model", "lindblad", "--gammaS", "0.05", "--tau-steps", "300"]
    assert main(argv + ["--dump-config"]) == 0
    path = tmp_path / "dumped.json"
    path.write_text(capsys.readouterr().out)
    again, _ = parse_config(["--config", str(path)])
    assert again == parse_config(argv)[0]


def test_trace_csv(tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["trace", "--model", "analytic", "--r1", "0.4", "--S", "10", "--out", str(out)]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "tau,B,violation"
    assert len(lines) - 1 == 2001
    tau, B, v = map(float, lines[1].split(","))
    assert (tau, B, v) == (0.0, 2.0, 0.0)
    for line in lines[1:]:
        tau, B, v = map(float, line.split(","))
        assert v == max(0.0, B - 2.0)


def test_sweep_csv_layout(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "tau,r1,B,violation"
    rows = lines[1:]
    assert len(rows) == 99 * 2001
    # r1-major: r1 stays fixed over one full tau sweep
    first = [r.split(",") for r in rows[:2002]]
    assert {f[1] for f in first[:2001]} == {"0.01"}
    assert first[2000][0] == "20.0" and first[2001][:2] == ["0.0", "0.02"]


def test_lindblad_trace_runs(tmp_path):
    out = tmp_path / "t.json"
    argv = ["trace", "--model", "lindblad", "--r1", "0.4", "--gammaS", "0.02",
            "--tau-max", "2", "--tau-steps", "50", "--format", "json", "--out", str(out)]
    assert main(argv) == 0
    data = json.loads(out.read_text())
    assert data["columns"] == ["tau", "B", "violation"]
    assert len(data["rows"]) == 51


def test_deterministic_output(tmp_path):
    argv = ["sweep", "--model", "lindblad", "--r1-steps", "5", "--tau-max", "3", "--tau-steps", "60"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_threshold_json_shape(monkeypatch, tmp_path):
    from chsh_reservoir.analysis import ThresholdResult

    monkeypatch.setattr(cli, "find_threshold", lambda *a, **k: ThresholdResult(0.11, 5e-4, 12))
    out = tmp_path / "th.json"
    assert main(["threshold", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data) == {"gamma_star_over_gamma0", "bracket_width", "grid"}
    assert data["gamma_star_over_gamma0"] == 0.11
    assert data["grid"]["tau_steps"] == 2000
    assert len(data["grid"]["r1_values"]) == 19


@pytest.mark.parametrize("exc", [IntegrationError("step size underflow", 3.2),
                                 ThresholdError("not monotone"), ArithmeticError("nan")])
def test_numerical_failure_exit_1(monkeypatch, exc, capsys):
    def boom(*_a, **_k):
        raise exc

    monkeypatch.setattr(cli, "find_threshold", boom)
    monkeypatch.setattr(cli, "bell_trace", boom)
    assert main(["threshold", "--out", "-"]) == 1
    assert main(["trace", "--r1", "0.4"]) == 1
    err = capsys.readouterr().err
    assert "r1 = 0.4" in err and "numerical failure" in err
    if isinstance(exc, IntegrationError):
        assert "tau = 3.2" in err


def test_unwritable_output(capsys, tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    assert main(["trace", "--tau-steps", "10", "--out", str(bad)]) == 2
    assert "--out" in capsys.readouterr().err


def test_stdout_output(capsys):
    assert main(["trace", "--tau-steps", "4", "--tau-max", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "tau,B,violation"
