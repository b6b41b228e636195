import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from z2lpg.cli import main
from z2lpg.experiments import ConfigError, dump_config, list_presets, parse_config_text, resolve_config, run_experiment
from z2lpg.timeseries import COLUMNS, FORMAT_VERSION, TimeSeries

PRESETS = {
    "fig2a-ed", "fig3-ed", "fig8b-ed", "zeno-check", "fss-ed", "fig5", "fig6", "fig5b",
    "audit-seventeenths", "audit-elevenths",
}


def _series(n=5):
    t = np.arange(n) * 0.1
    cols = {c: np.sin(t + i) for i, c in enumerate(COLUMNS)}
    cols["t"] = t
    return TimeSeries(**cols, metadata={"config": {"a": 1}})


def test_timeseries_csv_json_identical(tmp_path):
    ts = _series()
    a = TimeSeries.from_csv(ts.to_csv())
    b = TimeSeries.from_json(ts.to_json())
    for c in COLUMNS:
        assert np.array_equal(a.column(c), ts.column(c))
        assert np.array_equal(b.column(c), ts.column(c))
    assert a.metadata["format_version"] == FORMAT_VERSION
    assert a.metadata["config_hash"] == b.metadata["config_hash"]
    path = ts.save(tmp_path / "x.json")
    assert json.loads(path.read_text())["config"] == {"a": 1}


def test_timeseries_validation():
    ts = _series()
    with pytest.raises(ValueError):
        TimeSeries(**{c: ts.column(c)[1:] if c == "t" else ts.column(c) for c in COLUMNS})
    with pytest.raises(ValueError):
        TimeSeries(**{c: ts.column(c) + (1 if c == "t" else 0) for c in COLUMNS})


def test_presets_listed():
    assert set(list_presets()) == PRESETS


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_resolve_and_round_trip(name):
    cfg = resolve_config(name)
    assert cfg["format_version"] == FORMAT_VERSION
    again = resolve_config(config=yaml.safe_load(dump_config(cfg)))
    assert again == cfg


def test_preset_contents():
    fig2a = resolve_config("fig2a-ed")
    assert fig2a["lattice"] == {"L": 4, "boundary": "periodic", "sector": "half", "target_sector": None}
    assert [r["V"] for r in fig2a["runs"]] == [1, 4, 16, 32, 64, 100]
    assert fig2a["model"]["lam"] == 1.0 and fig2a["model"]["h"] == 0.3
    fig5 = resolve_config("fig5")
    assert fig5["circuit"] == {"dt": 0.2, "n_steps": 100, "sample_every": 1}
    assert [r["V"] for r in fig5["runs"]] == [0, 1, 2, 4]
    assert resolve_config("fig6")["state"] == "domain_wall"
    assert resolve_config("fig5b")["dt_list"] == [0.05, 0.1, 0.2]
    assert [r["label"] for r in resolve_config("zeno-check")["runs"]] == ["faulty_V16", "adjusted", "unprotected"]


def test_overrides():
    cfg = resolve_config("fig5", overrides={"V": [3.0], "model": {"lam": 0.2}, "circuit": {"n_steps": 7}})
    assert [r["V"] for r in cfg["runs"]] == [3.0]
    assert cfg["model"]["lam"] == 0.2 and cfg["circuit"]["n_steps"] == 7


@pytest.mark.parametrize(
    "cfg, field",
    [
        ({"kind": "nope"}, "kind"),
        ({"kind": "quench-analog", "sequence": "uniform", "model": {"J": 0}}, "model.J"),
        ({"kind": "quench-analog", "sequence": "uniform", "lattice": {"boundary": "mobius"}}, "lattice.boundary"),
        ({"kind": "quench-circuit", "sequence": "uniform", "lattice": {"boundary": "periodic"}}, "lattice.boundary"),
        ({"kind": "quench-analog", "sequence": "uniform", "V": [-1]}, "runs[0].V"),
        ({"kind": "quench-analog", "sequence": "1, 0"}, "sequence"),
        ({"kind": "sequence-audit", "sequence": "uniform", "L_range": [4, 2, 1]}, "L_range"),
    ],
)
def test_config_errors_name_field(cfg, field):
    with pytest.raises(ConfigError) as err:
        resolve_config(config=cfg)
    assert err.value.field == field


def test_yaml_error_reports_line():
    with pytest.raises(ConfigError) as err:
        parse_config_text("kind: quench-analog\nmodel: {J: 1\nsequence: x\n")
    assert err.value.line is not None and err.value.line >= 2


def test_circuit_run_deterministic(tmp_path):
    cfg = resolve_config("fig5", overrides={"V": [1.0, 2.0], "circuit": {"n_steps": 10}})
    a = run_experiment(cfg, tmp_path / "a", "csv")
    b = run_experiment(cfg, tmp_path / "b", "csv", jobs=2)
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]
    ts = TimeSeries.from_csv(a[0].read_text())
    assert ts.metadata["config"] == cfg and len(ts) == 11


def test_csv_and_json_carry_same_numbers(tmp_path):
    cfg = resolve_config("fig2a-ed", overrides={"V": [4.0], "quench": {"t_max": 1.0}})
    c = TimeSeries.from_csv(run_experiment(cfg, tmp_path, "csv")[0].read_text())
    j = TimeSeries.from_json(run_experiment(cfg, tmp_path, "json")[0].read_text())
    for col in COLUMNS:
        assert np.array_equal(c.column(col), j.column(col))


def test_cli_sequence_audit(tmp_path, capsys):
    assert main(["sequence-audit", "--preset", "audit-seventeenths", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "audit.json").read_text())
    rows = {r["L"]: r for r in data["rows"]}
    assert rows[4]["compliant"] and not rows[8]["compliant"]
    assert rows[8]["R"] == "128/6561"
    assert data["format_version"] == FORMAT_VERSION and data["config"]["kind"] == "sequence-audit"
    assert main(["sequence-audit", "--seq", "uniform", "--L", "2", "--out", str(tmp_path / "u")]) == 0
    row = json.loads((tmp_path / "u" / "audit.json").read_text())["rows"][0]
    assert row["witness"] == [1, -1]
    assert main(["sequence-audit", "--preset", "audit-elevenths", "--out", str(tmp_path / "e"), "--format", "csv"]) == 0
    assert "False" in (tmp_path / "e" / "audit.csv").read_text()


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["quench-analog", "--preset", "fig5"]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: quench-analog\nsequence: uniform\nmodel: {J: -2}\n")
    assert main(["quench-analog", "--config", str(bad)]) == 2
    assert "model.J" in capsys.readouterr().err
    assert main(["quench-analog", "--preset", "fig2a-ed", "--L", "40", "--out", str(tmp_path)]) == 3
    assert main(["sequence-audit", "--seq", "uniform", "--L", "40", "--out", str(tmp_path)]) == 3
    assert main(["quench-analog", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_cli_scan_and_print_config(tmp_path, capsys):
    assert main(["scan-v", "--preset", "fig5b", "--V", "2,4", "--dt", "0.2", "--print-config"]) == 0
    printed = yaml.safe_load(capsys.readouterr().out)
    assert printed["dt_list"] == [0.2] and [r["V"] for r in printed["runs"]] == [2.0, 4.0]
    assert main(["scan-v", "--preset", "fig5b", "--V", "2,4", "--dt", "0.2", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "scan.csv").read_text().splitlines()
    assert text[1] == "dt,V,eps_f,V_ideal" and len(text) == 4


def test_cli_presets_subcommand():
    out = subprocess.run([sys.executable, "-m", "z2lpg", "presets"], capture_output=True, text=True, check=True).stdout
    assert all(name in out for name in PRESETS)
