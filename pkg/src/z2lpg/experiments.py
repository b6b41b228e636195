"""Experiment configs, shipped presets and the runners behind the command line.

A config is a nested mapping (stored as YAML). Resolution merges, in order,
a named preset, a config file and command-line overrides, then fills every
default so that the resolved mapping alone reproduces a run. Every output file
embeds the resolved config.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import yaml

from .errors import CapacityError
from .evolve import QuenchConfig, run_quench
from .lattice import DEFAULT_ALPHAS, LatticeSpec, ModelParams, build_hilbert_space, build_initial_state
from .sequences import ENUM_CAP, is_compliant, make_sequence, resonance_fraction
from .timeseries import FORMAT_VERSION, atomic_write, config_hash
from .trotter import CircuitConfig, ideal_protection_strength, run_circuit, scan_final_violation

__all__ = [
    "KINDS",
    "ConfigError",
    "list_presets",
    "load_preset",
    "parse_config_text",
    "resolve_config",
    "dump_config",
    "run_experiment",
    "cmd_quench_analog",
    "cmd_quench_circuit",
    "cmd_scan_v",
    "cmd_sequence_audit",
]

KINDS = ("quench-analog", "quench-circuit", "scan-v", "sequence-audit")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key path."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


def _preset_dir():
    return resources.files("z2lpg") / "presets"


def list_presets() -> dict[str, str]:
    """Preset name -> one-line description."""
    out = {}
    for entry in sorted(_preset_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".yaml"):
            data = yaml.safe_load(entry.read_text())
            out[entry.name[:-5]] = data.get("description", "")
    return out


def load_preset(name: str) -> dict:
    path = _preset_dir() / f"{name}.yaml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}", field="preset")
    data = yaml.safe_load(path.read_text())
    data["preset"] = name
    return data


def parse_config_text(text: str) -> dict:
    """Parse YAML config text, reporting syntax errors with their line number."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(str(getattr(exc, "problem", exc)), line=mark.line + 1 if mark else None) from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", line=1)
    return data


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _num(value, field: str, positive: bool = False, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field)
    if integer and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", field)
    if positive and value <= 0:
        raise ConfigError(f"must be positive, got {value!r}", field)
    return int(value) if integer else float(value)


def _resolve_sequence(value) -> list[str] | str:
    if value is None:
        raise ConfigError("missing sequence", "sequence")
    try:
        seq = make_sequence(value if isinstance(value, str) else [str(v) for v in value])
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(str(exc), "sequence") from exc
    return value if isinstance(value, str) and seq.tag != "custom" else seq.as_strings()


def resolve_config(preset: str | None = None, config: dict | None = None, overrides: dict | None = None) -> dict:
    """Merge preset, config mapping and overrides; validate and fill defaults."""
    cfg: dict = {}
    if preset:
        cfg = load_preset(preset)
    if config:
        if config.get("preset") and not preset:
            cfg = load_preset(config["preset"])
        cfg = _merge(cfg, config)
    if overrides:
        cfg = _merge(cfg, overrides)
        if "V" in overrides:
            # an explicit V list replaces any named runs
            cfg.pop("runs", None)

    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"expected one of {KINDS}, got {kind!r}", "kind")
    out: dict = {"format_version": FORMAT_VERSION, "kind": kind, "preset": cfg.get("preset"), "description": cfg.get("description", "")}
    out["sequence"] = _resolve_sequence(cfg.get("sequence"))
    output = cfg.get("output", {}) or {}
    fmt = output.get("format", "json" if kind == "sequence-audit" else "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"expected 'csv' or 'json', got {fmt!r}", "output.format")
    out["output"] = {"path": output.get("path", "."), "format": fmt}

    if kind == "sequence-audit":
        rng = cfg.get("L_range", [4, 16, 4])
        if not isinstance(rng, (list, tuple)) or len(rng) != 3:
            raise ConfigError("expected [start, stop, step]", "L_range")
        lo, hi, step = (_num(v, f"L_range[{i}]", positive=True, integer=True) for i, v in enumerate(rng))
        if hi < lo:
            raise ConfigError("stop must not be smaller than start", "L_range")
        out["L_range"] = [lo, hi, step]
        return out

    lat = cfg.get("lattice", {})
    L = _num(lat.get("L", 4), "lattice.L", positive=True, integer=True)
    boundary = lat.get("boundary", "periodic" if kind == "quench-analog" else "open")
    if boundary not in ("periodic", "open"):
        raise ConfigError(f"expected 'periodic' or 'open', got {boundary!r}", "lattice.boundary")
    if kind != "quench-analog" and boundary != "open":
        raise ConfigError("circuit runs require open boundaries", "lattice.boundary")
    sector = lat.get("sector", "half")
    if sector not in ("half", None):
        sector = _num(sector, "lattice.sector", integer=True)
    target = lat.get("target_sector")
    out["lattice"] = {"L": L, "boundary": boundary, "sector": sector, "target_sector": target}

    model = cfg.get("model", {})
    error_model = model.get("error_model", "analog" if kind == "quench-analog" else "circuit")
    m = {
        "J": _num(model.get("J", 1.0), "model.J", positive=True),
        "h": _num(model.get("h", 0.3), "model.h"),
        "lam": _num(model.get("lam", 1.0 if error_model == "analog" else 0.1), "model.lam"),
        "alphas": [_num(a, f"model.alphas[{i}]") for i, a in enumerate(model.get("alphas", DEFAULT_ALPHAS))],
        "error_model": error_model,
    }
    try:
        ModelParams(J=m["J"], h=m["h"], lam=m["lam"], alphas=tuple(m["alphas"]), error_model=error_model)
    except ValueError as exc:
        raise ConfigError(str(exc), "model") from exc
    out["model"] = m
    out["state"] = cfg.get("state", "staggered")

    runs = cfg.get("runs")
    if runs is None:
        Vs = cfg.get("V", [0.0])
        Vs = Vs if isinstance(Vs, (list, tuple)) else [Vs]
        runs = [{"label": f"V{_num(v, 'V'):g}", "V": v} for v in Vs]
    resolved_runs = []
    for i, r in enumerate(runs):
        if not isinstance(r, dict) or "V" not in r:
            raise ConfigError("each run needs at least a V entry", f"runs[{i}]")
        V = _num(r["V"], f"runs[{i}].V")
        if V < 0:
            raise ConfigError("V must be non-negative", f"runs[{i}].V")
        variant = r.get("variant", "faulty")
        if variant not in ("faulty", "adjusted", "ideal"):
            raise ConfigError(f"unknown variant {variant!r}", f"runs[{i}].variant")
        entry = {"label": str(r.get("label", f"V{V:g}")), "V": V, "variant": variant, "state": r.get("state", out["state"]), "L": _num(r.get("L", L), f"runs[{i}].L", positive=True, integer=True)}
        if "engine" in r:
            entry["engine"] = r["engine"]
        resolved_runs.append(entry)
    labels = [r["label"] for r in resolved_runs]
    if len(set(labels)) != len(labels):
        raise ConfigError("run labels must be unique", "runs")
    out["runs"] = resolved_runs

    if kind == "quench-analog":
        q = cfg.get("quench", {})
        qc = {
            "t_max": _num(q.get("t_max", 10.0), "quench.t_max", positive=True),
            "sample_interval": _num(q.get("sample_interval", 0.01), "quench.sample_interval", positive=True),
            "engine": q.get("engine", "dense"),
            "krylov_dim": _num(q.get("krylov_dim", 30), "quench.krylov_dim", integer=True),
            "krylov_tol": _num(q.get("krylov_tol", 1e-12), "quench.krylov_tol", positive=True),
        }
        try:
            QuenchConfig(**qc)
            for r in resolved_runs:
                QuenchConfig(**{**qc, "engine": r.get("engine", qc["engine"])})
        except ValueError as exc:
            raise ConfigError(str(exc), "quench") from exc
        out["quench"] = qc
    else:
        c = cfg.get("circuit", {})
        out["circuit"] = {
            "dt": _num(c.get("dt", 0.2), "circuit.dt", positive=True),
            "n_steps": _num(c.get("n_steps", 100), "circuit.n_steps", positive=True, integer=True),
            "sample_every": _num(c.get("sample_every", 1), "circuit.sample_every", positive=True, integer=True),
        }
    if kind == "scan-v":
        dts = cfg.get("dt_list", [out["circuit"]["dt"]])
        out["dt_list"] = [_num(d, f"dt_list[{i}]", positive=True) for i, d in enumerate(dts)]
        out["t_final"] = _num(cfg.get("t_final", 20.0), "t_final", positive=True)
        if any(r["V"] <= 0 for r in resolved_runs):
            raise ConfigError("scan values must be positive", "V")
    return out


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True)


# --- runners ---------------------------------------------------------------


def _space_for(cfg: dict, L: int):
    lat = cfg["lattice"]
    spec = LatticeSpec(L, lat["boundary"], tuple(lat["target_sector"]) if lat["target_sector"] else None)
    sector = L // 2 if lat["sector"] == "half" else lat["sector"]
    return build_hilbert_space(spec, sector)


def _params(cfg: dict, V: float) -> ModelParams:
    m = cfg["model"]
    return ModelParams(J=m["J"], h=m["h"], lam=m["lam"], V=V, alphas=tuple(m["alphas"]), error_model=m["error_model"])


def _run_one(cfg: dict, run: dict):
    space = _space_for(cfg, run["L"])
    seq = make_sequence(cfg["sequence"])
    psi0 = build_initial_state(space, run["state"])
    params = _params(cfg, run["V"])
    meta = {"config": cfg, "config_hash": config_hash(cfg), "run": run}
    if cfg["kind"] == "quench-analog":
        q = {**cfg["quench"], "engine": run.get("engine", cfg["quench"]["engine"])}
        return run_quench(space, params, seq, psi0, QuenchConfig(**q), variant=run["variant"], metadata=meta)
    c = cfg["circuit"]
    if run["variant"] != "faulty":
        raise ConfigError("circuit runs support the faulty variant only", "runs.variant")
    return run_circuit(space, CircuitConfig(c["dt"], c["n_steps"], params, seq, c["sample_every"]), psi0, metadata=meta)


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*items)))
    return [fn(*args) for args in items]


def _write_series(cfg: dict, out_dir: Path, fmt: str, jobs: int) -> list[Path]:
    results = _map(_run_one, [(cfg, r) for r in cfg["runs"]], jobs)
    paths = []
    for run, series in zip(cfg["runs"], results):
        paths.append(series.save(out_dir / f"{run['label']}.{fmt}", fmt))
    return paths


def cmd_quench_analog(cfg: dict, out_dir: str | Path, fmt: str = "csv", jobs: int = 1) -> list[Path]:
    """Continuous-time quenches; one time-series file per run."""
    if cfg["kind"] != "quench-analog":
        raise ConfigError(f"expected kind quench-analog, got {cfg['kind']}", "kind")
    return _write_series(cfg, Path(out_dir), fmt, jobs)


def cmd_quench_circuit(cfg: dict, out_dir: str | Path, fmt: str = "csv", jobs: int = 1) -> list[Path]:
    """Trotter-circuit quenches; one time-series file per run."""
    if cfg["kind"] != "quench-circuit":
        raise ConfigError(f"expected kind quench-circuit, got {cfg['kind']}", "kind")
    return _write_series(cfg, Path(out_dir), fmt, jobs)


def _scan_one(cfg: dict, dt: float, Vs: list[float]):
    space = _space_for(cfg, cfg["lattice"]["L"])
    seq = make_sequence(cfg["sequence"])
    psi0 = build_initial_state(space, cfg["state"])
    template = CircuitConfig(dt, 1, _params(cfg, 0.0), seq, 1)
    return scan_final_violation(space, template, Vs, psi0, cfg["t_final"])


def cmd_scan_v(cfg: dict, out_dir: str | Path, fmt: str = "csv", jobs: int = 1) -> list[Path]:
    """Final raw violation versus V for every Trotter step in ``dt_list``."""
    if cfg["kind"] != "scan-v":
        raise ConfigError(f"expected kind scan-v, got {cfg['kind']}", "kind")
    Vs = sorted(r["V"] for r in cfg["runs"])
    tables = _map(_scan_one, [(cfg, dt, Vs) for dt in cfg["dt_list"]], jobs)
    rows = [
        {"dt": dt, "V": V, "eps_f": eps, "V_ideal": ideal_protection_strength(dt)}
        for dt, table in zip(cfg["dt_list"], tables)
        for V, eps in table
    ]
    return [_write_table(Path(out_dir) / f"scan.{fmt}", cfg, rows, fmt)]


def sequence_audit(cfg: dict) -> list[dict]:
    seq = make_sequence(cfg["sequence"])
    lo, hi, step = cfg["L_range"]
    rows = []
    for L in range(lo, hi + 1, step):
        if L > ENUM_CAP:
            raise CapacityError(f"L = {L} exceeds enumeration cap {ENUM_CAP}")
        report = is_compliant(seq, L)
        R = resonance_fraction(seq, L)
        rows.append({**report.to_dict(), "R": str(R), "R_float": float(R)})
    return rows


def cmd_sequence_audit(cfg: dict, out_dir: str | Path, fmt: str = "json", jobs: int = 1) -> list[Path]:
    """Compliance verdicts, witnesses and the resonant fraction for each L."""
    if cfg["kind"] != "sequence-audit":
        raise ConfigError(f"expected kind sequence-audit, got {cfg['kind']}", "kind")
    rows = sequence_audit(cfg)
    return [_write_table(Path(out_dir) / f"audit.{fmt}", cfg, rows, fmt)]


def _write_table(path: Path, cfg: dict, rows: list[dict], fmt: str) -> Path:
    header = {"format_version": FORMAT_VERSION, "config": cfg, "config_hash": config_hash(cfg)}
    if fmt == "json":
        atomic_write(path, json.dumps({**header, "rows": rows}, sort_keys=True, indent=1))
        return path
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (" ".join(map(str, v)) if isinstance(v, list) else ("" if v is None else (repr(v) if isinstance(v, float) else v))) for k, v in r.items()})
    atomic_write(path, buf.getvalue())
    return path


RUNNERS = {
    "quench-analog": cmd_quench_analog,
    "quench-circuit": cmd_quench_circuit,
    "scan-v": cmd_scan_v,
    "sequence-audit": cmd_sequence_audit,
}


def run_experiment(cfg: dict, out_dir: str | Path, fmt: str = "csv", jobs: int = 1) -> list[Path]:
    return RUNNERS[cfg["kind"]](cfg, out_dir, fmt, jobs)
