"""Sampled observables of a quench run and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["COLUMNS", "FORMAT_VERSION", "TimeSeries", "config_hash", "atomic_write"]

COLUMNS = ("t", "sumG", "eps_avg", "eps_raw", "n_stag", "E", "energy", "norm")
FORMAT_VERSION = 1


def config_hash(config: dict) -> str:
    """Short content hash of a JSON-serializable config (key order independent)."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(blob).hexdigest()[:12]


def atomic_write(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class TimeSeries:
    t: np.ndarray
    sumG: np.ndarray
    eps_avg: np.ndarray
    eps_raw: np.ndarray
    n_stag: np.ndarray
    E: np.ndarray
    energy: np.ndarray
    norm: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in COLUMNS:
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError(f"column {name} has shape {arr.shape}, expected ({n},)")
            setattr(self, name, arr)
        if n and self.t[0] != 0.0:
            raise ValueError("time series must start at t = 0")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name not in COLUMNS:
            raise KeyError(name)
        return getattr(self, name)

    def at(self, time: float) -> int:
        """Index of the sample closest to ``time``."""
        return int(np.argmin(np.abs(self.t - time)))

    def _header(self) -> dict:
        meta = dict(self.metadata)
        meta.setdefault("format_version", FORMAT_VERSION)
        if "config" in meta:
            meta.setdefault("config_hash", config_hash(meta["config"]))
        return meta

    def to_csv(self) -> str:
        """CSV text; metadata is embedded as ``#``-prefixed JSON on the first line."""
        buf = io.StringIO()
        buf.write("# " + json.dumps(self._header(), sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        data = np.column_stack([self.column(c) for c in COLUMNS])
        for row in data:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = self._header()
        out["columns"] = {c: [float(x) for x in self.column(c)] for c in COLUMNS}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def save(self, path: str | Path, fmt: str | None = None) -> Path:
        path = Path(path)
        fmt = fmt or path.suffix.lstrip(".") or "csv"
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        atomic_write(path, self.to_csv() if fmt == "csv" else self.to_json())
        return path

    @classmethod
    def from_csv(cls, text: str) -> "TimeSeries":
        lines = text.splitlines()
        meta = {}
        if lines and lines[0].startswith("# "):
            meta = json.loads(lines[0][2:])
            lines = lines[1:]
        rows = list(csv.reader(lines))
        if tuple(rows[0]) != COLUMNS:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(COLUMNS))
        return cls(*(data[:, i] for i in range(len(COLUMNS))), metadata=meta)

    @classmethod
    def from_json(cls, text: str) -> "TimeSeries":
        d = json.loads(text)
        cols = d.pop("columns")
        return cls(*(np.array(cols[c], dtype=float) for c in COLUMNS), metadata=d)
