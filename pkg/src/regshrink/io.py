"""File formats: CSV matrices, JSON summaries and run manifests."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError

SCHEMA_VERSION = 1


def fmt(x) -> str:
    """Lossless decimal form of a float (17 significant digits)."""
    return format(float(x), ".17g")


def write_csv(path, header: Sequence[str], rows) -> Path:
    """Write rows with a header; floats use 17 significant digits."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, (str, int, np.integer)) and not isinstance(v, bool)
                        else fmt(v) for v in row])
    return path


def write_matrix(path, matrix, header: Sequence[str]) -> Path:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    return write_csv(path, header, matrix.tolist())


def read_table(path):
    """Read a headed numeric CSV; returns (header, float array of shape (rows, cols))."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path} is empty")
    header, body = rows[0], [r for r in rows[1:] if r]
    if not body:
        raise DomainError(f"{path} has no data rows")
    try:
        data = np.array([[float(v) for v in r] for r in body], dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != len(header):
        raise DomainError(f"{path}: ragged rows or header mismatch")
    return header, data


def write_json(path, obj) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path


def now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: Optional[int]
    version: str
    started: str = field(default_factory=now_iso)
    finished: Optional[str] = None
    outputs: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)

    def finish(self, outdir) -> Path:
        self.finished = now_iso()
        path = Path(outdir) / "manifest.json"
        if "manifest.json" not in self.outputs:
            self.outputs.append("manifest.json")
        missing = [o for o in self.outputs if o != "manifest.json"
                   and not os.path.exists(Path(outdir) / o)]
        if missing:
            raise DomainError(f"outputs missing: {missing}")
        return write_json(path, asdict(self))
