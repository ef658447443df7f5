"""CSV and report writers.  Output is deterministic: no timestamps, fixed float format."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import Grid, SpinorState
from .pulse import PulseWaveform

FLOAT_FMT = "%.12e"

WAVEFORM_COLUMNS = ("t", "re_V", "im_V", "abs_V", "phase")
SNAPSHOT_COLUMNS = ("z", "density1", "density2", "re_psi2", "im_psi2")


def header_lines(config: dict | None) -> list[str]:
    if not config:
        return []
    return json.dumps(config, sort_keys=True, indent=1, default=str).splitlines()


def write_csv(path, columns: dict, config: dict | None = None,
              comments: list[str] | tuple = ()) -> Path:
    """Write equal-length columns with ``#`` comment lines carrying the config."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    with path.open("w", newline="\n") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        for line in header_lines(config):
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",")
    return path


def write_waveform_csv(path, waveform: PulseWaveform, config: dict | None = None) -> Path:
    v = waveform.samples
    cols = dict(zip(WAVEFORM_COLUMNS, (waveform.times, v.real, v.imag, np.abs(v),
                                       np.unwrap(np.angle(v)))))
    return write_csv(path, cols, config, [f"scheme: {waveform.scheme.value}",
                                          f"dt: {waveform.dt!r}"])


def write_snapshot_csv(path, state: SpinorState, config: dict | None = None) -> Path:
    g: Grid = state.grid
    cols = dict(zip(SNAPSHOT_COLUMNS, (g.z, np.abs(state.psi1)**2, np.abs(state.psi2)**2,
                                       state.psi2.real, state.psi2.imag)))
    return write_csv(path, cols, config, [f"time: {state.time!r}"])


def read_csv(path) -> dict:
    """Inverse of :func:`write_csv` (comments skipped)."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    return {k: data[:, i] for i, k in enumerate(names)}


def plain(obj):
    """Convert numpy containers and scalars to JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_report(path, metrics: dict, config: dict | None = None,
                 notes: list[str] | tuple = ()) -> Path:
    """JSON run summary with the resolved config echoed under ``"config"``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"config": plain(config or {}), "metrics": plain(metrics), "notes": list(notes)}
    path.write_text(json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n")
    return path
