"""CSV and JSON output for trajectories and sweeps."""
from __future__ import annotations

import csv
import json
import platform
from importlib import metadata
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ("t", "concurrence", "trace_error", "purity")


def _fmt(x):
    return repr(float(x))  # shortest round-trip repr, at most 17 significant digits


def software_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def provenance():
    return {
        "software_version": software_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def write_trajectory_csv(record, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for row in zip(record.times, record.concurrence, record.trace_error, record.purity):
            w.writerow([_fmt(v) for v in row])
    return path


def write_table_csv(rows, path):
    """Write a list of dictionaries (sharing keys) as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in (row[c] for c in columns)])
    return path


def read_csv(path):
    """Read a CSV written by this module back into a dict of column -> list."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {name: [] for name in reader.fieldnames}
        for row in reader:
            for k, v in row.items():
                try:
                    cols[k].append(float(v))
                except ValueError:
                    cols[k].append(v)
    return cols


def write_meta(path, **content):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    content.setdefault("provenance", provenance())
    with open(path, "w") as fh:
        json.dump(content, fh, indent=2, default=_json_default)
    return path


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit_plot_data(records, out_dir, name="meta", sweep_rows=None, extra=None):
    """Write one CSV per named record plus a JSON sidecar.

    ``records`` maps curve names to RunRecords. ``sweep_rows``, when given,
    is written as ``sweep.csv`` (axis values, max_concurrence, t_of_max).
    Returns the list of files written.
    """
    out_dir = Path(out_dir)
    written = []
    for curve, record in records.items():
        written.append(write_trajectory_csv(record, out_dir / f"{curve}.csv"))
    if sweep_rows is not None:
        written.append(write_table_csv(sweep_rows, out_dir / "sweep.csv"))
    meta = {
        "curves": {curve: record.to_dict() for curve, record in records.items()},
        **(extra or {}),
    }
    written.append(write_meta(out_dir / f"{name}.json", **meta))
    return written
