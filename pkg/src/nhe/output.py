"""CSV / JSON writers.  Floats carry 12 significant digits."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, scenario_to_dict
from .entanglement import pairs


def fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".12g")


def _json_number(x):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(format(float(x), ".12g"))


def trajectory_rows(traj):
    dim = traj.amplitudes.shape[1]
    header = (["t_us"] + [f"re_a{k}" for k in range(1, dim + 1)]
              + [f"im_a{k}" for k in range(1, dim + 1)] + ["raw_norm"])
    rows = []
    for t, amps, norm in zip(traj.times, traj.amplitudes, traj.raw_norms):
        rows.append([t, *amps.real, *amps.imag, norm])
    return header, rows


def report_rows(result, reports=None):
    """Header and rows of the measure table for a sweep (or its baseline)."""
    reports = result.reports if reports is None else reports
    n = result.scenario.n
    axis_cols = ["J12", "J23"] if result.axis == "J12xJ23" else [result.axis]
    measure_cols = [f"C{j}{k}" for j, k in pairs(n)] + (["tau"] if n == 3 else []) \
        + [f"S{j}" for j in range(1, n + 1)]
    header = axis_cols + measure_cols + ["class"]
    sweep = result.axis != "t_us"
    if sweep:
        header.append("raw_norm")
        if result.annotations:
            header.append("phase")
    rows = []
    for i, rep in enumerate(reports):
        axis_vals = list(np.atleast_1d(result.values[i]))
        if rep is None:
            row = axis_vals + [None] * len(measure_cols) + ["TERMINATED"]
        else:
            row = axis_vals + [rep.C(j, k) for j, k in pairs(n)]
            if n == 3:
                row.append(rep.tau)
            row += list(rep.entropies) + [rep.classification.value]
        if sweep:
            row.append(result.raw_norms[i] if reports is result.reports else None)
            if result.annotations:
                row.append(result.annotations[i])
        rows.append(row)
    return header, rows


def _cell(x):
    return x if isinstance(x, str) else fmt(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def to_json(header, rows) -> str:
    records = [{h: (x if isinstance(x, str) else _json_number(x)) for h, x in zip(header, row)}
               for row in rows]
    return json.dumps(records, indent=1) + "\n"


def write_table(path: Path, header, rows, format: str = "csv") -> Path:
    path = path.with_suffix("." + format)
    path.write_text(to_csv(header, rows) if format == "csv" else to_json(header, rows))
    return path


def write_meta(directory: Path, result, cfg: RunConfig, files) -> Path:
    meta = {
        "tool": "nhe",
        "version": __version__,
        "scenario": scenario_to_dict(result.scenario),
        "run": cfg.to_dict(),
        "result": {k: v for k, v in result.metadata.items() if k not in ("version",)},
        "failures": [[_json_number(a) if not isinstance(a, int) else a, msg] for a, msg in result.failures],
        "files": sorted(p.name for p in files),
    }
    path = directory / "meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def write_result(result, cfg: RunConfig, root: Path) -> list[Path]:
    """Write every table of ``result`` under ``root/<scenario>/``."""
    directory = root / result.scenario.name
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    if result.trajectory is not None:
        files.append(write_table(directory / "trajectory", *trajectory_rows(result.trajectory), cfg.format))
        files.append(write_table(directory / "report", *report_rows(result), cfg.format))
        if result.baseline is not None:
            files.append(write_table(directory / "baseline_report", *report_rows(result, result.baseline),
                                     cfg.format))
    else:
        files.append(write_table(directory / "sweep", *report_rows(result), cfg.format))
        if result.baseline is not None:
            files.append(write_table(directory / "baseline_sweep", *report_rows(result, result.baseline),
                                     cfg.format))
    files.append(write_meta(directory, result, cfg, files))
    return files
