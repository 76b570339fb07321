"""File formats: experiment reports (CSV or JSON), increment files and estimate files.

CSV schema, version 1 (one header row, floats written with ``repr`` so they
round-trip exactly):

=====================  ===========================================
file                   columns
=====================  ===========================================
``params.csv``         quantity, mean, sd
``selection.csv``      target, mean_m, sd_m
``mise.csv``           target, mean, sd
``bands_<t>.csv``      x, lower, median, upper, truth
``design.csv``         quantity, value
``estimate_<t>.csv``   x, value
``diagnostics_<t>.csv``  m, norm2, pen, crit, chosen
=====================  ===========================================

Increment files hold one value per line after two header lines
``delta,<value>`` and ``n,<value>``.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..sim import SampleIncrements
from .experiment import ExperimentReport, SampleEstimates

SCHEMA_VERSION = 1


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def emit_report(report: ExperimentReport, fmt: str, out_dir) -> list:
    """Write ``report`` under ``out_dir`` and return the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / "report.json"
        path.write_text(json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n")
        return [path]
    if fmt != "csv":
        raise InputError(f"unknown report format {fmt!r}")
    written = [write_csv(out / "params.csv", ("quantity", "mean", "sd"),
                          ((k, *v) for k, v in report.params.items()))]
    if not report.selection:
        return written
    written.append(write_csv(out / "selection.csv", ("target", "mean_m", "sd_m"),
                              ((k, *v) for k, v in report.selection.items())))
    written.append(write_csv(out / "mise.csv", ("target", "mean", "sd"),
                              ((k, *v) for k, v in report.mise.items())))
    cols = ("x", "lower", "median", "upper", "truth")
    for name, band in report.bands.items():
        written.append(write_csv(out / f"bands_{name}.csv", cols, zip(*(band[c] for c in cols))))
    return written


def read_report_json(path) -> ExperimentReport:
    with Path(path).open() as fh:
        return ExperimentReport.from_dict(json.load(fh))


def write_design(design: dict, path) -> Path:
    return write_csv(Path(path), ("quantity", "value"), design.items())


# -- increments --------------------------------------------------------------------------


def write_increments(sample: SampleIncrements, path) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"delta,{sample.delta!r}\n")
        fh.write(f"n,{sample.n}\n")
        for v in sample.z:
            fh.write(repr(float(v)) + "\n")
    return path


def read_increments(path) -> SampleIncrements:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"increments file not found: {path}")
    lines = path.read_text().splitlines()
    try:
        key_d, delta = lines[0].split(",")
        key_n, n = lines[1].split(",")
        if (key_d.strip(), key_n.strip()) != ("delta", "n"):
            raise ValueError("header must be 'delta,<v>' then 'n,<v>'")
        z = np.array([float(s) for s in lines[2:] if s.strip()])
        n = int(n)
    except (IndexError, ValueError) as exc:
        raise InputError(f"{path}: malformed increments file ({exc})") from exc
    if z.size != n:
        raise InputError(f"{path}: header says n={n} but found {z.size} values")
    return SampleIncrements(z, float(delta))


# -- single-sample estimates ---------------------------------------------------------------


def emit_estimates(est: SampleEstimates, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = est.params
    rows = [("b_hat", p.b_hat)]
    rows += [(f"c_hat_{k}", v) for k, v in p.c_hat.items()]
    rows += [(f"sigma_hat_{r:g}", v) for r, v in p.sigma_hat.items()]
    rows += [(f"m_{t.value}", res.chosen_m) for t, res in est.targets.items()]
    written = [write_csv(out / "params.csv", ("quantity", "value"), rows)]
    for t, res in est.targets.items():
        x = res.estimate.x_grid.points()
        written.append(write_csv(out / f"estimate_{t.value}.csv", ("x", "value"),
                                  zip(x, res.estimate.values)))
        written.append(write_csv(out / f"diagnostics_{t.value}.csv",
                                  ("m", "norm2", "pen", "crit", "chosen"), res.diagnostics.rows()))
    return written
