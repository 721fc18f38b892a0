"""CSV output and simulation-versus-theory comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import TheoryOutOfRangeError
from ..metrics import to_db
from ..theory import steady_state_mse
from .config import ExperimentConfig
from .runner import ExperimentReport, theory_inputs_for

__all__ = ["ComparisonRow", "compare_theory", "emit_csv", "write_comparison", "RATIO_BAND"]

RATIO_BAND = (0.7, 1.4)


def _g(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.10g}"


def _db(values) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return to_db(np.where(np.isnan(values), np.nan, np.maximum(values, 0.0)))


def _params_text(params) -> str:
    return ";".join(f"{k}={_g(v)}" for k, v in params.as_dict().items())


@dataclass(frozen=True)
class ComparisonRow:
    curve: str
    mu: float
    rho: float
    a: float
    b: float
    simulated_mse: float
    predicted_mse: float | None
    ratio: float | None
    p_attract: float | None
    p_attract_hat: float
    flagged: bool
    out_of_range: bool


def compare_theory(cfg: ExperimentConfig, report: ExperimentReport) -> list:
    """One row per LMS-form curve on a GGD system.

    A row is flagged when simulated/predicted MSE falls outside
    ``RATIO_BAND``; rows whose parameters leave the closed form's domain are
    marked ``out_of_range`` and carry no prediction.
    """
    specs = {s.label: s for s in cfg.systems}
    algs = dict(cfg.algorithms)
    rows = []
    for key, name, label in cfg.curve_keys():
        params, spec = algs[name], specs[label]
        inputs = theory_inputs_for(cfg, params, spec)
        if inputs is None:
            continue
        sim = report.steady[key]["mse"][0]
        p_hat = report.steady[key]["attracted"][0] / spec.L
        try:
            pred = steady_state_mse(inputs)
        except TheoryOutOfRangeError:
            rows.append(ComparisonRow(key, inputs.mu, inputs.rho, inputs.a, inputs.b, sim,
                                      None, None, None, p_hat, True, True))
            continue
        ratio = sim / pred.mse if pred.mse > 0 else math.nan
        flagged = not (RATIO_BAND[0] <= ratio <= RATIO_BAND[1])
        rows.append(ComparisonRow(key, inputs.mu, inputs.rho, inputs.a, inputs.b, sim,
                                  pred.mse, ratio, pred.p_attract, p_hat, flagged, False))
    return rows


_COMPARISON_HEADER = ("curve,mu,rho,a,b,simulated_mse,predicted_mse,ratio,p_attract,"
                      "p_attract_hat,flagged,out_of_range")


def write_comparison(rows, path) -> Path:
    path = Path(path)
    lines = [_COMPARISON_HEADER]
    for r in rows:
        lines.append(",".join([r.curve] + [_g(v) for v in (
            r.mu, r.rho, r.a, r.b, r.simulated_mse, r.predicted_mse, r.ratio, r.p_attract,
            r.p_attract_hat, r.flagged, r.out_of_range)]))
    _write(path, lines)
    return path


def _write(path: Path, lines):
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


_SUMMARY_HEADER = ("curve,algorithm,system,params,trials_used,diverged,steady_msd,"
                   "steady_msd_db,steady_msd_std,steady_nmsd_db,steady_mse,convergence_iter,"
                   "theory_mse,theory_p_attract")


def emit_csv(report: ExperimentReport, directory) -> list:
    """Write ``<name>.csv`` (dB learning curves), ``summary.csv`` and,
    when any curve has a closed-form counterpart, ``theory.csv``.
    """
    cfg = report.config
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {directory}: {exc}") from exc

    keys = [k for k, _, _ in cfg.curve_keys()]
    header = f"# config-hash={report.config_hash} trials={cfg.trials} record_every={cfg.record_every}"
    if cfg.note:
        header += f" note={cfg.note.replace(' ', '_')}"
    lines = [header, ",".join(["iter"] + [f"{k}_msd_db" for k in keys])]
    dbs = [_db(report.curves[k].msd) for k in keys]
    iters = report.curves[keys[0]].iters
    for j, it in enumerate(iters):
        lines.append(",".join([str(int(it))] + [_g(col[j]) for col in dbs]))
    data_path = directory / f"{cfg.name}.csv"
    _write(data_path, lines)

    algs = dict(cfg.algorithms)
    rows = [_SUMMARY_HEADER]
    for key, name, label in cfg.curve_keys():
        st = report.steady[key]
        theory = report.theory.get(key)
        msd_mean, msd_std = st["msd"]
        nmsd = st["nmsd"]
        rows.append(",".join([
            key, name, label, _params_text(algs[name]),
            _g(report.curves[key].trials), _g(report.diverged[key]),
            _g(msd_mean), _g(_db(np.array([msd_mean]))[0]), _g(msd_std),
            _g(_db(np.array([nmsd]))[0]), _g(st["mse"][0]),
            _g(report.convergence_iters[key]),
            _g(theory.mse if theory else None), _g(theory.p_attract if theory else None),
        ]))
    summary_path = directory / "summary.csv"
    _write(summary_path, rows)
    files = [data_path, summary_path]

    comparison = compare_theory(cfg, report)
    if comparison:
        files.append(write_comparison(comparison, directory / "theory.csv"))
    report.files = files
    return files
