"""Seeded Monte Carlo trials over an ``ExperimentConfig``."""

from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from ..errors import NumericOverflowError, TheoryOutOfRangeError
from ..filters import DwzaLms, Lms, init_state, run
from ..metrics import LearningCurve, average_curves, first_crossing, steady_state_estimate
from ..rng import derive_seed
from ..signals import desired_output, gen_input, gen_noise
from ..theory import TheoryInputs, steady_state_mse
from .config import ExperimentConfig, config_hash

__all__ = ["ExperimentReport", "TrialResult", "run_trial", "run_experiment", "theory_inputs_for",
           "MAX_DIVERGED_FRACTION"]

log = logging.getLogger(__name__)

MAX_DIVERGED_FRACTION = 0.10


@dataclass
class TrialResult:
    trial: int
    seeds: dict
    msd: dict
    err2: dict
    attracted: dict
    energy: dict
    checksums: dict


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    config_hash: str
    curves: dict = field(default_factory=dict)
    theory: dict = field(default_factory=dict)
    convergence_iters: dict = field(default_factory=dict)
    steady: dict = field(default_factory=dict)
    diverged: dict = field(default_factory=dict)
    checksums: dict = field(default_factory=dict)
    files: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """False when some curve lost more than 10% of its trials to divergence."""
        limit = MAX_DIVERGED_FRACTION * self.config.trials
        return all(n <= limit for n in self.diverged.values())


def _checksum(*arrays) -> str:
    h = hashlib.blake2b(digest_size=8)
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype=float).tobytes())
    return h.hexdigest()


def _segments(cfg: ExperimentConfig):
    bounds = (0,) + cfg.regenerate_at + (cfg.iterations,)
    return list(zip(bounds[:-1], bounds[1:]))


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialResult:
    """One realization of input, noise and systems, shared by all algorithms."""
    n = cfg.iterations
    seeds = {
        "input": derive_seed(cfg.base_seed, trial, "input"),
        "noise": derive_seed(cfg.base_seed, trial, "noise"),
    }
    x = gen_input(replace(cfg.input, seed=seeds["input"]), n)
    v = gen_noise(replace(cfg.noise, seed=seeds["noise"]), n)
    segments = _segments(cfg)

    out = TrialResult(trial, seeds, {}, {}, {}, {}, {})
    for spec in cfg.systems:
        models, d = [], np.empty(n)
        for k, (s0, s1) in enumerate(segments):
            tag = f"system/{spec.label}/{k}"
            seeds[tag] = derive_seed(cfg.base_seed, trial, tag)
            model = spec.build(seeds[tag])
            models.append(model)
            d[s0:s1] = desired_output(model, x[:s1], v[:s1])[s0:s1]

        for name, params in cfg.algorithms:
            key = f"{name}@{spec.label}" if len(cfg.systems) > 1 else name
            state = init_state(spec.L)
            fed = []
            traces = []
            try:
                for model, (s0, s1) in zip(models, segments):
                    xs, ds = x[s0:s1], d[s0:s1]
                    fed += [xs, ds, model.taps]
                    traces.append(run(state, params, xs, ds, model, cfg.record_every))
            except NumericOverflowError as exc:
                log.info("trial %d, %s diverged: %s", trial, key, exc)
                out.msd[key] = None
                out.checksums[key] = _checksum(*fed)
                continue
            out.checksums[key] = _checksum(*fed)
            if traces:
                out.msd[key] = np.concatenate([t.msd for t in traces])
                out.err2[key] = np.concatenate([t.err2 for t in traces])
                out.attracted[key] = np.concatenate([t.attracted for t in traces])
            else:
                out.msd[key] = out.err2[key] = out.attracted[key] = np.empty(0)
            out.energy[key] = models[-1].energy if models else float("nan")
    return out


def theory_inputs_for(cfg: ExperimentConfig, params, spec) -> TheoryInputs | None:
    """Closed-form inputs for LMS-form filters on GGD systems with white input."""
    ggd = spec.ggd
    if ggd is None or ggd.mean != 0 or cfg.input.kind.value != "white":
        return None
    if isinstance(params, DwzaLms):
        rho, a, b = params.rho, params.a, params.b
    elif isinstance(params, Lms):
        rho, a, b = 0.0, 0.0, math.inf
    else:
        return None
    return TheoryInputs(mu=params.mu, rho=rho, a=a, b=b, L=spec.L, sigma_x2=cfg.input.power,
                        sigma_v2=cfg.noise.variance, ggd=ggd)


def _nan_curve(cfg, n_rec) -> LearningCurve:
    nan = np.full(n_rec, np.nan)
    return LearningCurve(nan, trials=0, record_every=cfg.record_every, mse_hat=nan.copy(),
                         msd_stderr=nan.copy(), attracted=nan.copy())


def _tail_or_nan(values, frac):
    if values is None or len(values) == 0 or np.all(np.isnan(values)):
        return (float("nan"), float("nan"))
    return steady_state_estimate(values, frac)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, out_dir=None,
                   write: bool = True) -> ExperimentReport:
    """Run every trial, average per curve and (optionally) write CSV files.

    Trials are independent; with ``workers > 1`` they run in a process
    pool and are merged in trial order, so the output does not depend on
    the worker count. Diverged trials are excluded from the averages and
    counted in ``report.diverged``.
    """
    runner = partial(run_trial, cfg)
    if workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(runner, range(cfg.trials)))
    else:
        results = [runner(t) for t in range(cfg.trials)]
    results.sort(key=lambda r: r.trial)

    report = ExperimentReport(cfg, config_hash(cfg))
    n_rec = cfg.iterations // cfg.record_every
    iters = cfg.record_every * np.arange(1, n_rec + 1)
    specs = {s.label: s for s in cfg.systems}
    algs = dict(cfg.algorithms)

    for key, name, label in cfg.curve_keys():
        good = [r for r in results if r.msd[key] is not None]
        report.diverged[key] = len(results) - len(good)
        report.checksums[key] = [r.checksums[key] for r in results]
        if good:
            curve = average_curves([r.msd[key] for r in good],
                                   seeds=[r.seeds["input"] for r in good],
                                   mse_traces=[r.err2[key] for r in good],
                                   record_every=cfg.record_every, iters=iters)
            curve.attracted = np.mean(np.vstack([r.attracted[key] for r in good]), axis=0)
        else:
            curve = _nan_curve(cfg, n_rec)
        report.curves[key] = curve
        report.convergence_iters[key] = first_crossing(curve, cfg.target_db)

        frac = cfg.tail_fraction
        nmsd = [steady_state_estimate(r.msd[key], frac)[0] / r.energy[key]
                for r in good if len(r.msd[key]) and r.energy[key] > 0]
        report.steady[key] = {
            "msd": _tail_or_nan(curve.msd, frac),
            "mse": _tail_or_nan(curve.mse_hat, frac),
            "attracted": _tail_or_nan(curve.attracted, frac),
            "nmsd": float(np.mean(nmsd)) if nmsd else float("nan"),
        }

        inputs = theory_inputs_for(cfg, algs[name], specs[label])
        if inputs is not None:
            try:
                report.theory[key] = steady_state_mse(inputs)
            except TheoryOutOfRangeError as exc:
                log.info("%s: no closed-form prediction (%s)", key, exc)

    if write:
        from .report import emit_csv

        emit_csv(report, out_dir if out_dir is not None else cfg.output_dir)
    return report
