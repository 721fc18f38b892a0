"""Learning-curve assembly: misalignment, ensemble averages, steady state."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LearningCurve",
    "msd",
    "average_curves",
    "steady_state_estimate",
    "to_db",
    "first_crossing",
]

DB_FLOOR = 1e-300


@dataclass
class LearningCurve:
    """Ensemble-averaged learning curve.

    ``msd`` is the linear-scale mean of ||w(n) - h||^2 over trials and
    ``msd_stderr`` its pointwise standard error. ``mse_hat`` holds the mean
    of e^2(n) over the same records, when available. ``iters`` are the
    update counts the records were taken at, and ``attracted`` the mean
    number of taps inside the attraction window.

    ``trials == 0`` is allowed only for an all-NaN curve (every trial
    diverged).
    """

    msd: np.ndarray
    trials: int
    record_every: int = 1
    seeds: list = field(default_factory=list)
    mse_hat: np.ndarray | None = None
    msd_stderr: np.ndarray | None = None
    iters: np.ndarray | None = None
    attracted: np.ndarray | None = None

    def __post_init__(self):
        self.msd = np.asarray(self.msd, dtype=float)
        if self.trials < 1 and not (self.trials == 0 and np.all(np.isnan(self.msd))):
            raise ValueError("a learning curve needs at least one trial")
        if np.any(self.msd < 0):
            raise ValueError("MSD entries must be non-negative")
        if self.iters is None:
            self.iters = self.record_every * np.arange(1, self.msd.size + 1)
        for name in ("mse_hat", "msd_stderr", "iters", "attracted"):
            arr = getattr(self, name)
            if arr is not None and len(arr) != self.msd.size:
                raise ValueError(f"{name} length {len(arr)} != msd length {self.msd.size}")

    def __len__(self):
        return self.msd.size

    @property
    def msd_db(self) -> np.ndarray:
        return to_db(self.msd)


def msd(w, h) -> float:
    """Squared misalignment ||w - h||^2."""
    w = np.asarray(getattr(w, "taps", w), dtype=float)
    h = np.asarray(getattr(h, "taps", h), dtype=float)
    if w.shape != h.shape:
        raise ValueError(f"length mismatch: {w.shape} vs {h.shape}")
    dev = w - h
    return float(dev @ dev)


def _stack(traces, what):
    if len(traces) == 0:
        raise ValueError(f"need at least one {what} trace")
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"{what} traces have unequal lengths {sorted(lengths)}")
    return np.vstack([np.asarray(t, dtype=float) for t in traces])


def average_curves(traces, seeds=None, mse_traces=None, record_every: int = 1,
                   iters=None) -> LearningCurve:
    """Pointwise mean of equal-length MSD traces (one per trial)."""
    stack = _stack(traces, "MSD")
    n = stack.shape[0]
    mean = stack.mean(axis=0)
    if n > 1:
        stderr = stack.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros(stack.shape[1])
    mse = None
    if mse_traces is not None:
        mse_stack = _stack(mse_traces, "MSE")
        if mse_stack.shape != stack.shape:
            raise ValueError("MSE and MSD traces disagree in shape")
        mse = mse_stack.mean(axis=0)
    return LearningCurve(mean, n, record_every, list(seeds or []), mse, stderr, iters)


def _tail(values: np.ndarray, tail_fraction: float) -> np.ndarray:
    if not 0 < tail_fraction <= 1:
        raise ValueError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    if values.size == 0:
        raise ValueError("cannot take a steady state of an empty curve")
    k = math.ceil(tail_fraction * values.size)
    return values[-k:]


def steady_state_estimate(curve, tail_fraction: float = 0.1, which: str = "msd"):
    """(mean, std) over the last ceil(tail_fraction * len) records.

    ``curve`` is a ``LearningCurve`` or a plain vector; ``which`` selects
    ``"msd"`` or ``"mse"`` from a curve.
    """
    if isinstance(curve, LearningCurve):
        values = curve.msd if which == "msd" else curve.mse_hat
        if values is None:
            raise ValueError(f"curve carries no {which} data")
    else:
        values = np.asarray(curve, dtype=float)
    tail = _tail(values, tail_fraction)
    return float(tail.mean()), float(tail.std())


def to_db(x) -> np.ndarray:
    """10 log10(x). Zeros are clamped to 1e-300 with a RuntimeWarning."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("dB conversion of a negative power")
    if np.any(x == 0):
        warnings.warn("zero power clamped to 1e-300 before dB conversion", RuntimeWarning,
                      stacklevel=2)
        x = np.maximum(x, DB_FLOOR)
    return 10.0 * np.log10(x)


def first_crossing(curve, level_db: float, iters=None):
    """First iteration at which the curve in dB is at or below ``level_db``.

    Returns None if it never gets there.
    """
    if isinstance(curve, LearningCurve):
        iters = curve.iters if iters is None else iters
        values = curve.msd
    else:
        values = np.asarray(curve, dtype=float)
        iters = np.arange(1, values.size + 1) if iters is None else np.asarray(iters)
    if values.size == 0:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        db = to_db(np.where(np.isnan(values), np.inf, values))
    hits = np.flatnonzero(db <= level_db)
    return int(iters[hits[0]]) if hits.size else None
