"""Excitation, observation noise and the desired response d(n)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError
from .rng import check_seed, make_rng

__all__ = ["InputKind", "InputSpec", "NoiseSpec", "gen_input", "gen_noise", "desired_output"]


class InputKind(str, enum.Enum):
    WHITE = "white"
    AR1 = "ar1"


@dataclass(frozen=True)
class InputSpec:
    """Input process. ``ar_coeff`` is used only for ``AR1``."""

    kind: InputKind = InputKind.WHITE
    power: float = 1.0
    ar_coeff: float = 0.8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", InputKind(self.kind))
        if not (self.power > 0 and math.isfinite(self.power)):
            raise DomainError(f"input power must be positive, got {self.power}")
        if not abs(self.ar_coeff) < 1:
            raise DomainError(f"AR(1) coefficient must satisfy |a| < 1, got {self.ar_coeff}")
        check_seed(self.seed)


@dataclass(frozen=True)
class NoiseSpec:
    variance: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if not (self.variance >= 0 and math.isfinite(self.variance)):
            raise DomainError(f"noise variance must be >= 0, got {self.variance}")
        check_seed(self.seed)


def gen_input(spec: InputSpec, n: int) -> np.ndarray:
    """White N(0, power), or an AR(1) path rescaled to empirical power ``power``.

    The AR(1) recursion starts from x(-1) = 0 with no burn-in; the rescaling
    makes the realized mean square equal ``power`` for this realization.
    """
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    rng = make_rng(spec.seed)
    y = rng.standard_normal(int(n))
    if spec.kind is InputKind.WHITE:
        return math.sqrt(spec.power) * y
    if n == 0:
        return y
    x = lfilter([1.0], [1.0, -spec.ar_coeff], y)
    return x * math.sqrt(spec.power / np.mean(x * x))


def gen_noise(spec: NoiseSpec, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    if spec.variance == 0:
        return np.zeros(int(n))
    return math.sqrt(spec.variance) * make_rng(spec.seed).standard_normal(int(n))


def desired_output(h, x, v) -> np.ndarray:
    """d(n) = sum_i h_i x(n - i) + v(n), with x(k) = 0 for k < 0.

    ``h`` may be a ``SystemModel`` or a plain tap vector.
    """
    taps = np.asarray(getattr(h, "taps", h), dtype=float)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ValueError(f"input and noise lengths differ: {x.shape} vs {v.shape}")
    if x.size == 0:
        return np.zeros(0)
    return lfilter(taps, [1.0], x) + v
