"""Unknown impulse responses and generalized Gaussian machinery.

Four system families are generated here: exact sparse (K non-zero
Gaussian taps), noisy sparse (exact sparse plus a white floor on every
tap), near sparse drawn from a generalized Gaussian distribution (GGD),
and Gaussian non-sparse (the GGD with shape 2).

The GGD with location ``mean``, standard deviation ``sigma_g`` and shape
``beta`` has density

    f(x) = beta / (2 lam Gamma(1/beta)) * exp(-(|x - mean| / lam)**beta)

with scale ``lam = sigma_g * sqrt(Gamma(1/beta) / Gamma(3/beta))``. Its
distribution function is written with the regularized lower incomplete
gamma function, evaluated below by series / continued fraction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, DomainError
from .rng import check_seed, make_rng

__all__ = [
    "Family",
    "GgdParams",
    "SystemModel",
    "SystemSpec",
    "gamma_fn",
    "lower_incomplete_gamma",
    "regularized_lower_gamma",
    "ggd_pdf",
    "ggd_cdf",
    "sample_ggd",
    "gen_exact_sparse",
    "gen_noisy_sparse",
    "gen_ggd_system",
    "gen_gaussian_system",
    "read_system_csv",
    "write_system_csv",
]

_TERM_TOL = 1e-14
_MAX_ITER = 10_000
_TINY = 1e-300


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def gamma_fn(s: float) -> float:
    """Complete gamma function (stdlib, correctly rounded to ~1 ulp)."""
    return math.gamma(s)


def _check_gamma_args(s, x):
    if not s > 0:
        raise DomainError(f"incomplete gamma needs s > 0, got {s}")
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError("incomplete gamma needs x >= 0")
    return x


def _series(s: float, x: np.ndarray, log_prefactor: np.ndarray) -> np.ndarray:
    # P(s, x) = x^s e^-x / Gamma(s) * sum_n x^n / (s (s+1) ... (s+n))
    term = np.full_like(x, 1.0 / s)
    total = term.copy()
    ap = np.full_like(x, s)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ap[active] += 1.0
        term[active] *= x[active] / ap[active]
        total[active] += term[active]
        active &= np.abs(term) >= np.abs(total) * _TERM_TOL
        if not active.any():
            return total * np.exp(log_prefactor)
    raise ConvergenceError(f"incomplete gamma series did not converge (s={s})")


def _continued_fraction(s: float, x: np.ndarray, log_prefactor: np.ndarray) -> np.ndarray:
    # Q(s, x) by the modified Lentz evaluation of the Legendre fraction.
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / np.where(np.abs(b) < _TINY, _TINY, b)
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b = b + 2.0
        d_new = an * d + b
        d_new = np.where(np.abs(d_new) < _TINY, _TINY, d_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < _TINY, _TINY, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _TERM_TOL
        if not active.any():
            return h * np.exp(log_prefactor)
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (s={s})")


def regularized_lower_gamma(s: float, x):
    """P(s, x) = Theta(s, x) / Gamma(s), for scalar or array ``x``.

    Uses the power series for ``x < s + 1`` and the continued fraction for
    the upper function otherwise. ``x = inf`` gives exactly 1.
    """
    xa = _check_gamma_args(s, x)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.zeros_like(xa)

    finite = np.isfinite(xa)
    out[~finite] = 1.0
    pos = finite & (xa > 0)
    lgs = math.lgamma(s)

    low = pos & (xa < s + 1.0)
    if low.any():
        xs = xa[low]
        out[low] = _series(s, xs, s * np.log(xs) - xs - lgs)
    high = pos & ~low
    if high.any():
        xs = xa[high]
        out[high] = 1.0 - _continued_fraction(s, xs, s * np.log(xs) - xs - lgs)

    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def lower_incomplete_gamma(s: float, x):
    """Theta(s, x) = integral_0^x t^(s-1) e^-t dt."""
    p = regularized_lower_gamma(s, x)
    return p * gamma_fn(s)


# ---------------------------------------------------------------------------
# Generalized Gaussian distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GgdParams:
    """Location, standard deviation and shape of a generalized Gaussian."""

    mean: float = 0.0
    sigma_g: float = 1.0
    beta: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.mean) and self.sigma_g > 0 and self.beta > 0
                and math.isfinite(self.sigma_g) and math.isfinite(self.beta)):
            raise DomainError(f"invalid GGD parameters {self}")

    @property
    def log_lam(self) -> float:
        return math.log(self.sigma_g) + 0.5 * (
            math.lgamma(1.0 / self.beta) - math.lgamma(3.0 / self.beta))

    @property
    def lam(self) -> float:
        """Scale parameter matching the requested standard deviation."""
        return math.exp(self.log_lam)


def _scaled_power(x, p: GgdParams):
    """(|x - mean| / lam)**beta evaluated in the log domain."""
    r = np.abs(np.asarray(x, dtype=float) - p.mean)
    with np.errstate(divide="ignore"):
        return np.exp(p.beta * (np.log(r) - p.log_lam))


def ggd_pdf(x, p: GgdParams):
    log_norm = math.log(p.beta) - math.log(2.0) - p.log_lam - math.lgamma(1.0 / p.beta)
    out = np.exp(log_norm - _scaled_power(x, p))
    return float(out) if np.ndim(out) == 0 else out


def ggd_cdf(x, p: GgdParams):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)):
        raise DomainError("ggd_cdf is undefined at NaN")
    half = 0.5 * regularized_lower_gamma(1.0 / p.beta, _scaled_power(x, p))
    out = 0.5 + np.sign(x - p.mean) * half
    return float(out) if np.ndim(out) == 0 else out


def _draw_ggd(rng: np.random.Generator, n: int, p: GgdParams) -> np.ndarray:
    # |X - mean| = lam * G**(1/beta) with G ~ Gamma(1/beta, 1); random sign.
    g = rng.standard_gamma(1.0 / p.beta, size=n)
    sign = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    with np.errstate(divide="ignore"):
        mag = np.exp(p.log_lam + np.log(g) / p.beta)
    return p.mean + sign * mag


def sample_ggd(seed: int, n: int, p: GgdParams) -> np.ndarray:
    """``n`` i.i.d. draws from the GGD, reproducible for a given seed."""
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    return _draw_ggd(make_rng(seed), int(n), p)


# ---------------------------------------------------------------------------
# System models
# ---------------------------------------------------------------------------

class Family(str, enum.Enum):
    EXACT_SPARSE = "exact_sparse"
    NOISY_SPARSE = "noisy_sparse"
    GGD = "ggd"
    GAUSSIAN = "gaussian"


@dataclass
class SystemModel:
    """An impulse response ``taps`` of length L with its provenance."""

    taps: np.ndarray
    family: Family
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=float)
        if self.taps.ndim != 1 or self.taps.size < 1:
            raise ValueError("a system needs at least one tap")
        self.family = Family(self.family)
        self.seed = check_seed(self.seed)

    @property
    def L(self) -> int:
        return self.taps.size

    @property
    def energy(self) -> float:
        return float(self.taps @ self.taps)


def _fisher_yates_positions(rng: np.random.Generator, L: int, K: int) -> np.ndarray:
    idx = np.arange(L)
    for i in range(K):
        j = i + int(rng.integers(L - i))
        idx[i], idx[j] = idx[j], idx[i]
    return idx[:K]


def _draw_exact_sparse(rng, L: int, K: int, amp_sigma: float) -> np.ndarray:
    if not 1 <= K <= L:
        raise ValueError(f"need 1 <= K <= L, got K={K}, L={L}")
    if not amp_sigma > 0:
        raise ValueError("amp_sigma must be positive")
    pos = _fisher_yates_positions(rng, L, K)
    taps = np.zeros(L)
    taps[pos] = amp_sigma * rng.standard_normal(K)
    return taps


def gen_exact_sparse(seed: int, L: int, K: int, amp_sigma: float = 1.0) -> SystemModel:
    taps = _draw_exact_sparse(make_rng(seed), L, K, amp_sigma)
    return SystemModel(taps, Family.EXACT_SPARSE, {"K": K, "amp_sigma": amp_sigma}, seed)


def gen_noisy_sparse(seed: int, L: int, K: int, amp_sigma: float = 1.0,
                     floor_var: float = 1e-4) -> SystemModel:
    """Exact sparse taps (same seed) plus N(0, floor_var) on every tap."""
    if not floor_var > 0:
        raise ValueError("floor_var must be positive")
    rng = make_rng(seed)
    taps = _draw_exact_sparse(rng, L, K, amp_sigma)
    taps = taps + math.sqrt(floor_var) * rng.standard_normal(L)
    params = {"K": K, "amp_sigma": amp_sigma, "floor_var": floor_var}
    return SystemModel(taps, Family.NOISY_SPARSE, params, seed)


def gen_ggd_system(seed: int, L: int, p: GgdParams) -> SystemModel:
    if L < 1:
        raise ValueError("L must be >= 1")
    params = {"mean": p.mean, "sigma_g": p.sigma_g, "beta": p.beta}
    return SystemModel(sample_ggd(seed, L, p), Family.GGD, params, seed)


def gen_gaussian_system(seed: int, L: int, sigma_g: float = 1.0) -> SystemModel:
    model = gen_ggd_system(seed, L, GgdParams(0.0, sigma_g, 2.0))
    return SystemModel(model.taps, Family.GAUSSIAN, {"sigma_g": sigma_g}, seed)


@dataclass(frozen=True)
class SystemSpec:
    """Recipe for drawing a system; ``build`` turns it into taps for a seed."""

    family: Family
    L: int = 100
    K: int = 8
    amp_sigma: float = 1.0
    floor_var: float = 1e-4
    mean: float = 0.0
    sigma_g: float = 1.0
    beta: float = 2.0
    label: str = "main"

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.family in (Family.GGD, Family.GAUSSIAN):
            self.ggd  # validates

    @property
    def ggd(self) -> GgdParams | None:
        if self.family is Family.GGD:
            return GgdParams(self.mean, self.sigma_g, self.beta)
        if self.family is Family.GAUSSIAN:
            return GgdParams(0.0, self.sigma_g, 2.0)
        return None

    def param_items(self) -> dict:
        """The fields that matter for this family, in a fixed order."""
        if self.family is Family.EXACT_SPARSE:
            return {"L": self.L, "K": self.K, "amp_sigma": self.amp_sigma}
        if self.family is Family.NOISY_SPARSE:
            return {"L": self.L, "K": self.K, "amp_sigma": self.amp_sigma,
                    "floor_var": self.floor_var}
        if self.family is Family.GGD:
            return {"L": self.L, "mean": self.mean, "sigma_g": self.sigma_g,
                    "beta": self.beta}
        return {"L": self.L, "sigma_g": self.sigma_g}

    def build(self, seed: int) -> SystemModel:
        if self.family is Family.EXACT_SPARSE:
            return gen_exact_sparse(seed, self.L, self.K, self.amp_sigma)
        if self.family is Family.NOISY_SPARSE:
            return gen_noisy_sparse(seed, self.L, self.K, self.amp_sigma, self.floor_var)
        if self.family is Family.GGD:
            return gen_ggd_system(seed, self.L, self.ggd)
        return gen_gaussian_system(seed, self.L, self.sigma_g)


# ---------------------------------------------------------------------------
# CSV round trip
# ---------------------------------------------------------------------------

def write_system_csv(model: SystemModel, path) -> Path:
    """Header comment with provenance, then one tap per line (17 digits)."""
    path = Path(path)
    head = [f"family={model.family.value}", f"L={model.L}", f"seed={model.seed}"]
    head += [f"{k}={v!r}" for k, v in model.params.items()]
    lines = ["# " + " ".join(head)]
    lines += [f"{t:.17e}" for t in model.taps]
    path.write_text("\n".join(lines) + "\n")
    return path


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_system_csv(path) -> SystemModel:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing '# family=...' header")
    meta = {}
    for item in lines[0][1:].split():
        key, _, value = item.partition("=")
        if not _:
            raise ValueError(f"{path}: malformed header item {item!r}")
        meta[key] = value
    try:
        family = Family(meta.pop("family"))
        L = int(meta.pop("L"))
        seed = int(meta.pop("seed"))
    except KeyError as exc:
        raise ValueError(f"{path}: header lacks {exc}") from None
    taps = np.array([float(s) for s in lines[1:] if s.strip()])
    if taps.size != L:
        raise ValueError(f"{path}: header says L={L} but found {taps.size} taps")
    params = {k: _parse_value(v) for k, v in meta.items()}
    return SystemModel(taps, family, params, seed)
