"""Closed-form predictions for DWZA-LMS with white Gaussian input.

Steady-state taps are modeled as following the system's generalized
Gaussian distribution, so the probability that a tap sits in the
attraction window, ``P_A``, follows from the GGD distribution function.
With ``q = rho^2 P_A L (2 / (mu sx2) - 1)`` the steady-state mean square
error is

    MSE = mu sv2 [2 - mu sx2 (L+2)] + L mu^2 sx2 sv2
          ---------------------------------------------
              2 mu - mu^2 sx2 (L + 2) - q

which collapses to the LMS value ``(2 - 2 mu sx2) sv2 / (2 - mu sx2 (L+2))``
at ``rho = 0``. The mean square recursion is stable iff
``0 < mu < 2 / ((L + 2) sx2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import TheoryOutOfRangeError
from .systems import GgdParams, regularized_lower_gamma

__all__ = [
    "TheoryInputs",
    "TheoryPrediction",
    "stability_bound",
    "attraction_probability",
    "lms_mse",
    "attraction_load",
    "rho_regime_check",
    "steady_state_mse",
    "REGIME_FACTOR",
]

# "much less than" in the small-rho regime check, as a dominance ratio.
REGIME_FACTOR = 0.01


@dataclass(frozen=True)
class TheoryInputs:
    mu: float
    rho: float
    a: float
    b: float
    L: int
    sigma_x2: float = 1.0
    sigma_v2: float = 1e-4
    ggd: GgdParams = field(default_factory=GgdParams)

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"step size must be positive, got {self.mu}")
        if not self.rho >= 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if not 0 <= self.a < self.b:
            raise ValueError(f"window needs 0 <= a < b, got a={self.a}, b={self.b}")
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if not self.sigma_x2 > 0:
            raise ValueError("input power must be positive")
        if not self.sigma_v2 >= 0:
            raise ValueError("noise power must be >= 0")


@dataclass(frozen=True)
class TheoryPrediction:
    mu_max: float
    p_attract: float
    mse: float
    mse_lms: float
    regime_ok: bool
    excess_msd: float

    def as_dict(self) -> dict:
        return asdict(self)


def stability_bound(L: int, sigma_x2: float) -> float:
    """Largest step size (exclusive) for mean-square stability."""
    if L < 1 or not sigma_x2 > 0:
        raise ValueError(f"need L >= 1 and sigma_x2 > 0, got L={L}, sigma_x2={sigma_x2}")
    return 2.0 / ((L + 2) * sigma_x2)


def attraction_probability(a: float, b: float, ggd: GgdParams) -> float:
    """P(a < |w| <= b) for a zero-mean GGD tap."""
    if not 0 <= a < b:
        raise ValueError(f"window needs 0 <= a < b, got a={a}, b={b}")
    if ggd.mean != 0:
        raise ValueError("attraction probability assumes a zero-mean GGD")

    def upper(t):
        if t == 0:
            return 0.0
        if math.isinf(t):
            return 1.0
        z = math.exp(ggd.beta * (math.log(t) - ggd.log_lam))
        return regularized_lower_gamma(1.0 / ggd.beta, z)

    return min(1.0, max(0.0, upper(b) - upper(a)))


def _check_mu(mu, L, sigma_x2):
    mu_max = stability_bound(L, sigma_x2)
    if not 0 < mu < mu_max:
        raise TheoryOutOfRangeError(f"mu={mu} outside the stable range (0, {mu_max})")
    return mu_max


def lms_mse(mu: float, L: int, sigma_x2: float, sigma_v2: float) -> float:
    _check_mu(mu, L, sigma_x2)
    return (2.0 - 2.0 * mu * sigma_x2) * sigma_v2 / (2.0 - mu * sigma_x2 * (L + 2))


def attraction_load(mu, rho, p_attract, L, sigma_x2) -> float:
    """rho^2 P_A L (2/(mu sx2) - 1), the attractor's share of the denominator."""
    return rho * rho * p_attract * L * (2.0 / (mu * sigma_x2) - 1.0)


def rho_regime_check(mu, rho, p_attract, L, sigma_x2) -> bool:
    """True when the attractor term is negligible next to the LMS denominator."""
    base = 2.0 * mu - mu * mu * sigma_x2 * (L + 2)
    return abs(attraction_load(mu, rho, p_attract, L, sigma_x2)) < REGIME_FACTOR * abs(base)


def steady_state_mse(t: TheoryInputs) -> TheoryPrediction:
    """Stability bound, P_A, steady-state MSE and excess MSD for ``t``.

    Raises ``TheoryOutOfRangeError`` when mu is outside the stable range
    or the MSE denominator is not positive (the formula predicts no
    finite steady state).
    """
    mu, sx2, sv2, L = t.mu, t.sigma_x2, t.sigma_v2, t.L
    mu_max = _check_mu(mu, L, sx2)
    p_a = attraction_probability(t.a, t.b, t.ggd)
    load = attraction_load(mu, t.rho, p_a, L, sx2)

    # Numerator and denominator are both divided by mu so rho = 0 reproduces
    # the LMS expression term for term.
    core = 2.0 - mu * sx2 * (L + 2)
    denom = core - load / mu
    if not denom > 0:
        raise TheoryOutOfRangeError(
            f"MSE denominator {denom * mu:.3e} <= 0 at mu={mu}, rho={t.rho}, P_A={p_a:.4f}")
    mse = (2.0 - 2.0 * mu * sx2) * sv2 / denom
    mse_lms = lms_mse(mu, L, sx2, sv2)
    excess = max(0.0, (mse - sv2) / sx2)
    return TheoryPrediction(
        mu_max=mu_max,
        p_attract=p_a,
        mse=mse,
        mse_lms=mse_lms,
        regime_ok=rho_regime_check(mu, t.rho, p_a, L, sx2),
        excess_msd=excess,
    )
