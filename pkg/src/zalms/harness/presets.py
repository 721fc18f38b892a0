"""Published experiment parameterizations.

All presets use L = 100, unit input power and observation noise power
1e-4. The normalized variants run with mu = 1 except where noted, and
every NLMS-type filter uses the default regularization ``DEFAULT_EPS``.
IPNLMS and IIPNLMS columns of the original comparisons are not
reproduced.
"""

from __future__ import annotations

import math

from ..errors import ConfigError
from ..filters import DwzaLms, DwzaNlms, Nlms, ZaNlms
from ..signals import InputKind, InputSpec, NoiseSpec
from ..systems import Family, SystemSpec
from .config import ExperimentConfig

__all__ = ["PRESETS", "preset"]

L = 100
NOISE = NoiseSpec(variance=1e-4)
WHITE = InputSpec(InputKind.WHITE, power=1.0)
AR1 = InputSpec(InputKind.AR1, power=1.0, ar_coeff=0.8)
OMITTED = "IPNLMS/IIPNLMS omitted"


def _ggd(beta, label="main"):
    return SystemSpec(Family.GGD, L=L, mean=0.0, sigma_g=1.0, beta=beta, label=label)


NOISY_SPARSE = SystemSpec(Family.NOISY_SPARSE, L=L, K=8, amp_sigma=1.0, floor_var=1e-4)
EXACT_SPARSE = SystemSpec(Family.EXACT_SPARSE, L=L, K=8, amp_sigma=1.0)


def _exp1_white():
    return ExperimentConfig(
        name="exp1_white",
        systems=(_ggd(0.05),),
        input=WHITE,
        noise=NOISE,
        algorithms=(
            ("NLMS", Nlms(mu=1.0)),
            ("ZA-NLMS", ZaNlms(mu=1.0, rho=3e-4)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=6e-2, a=1e-3, b=0.8)),
        ),
        iterations=3400,
        trials=100,
        regenerate_at=(1700,),
        note=OMITTED,
    )


def _exp1_ar():
    return ExperimentConfig(
        name="exp1_ar",
        systems=(_ggd(0.05),),
        input=AR1,
        noise=NOISE,
        algorithms=(
            ("NLMS", Nlms(mu=1.0)),
            ("ZA-NLMS", ZaNlms(mu=1.0, rho=3e-4)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=3e-2, a=1e-3, b=0.8)),
        ),
        iterations=9000,
        trials=100,
        regenerate_at=(4500,),
        note=OMITTED,
    )


def _exp2():
    return ExperimentConfig(
        name="exp2",
        systems=(NOISY_SPARSE,),
        input=WHITE,
        noise=NOISE,
        algorithms=(
            ("NLMS", Nlms(mu=1.0)),
            ("ZA-NLMS", ZaNlms(mu=1.0, rho=3e-4)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=6e-2, a=1e-2, b=0.8)),
        ),
        iterations=2000,
        trials=100,
        note=OMITTED,
    )


def _exp3():
    return ExperimentConfig(
        name="exp3",
        systems=(NOISY_SPARSE,),
        input=WHITE,
        noise=NOISE,
        algorithms=(
            ("ZA-NLMS", ZaNlms(mu=1.0, rho=6.5e-4)),
            # dynamic attraction over the full window is DZA in normalized form
            ("DZA-NLMS", DwzaNlms(mu=1.0, rho=0.05, a=0.0, b=math.inf)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=0.05, a=0.01, b=0.8)),
        ),
        iterations=2000,
        trials=100,
    )


def _exp4():
    return ExperimentConfig(
        name="exp4",
        systems=(EXACT_SPARSE,),
        input=WHITE,
        noise=NOISE,
        algorithms=(
            ("NLMS", Nlms(mu=0.65)),
            ("ZA-NLMS", ZaNlms(mu=1.0, rho=6e-4)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=6e-2, a=0.0, b=0.8)),
        ),
        iterations=2000,
        trials=100,
    )


def _exp5():
    systems = tuple(_ggd(beta, f"beta={beta}") for beta in (0.05, 0.1, 0.15))
    systems += (SystemSpec(Family.GAUSSIAN, L=L, sigma_g=1.0, label="gaussian"),)
    return ExperimentConfig(
        name="exp5",
        systems=systems,
        input=WHITE,
        noise=NOISE,
        algorithms=(
            ("NLMS", Nlms(mu=1.0)),
            ("DWZA-NLMS", DwzaNlms(mu=1.0, rho=4e-2, a=1e-2, b=0.8)),
        ),
        iterations=1700,
        trials=50,
    )


EXP6_MU_POINTS = (2e-4, 5e-4, 8e-4, 1.1e-3)
EXP6_RHO_POINTS = (0.0, 2e-4, 5e-4, 1e-3)


def _exp6_mu():
    return ExperimentConfig(
        name="exp6_mu",
        systems=(_ggd(0.1),),
        input=WHITE,
        noise=NOISE,
        algorithms=tuple((f"DWZA-LMS[mu={mu:g}]", DwzaLms(mu=mu, rho=2e-4, a=1e-2, b=0.8))
                         for mu in EXP6_MU_POINTS),
        iterations=100_000,
        trials=50,
        record_every=10,
    )


def _exp6_rho():
    return ExperimentConfig(
        name="exp6_rho",
        systems=(_ggd(0.1),),
        input=WHITE,
        noise=NOISE,
        algorithms=tuple((f"DWZA-LMS[rho={rho:g}]", DwzaLms(mu=1e-2, rho=rho, a=1e-2, b=0.8))
                         for rho in EXP6_RHO_POINTS),
        iterations=20_000,
        trials=50,
    )


def _exp7_a():
    return ExperimentConfig(
        name="exp7_a",
        systems=(NOISY_SPARSE,),
        input=WHITE,
        noise=NOISE,
        algorithms=tuple((f"DWZA-NLMS[a={a:g}]", DwzaNlms(mu=1.0, rho=6e-2, a=a, b=0.8))
                         for a in (0.0, 1e-3, 1e-2, 1e-1)),
        iterations=2000,
        trials=100,
    )


def _exp7_b():
    return ExperimentConfig(
        name="exp7_b",
        systems=(NOISY_SPARSE,),
        input=WHITE,
        noise=NOISE,
        algorithms=tuple((f"DWZA-NLMS[b={b:g}]", DwzaNlms(mu=1.0, rho=6e-2, a=1e-2, b=b))
                         for b in (0.1, 0.5, 1.0, 5.0)),
        iterations=2000,
        trials=100,
    )


PRESETS = {
    "exp1_white": _exp1_white,
    "exp1_ar": _exp1_ar,
    "exp2": _exp2,
    "exp3": _exp3,
    "exp4": _exp4,
    "exp5": _exp5,
    "exp6_mu": _exp6_mu,
    "exp6_rho": _exp6_rho,
    "exp7_a": _exp7_a,
    "exp7_b": _exp7_b,
}


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
