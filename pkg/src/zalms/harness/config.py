"""Experiment configuration and its flat ``key = value`` text form.

Example::

    name = exp1_white
    system = main | ggd L=100 mean=0.0 sigma_g=1.0 beta=0.05
    input = white power=1.0
    noise = variance=0.0001
    algorithm = NLMS | nlms mu=1.0 eps=1e-06
    algorithm = DWZA-NLMS | dwza_nlms mu=1.0 rho=0.06 a=0.001 b=0.8 eps=1e-06
    iterations = 3400
    trials = 100
    base_seed = 20130201
    regenerate_at = 1700
    record_every = 1
    output_dir = results
    target_db = -35.0
    tail_fraction = 0.1

``system`` and ``algorithm`` may repeat; every other key appears at most
once. Blank lines and ``#`` comments are ignored; unknown keys raise
``ConfigError``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from ..errors import ConfigError
from ..filters import ALGORITHMS, AlgorithmParams
from ..rng import check_seed
from ..signals import InputKind, InputSpec, NoiseSpec
from ..systems import Family, SystemSpec

__all__ = ["ExperimentConfig", "parse_config", "load_config", "config_to_text", "config_hash"]


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo experiment.

    ``systems`` usually holds a single spec; several specs (distinct
    labels) run every algorithm on each, with input and noise shared.
    ``regenerate_at`` lists iterations at which each trial redraws its
    systems from the same recipe.
    """

    name: str
    systems: tuple
    input: InputSpec
    noise: NoiseSpec
    algorithms: tuple
    iterations: int
    trials: int
    base_seed: int = 20130201
    regenerate_at: tuple = ()
    record_every: int = 1
    output_dir: str = "results"
    target_db: float = -35.0
    tail_fraction: float = 0.1
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "systems", tuple(self.systems))
        object.__setattr__(self, "algorithms", tuple((str(n), p) for n, p in self.algorithms))
        object.__setattr__(self, "regenerate_at", tuple(int(r) for r in self.regenerate_at))
        self.validate()

    @property
    def system(self) -> SystemSpec:
        return self.systems[0]

    def validate(self):
        if not self.name or any(c in self.name for c in " /\\|"):
            raise ConfigError(f"invalid experiment name {self.name!r}")
        if not self.systems:
            raise ConfigError("at least one system is required")
        labels = [s.label for s in self.systems]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"duplicate system labels {labels}")
        if len({s.L for s in self.systems}) != 1:
            raise ConfigError("all systems of one experiment must share L")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        names = [n for n, _ in self.algorithms]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate algorithm names {names}")
        for n, p in self.algorithms:
            if not isinstance(p, AlgorithmParams):
                raise ConfigError(f"algorithm {n!r} has no parameter record")
            if any(c in n for c in ",|@ ") or not n:
                raise ConfigError(f"algorithm name {n!r} may not contain , | @ or spaces")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1")
        check_seed(self.base_seed)
        prev = 0
        for r in self.regenerate_at:
            if not prev < r < self.iterations:
                raise ConfigError(
                    f"regenerate_at must be strictly increasing inside (0, {self.iterations})")
            if r % self.record_every:
                raise ConfigError(f"regeneration point {r} is not a multiple of record_every")
            prev = r
        if not 0 < self.tail_fraction <= 1:
            raise ConfigError("tail_fraction must lie in (0, 1]")

    def curve_keys(self) -> list:
        """(key, algorithm name, system label) for every curve the run yields."""
        multi = len(self.systems) > 1
        return [(f"{n}@{s.label}" if multi else n, n, s.label)
                for s in self.systems for n, _ in self.algorithms]

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


# ---------------------------------------------------------------------------
# text form
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _kv(d: dict) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in d.items())


def config_to_text(cfg: ExperimentConfig, include_output_dir: bool = True) -> str:
    lines = [f"name = {cfg.name}"]
    for s in cfg.systems:
        lines.append(f"system = {s.label} | {s.family.value} {_kv(s.param_items())}")
    inp = {"power": float(cfg.input.power)}
    if cfg.input.kind is InputKind.AR1:
        inp["ar_coeff"] = float(cfg.input.ar_coeff)
    lines.append(f"input = {cfg.input.kind.value} {_kv(inp)}")
    lines.append(f"noise = variance={_fmt(float(cfg.noise.variance))}")
    for n, p in cfg.algorithms:
        lines.append(f"algorithm = {n} | {p.kind} {_kv({k: float(v) for k, v in p.as_dict().items()})}")
    lines += [
        f"iterations = {cfg.iterations}",
        f"trials = {cfg.trials}",
        f"base_seed = {cfg.base_seed}",
        f"regenerate_at = {','.join(str(r) for r in cfg.regenerate_at)}",
        f"record_every = {cfg.record_every}",
    ]
    if include_output_dir:
        lines.append(f"output_dir = {cfg.output_dir}")
    lines += [
        f"target_db = {_fmt(float(cfg.target_db))}",
        f"tail_fraction = {_fmt(float(cfg.tail_fraction))}",
    ]
    if cfg.note:
        lines.append(f"note = {cfg.note}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: ExperimentConfig) -> str:
    """Short SHA-256 of the canonical text, ignoring where output goes."""
    text = config_to_text(cfg, include_output_dir=False)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _num(text: str, where: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{where}: {text!r} is not a number") from None


def _parse_pairs(tokens, where: str) -> dict:
    out = {}
    for tok in tokens:
        k, sep, v = tok.partition("=")
        if not sep or not k:
            raise ConfigError(f"{where}: expected key=value, got {tok!r}")
        if k in out:
            raise ConfigError(f"{where}: repeated parameter {k!r}")
        out[k] = _num(v, where)
    return out


def _split_labeled(value: str, where: str):
    label, sep, rest = value.partition("|")
    if not sep:
        raise ConfigError(f"{where}: expected '<label> | <kind> key=value ...'")
    tokens = rest.split()
    if not tokens:
        raise ConfigError(f"{where}: missing kind after '|'")
    return label.strip(), tokens[0], _parse_pairs(tokens[1:], where)


def _parse_system(value: str, where: str) -> SystemSpec:
    label, kind, params = _split_labeled(value, where)
    try:
        family = Family(kind)
    except ValueError:
        raise ConfigError(f"{where}: unknown system family {kind!r}") from None
    allowed = set(SystemSpec(family).param_items())
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown {family.value} parameters {sorted(unknown)}")
    if "L" in params:
        params["L"] = int(params["L"])
    if "K" in params:
        params["K"] = int(params["K"])
    try:
        return SystemSpec(family=family, label=label, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_algorithm(value: str, where: str):
    name, kind, params = _split_labeled(value, where)
    cls = ALGORITHMS.get(kind)
    if cls is None:
        raise ConfigError(f"{where}: unknown algorithm {kind!r}; known: {sorted(ALGORITHMS)}")
    allowed = {f.name for f in fields(cls)}
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"{where}: {kind} takes no parameters {sorted(unknown)}")
    try:
        return name, cls(**{k: float(v) for k, v in params.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_input(value: str, where: str) -> InputSpec:
    tokens = value.split()
    if not tokens:
        raise ConfigError(f"{where}: missing input kind")
    try:
        kind = InputKind(tokens[0])
    except ValueError:
        raise ConfigError(f"{where}: unknown input kind {tokens[0]!r}") from None
    params = _parse_pairs(tokens[1:], where)
    unknown = set(params) - {"power", "ar_coeff"}
    if unknown:
        raise ConfigError(f"{where}: unknown input parameters {sorted(unknown)}")
    try:
        return InputSpec(kind=kind, **{k: float(v) for k, v in params.items()})
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_noise(value: str, where: str) -> NoiseSpec:
    params = _parse_pairs(value.split(), where)
    unknown = set(params) - {"variance"}
    if unknown:
        raise ConfigError(f"{where}: unknown noise parameters {sorted(unknown)}")
    try:
        return NoiseSpec(**{k: float(v) for k, v in params.items()})
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


_SCALARS = {
    "name": str,
    "iterations": int,
    "trials": int,
    "base_seed": int,
    "record_every": int,
    "output_dir": str,
    "target_db": float,
    "tail_fraction": float,
    "note": str,
}
_REQUIRED = ("name", "system", "input", "algorithm", "iterations", "trials")


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    values = {}
    systems, algorithms = [], []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(f"{where}: expected 'key = value'")
        if key == "system":
            systems.append(_parse_system(value, where))
        elif key == "algorithm":
            algorithms.append(_parse_algorithm(value, where))
        elif key in seen:
            raise ConfigError(f"{where}: repeated key {key!r}")
        elif key == "input":
            values["input"] = _parse_input(value, where)
        elif key == "noise":
            values["noise"] = _parse_noise(value, where)
        elif key == "regenerate_at":
            try:
                values["regenerate_at"] = tuple(int(t) for t in value.split(",") if t.strip())
            except ValueError:
                raise ConfigError(f"{where}: regenerate_at must be comma-separated integers") from None
        elif key in _SCALARS:
            try:
                values[key] = _SCALARS[key](value)
            except ValueError:
                raise ConfigError(f"{where}: bad value {value!r} for {key}") from None
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
        seen.add(key)
    missing = [k for k in _REQUIRED if k not in seen]
    if missing:
        raise ConfigError(f"{source}: missing keys {missing}")
    values.setdefault("noise", NoiseSpec())
    try:
        return ExperimentConfig(systems=tuple(systems), algorithms=tuple(algorithms), **values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))
