"""Monte Carlo experiment orchestration."""

from .config import ExperimentConfig, config_hash, config_to_text, load_config, parse_config
from .presets import PRESETS, preset
from .report import ComparisonRow, compare_theory, emit_csv, write_comparison
from .runner import ExperimentReport, run_experiment, run_trial

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ComparisonRow",
    "PRESETS",
    "preset",
    "parse_config",
    "load_config",
    "config_to_text",
    "config_hash",
    "run_experiment",
    "run_trial",
    "compare_theory",
    "emit_csv",
    "write_comparison",
]
