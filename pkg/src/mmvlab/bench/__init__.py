"""Benchmark harness: configs, presets, sweep runner, CLI."""

from .config import ALGORITHMS, EXPERIMENTS, BenchConfig, config_from_dict, load_config
from .presets import preset_config, preset_names, preset_notes
from .runner import (
    CSV_HEADER,
    SweepResult,
    TrialRecord,
    render_csv,
    run_sweep,
    run_trial,
    support_estimate,
    trial_seed,
    write_outputs,
)

__all__ = [
    "ALGORITHMS",
    "EXPERIMENTS",
    "BenchConfig",
    "config_from_dict",
    "load_config",
    "preset_config",
    "preset_names",
    "preset_notes",
    "CSV_HEADER",
    "SweepResult",
    "TrialRecord",
    "render_csv",
    "run_sweep",
    "run_trial",
    "support_estimate",
    "trial_seed",
    "write_outputs",
]
