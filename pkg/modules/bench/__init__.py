from .aggregate import aggregate
from .config_file import PRESETS, build_config, load_experiment_config, read_config_file
from .csv_io import AGGREGATE_COLUMNS, RECORD_COLUMNS, build_csv_text, emit_csv, read_records
from .metrics import SupportScore, f1_score, nmse, support_score, threshold_support, top_k_support
from .runner import run_cell, run_experiment, solve_trial
from .schemas import AggregateRow, AlgorithmSpec, ExperimentConfig, TrialRecord, default_algorithms
from .tuning import BETA_GRID, EPSILON_GRID, TuneResult, grid_algorithms, tune

__all__ = [
    "nmse",
    "top_k_support",
    "threshold_support",
    "f1_score",
    "support_score",
    "SupportScore",
    "AlgorithmSpec",
    "ExperimentConfig",
    "TrialRecord",
    "AggregateRow",
    "default_algorithms",
    "PRESETS",
    "build_config",
    "load_experiment_config",
    "read_config_file",
    "run_cell",
    "run_experiment",
    "solve_trial",
    "aggregate",
    "RECORD_COLUMNS",
    "AGGREGATE_COLUMNS",
    "build_csv_text",
    "emit_csv",
    "read_records",
    "BETA_GRID",
    "EPSILON_GRID",
    "TuneResult",
    "grid_algorithms",
    "tune",
]
