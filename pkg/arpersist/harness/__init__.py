from .experiments import CANONICAL_DISCRETE, DEFAULTS, Experiment, run_experiment
from .models import (
    MONTE_CARLO_EXPERIMENTS,
    ExperimentName,
    ExperimentSpec,
    MetricRow,
    ResultColumns,
    ResultRecord,
)
from .oracle import brute_force_tail
from .report import read_json, write_csv, write_json
from .stats import EmpiricalCdf, ks_critical, ks_distance, ks_two_sample, ratio_trend

__all__ = [
    "CANONICAL_DISCRETE",
    "DEFAULTS",
    "MONTE_CARLO_EXPERIMENTS",
    "EmpiricalCdf",
    "Experiment",
    "ExperimentName",
    "ExperimentSpec",
    "MetricRow",
    "ResultColumns",
    "ResultRecord",
    "brute_force_tail",
    "ks_critical",
    "ks_distance",
    "ks_two_sample",
    "ratio_trend",
    "read_json",
    "run_experiment",
    "write_csv",
    "write_json",
]
