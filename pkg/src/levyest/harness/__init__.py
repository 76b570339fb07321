"""Monte Carlo experiments, report files and the command line interface."""
from .config import ConfigError, ExperimentConfig, config_from_mapping, load_config
from .experiment import (
    ExperimentReport,
    ReplicationError,
    ReplicationRecord,
    estimate_sample,
    mise,
    run_experiment,
    run_replication,
)
from .report import emit_report, read_increments, read_report_json, write_increments

__all__ = [
    "ConfigError", "ExperimentConfig", "config_from_mapping", "load_config",
    "ExperimentReport", "ReplicationError", "ReplicationRecord", "estimate_sample", "mise",
    "run_experiment", "run_replication",
    "emit_report", "read_increments", "read_report_json", "write_increments",
]
