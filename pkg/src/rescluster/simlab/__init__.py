"""Monte Carlo harness, data ingestion and the command-line interface."""

from .config import ConfigError, ExperimentConfig, replicate_seed
from .experiments import (
    DetectionRecord,
    ExperimentResult,
    run_breakdown,
    run_convergence,
    run_experiment,
    run_pdet_vs_n,
    run_runtime,
    run_sensitivity,
)
from .ingest import EmptyFile, ParseError, RaggedRows, ingest_csv
from .output import result_lines, summary_text, write_results

__all__ = [
    "ConfigError",
    "DetectionRecord",
    "EmptyFile",
    "ExperimentConfig",
    "ExperimentResult",
    "ParseError",
    "RaggedRows",
    "ingest_csv",
    "replicate_seed",
    "result_lines",
    "run_breakdown",
    "run_convergence",
    "run_experiment",
    "run_pdet_vs_n",
    "run_runtime",
    "run_sensitivity",
    "summary_text",
    "write_results",
]
