"""Sweeps, rate fitting, reports and acceptance checks."""

from .acceptance import acceptance_configs, quick_checks, run_acceptance
from .fitting import cauchy_series, estimate_constants, fit_rate
from .presets import BoundaryData, BoundaryDataFactory, get_boundary_data
from .report import ReportLine, build_report, load_results, summarize, write_report
from .sweep import SweepResult, read_results_csv, run_sweep, select_series, write_results_csv

__all__ = [
    "acceptance_configs",
    "quick_checks",
    "run_acceptance",
    "cauchy_series",
    "estimate_constants",
    "fit_rate",
    "BoundaryData",
    "BoundaryDataFactory",
    "get_boundary_data",
    "ReportLine",
    "build_report",
    "load_results",
    "summarize",
    "write_report",
    "SweepResult",
    "read_results_csv",
    "run_sweep",
    "select_series",
    "write_results_csv",
]
