"""Scenario loading, experiment runners, result serialization and the command line."""

from .experiments import run_rpe_sweep, run_som_sweep, run_theorem2
from .io import ResultRow, emit, parse_rows, read_rows
from .scenario import Scenario, ScenarioError, bundled_scenario, load_scenario

__all__ = [
    "ResultRow",
    "Scenario",
    "ScenarioError",
    "bundled_scenario",
    "emit",
    "load_scenario",
    "parse_rows",
    "read_rows",
    "run_rpe_sweep",
    "run_som_sweep",
    "run_theorem2",
]
