from .scenario import (Scenario, ScenarioError, list_builtin_scenarios,
                       load_scenario, resolve_scenario)
from .runner import CheckResult, RunReport, run_scenario
from .plotdata import emit_plotdata

__all__ = [
    "Scenario",
    "ScenarioError",
    "CheckResult",
    "RunReport",
    "list_builtin_scenarios",
    "load_scenario",
    "resolve_scenario",
    "run_scenario",
    "emit_plotdata",
]
