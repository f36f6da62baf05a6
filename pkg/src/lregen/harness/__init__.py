from .config import DremSettings, ScenarioConfig
from .runner import (TRACE_COLUMNS, ScenarioResult, ScenarioSummary, emit_csv, read_csv,
                     run_scenario, summarize_trace)
from .scenarios import UnknownScenario, get_scenario, list_scenarios

__all__ = [
    "DremSettings", "ScenarioConfig", "TRACE_COLUMNS", "ScenarioResult", "ScenarioSummary", "emit_csv",
    "read_csv", "run_scenario", "summarize_trace", "UnknownScenario", "get_scenario", "list_scenarios",
]
