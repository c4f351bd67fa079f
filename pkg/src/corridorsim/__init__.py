"""Deterministic simulator of uncooperative-UAV intrusion detection and
lockdown in a hybrid terrestrial/LEO-backhauled 5G border corridor."""

__version__ = "0.1.0"

from .engine import KpiRecord, simulate  # noqa: F401
from .scenario import (  # noqa: F401
    SCENARIOS,
    RunConfig,
    ScenarioId,
    ScenarioSpec,
    derive_seed,
    make_run_config,
    scenario_by_name,
)
from .sweep import GridSpec, run_grid  # noqa: F401
