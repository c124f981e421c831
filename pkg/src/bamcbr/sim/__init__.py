"""Deterministic flow-level simulator of one MPLS/DS-TE link."""

from bamcbr.sim.link import (
    MODELS,
    AdmitResult,
    LinkConfig,
    LinkState,
    Lsp,
    LspRequest,
    admit,
    release,
    switch_model,
    validate_config,
)
from bamcbr.sim.scenario import (
    Measurements,
    Scenario,
    Simulation,
    TraceEvent,
    TrafficClassProfile,
    generate_requests,
    load_scenario,
    measure,
    run_scenario,
    scenario_from_dict,
    write_trace,
)

__all__ = [
    "MODELS", "AdmitResult", "LinkConfig", "LinkState", "Lsp", "LspRequest",
    "admit", "release", "switch_model", "validate_config",
    "Measurements", "Scenario", "Simulation", "TraceEvent",
    "TrafficClassProfile", "generate_requests", "load_scenario", "measure",
    "run_scenario", "scenario_from_dict", "write_trace",
]
