"""BAMCBR binding: ties the CBR engine to the link simulator."""

from bamcbr.binding.config import (
    SWITCH_BAM,
    BamCbrConfig,
    action_catalog,
    build_premises,
    build_schema,
    similarity_config,
    switch_action,
    tolerance_values,
)
from bamcbr.binding.controller import (
    BamCbrEngine,
    ControlLoop,
    Decision,
    DecisionRecord,
    SummaryRow,
    build_problem,
    compare_models,
    decide,
    evaluate_window,
    make_engine,
    run_cbr,
)

__all__ = [
    "SWITCH_BAM", "BamCbrConfig", "action_catalog", "build_premises",
    "build_schema", "similarity_config", "switch_action", "tolerance_values",
    "BamCbrEngine", "ControlLoop", "Decision", "DecisionRecord", "SummaryRow",
    "build_problem", "compare_models", "decide", "evaluate_window",
    "make_engine", "run_cbr",
]
