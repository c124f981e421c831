"""BAMCBR configuration: the concrete case schema, similarity table,
evaluation weights, tolerances and seeded premises for link management.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

from bamcbr.errors import ConfigurationError
from bamcbr.cbr.schema import (
    Action,
    AttributeSchema,
    Case,
    CaseSchema,
    CategoricalDomain,
    LocalSimilaritySpec,
    NumericDomain,
    Problem,
    SimilarityConfig,
)
from bamcbr.sim.link import MODELS, LinkConfig

SWITCH_BAM = "switch_bam"

EQUALITY = LocalSimilaritySpec("equality")
LINEAR = LocalSimilaritySpec("linear")


@dataclass
class BamCbrConfig:
    """Tunable knobs of the BAMCBR deployment; defaults follow the use case."""

    # similarity table
    weight_bam: float = 40.0
    weight_throughput: float = 30.0
    weight_blocking: float = 30.0
    weight_devolution: float = 20.0
    weight_preemption: float = 20.0
    cutoff: float = 0.96
    equivalence: float = 0.985
    k: int = 5
    # evaluation function: devolution hurts more than preemption than blocking
    eval_weights: dict = field(default_factory=lambda: {
        "devolution": 3.0, "preemption": 2.0, "blocking": 1.0})
    # tolerance bounds per measurement
    blocking_tolerance: float = 0.05
    preemption_tolerance: float = 5.0
    devolution_tolerance: float = 5.0
    utilization_target: float = 0.8
    utilization_margin: float = 0.2
    # absolute: bound = target + margin; relative: bound = target * (1 + margin)
    tolerance_mode: str = "absolute"
    # domain cap for per-window preemption/devolution counts
    count_cap: float = 100.0
    # loop policy
    proactive_period: float = 500.0
    settle_time: float = 100.0
    alarm_threshold: float = 0.9
    case_ttl: float | None = 10000.0
    drift_threshold: float = 0.2
    discount_factor: float = 0.5
    mode: str = "automated"  # automated | assisted
    premise_utilization: float = 0.4
    seed_premises: bool = True

    def __post_init__(self):
        if self.mode not in ("automated", "assisted"):
            raise ConfigurationError(f"unknown resolution mode {self.mode!r}")
        if self.tolerance_mode not in ("absolute", "relative"):
            raise ConfigurationError(f"unknown tolerance_mode {self.tolerance_mode!r}")
        for name in ("proactive_period", "settle_time"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("cutoff", "equivalence", "alarm_threshold", "discount_factor"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1]")

    @property
    def utilization_bound(self) -> float:
        if self.tolerance_mode == "relative":
            bound = self.utilization_target * (1.0 + self.utilization_margin)
        else:
            bound = self.utilization_target + self.utilization_margin
        return min(bound, 1.0)

    @classmethod
    def from_dict(cls, data: dict) -> "BamCbrConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown cbr config keys: {sorted(unknown)}")
        return cls(**data)


def build_schema(cfg: BamCbrConfig) -> CaseSchema:
    """The BAMCBR case schema: BAM context plus windowed link measurements."""
    unit = NumericDomain(0.0, 1.0)
    counts = NumericDomain(0.0, cfg.count_cap)
    models = CategoricalDomain(frozenset(MODELS))
    attributes = [
        AttributeSchema("capacity", "static", NumericDomain(0.0, 1e12, "bw")),
        AttributeSchema("classes", "static", NumericDomain(0.0, 64.0)),
        AttributeSchema("bam", "contextual", models, EQUALITY, cfg.weight_bam, indexed=True),
        AttributeSchema("throughput", "measurement", unit, LINEAR, cfg.weight_throughput,
                        indexed=True, objective="maximize"),
        AttributeSchema("blocking", "measurement", unit, LINEAR, cfg.weight_blocking,
                        indexed=True, objective="minimize"),
        AttributeSchema("devolution", "measurement", counts, LINEAR, cfg.weight_devolution,
                        indexed=True, objective="minimize"),
        AttributeSchema("preemption", "measurement", counts, LINEAR, cfg.weight_preemption,
                        indexed=True, objective="minimize"),
        AttributeSchema("utilization", "measurement", unit, objective="minimize"),
        # flow-level simulation cannot produce loss; externally supplied, weight 0
        AttributeSchema("loss", "measurement", unit),
        AttributeSchema("blocking_tolerance", "tolerance", unit, refines="blocking"),
        AttributeSchema("preemption_tolerance", "tolerance", counts, refines="preemption"),
        AttributeSchema("devolution_tolerance", "tolerance", counts, refines="devolution"),
        AttributeSchema("utilization_tolerance", "tolerance", unit, refines="utilization"),
    ]
    return CaseSchema(attributes, action_names=[SWITCH_BAM])


def similarity_config(cfg: BamCbrConfig, schema: CaseSchema) -> SimilarityConfig:
    return SimilarityConfig.from_schema(schema, cfg.cutoff, cfg.equivalence, cfg.k)


def tolerance_values(cfg: BamCbrConfig) -> dict[str, float]:
    return {
        "blocking_tolerance": cfg.blocking_tolerance,
        "preemption_tolerance": cfg.preemption_tolerance,
        "devolution_tolerance": cfg.devolution_tolerance,
        "utilization_tolerance": cfg.utilization_bound,
    }


def switch_action(target: str) -> Action:
    if target not in MODELS:
        raise ConfigurationError(f"unknown BAM model {target!r}")
    return Action(SWITCH_BAM, {"target": target})


def action_catalog() -> list[Action]:
    return [switch_action(model) for model in MODELS]


def static_values(link: LinkConfig) -> dict[str, float]:
    return {"capacity": float(link.capacity), "classes": float(link.num_classes)}


def build_premises(cfg: BamCbrConfig, link: LinkConfig, schema: CaseSchema) -> list[Case]:
    """Known rules as first cases: on MAM or RDM at low utilization, the
    sharing-capable model is preferable."""
    premises = []
    for model in ("MAM", "RDM"):
        problem = Problem(
            sa=static_values(link),
            ca={"bam": model},
            m={"utilization": cfg.premise_utilization, "throughput": 1.0,
               "blocking": 0.0, "devolution": 0.0, "preemption": 0.0},
            t=tolerance_values(cfg),
        )
        premises.append(Case(
            id=f"premise-{model.lower()}-to-atcs",
            problem=problem,
            solution=(switch_action("ATCS"),),
            outcome="positive",
            confidence=1.0,
            created_at=0.0,
            valid_until=None,
            context_signature=schema.context_signature(problem),
        ))
    return premises
