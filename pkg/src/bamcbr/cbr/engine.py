"""Reuse, fallback, evaluation and revision: the per-cycle engine operations."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from bamcbr.errors import ConfigurationError, EvaluationError
from bamcbr.cbr.schema import Action, Case, CaseSchema, Problem, Value

STATUS_READY = "ready"
STATUS_PENDING_OPERATOR = "pending_operator"


@dataclass
class CandidateSolution:
    """A problem paired with proposed actions and their provenance."""

    problem: Problem
    actions: tuple[Action, ...]
    source_case_id: str | None = None
    similarity: float | None = None
    status: str = STATUS_READY
    from_fallback: bool = False


def reuse(retrieved: tuple[Case, float], q: Problem) -> CandidateSolution:
    """Bind the retrieved case's action list to the current problem."""
    case, similarity = retrieved
    return CandidateSolution(
        problem=q,
        actions=tuple(case.solution),
        source_case_id=case.id,
        similarity=similarity,
    )


def fallback_solution(q: Problem, mode: str, catalog: Sequence[Action],
                      rng: random.Random, current: Action | None = None) -> CandidateSolution:
    """No similar case found: defer to the operator, or pick an arbitrary action.

    In automated mode the action is drawn uniformly from the catalog, excluding
    the no-op of re-applying the current action.
    """
    if mode == "assisted":
        return CandidateSolution(problem=q, actions=(), status=STATUS_PENDING_OPERATOR,
                                 from_fallback=True)
    if mode != "automated":
        raise ConfigurationError(f"unknown fallback mode {mode!r}")
    options = [a for a in catalog if current is None or a.key() != current.key()]
    if not options:
        raise ConfigurationError("fallback action catalog is empty")
    return CandidateSolution(problem=q, actions=(rng.choice(options),), from_fallback=True)


@dataclass(frozen=True)
class Violation:
    attribute: str
    measured: float
    bound: float
    amount: float


@dataclass
class EvaluationReport:
    """Weighted tolerance-violation score plus per-attribute warnings."""

    score: float
    violations: list[Violation] = field(default_factory=list)

    @property
    def warnings(self) -> list[str]:
        return [f"{v.attribute}: {v.measured:.6g} violates tolerance {v.bound:.6g} "
                f"(violation {v.amount:.4f})" for v in self.violations]


def evaluate(schema: CaseSchema, weights: Mapping[str, float],
             measurements: Mapping[str, float],
             tolerances: Mapping[str, float]) -> EvaluationReport:
    """Compare measurements against tolerances; score 1 means all objectives met.

    Per weighted attribute the violation is the tolerance excess normalized by
    the attribute's domain width, clamped to [0, 1]; the score is one minus the
    weighted mean violation.
    """
    refinements = {a.refines: a for a in schema.attributes.values()
                   if a.kind == "tolerance" and a.refines}
    num = 0.0
    den = 0.0
    violations: list[Violation] = []
    for name, weight in weights.items():
        attr = schema.attributes.get(name)
        if attr is None or attr.kind != "measurement":
            raise EvaluationError(f"weighted attribute {name!r} is not a declared measurement")
        if name not in measurements:
            raise EvaluationError(f"missing measurement for weighted attribute {name!r}")
        tol_attr = refinements.get(name)
        if tol_attr is None or tol_attr.name not in tolerances:
            raise EvaluationError(f"missing tolerance bound for weighted attribute {name!r}")
        x = measurements[name]
        bound = tolerances[tol_attr.name]
        scale = attr.domain.width
        if attr.objective == "maximize":
            v = (bound - x) / scale
        else:
            v = (x - bound) / scale
        v = min(max(v, 0.0), 1.0)
        if v > 0:
            violations.append(Violation(name, x, bound, v))
        num += weight * v
        den += weight
    score = 1.0 - (num / den if den > 0 else 0.0)
    violations.sort(key=lambda v: v.attribute)
    return EvaluationReport(score=score, violations=violations)


def revise(schema: CaseSchema, candidate: CandidateSolution,
           before: EvaluationReport, after: EvaluationReport, drift: float,
           now: float, case_id: str, drift_threshold: float = 0.2,
           discount_factor: float = 0.5) -> Case:
    """Turn an applied candidate into a validated case.

    The outcome follows the score comparison; when the environment drifted
    beyond the threshold between the two windows, the improvement cannot be
    attributed to the action with confidence, so it is discounted.
    """
    if after.score > before.score:
        outcome = "positive"
    elif after.score < before.score:
        outcome = "negative"
    else:
        outcome = "unvalidated"
    confidence = 1.0 if drift <= drift_threshold else discount_factor
    return Case(
        id=case_id,
        problem=candidate.problem,
        solution=candidate.actions,
        outcome=outcome,
        confidence=confidence,
        created_at=now,
        valid_until=None,
        context_signature=schema.context_signature(candidate.problem),
    )
