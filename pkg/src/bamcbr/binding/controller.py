"""The 4R control loop binding the CBR engine to the link simulator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from bamcbr.errors import ConfigurationError, EvaluationError
from bamcbr.cbr.database import STORED, CaseDatabase
from bamcbr.cbr.engine import (
    STATUS_PENDING_OPERATOR,
    CandidateSolution,
    EvaluationReport,
    evaluate,
    fallback_solution,
    reuse,
    revise,
)
from bamcbr.cbr.schema import Action, Case, Problem
from bamcbr.binding.config import (
    SWITCH_BAM,
    BamCbrConfig,
    action_catalog,
    build_premises,
    build_schema,
    similarity_config,
    static_values,
    switch_action,
    tolerance_values,
)
from bamcbr.sim.link import LinkConfig
from bamcbr.sim.scenario import (
    Measurements,
    Scenario,
    Simulation,
    generate_requests,
)

DECISION_LOG_HEADER = ("time,trigger,source_case_id,similarity,action,"
                       "before_score,after_score,retained")
METRICS_HEADER = ("window_start,window_end,model,utilization,throughput,blocking,"
                  "preemptions,devolutions,offered,carried,requests,blocked")


class BamCbrEngine:
    """Schema, similarity configuration, case database and decision RNG."""

    def __init__(self, cfg: BamCbrConfig, link: LinkConfig, seed: int = 0,
                 db: CaseDatabase | None = None):
        self.cfg = cfg
        self.link = link
        self.schema = build_schema(cfg)
        self.sim_config = similarity_config(cfg, self.schema)
        self.db = db if db is not None else CaseDatabase(self.schema)
        self.rng = random.Random(seed)
        self._case_counter = 0

    def next_case_id(self) -> str:
        self._case_counter += 1
        return f"case-{self._case_counter:06d}"

    def seed_premises(self) -> int:
        premises = build_premises(self.cfg, self.link, self.schema)
        return self.db.seed_premises(premises, self.sim_config)


def build_problem(engine: BamCbrEngine, model: str, m: Measurements | None) -> Problem:
    """Map the link state and the latest completed window onto the case schema."""
    if m is None:
        raise EvaluationError("no completed measurement window")
    cfg = engine.cfg
    measurements = {
        "utilization": min(max(m.utilization, 0.0), 1.0),
        "throughput": min(max(m.throughput, 0.0), 1.0),
        "blocking": min(max(m.blocking, 0.0), 1.0),
        "devolution": min(float(m.devolutions), cfg.count_cap),
        "preemption": min(float(m.preemptions), cfg.count_cap),
    }
    if m.loss is not None:
        measurements["loss"] = m.loss
    return Problem(
        sa=static_values(engine.link),
        ca={"bam": model},
        m=measurements,
        t=tolerance_values(cfg),
    )


def evaluate_window(engine: BamCbrEngine, problem: Problem) -> EvaluationReport:
    return evaluate(engine.schema, engine.cfg.eval_weights, problem.m, problem.t)


@dataclass
class Decision:
    kind: str  # action | noop | pending
    trigger: str
    time: float
    problem: Problem
    report: EvaluationReport
    actions: tuple[Action, ...] = ()
    source_case_id: str | None = None
    similarity: float | None = None
    from_fallback: bool = False
    reason: str = ""

    @property
    def target(self) -> str | None:
        for action in self.actions:
            if action.name == SWITCH_BAM:
                return action.parameters["target"]
        return None


def decide(engine: BamCbrEngine, model: str, m: Measurements, trigger: str,
           now: float) -> Decision:
    """One Recover+Reuse step: retrieve, reuse the best case, or fall back."""
    problem = build_problem(engine, model, m)
    report = evaluate_window(engine, problem)
    if trigger == "reactive" and report.score >= engine.cfg.alarm_threshold:
        return Decision("noop", trigger, now, problem, report, reason="score above alarm threshold")
    results = engine.db.retrieve(problem, engine.sim_config, now)
    positives = [(case, sim) for case, sim in results if case.outcome == "positive"]
    if positives:
        candidate = reuse(positives[0], problem)
        decision = Decision("action", trigger, now, problem, report,
                            actions=candidate.actions,
                            source_case_id=candidate.source_case_id,
                            similarity=candidate.similarity)
        if decision.target == model:
            decision.kind = "noop"
            decision.reason = "retrieved solution keeps the current model"
            decision.actions = ()
        return decision
    candidate = fallback_solution(problem, engine.cfg.mode, action_catalog(),
                                  engine.rng, current=switch_action(model))
    if candidate.status == STATUS_PENDING_OPERATOR:
        return Decision("pending", trigger, now, problem, report, from_fallback=True,
                        reason="no similar case; awaiting operator")
    return Decision("action", trigger, now, problem, report,
                    actions=candidate.actions, from_fallback=True)


@dataclass
class DecisionRecord:
    time: float
    trigger: str
    source_case_id: str
    similarity: float | None
    action: str
    before_score: float
    after_score: float | None = None
    retained: bool | None = None

    def line(self) -> str:
        sim = f"{self.similarity:.6f}" if self.similarity is not None else ""
        after = f"{self.after_score:.6f}" if self.after_score is not None else ""
        retained = "" if self.retained is None else str(self.retained).lower()
        return (f"{self.time:.6f},{self.trigger},{self.source_case_id},{sim},"
                f"{self.action},{self.before_score:.6f},{after},{retained}")


@dataclass
class PendingReview:
    candidate: CandidateSolution
    before: EvaluationReport
    applied_at: float
    before_offered: float
    record: DecisionRecord


@dataclass
class ReviewResult:
    case: Case
    retained: bool
    queued: bool = False


@dataclass
class MetricsRow:
    model: str
    m: Measurements

    def line(self) -> str:
        m = self.m
        return (f"{m.window_start:.6f},{m.window_end:.6f},{self.model},"
                f"{m.utilization:.6f},{m.throughput:.6f},{m.blocking:.6f},"
                f"{m.preemptions},{m.devolutions},{m.offered:.6f},{m.carried:.6f},"
                f"{m.requests},{m.blocked}")


class ControlLoop:
    """Drives Recover/Reuse/Revision/Retention against a running simulation.

    `on_window` is invoked by the simulation owner after each window closes.
    In assisted mode, pending candidates and finished reviews are handed to
    `on_revision` instead of being applied or retained automatically; the
    caller resumes via `resolve_pending` / `resolve_review`.
    """

    def __init__(self, engine: BamCbrEngine,
                 on_revision: Callable[[str, "ControlLoop", object], None] | None = None):
        self.engine = engine
        self.cfg = engine.cfg
        self.decision_log: list[DecisionRecord] = []
        self.metrics: list[MetricsRow] = []
        self.open_review: PendingReview | None = None
        self.pending_decision: Decision | None = None
        self.next_proactive = engine.cfg.proactive_period
        self.on_revision = on_revision
        self.fallback_count = 0
        self.hit_count = 0

    @property
    def waiting_operator(self) -> bool:
        return self.pending_decision is not None

    def on_window(self, sim: Simulation, m: Measurements) -> None:
        now = sim.clock
        self.metrics.append(MetricsRow(sim.state.model, m))
        self.engine.db.forget(now)
        if self.open_review is not None and \
                now >= self.open_review.applied_at + self.cfg.settle_time - 1e-9:
            self._finish_review(sim, m)
        if self.waiting_operator or self.open_review is not None:
            return
        trigger = None
        if now >= self.next_proactive - 1e-9:
            trigger = "proactive"
            self.next_proactive += self.cfg.proactive_period
        else:
            trigger = "reactive"
        decision = decide(self.engine, sim.state.model, m, trigger, now)
        if decision.kind == "noop" and trigger == "reactive":
            return  # quiet window, nothing to log
        if decision.from_fallback:
            self.fallback_count += 1
        elif decision.kind in ("action", "noop") and decision.source_case_id:
            self.hit_count += 1
        record = DecisionRecord(
            time=now,
            trigger=trigger,
            source_case_id=decision.source_case_id or
            ("fallback" if decision.from_fallback else "none"),
            similarity=decision.similarity,
            action=decision.target or "noop",
            before_score=decision.report.score,
        )
        self.decision_log.append(record)
        if decision.kind == "action":
            self._apply(sim, decision, record)
        elif decision.kind == "pending":
            self.pending_decision = decision
            if self.on_revision is not None:
                self.on_revision("proposal", self, decision)

    def _apply(self, sim: Simulation, decision: Decision, record: DecisionRecord) -> None:
        sim.switch(decision.target)
        candidate = CandidateSolution(
            problem=decision.problem,
            actions=decision.actions,
            source_case_id=decision.source_case_id,
            similarity=decision.similarity,
        )
        self.open_review = PendingReview(
            candidate=candidate,
            before=decision.report,
            applied_at=sim.clock,
            # offered load of the decision window, for the drift estimate
            before_offered=self.metrics[-1].m.offered,
            record=record,
        )

    def resolve_pending(self, sim: Simulation, actions: tuple[Action, ...] | None) -> None:
        """Operator verdict on a pending (fallback-assisted) proposal."""
        decision = self.pending_decision
        if decision is None:
            raise ConfigurationError("no pending decision to resolve")
        self.pending_decision = None
        if not actions:
            return  # rejected proposal: nothing applied, nothing learned
        record = self.decision_log[-1]
        decision.actions = tuple(actions)
        record.action = decision.target or "noop"
        record.source_case_id = "operator"
        if decision.target and decision.target != sim.state.model:
            self._apply(sim, decision, record)

    def _finish_review(self, sim: Simulation, m: Measurements) -> ReviewResult:
        review = self.open_review
        self.open_review = None
        problem_after = build_problem(self.engine, sim.state.model, m)
        after = evaluate_window(self.engine, problem_after)
        before_offered = review.before_offered
        if before_offered > 0:
            drift = abs(m.offered - before_offered) / before_offered
        else:
            drift = 0.0 if m.offered == 0 else 1.0
        case = revise(
            self.engine.schema, review.candidate, review.before, after,
            drift=drift, now=sim.clock, case_id=self.engine.next_case_id(),
            drift_threshold=self.cfg.drift_threshold,
            discount_factor=self.cfg.discount_factor,
        )
        review.record.after_score = after.score
        if self.cfg.mode == "assisted":
            result = ReviewResult(case=case, retained=False, queued=True)
            if self.on_revision is not None:
                self.on_revision("retention", self, (review, case, after))
            return result
        retained = self.retain_case(case)
        review.record.retained = retained
        return ReviewResult(case=case, retained=retained)

    def retain_case(self, case: Case) -> bool:
        if case.outcome == "unvalidated":
            return False
        return self.engine.db.retain(case, self.engine.sim_config,
                                     ttl=self.cfg.case_ttl) == STORED


def make_engine(scenario: Scenario, overrides: dict | None = None,
                db: CaseDatabase | None = None) -> BamCbrEngine:
    data = dict(scenario.cbr)
    data.update(overrides or {})
    cfg = BamCbrConfig.from_dict(data)
    engine = BamCbrEngine(cfg, scenario.link, seed=scenario.seed, db=db)
    if cfg.seed_premises and db is None:
        engine.seed_premises()
    return engine


def run_cbr(scenario: Scenario, engine: BamCbrEngine | None = None,
            on_revision=None) -> tuple[Simulation, ControlLoop, BamCbrEngine]:
    """Run the full scenario under CBR control (batch mode)."""
    if engine is None:
        engine = make_engine(scenario)
    requests = generate_requests(scenario.traffic, scenario.seed, scenario.duration)
    sim = Simulation(scenario.link, scenario.initial_model, requests,
                     scenario.duration, scenario.window)
    loop = ControlLoop(engine, on_revision=on_revision)
    sim.run(on_window=loop.on_window)
    return sim, loop, engine


@dataclass
class SummaryRow:
    model: str
    blocking: float
    utilization: float
    preemptions: int
    devolutions: int
    requests: int
    blocked: int


def _summarize(label: str, sim: Simulation) -> SummaryRow:
    requests = sum(w.requests for w in sim.windows)
    blocked = sum(w.blocked for w in sim.windows)
    windows = len(sim.windows) or 1
    return SummaryRow(
        model=label,
        blocking=(blocked / requests) if requests else 0.0,
        utilization=sum(w.utilization for w in sim.windows) / windows,
        preemptions=sim.state.preemptions,
        devolutions=sim.state.devolutions,
        requests=requests,
        blocked=blocked,
    )


def compare_models(scenario: Scenario, models: list[str]) -> list[SummaryRow]:
    """Identical seeded traffic under each fixed model, plus a CBR-driven run."""
    requests = generate_requests(scenario.traffic, scenario.seed, scenario.duration)
    rows = []
    for model in models:
        sim = Simulation(scenario.link, model, list(requests),
                         scenario.duration, scenario.window)
        sim.run()
        rows.append(_summarize(model, sim))
    sim, _, _ = run_cbr(scenario)
    rows.append(_summarize("CBR", sim))
    return rows
