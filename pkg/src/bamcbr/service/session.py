"""Single-writer simulation session behind the HTTP control plane.

All mutations (simulation ticks, operator verdicts) run under one lock, so
concurrent requests observe a serialized engine. In assisted mode the
simulation clock pauses while any revision is pending.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from bamcbr.errors import BamCbrError, ConfigurationError
from bamcbr.cbr.database import CaseDatabase
from bamcbr.cbr.engine import EvaluationReport
from bamcbr.cbr.schema import Action, Case, Problem
from bamcbr.cbr.similarity import similarity_breakdown
from bamcbr.binding.config import SWITCH_BAM
from bamcbr.binding.controller import ControlLoop, Decision, make_engine
from bamcbr.sim.scenario import Scenario, Simulation, generate_requests


class ConflictError(BamCbrError):
    """The revision was already decided, or the verdict is not applicable."""


class NotFoundError(BamCbrError):
    """Unknown revision or case id."""


@dataclass
class PendingRevision:
    id: str
    kind: str  # proposal | retention
    status: str = "pending"
    created_at: float = 0.0
    trigger: str = ""
    problem: Problem | None = None
    actions: tuple[Action, ...] = ()
    source_case_id: str | None = None
    similarity: float | None = None
    breakdown: list = field(default_factory=list)
    before: EvaluationReport | None = None
    after: EvaluationReport | None = None
    case: Case | None = None
    outcome: str | None = None
    verdict: str | None = None
    note: str = ""


class SimulationSession:
    """Owns one scenario run, its engine, event log and revision queue."""

    def __init__(self, scenario: Scenario, overrides: dict | None = None,
                 db: CaseDatabase | None = None, tick_interval: float = 0.0):
        self.scenario = scenario
        self.engine = make_engine(scenario, overrides=overrides, db=db)
        requests = generate_requests(scenario.traffic, scenario.seed, scenario.duration)
        self.sim = Simulation(scenario.link, scenario.initial_model, requests,
                              scenario.duration, scenario.window)
        self.loop = ControlLoop(self.engine, on_revision=self._queue_revision)
        self.revisions: dict[str, PendingRevision] = {}
        self.events: list[dict] = []
        self._seq = 0
        self._revision_counter = 0
        self._lock = threading.RLock()
        self._tick_interval = tick_interval
        self._stop = threading.Event()
        self._ticker: threading.Thread | None = None

    # -- lifecycle -----------------------------------------------------------

    def start(self) -> None:
        if self._tick_interval <= 0 or self._ticker is not None:
            return
        self._ticker = threading.Thread(target=self._run_ticker, daemon=True)
        self._ticker.start()

    def stop(self) -> None:
        self._stop.set()
        if self._ticker is not None:
            self._ticker.join(timeout=2.0)
            self._ticker = None

    def _run_ticker(self) -> None:
        while not self._stop.wait(self._tick_interval):
            self.step()
            if self.sim.done:
                return

    # -- events ---------------------------------------------------------------

    def _emit(self, event_type: str, data: dict) -> None:
        self._seq += 1
        self.events.append({"seq": self._seq, "type": event_type, "data": data})

    def next_seq(self) -> int:
        with self._lock:
            self._seq += 1
            return self._seq

    def events_since(self, seq: int) -> list[dict]:
        with self._lock:
            return [e for e in self.events if e["seq"] > seq]

    # -- stepping ---------------------------------------------------------------

    @property
    def paused(self) -> bool:
        return any(r.status == "pending" for r in self.revisions.values())

    def step(self) -> bool:
        """Advance one window unless paused or finished; returns True if advanced."""
        with self._lock:
            if self.paused or self.sim.done:
                return False
            decisions_before = len(self.loop.decision_log)
            m = self.sim.advance_window()
            if m is None:
                return False
            self.loop.on_window(self.sim, m)
            for record in self.loop.decision_log[decisions_before:]:
                self._emit("decision", {
                    "time": record.time,
                    "trigger": record.trigger,
                    "source_case_id": record.source_case_id,
                    "similarity": record.similarity,
                    "action": record.action,
                    "before_score": record.before_score,
                })
            self._emit("window_closed", {
                "window_start": m.window_start,
                "window_end": m.window_end,
                "model": self.sim.state.model,
                "utilization": m.utilization,
                "throughput": m.throughput,
                "blocking": m.blocking,
            })
            return True

    # -- revision queue ---------------------------------------------------------

    def _queue_revision(self, kind: str, loop: ControlLoop, payload) -> None:
        self._revision_counter += 1
        rev = PendingRevision(id=f"rev-{self._revision_counter:04d}", kind=kind,
                              created_at=self.sim.clock)
        if kind == "proposal":
            decision: Decision = payload
            rev.trigger = decision.trigger
            rev.problem = decision.problem
            rev.actions = decision.actions
            rev.before = decision.report
        else:
            review, case, after = payload
            rev.trigger = "review"
            rev.problem = case.problem
            rev.actions = tuple(case.solution)
            rev.source_case_id = review.candidate.source_case_id
            rev.similarity = review.candidate.similarity
            rev.before = review.before
            rev.after = after
            rev.case = case
            rev.outcome = case.outcome
        if rev.source_case_id:
            source = self.engine.db.get(rev.source_case_id)
            if source is not None and rev.problem is not None:
                rev.breakdown = similarity_breakdown(
                    self.engine.schema, self.engine.sim_config,
                    rev.problem, source.problem)
        self.revisions[rev.id] = rev
        self._emit("revision_queued", {"id": rev.id, "kind": rev.kind,
                                       "created_at": rev.created_at})

    def submit_decision(self, revision_id: str, verdict: str,
                        actions: list[Action] | None, note: str) -> PendingRevision:
        """Apply an operator verdict; exactly one submission can succeed."""
        with self._lock:
            rev = self.revisions.get(revision_id)
            if rev is None:
                raise NotFoundError(f"unknown revision {revision_id!r}")
            if rev.status != "pending":
                raise ConflictError(f"revision {revision_id!r} already decided")
            if verdict == "adjust" and not actions:
                raise ConflictError("adjust verdict requires actions")
            if rev.kind == "proposal":
                self._decide_proposal(rev, verdict, actions)
            else:
                self._decide_retention(rev, verdict, actions)
            rev.status = "decided"
            rev.verdict = verdict
            rev.note = note
            self._emit("revision_decided", {"id": rev.id, "verdict": verdict,
                                            "retained": rev.case is not None})
            return rev

    def _decide_proposal(self, rev: PendingRevision, verdict: str,
                         actions: list[Action] | None) -> None:
        if verdict == "approve":
            if not rev.actions:
                raise ConflictError("proposal has no candidate actions; use adjust")
            chosen = rev.actions
        elif verdict == "adjust":
            chosen = tuple(actions)
            self._check_target(chosen)
            rev.actions = chosen
        else:
            chosen = None
        self.loop.resolve_pending(self.sim, chosen)

    def _decide_retention(self, rev: PendingRevision, verdict: str,
                          actions: list[Action] | None) -> None:
        case = rev.case
        if verdict == "adjust":
            self._check_target(tuple(actions), allow_current=True)
            case.solution = tuple(actions)
            rev.actions = case.solution
            case.outcome = "positive"
        elif verdict == "reject":
            case.outcome = "negative"
        elif case.outcome == "unvalidated":
            case.outcome = "positive"  # approval is the specialist's confirmation
        self.loop.retain_case(case)
        rev.outcome = case.outcome

    def _check_target(self, actions: tuple[Action, ...], allow_current: bool = False) -> None:
        for action in actions:
            if action.name != SWITCH_BAM:
                raise ConflictError(f"unknown action {action.name!r}")
            target = action.parameters.get("target")
            if target not in ("MAM", "RDM", "ATCS"):
                raise ConflictError(f"unknown BAM model {target!r}")
            if not allow_current and target == self.sim.state.model:
                raise ConflictError("adjusted action must differ from the current model")

    # -- snapshots ---------------------------------------------------------------

    def state_snapshot(self) -> dict:
        with self._lock:
            m = self.sim.windows[-1] if self.sim.windows else None
            score = None
            if m is not None:
                from bamcbr.binding.controller import build_problem, evaluate_window
                problem = build_problem(self.engine, self.sim.state.model, m)
                score = evaluate_window(self.engine, problem).score
            return {
                "model": self.sim.state.model,
                "clock": self.sim.clock,
                "done": self.sim.done,
                "paused": self.paused,
                "mode": self.engine.cfg.mode,
                "window": m,
                "score": score,
                "case_count": len(self.engine.db),
                "pending_revisions": sum(1 for r in self.revisions.values()
                                         if r.status == "pending"),
            }

    def list_cases(self, outcome: str | None = None, partition: str | None = None
                   ) -> list[Case]:
        with self._lock:
            cases = list(self.engine.db.cases())
        if outcome is not None:
            cases = [c for c in cases if c.outcome == outcome]
        if partition is not None:
            cases = [c for c in cases if c.context_signature == partition]
        cases.sort(key=lambda c: (-c.created_at, c.id))
        return cases

    def list_revisions(self, status: str | None = None) -> list[PendingRevision]:
        with self._lock:
            revs = list(self.revisions.values())
        if status is not None:
            revs = [r for r in revs if r.status == status]
        revs.sort(key=lambda r: (-r.created_at, r.id))
        return revs
