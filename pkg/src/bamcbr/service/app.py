"""FastAPI facade over a running simulation session."""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles

from bamcbr.cbr.engine import EvaluationReport
from bamcbr.cbr.schema import Action, Case
from bamcbr.service.models import (
    ActionModel,
    BreakdownRow,
    CaseSummary,
    CasesResponse,
    DecisionRequest,
    EvaluationModel,
    MeasurementsModel,
    ProvenanceModel,
    RevisionModel,
    RevisionsResponse,
    StateResponse,
    ViolationModel,
)
from bamcbr.service.session import (
    ConflictError,
    NotFoundError,
    PendingRevision,
    SimulationSession,
)

HEARTBEAT_INTERVAL = 1.0
POLL_INTERVAL = 0.05


def _evaluation_model(report: EvaluationReport | None) -> EvaluationModel | None:
    if report is None:
        return None
    return EvaluationModel(
        score=report.score,
        violations=[ViolationModel(attribute=v.attribute, measured=v.measured,
                                   bound=v.bound, amount=v.amount)
                    for v in report.violations],
        warnings=report.warnings,
    )


def _problem_dict(problem) -> dict:
    def values(bucket):
        return {k: (sorted(v) if isinstance(v, frozenset) else v)
                for k, v in bucket.items()}
    return {"sa": values(problem.sa), "ca": values(problem.ca),
            "m": values(problem.m), "t": values(problem.t)}


def _case_summary(case: Case) -> CaseSummary:
    return CaseSummary(
        id=case.id,
        outcome=case.outcome,
        confidence=case.confidence,
        created_at=case.created_at,
        valid_until=case.valid_until,
        partition=case.context_signature,
        actions=[ActionModel(name=a.name, parameters=dict(a.parameters))
                 for a in case.solution],
    )


def _revision_model(rev: PendingRevision) -> RevisionModel:
    return RevisionModel(
        id=rev.id,
        kind=rev.kind,
        status=rev.status,
        created_at=rev.created_at,
        trigger=rev.trigger,
        problem=_problem_dict(rev.problem),
        actions=[ActionModel(name=a.name, parameters=dict(a.parameters))
                 for a in rev.actions],
        provenance=ProvenanceModel(
            source_case_id=rev.source_case_id,
            similarity=rev.similarity,
            breakdown=[BreakdownRow(**row) for row in rev.breakdown],
        ),
        before=_evaluation_model(rev.before),
        after=_evaluation_model(rev.after),
        outcome=rev.outcome,
        verdict=rev.verdict,
        note=rev.note,
    )


def create_app(session: SimulationSession, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="bamcbr", version="0.1.0")
    app.state.session = session

    @app.get("/state", response_model=StateResponse)
    def get_state():
        snap = session.state_snapshot()
        m = snap.pop("window")
        window = MeasurementsModel(**vars(m)) if m is not None else None
        return StateResponse(window=window, **snap)

    @app.get("/cases", response_model=CasesResponse)
    def list_cases(outcome: str | None = None, partition: str | None = None,
                   cursor: str | None = None, limit: int = Query(50, ge=1, le=500)):
        cases = session.list_cases(outcome=outcome, partition=partition)
        offset = 0
        if cursor is not None:
            try:
                offset = max(int(cursor), 0)
            except ValueError:
                raise HTTPException(status_code=400, detail="malformed cursor")
        page = cases[offset:offset + limit]
        next_cursor = str(offset + limit) if offset + limit < len(cases) else None
        return CasesResponse(cases=[_case_summary(c) for c in page],
                             next_cursor=next_cursor, total=len(cases))

    @app.get("/revisions", response_model=RevisionsResponse)
    def list_revisions(status: str | None = None):
        if status not in (None, "pending", "decided"):
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        revs = session.list_revisions(status=status)
        return RevisionsResponse(revisions=[_revision_model(r) for r in revs])

    @app.post("/revisions/{revision_id}/decision", response_model=RevisionModel,
              responses={404: {"description": "unknown revision"},
                         409: {"description": "already decided or invalid verdict"}})
    def submit_decision(revision_id: str, body: DecisionRequest):
        actions = None
        if body.actions is not None:
            actions = [Action(a.name, dict(a.parameters)) for a in body.actions]
        try:
            rev = session.submit_decision(revision_id, body.verdict, actions, body.note)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return _revision_model(rev)

    @app.get("/events")
    async def stream_events(since: int = Query(0, ge=0)):
        async def generate():
            last = since
            idle = 0.0
            while True:
                events = session.events_since(last)
                if events:
                    idle = 0.0
                    for event in events:
                        last = event["seq"]
                        yield json.dumps(event, separators=(",", ":")) + "\n"
                else:
                    await asyncio.sleep(POLL_INTERVAL)
                    idle += POLL_INTERVAL
                    if idle >= HEARTBEAT_INTERVAL:
                        idle = 0.0
                        yield json.dumps({"seq": session.next_seq(),
                                          "type": "heartbeat", "data": {}},
                                         separators=(",", ":")) + "\n"

        return StreamingResponse(generate(), media_type="application/x-ndjson")

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    @app.on_event("startup")
    def _start():
        session.start()

    @app.on_event("shutdown")
    def _stop():
        session.stop()

    return app
