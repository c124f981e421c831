"""Pydantic request/response models for the HTTP control plane."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class MeasurementsModel(BaseModel):
    window_start: float
    window_end: float
    utilization: float
    throughput: float
    blocking: float
    preemptions: int
    devolutions: int
    offered: float
    carried: float
    requests: int
    blocked: int
    loss: Optional[float] = None


class ViolationModel(BaseModel):
    attribute: str
    measured: float
    bound: float
    amount: float


class EvaluationModel(BaseModel):
    score: float
    violations: list[ViolationModel] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)


class StateResponse(BaseModel):
    model: str
    clock: float
    done: bool
    paused: bool
    mode: str
    window: Optional[MeasurementsModel] = None
    score: Optional[float] = None
    case_count: int
    pending_revisions: int


class ActionModel(BaseModel):
    name: str
    parameters: dict[str, Any] = Field(default_factory=dict)


class CaseSummary(BaseModel):
    id: str
    outcome: str
    confidence: float
    created_at: float
    valid_until: Optional[float] = None
    partition: str
    actions: list[ActionModel]


class CasesResponse(BaseModel):
    cases: list[CaseSummary]
    next_cursor: Optional[str] = None
    total: int


class BreakdownRow(BaseModel):
    attribute: str
    function: str
    query_value: Any
    case_value: Any
    local: float
    weight: float


class ProvenanceModel(BaseModel):
    source_case_id: Optional[str] = None
    similarity: Optional[float] = None
    breakdown: list[BreakdownRow] = Field(default_factory=list)


class RevisionModel(BaseModel):
    id: str
    kind: Literal["proposal", "retention"]
    status: Literal["pending", "decided"]
    created_at: float
    trigger: str
    problem: dict[str, dict[str, Any]]
    actions: list[ActionModel]
    provenance: ProvenanceModel
    before: EvaluationModel
    after: Optional[EvaluationModel] = None
    outcome: Optional[str] = None
    verdict: Optional[str] = None
    note: str = ""


class RevisionsResponse(BaseModel):
    revisions: list[RevisionModel]


class DecisionRequest(BaseModel):
    verdict: Literal["approve", "adjust", "reject"]
    actions: Optional[list[ActionModel]] = None
    note: str = ""


class ErrorResponse(BaseModel):
    detail: str
