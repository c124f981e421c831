"""Case schema layer: attribute declarations, value domains, cases and
similarity configuration.

A problem is a flat attribute->value record split into four buckets:
static attributes (SA), contextual attributes (CA), measurements (M) and
tolerances (T). Static attributes are documentary and never indexed for
similarity. Contextual attributes that are not indexed, together with the
tolerance values, define the context partition of the case database.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from bamcbr.errors import ConfigurationError, SchemaViolation

Value = Union[int, float, str, frozenset]

KINDS = ("static", "contextual", "measurement", "tolerance")
OUTCOMES = ("positive", "negative", "unvalidated")
LOCAL_FUNCTIONS = ("equality", "linear", "ladder", "intersection", "contrast", "maximum")

# problem bucket each attribute kind lives in
_BUCKET = {"static": "sa", "contextual": "ca", "measurement": "m", "tolerance": "t"}


@dataclass(frozen=True)
class NumericDomain:
    min: float
    max: float
    unit: str = ""

    def __post_init__(self):
        if not self.min < self.max:
            raise ConfigurationError(f"numeric domain requires min < max, got [{self.min}, {self.max}]")

    @property
    def width(self) -> float:
        return self.max - self.min

    def contains(self, value: Value) -> bool:
        return isinstance(value, (int, float)) and not isinstance(value, bool) \
            and self.min <= value <= self.max


@dataclass(frozen=True)
class CategoricalDomain:
    labels: frozenset

    def contains(self, value: Value) -> bool:
        return value in self.labels


@dataclass(frozen=True)
class LabelSetDomain:
    labels: frozenset

    def contains(self, value: Value) -> bool:
        return isinstance(value, frozenset) and value <= self.labels


Domain = Union[NumericDomain, CategoricalDomain, LabelSetDomain]


@dataclass(frozen=True)
class LocalSimilaritySpec:
    """One of the local similarity function variants, with its parameters."""

    function: str
    step_width: float | None = None
    theta: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.function not in LOCAL_FUNCTIONS:
            raise ConfigurationError(f"unknown local similarity function {self.function!r}")
        if self.function == "ladder":
            if self.step_width is None or self.step_width <= 0:
                raise ConfigurationError("ladder function requires step_width > 0")
        if self.function == "contrast":
            if self.theta <= 0 or self.alpha < 0 or self.beta < 0:
                raise ConfigurationError("contrast function requires theta > 0 and alpha, beta >= 0")


@dataclass(frozen=True)
class AttributeSchema:
    """Declaration of one case attribute."""

    name: str
    kind: str
    domain: Domain
    local_fn: LocalSimilaritySpec = LocalSimilaritySpec("equality")
    weight: float = 0.0
    indexed: bool = False
    # for measurements: optimization direction used by the evaluation function
    objective: str | None = None
    # for tolerances: name of the measurement attribute this tolerance bounds
    refines: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "static" and self.indexed:
            raise ConfigurationError(f"attribute {self.name!r}: static attributes cannot be indexed")
        if self.weight < 0:
            raise ConfigurationError(f"attribute {self.name!r}: weight must be non-negative")
        if self.objective not in (None, "minimize", "maximize"):
            raise ConfigurationError(f"attribute {self.name!r}: bad objective {self.objective!r}")
        if self.local_fn.function == "maximum" and isinstance(self.domain, NumericDomain) \
                and self.domain.min < 0:
            raise ConfigurationError(
                f"attribute {self.name!r}: maximum function requires a non-negative domain")

    @property
    def bucket(self) -> str:
        return _BUCKET[self.kind]


@dataclass(frozen=True)
class Problem:
    """The problem part of a case: SA/CA/M/T value buckets."""

    sa: Mapping[str, Value] = field(default_factory=dict)
    ca: Mapping[str, Value] = field(default_factory=dict)
    m: Mapping[str, Value] = field(default_factory=dict)
    t: Mapping[str, Value] = field(default_factory=dict)

    def bucket(self, name: str) -> Mapping[str, Value]:
        return getattr(self, name)


@dataclass(frozen=True)
class Action:
    """A named operation from the domain's action catalog."""

    name: str
    parameters: Mapping[str, Value] = field(default_factory=dict)

    def key(self):
        return (self.name, tuple(sorted(self.parameters.items())))


@dataclass
class Case:
    """A retained experience: problem, solution and validity metadata."""

    id: str
    problem: Problem
    solution: tuple[Action, ...]
    outcome: str
    confidence: float
    created_at: float
    valid_until: float | None
    context_signature: str

    def expired(self, now: float) -> bool:
        return self.valid_until is not None and self.valid_until < now

    def solution_key(self):
        return tuple(a.key() for a in self.solution)


def _canonical(value: Value):
    if isinstance(value, frozenset):
        return sorted(value)
    return value


class CaseSchema:
    """The full attribute declaration set plus the action catalog."""

    def __init__(self, attributes: Iterable[AttributeSchema], action_names: Iterable[str] = ()):
        self.attributes: dict[str, AttributeSchema] = {}
        for attr in attributes:
            if attr.name in self.attributes:
                raise ConfigurationError(f"duplicate attribute {attr.name!r}")
            self.attributes[attr.name] = attr
        self.action_names = frozenset(action_names)
        self.indexed = [a for a in self.attributes.values() if a.indexed]
        if self.indexed and sum(a.weight for a in self.indexed) <= 0:
            raise ConfigurationError("weights of indexed attributes must sum to a positive value")

    def value_of(self, problem: Problem, attr: AttributeSchema) -> Value | None:
        return problem.bucket(attr.bucket).get(attr.name)

    def validate_problem(self, problem: Problem) -> None:
        """Raise SchemaViolation unless every problem value matches a declaration."""
        for bucket_name, kind in (("sa", "static"), ("ca", "contextual"),
                                  ("m", "measurement"), ("t", "tolerance")):
            for name, value in problem.bucket(bucket_name).items():
                attr = self.attributes.get(name)
                if attr is None:
                    raise SchemaViolation(f"undeclared attribute {name!r}")
                if attr.kind != kind:
                    raise SchemaViolation(
                        f"attribute {name!r} is declared {attr.kind}, found in {kind} bucket")
                if not attr.domain.contains(value):
                    raise SchemaViolation(f"value {value!r} outside domain of attribute {name!r}")

    def validate_case(self, case: Case) -> None:
        self.validate_problem(case.problem)
        if not case.solution:
            raise SchemaViolation(f"case {case.id!r}: retained cases need a non-empty solution")
        for action in case.solution:
            if self.action_names and action.name not in self.action_names:
                raise SchemaViolation(f"case {case.id!r}: unknown action {action.name!r}")
        if case.outcome not in OUTCOMES:
            raise SchemaViolation(f"case {case.id!r}: unknown outcome {case.outcome!r}")

    def context_signature(self, problem: Problem) -> str:
        """Digest of the non-indexed contextual values plus the tolerance set.

        Indexed contextual attributes (e.g. the active BAM) take part in
        similarity instead of partitioning, so they are excluded here.
        """
        ca = {name: _canonical(v) for name, v in problem.ca.items()
              if not self.attributes[name].indexed}
        tol = {name: _canonical(v) for name, v in problem.t.items()}
        blob = json.dumps({"ca": ca, "t": tol}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SimilarityConfig:
    """Per-attribute (function, weight) table plus retrieval thresholds."""

    table: Mapping[str, tuple[LocalSimilaritySpec, float]]
    cutoff: float
    equivalence: float
    k: int = 5

    def __post_init__(self):
        for bound, label in ((self.cutoff, "cutoff"), (self.equivalence, "equivalence")):
            if not 0.0 <= bound <= 1.0:
                raise ConfigurationError(f"{label} threshold must lie in [0, 1]")
        if self.equivalence < self.cutoff:
            raise ConfigurationError("equivalence threshold must be >= cutoff threshold")
        if self.k < 1:
            raise ConfigurationError("k must be a positive integer")

    @classmethod
    def from_schema(cls, schema: CaseSchema, cutoff: float, equivalence: float,
                    k: int = 5) -> "SimilarityConfig":
        table = {a.name: (a.local_fn, a.weight) for a in schema.indexed}
        return cls(table=table, cutoff=cutoff, equivalence=equivalence, k=k)
