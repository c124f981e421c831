"""Case database: partitioned storage, retrieval, retention, forgetting and
the line-delimited export format.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

from bamcbr.errors import ConfigurationError, SchemaViolation
from bamcbr.cbr.schema import (
    Action,
    Case,
    CaseSchema,
    LabelSetDomain,
    Problem,
    SimilarityConfig,
)
from bamcbr.cbr.similarity import global_similarity

EXPORT_FORMAT = "bamcbr-casedb"
EXPORT_VERSION = 1

STORED = "stored"
REJECTED_EQUIVALENT = "rejected_equivalent"


class CaseDatabase:
    """Cases partitioned by context signature, insertion-ordered within one."""

    def __init__(self, schema: CaseSchema):
        self.schema = schema
        self._partitions: dict[str, list[Case]] = {}

    def __len__(self) -> int:
        return sum(len(p) for p in self._partitions.values())

    def cases(self) -> Iterator[Case]:
        for partition in self._partitions.values():
            yield from partition

    def partition(self, signature: str) -> list[Case]:
        return self._partitions.get(signature, [])

    def partitions(self) -> list[str]:
        return list(self._partitions)

    def get(self, case_id: str) -> Case | None:
        for case in self.cases():
            if case.id == case_id:
                return case
        return None

    def retrieve(self, q: Problem, config: SimilarityConfig,
                 now: float) -> list[tuple[Case, float]]:
        """Unexpired same-partition cases at similarity >= cutoff, best first.

        Positive cases are dropped when a negative case at similarity >= cutoff
        carries an identical action list (contraindication).
        """
        signature = self.schema.context_signature(q)
        scored: list[tuple[Case, float]] = []
        for case in self.partition(signature):
            if case.expired(now):
                continue
            sim = global_similarity(self.schema, config, q, case.problem)
            if sim >= config.cutoff:
                scored.append((case, sim))
        vetoed = {case.solution_key() for case, _ in scored if case.outcome == "negative"}
        scored = [(case, sim) for case, sim in scored
                  if not (case.outcome == "positive" and case.solution_key() in vetoed)]
        scored.sort(key=lambda cs: (-cs[1], -cs[0].created_at, cs[0].id))
        return scored[:config.k]

    def retain(self, case: Case, config: SimilarityConfig, ttl: float | None,
               allow_unvalidated: bool = False) -> str:
        """Store a case unless an equivalent same-outcome case already exists."""
        if case.outcome == "unvalidated" and not allow_unvalidated:
            raise ConfigurationError("unvalidated cases are not retained by default")
        self.schema.validate_case(case)
        partition = self._partitions.setdefault(case.context_signature, [])
        for existing in partition:
            if existing.outcome != case.outcome or existing.expired(case.created_at):
                continue
            sim = global_similarity(self.schema, config, case.problem, existing.problem)
            if sim >= config.equivalence:
                return REJECTED_EQUIVALENT
        case.valid_until = None if ttl is None else case.created_at + ttl
        partition.append(case)
        return STORED

    def forget(self, now: float) -> int:
        """Purge every case whose validity ended before `now`."""
        purged = 0
        for signature in list(self._partitions):
            kept = [c for c in self._partitions[signature] if not c.expired(now)]
            purged += len(self._partitions[signature]) - len(kept)
            if kept:
                self._partitions[signature] = kept
            else:
                del self._partitions[signature]
        return purged

    def seed_premises(self, premises: Iterable[Case], config: SimilarityConfig) -> int:
        """Retain known problem->solution rules as positive, never-expiring cases."""
        stored = 0
        for premise in premises:
            try:
                self.schema.validate_case(premise)
            except SchemaViolation as exc:
                raise ConfigurationError(f"premise {premise.id!r}: {exc}") from exc
            premise.outcome = "positive"
            premise.confidence = 1.0
            if self.retain(premise, config, ttl=None) == STORED:
                stored += 1
        return stored

    # -- export / import ----------------------------------------------------

    def export_file(self, path: str | Path) -> int:
        """Write one case per line; returns the number of cases written."""
        lines = [json.dumps({"format": EXPORT_FORMAT, "version": EXPORT_VERSION},
                            sort_keys=True, separators=(",", ":"))]
        count = 0
        for case in self.cases():
            lines.append(json.dumps(_case_to_record(case), sort_keys=True,
                                    separators=(",", ":")))
            count += 1
        Path(path).write_text("\n".join(lines) + "\n")
        return count

    @classmethod
    def import_file(cls, schema: CaseSchema, path: str | Path) -> "CaseDatabase":
        text = Path(path).read_text().splitlines()
        if not text:
            raise ConfigurationError(f"empty case database file {path}")
        header = json.loads(text[0])
        if header.get("format") != EXPORT_FORMAT or header.get("version") != EXPORT_VERSION:
            raise ConfigurationError(f"unrecognized case database header in {path}")
        db = cls(schema)
        for line in text[1:]:
            if not line.strip():
                continue
            case = _case_from_record(schema, json.loads(line))
            schema.validate_case(case)
            db._partitions.setdefault(case.context_signature, []).append(case)
        return db


def _values_out(values):
    return {k: (sorted(v) if isinstance(v, frozenset) else v) for k, v in values.items()}


def _values_in(schema: CaseSchema, values):
    out = {}
    for k, v in values.items():
        attr = schema.attributes.get(k)
        if attr is not None and isinstance(attr.domain, LabelSetDomain):
            v = frozenset(v)
        out[k] = v
    return out


def _case_to_record(case: Case) -> dict:
    return {
        "id": case.id,
        "problem": {bucket: _values_out(case.problem.bucket(bucket))
                    for bucket in ("sa", "ca", "m", "t")},
        "solution": [{"name": a.name, "parameters": _values_out(a.parameters)}
                     for a in case.solution],
        "outcome": case.outcome,
        "confidence": case.confidence,
        "created_at": case.created_at,
        "valid_until": case.valid_until,
        "context_signature": case.context_signature,
    }


def _case_from_record(schema: CaseSchema, record: dict) -> Case:
    problem = Problem(**{bucket: _values_in(schema, record["problem"][bucket])
                         for bucket in ("sa", "ca", "m", "t")})
    solution = tuple(Action(name=a["name"], parameters=_values_in(schema, a["parameters"]))
                     for a in record["solution"])
    return Case(
        id=record["id"],
        problem=problem,
        solution=solution,
        outcome=record["outcome"],
        confidence=record["confidence"],
        created_at=record["created_at"],
        valid_until=record["valid_until"],
        context_signature=record["context_signature"],
    )
