"""Local and global (weighted k-nearest-neighbor) similarity."""

from __future__ import annotations

from bamcbr.errors import ConfigurationError, EvaluationError
from bamcbr.cbr.schema import (
    CaseSchema,
    Domain,
    LocalSimilaritySpec,
    NumericDomain,
    Problem,
    SimilarityConfig,
    Value,
)


def _require_numeric(fn: str, a: Value, b: Value, domain: Domain) -> NumericDomain:
    if not isinstance(domain, NumericDomain):
        raise ConfigurationError(f"{fn} function requires a numeric domain")
    for v in (a, b):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigurationError(f"{fn} function requires numeric values, got {v!r}")
    return domain


def _require_sets(fn: str, a: Value, b: Value):
    for v in (a, b):
        if not isinstance(v, frozenset):
            raise ConfigurationError(f"{fn} function requires set values, got {v!r}")


def local_similarity(spec: LocalSimilaritySpec, a: Value, b: Value, domain: Domain) -> float:
    """Similarity of two attribute values in [0, 1], per the function variant."""
    fn = spec.function
    if fn == "equality":
        return 1.0 if a == b else 0.0
    if fn == "linear":
        dom = _require_numeric(fn, a, b, domain)
        return 1.0 - abs(a - b) / dom.width
    if fn == "ladder":
        _require_numeric(fn, a, b, domain)
        return 1.0 if abs(a - b) <= spec.step_width else 0.0
    if fn == "maximum":
        _require_numeric(fn, a, b, domain)
        hi = max(a, b)
        return 1.0 if hi == 0 else min(a, b) / hi
    if fn == "intersection":
        _require_sets(fn, a, b)
        union = a | b
        if not union:
            return 1.0
        return len(a & b) / len(union)
    if fn == "contrast":
        _require_sets(fn, a, b)
        union = a | b
        if not union:
            return 1.0
        raw = spec.theta * len(a & b) - spec.alpha * len(a - b) - spec.beta * len(b - a)
        top = spec.theta * len(union)
        return min(max(raw, 0.0), top) / top
    raise ConfigurationError(f"unknown local similarity function {fn!r}")


def similarity_breakdown(schema: CaseSchema, config: SimilarityConfig,
                         q: Problem, c: Problem) -> list[dict]:
    """Per-attribute rows behind a global similarity value, for display."""
    rows = []
    for attr in schema.indexed:
        entry = config.table.get(attr.name)
        if entry is None:
            continue
        spec, weight = entry
        qv = schema.value_of(q, attr)
        cv = schema.value_of(c, attr)
        if qv is None or cv is None:
            raise EvaluationError(f"missing indexed attribute {attr.name!r}")
        rows.append({
            "attribute": attr.name,
            "function": spec.function,
            "query_value": sorted(qv) if isinstance(qv, frozenset) else qv,
            "case_value": sorted(cv) if isinstance(cv, frozenset) else cv,
            "local": local_similarity(spec, qv, cv, attr.domain),
            "weight": weight,
        })
    return rows


def global_similarity(schema: CaseSchema, config: SimilarityConfig,
                      q: Problem, c: Problem) -> float:
    """Weighted mean of local similarities over the indexed attributes."""
    num = 0.0
    den = 0.0
    for attr in schema.indexed:
        entry = config.table.get(attr.name)
        if entry is None:
            continue
        spec, weight = entry
        qv = schema.value_of(q, attr)
        cv = schema.value_of(c, attr)
        if qv is None or cv is None:
            raise EvaluationError(f"missing indexed attribute {attr.name!r}")
        num += weight * local_similarity(spec, qv, cv, attr.domain)
        den += weight
    if den <= 0:
        raise ConfigurationError("similarity table has no positive weights")
    return num / den
