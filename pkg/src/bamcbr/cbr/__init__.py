"""Domain-agnostic case-based reasoning engine."""

from bamcbr.cbr.schema import (
    Action,
    AttributeSchema,
    Case,
    CaseSchema,
    CategoricalDomain,
    LabelSetDomain,
    LocalSimilaritySpec,
    NumericDomain,
    Problem,
    SimilarityConfig,
)
from bamcbr.cbr.similarity import global_similarity, local_similarity
from bamcbr.cbr.database import REJECTED_EQUIVALENT, STORED, CaseDatabase
from bamcbr.cbr.engine import (
    CandidateSolution,
    EvaluationReport,
    evaluate,
    fallback_solution,
    reuse,
    revise,
)

__all__ = [
    "Action", "AttributeSchema", "Case", "CaseSchema", "CategoricalDomain",
    "LabelSetDomain", "LocalSimilaritySpec", "NumericDomain", "Problem",
    "SimilarityConfig", "global_similarity", "local_similarity",
    "CaseDatabase", "STORED", "REJECTED_EQUIVALENT",
    "CandidateSolution", "EvaluationReport", "evaluate", "fallback_solution",
    "reuse", "revise",
]
