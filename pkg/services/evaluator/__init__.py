from services.evaluator.heuristic import attribute_turn, evaluate_heuristic, rate_depth
from services.evaluator.remote import RemoteEvaluator, evaluate_remote
from services.evaluator.schema import (
    ASSESSMENT_SCHEMA,
    assessment_from_json,
    assessment_to_json,
)

__all__ = [
    "ASSESSMENT_SCHEMA",
    "RemoteEvaluator",
    "assessment_from_json",
    "assessment_to_json",
    "attribute_turn",
    "evaluate_heuristic",
    "evaluate_remote",
    "rate_depth",
]
