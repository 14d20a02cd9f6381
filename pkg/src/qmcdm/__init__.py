"""Hierarchical quality models evaluated with rank-based multi-criteria
decision making: define a criteria tree, bind leaf metrics, derive weights
from ranks (roc/rr/rs) or swing ratings, and rank alternatives."""

from .engine import (
    EvaluationError,
    EvaluationResult,
    Method,
    MethodComparison,
    NodeValue,
    WhatIfOverride,
    apply_overrides,
    compare_methods,
    evaluate,
    kendall_tau_distance,
    rank,
    what_if,
)
from .document import (
    DatasetError,
    ModelParseError,
    parse_dataset,
    parse_model,
    serialize_model,
)
from .expression import (
    ExpressionError,
    ExpressionEvalError,
    ExpressionSyntaxError,
    eval_expression,
    format_expression,
    parse_expression,
)
from .model import (
    Alternative,
    BooleanType,
    CategoricalType,
    Direction,
    FormulaSpec,
    NumericType,
    QualityAttribute,
    QualityModel,
    RangedType,
    ScoreError,
    SmarterSpec,
    SmartsSpec,
    score_raw,
)
from .validation import ModelValidationError, ValidationIssue, validate_model
from .weights import (
    RankAssignment,
    RankWeighting,
    WeightError,
    WeightVector,
    rank_weights,
    roc_weights,
    rr_weights,
    rs_weights,
    scale_values,
    smarts_normalize,
    utility,
)

__version__ = "0.1.0"

__all__ = [
    "Alternative",
    "BooleanType",
    "CategoricalType",
    "DatasetError",
    "Direction",
    "EvaluationError",
    "EvaluationResult",
    "ExpressionError",
    "ExpressionEvalError",
    "ExpressionSyntaxError",
    "FormulaSpec",
    "Method",
    "MethodComparison",
    "ModelParseError",
    "ModelValidationError",
    "NodeValue",
    "NumericType",
    "QualityAttribute",
    "QualityModel",
    "RangedType",
    "RankAssignment",
    "RankWeighting",
    "ScoreError",
    "SmarterSpec",
    "SmartsSpec",
    "ValidationIssue",
    "WeightError",
    "WeightVector",
    "WhatIfOverride",
    "apply_overrides",
    "compare_methods",
    "eval_expression",
    "evaluate",
    "format_expression",
    "kendall_tau_distance",
    "parse_dataset",
    "parse_expression",
    "parse_model",
    "rank",
    "rank_weights",
    "roc_weights",
    "rr_weights",
    "rs_weights",
    "scale_values",
    "score_raw",
    "serialize_model",
    "smarts_normalize",
    "utility",
    "validate_model",
    "what_if",
]
