"""Structural validation of quality models.

Every rule returns an issue instead of raising, so a single pass reports
everything that is wrong. The issue set is independent of sibling
declaration order; only the ordering of the returned list follows the
document.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import expression
from .model import (
    BooleanType,
    CategoricalType,
    FormulaSpec,
    QualityModel,
    RangedType,
    SmarterSpec,
    SmartsSpec,
)
from .weights import RankWeighting


@dataclass(frozen=True)
class ValidationIssue:
    """One broken rule, anchored to the attribute (or declaration) id."""

    attribute_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.attribute_id}: {self.message}"


class ModelValidationError(ValueError):
    """Raised by operations that require a structurally valid model."""

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = list(issues)
        summary = "; ".join(str(i) for i in self.issues[:5])
        more = f" (+{len(self.issues) - 5} more)" if len(self.issues) > 5 else ""
        super().__init__(f"model failed validation: {summary}{more}")


def validate_model(model: QualityModel) -> list[ValidationIssue]:
    """Check every structural invariant; an empty list means the model is
    evaluable. Deterministic: the issue set never depends on sibling order."""
    issues: list[ValidationIssue] = []

    seen_ids: set[str] = set()
    for attr in model.root.walk():
        if attr.id in seen_ids:
            issues.append(ValidationIssue(attr.id, "duplicate-attribute-id",
                                          f"attribute id {attr.id!r} appears more than once"))
        seen_ids.add(attr.id)

    for tname, vtype in sorted(model.value_types.items()):
        if isinstance(vtype, RangedType):
            if not (vtype.minimum < vtype.maximum):
                issues.append(ValidationIssue(tname, "ranged-bounds",
                                              f"ranged type needs min < max, got [{vtype.minimum}, {vtype.maximum}]"))
        elif isinstance(vtype, CategoricalType):
            if not vtype.scores:
                issues.append(ValidationIssue(tname, "categorical-empty",
                                              "categorical type declares no categories"))
            for label, score in sorted(vtype.scores.items()):
                if not math.isfinite(score):
                    issues.append(ValidationIssue(tname, "categorical-score-not-finite",
                                                  f"category {label!r} has non-finite score {score}"))
        elif isinstance(vtype, BooleanType):
            if not (math.isfinite(vtype.true_score) and math.isfinite(vtype.false_score)):
                issues.append(ValidationIssue(tname, "boolean-score-not-finite",
                                              "boolean scores must be finite"))

    for attr in model.root.walk():
        if attr.is_leaf:
            if attr.value_type is None:
                issues.append(ValidationIssue(attr.id, "leaf-missing-valuetype",
                                              "leaf attribute declares no value type"))
            elif attr.value_type not in model.value_types:
                issues.append(ValidationIssue(attr.id, "unknown-valuetype",
                                              f"value type {attr.value_type!r} is not declared"))
            if attr.aggregation is not None:
                issues.append(ValidationIssue(attr.id, "leaf-has-aggregation",
                                              "leaf attribute must not declare an aggregation"))
            if attr.id not in model.metric_bindings:
                issues.append(ValidationIssue(attr.id, "leaf-missing-binding",
                                              "leaf attribute has no metric binding"))
        else:
            if attr.value_type is not None:
                issues.append(ValidationIssue(attr.id, "non-leaf-has-valuetype",
                                              "only leaves may declare a value type"))
            if attr.direction is not None:
                issues.append(ValidationIssue(attr.id, "non-leaf-has-direction",
                                              "only leaves may declare a direction"))
            if attr.aggregation is None:
                issues.append(ValidationIssue(attr.id, "non-leaf-missing-aggregation",
                                              "internal attribute must declare an aggregation"))
            else:
                issues.extend(_check_aggregation(attr))

    leaf_ids = {a.id for a in model.root.walk() if a.is_leaf}
    for bound_id in sorted(model.metric_bindings):
        if bound_id not in leaf_ids:
            issues.append(ValidationIssue(bound_id, "binding-not-a-leaf",
                                          f"metric binding targets {bound_id!r}, which is not a leaf attribute"))

    return issues


def _check_aggregation(attr) -> list[ValidationIssue]:
    issues: list[ValidationIssue] = []
    spec = attr.aggregation
    n = len(attr.children)
    if isinstance(spec, SmarterSpec):
        if len(spec.ranks) != n:
            issues.append(ValidationIssue(attr.id, "rank-count-mismatch",
                                          f"{len(spec.ranks)} ranks for {n} children"))
        for r in spec.ranks:
            if isinstance(r, bool) or not isinstance(r, int) or r < 1:
                issues.append(ValidationIssue(attr.id, "rank-not-positive",
                                              f"ranks must be integers >= 1, got {r!r}"))
        if spec.algorithm is RankWeighting.RS and len(spec.ranks) == n:
            for r in spec.ranks:
                if isinstance(r, int) and not isinstance(r, bool) and r > n:
                    issues.append(ValidationIssue(attr.id, "rank-exceeds-count",
                                                  f"rank {r} exceeds the {n} children rank-sum can cover"))
    elif isinstance(spec, SmartsSpec):
        if len(spec.weights) != n:
            issues.append(ValidationIssue(attr.id, "weight-count-mismatch",
                                          f"{len(spec.weights)} weights for {n} children"))
        for w in spec.weights:
            if not math.isfinite(w) or w <= 0.0:
                issues.append(ValidationIssue(attr.id, "weight-not-positive",
                                              f"weights must be finite and > 0, got {w}"))
    elif isinstance(spec, FormulaSpec):
        try:
            expr = expression.parse_expression(spec.formula)
        except expression.ExpressionSyntaxError as exc:
            issues.append(ValidationIssue(attr.id, "expression-syntax-error", str(exc)))
        else:
            child_ids = {c.id for c in attr.children}
            for ref in sorted(expression.referenced_ids(expr)):
                if ref not in child_ids:
                    issues.append(ValidationIssue(attr.id, "expression-unknown-reference",
                                                  f"formula references {ref!r}, not a direct child"))
    else:
        issues.append(ValidationIssue(attr.id, "unknown-aggregation",
                                      f"unsupported aggregation spec {type(spec).__name__}"))
    return issues
