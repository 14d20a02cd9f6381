"""Bottom-up evaluation of alternatives against a quality model.

Each leaf's raw measurements are scored and min-max scaled across the
whole alternative set (per criterion, respecting its direction), so every
leaf contributes on a common [0, 1] scale. Internal nodes then combine
child values with the weights their aggregation strategy yields, up to
the root, whose value is the alternative's utility.

Because scaling is relative to the alternative set passed in, adding or
removing an alternative may change the others' scaled values (and hence
utilities); rankings are what the method family is designed to compare.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from . import expression
from .model import (
    AggregationSpec,
    Alternative,
    Direction,
    FormulaSpec,
    QualityAttribute,
    QualityModel,
    ScoreError,
    SmarterSpec,
    SmartsSpec,
    score_raw,
)
from .validation import ModelValidationError, validate_model
from .weights import (
    RankWeighting,
    WeightVector,
    rank_weights,
    rr_weights,
    scale_values,
    smarts_normalize,
    utility,
)


class Method(str, Enum):
    """Weighting methods available for cross-method comparison."""

    ROC = "roc"
    RR = "rr"
    RS = "rs"
    SWING = "swing"


class EvaluationError(Exception):
    """Evaluation could not complete; `details` lists each offending cell."""

    def __init__(self, message: str, details: Sequence[str] = ()):
        self.details = list(details)
        if self.details:
            message = f"{message}: " + "; ".join(self.details[:5])
            if len(self.details) > 5:
                message += f" (+{len(self.details) - 5} more)"
        super().__init__(message)


@dataclass(frozen=True)
class NodeValue:
    """Computed value of one attribute for one alternative. Aggregated
    nodes keep their child values and the weights used, so results can be
    drilled into and recomputed."""

    attribute_id: str
    value: float
    kind: str  # "single" | "aggregated"
    children: tuple["NodeValue", ...] = ()
    weights_used: WeightVector | None = None

    def find(self, attribute_id: str) -> "NodeValue | None":
        if self.attribute_id == attribute_id:
            return self
        for child in self.children:
            found = child.find(attribute_id)
            if found is not None:
                return found
        return None


@dataclass(frozen=True)
class EvaluationResult:
    model_name: str
    per_alternative: Mapping[str, NodeValue]
    ranking: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class WhatIfOverride:
    """Replace the aggregation strategy of one internal attribute."""

    attribute_id: str
    replacement: AggregationSpec


@dataclass(frozen=True)
class MethodComparison:
    methods: tuple[str, ...]
    rankings: Mapping[str, tuple[tuple[str, float], ...]]
    kendall_tau: Mapping[str, Mapping[str, float]]
    common_prefix: tuple[str, ...]


# ---------------------------------------------------------------------------
# Weight selection
# ---------------------------------------------------------------------------


def ranks_from_weights(weights: Sequence[float]) -> tuple[int, ...]:
    """Invert declared swing weights to ranks (competition ranking):
    the largest weight gets rank 1, equal weights share a rank."""
    return tuple(1 + sum(1 for other in weights if other > w) for w in weights)


def _weights_for(spec: AggregationSpec, method: Method | None) -> WeightVector:
    if isinstance(spec, SmarterSpec):
        if method is None:
            return rank_weights(spec.algorithm, spec.ranks)
        if method is Method.SWING:
            # No swing ratings were stated for this node; fall back to the
            # reciprocal-rank weights as the swing default.
            return rr_weights(spec.ranks)
        return rank_weights(RankWeighting(method.value), spec.ranks)
    if isinstance(spec, SmartsSpec):
        if method is None or method is Method.SWING:
            return smarts_normalize(spec.weights)
        return rank_weights(RankWeighting(method.value), ranks_from_weights(spec.weights))
    raise EvaluationError(f"no weights for aggregation {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(model: QualityModel, alternatives: Sequence[Alternative],
             method: Method | str | None = None) -> EvaluationResult:
    """Score every alternative against the model.

    `method` overrides the weighting of every rank/swing aggregation node
    (formula nodes are never overridden); None evaluates the model as
    declared. The ranking is sorted by utility descending, ties broken by
    alternative id ascending.
    """
    issues = validate_model(model)
    if issues:
        raise ModelValidationError(issues)
    if method is not None:
        method = Method(method)
    if not alternatives:
        raise EvaluationError("no alternatives to evaluate")
    ids = [a.id for a in alternatives]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise EvaluationError("duplicate alternative ids", [repr(d) for d in dupes])

    scaled = _scaled_leaf_values(model, alternatives)

    per_alternative: dict[str, NodeValue] = {}
    for position, alt in enumerate(alternatives):
        per_alternative[alt.id] = _node_value(model, model.root, position, scaled, method)

    ranking = tuple(sorted(
        ((alt_id, node.value) for alt_id, node in per_alternative.items()),
        key=lambda pair: (-pair[1], pair[0]),
    ))
    return EvaluationResult(model_name=model.name,
                            per_alternative=per_alternative,
                            ranking=ranking)


def _scaled_leaf_values(model: QualityModel,
                        alternatives: Sequence[Alternative]) -> dict[str, list[float]]:
    """Score every leaf for every alternative, then min-max scale each
    criterion across the alternative set."""
    missing: list[str] = []
    bad: list[str] = []
    raw_scores: dict[str, list[float]] = {}
    for leaf in model.leaves():
        source_id = model.metric_bindings[leaf.id]
        vtype = model.resolve_type(leaf)
        column: list[float] = []
        for alt in alternatives:
            if source_id not in alt.measurements:
                missing.append(f"alternative {alt.id!r} lacks metric {source_id!r}")
                continue
            try:
                column.append(score_raw(alt.measurements[source_id], vtype))
            except ScoreError as exc:
                bad.append(f"alternative {alt.id!r}, metric {source_id!r}: {exc}")
        raw_scores[leaf.id] = column
    if missing:
        raise EvaluationError("missing measurements", missing)
    if bad:
        raise EvaluationError("unscorable measurements", bad)
    return {
        leaf.id: scale_values(raw_scores[leaf.id],
                              (leaf.direction or Direction.BENEFIT).value)
        for leaf in model.leaves()
    }


def _node_value(model: QualityModel, attr: QualityAttribute, position: int,
                scaled: dict[str, list[float]], method: Method | None) -> NodeValue:
    if attr.is_leaf:
        return NodeValue(attribute_id=attr.id, value=scaled[attr.id][position], kind="single")
    children = tuple(
        _node_value(model, child, position, scaled, method) for child in attr.children
    )
    child_values = [c.value for c in children]
    if isinstance(attr.aggregation, FormulaSpec):
        env = {c.attribute_id: c.value for c in children}
        try:
            expr = expression.parse_expression(attr.aggregation.formula)
            value = expression.eval_expression(expr, env)
        except expression.ExpressionError as exc:
            raise EvaluationError(f"formula at {attr.id!r} failed", [str(exc)]) from exc
        weights_used = None
    else:
        weights_used = _weights_for(attr.aggregation, method)
        value = utility(weights_used, child_values)
    return NodeValue(attribute_id=attr.id, value=value, kind="aggregated",
                     children=children, weights_used=weights_used)


def rank(result: EvaluationResult) -> list[tuple[str, float]]:
    """Recompute the ranked list from the per-alternative root values."""
    return sorted(
        ((alt_id, node.value) for alt_id, node in result.per_alternative.items()),
        key=lambda pair: (-pair[1], pair[0]),
    )


# ---------------------------------------------------------------------------
# Cross-method comparison
# ---------------------------------------------------------------------------


def kendall_tau_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """Normalized Kendall tau distance between two rankings of the same
    ids: discordant pairs over all pairs, in [0, 1]."""
    if sorted(a) != sorted(b):
        raise ValueError("rankings must order the same ids")
    n = len(a)
    if n < 2:
        return 0.0
    index_b = {alt_id: i for i, alt_id in enumerate(b)}
    discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if index_b[a[i]] > index_b[a[j]]:
                discordant += 1
    return discordant / (n * (n - 1) / 2)


def _common_prefix(sequences: Iterable[Sequence[str]]) -> tuple[str, ...]:
    seqs = [list(s) for s in sequences]
    if not seqs:
        return ()
    prefix: list[str] = []
    for position in range(min(len(s) for s in seqs)):
        candidate = seqs[0][position]
        if all(s[position] == candidate for s in seqs):
            prefix.append(candidate)
        else:
            break
    return tuple(prefix)


def compare_methods(model: QualityModel, alternatives: Sequence[Alternative],
                    methods: Sequence[Method | str] = (Method.ROC, Method.RR,
                                                       Method.RS, Method.SWING),
                    ) -> MethodComparison:
    """Re-evaluate the model once per weighting method and report the
    rankings, their pairwise Kendall tau distances, and the longest ranking
    prefix all methods agree on."""
    chosen: list[Method] = []
    for m in methods:
        m = Method(m)
        if m not in chosen:
            chosen.append(m)
    if not chosen:
        raise EvaluationError("no methods to compare")
    rankings = {m.value: evaluate(model, alternatives, method=m).ranking for m in chosen}
    order = {name: [alt_id for alt_id, _ in ranking] for name, ranking in rankings.items()}
    tau = {
        a: {b: kendall_tau_distance(order[a], order[b]) for b in order}
        for a in order
    }
    return MethodComparison(
        methods=tuple(m.value for m in chosen),
        rankings=rankings,
        kendall_tau=tau,
        common_prefix=_common_prefix(order.values()),
    )


# ---------------------------------------------------------------------------
# What-if overrides
# ---------------------------------------------------------------------------


def apply_overrides(model: QualityModel,
                    overrides: Sequence[WhatIfOverride]) -> QualityModel:
    """Return a copy of the model with each override's aggregation swapped
    in; the input model is never touched."""
    by_id = {o.attribute_id: o.replacement for o in overrides}
    known = {a.id for a in model.root.walk()}
    unknown = sorted(set(by_id) - known)
    if unknown:
        raise EvaluationError("unknown attribute ids in overrides",
                              [repr(u) for u in unknown])
    for o in overrides:
        if model.attribute(o.attribute_id).is_leaf:
            raise EvaluationError(f"cannot override leaf attribute {o.attribute_id!r}")

    def rebuild(attr: QualityAttribute) -> QualityAttribute:
        children = tuple(rebuild(c) for c in attr.children)
        aggregation = by_id.get(attr.id, attr.aggregation)
        if children == attr.children and aggregation is attr.aggregation:
            return attr
        return replace(attr, children=children, aggregation=aggregation)

    patched = replace(model, root=rebuild(model.root))
    issues = validate_model(patched)
    if issues:
        raise ModelValidationError(issues)
    return patched


def what_if(model: QualityModel, overrides: Sequence[WhatIfOverride],
            alternatives: Sequence[Alternative]) -> EvaluationResult:
    """Evaluate with the overrides applied to a copy of the model."""
    return evaluate(apply_overrides(model, overrides), alternatives)
