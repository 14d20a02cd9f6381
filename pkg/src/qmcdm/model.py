"""Domain types for hierarchical quality models.

A model is a tree of quality attributes. Leaves carry a value type and a
benefit/cost direction and are bound to a metric source; internal nodes
carry an aggregation strategy (rank-based, swing-weight, or an arithmetic
formula over their direct children). All types are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Union

from .weights import RankWeighting


class Direction(str, Enum):
    """Whether larger raw values are better (benefit) or worse (cost)."""

    BENEFIT = "benefit"
    COST = "cost"


# ---------------------------------------------------------------------------
# Aggregation strategies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SmarterSpec:
    """Rank-based aggregation: the modeler ranks the children, weights are
    derived by the chosen conversion (roc, rr, or rs). One rank per child,
    rank 1 most important, ties allowed."""

    algorithm: RankWeighting
    ranks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "algorithm", RankWeighting(self.algorithm))
        object.__setattr__(self, "ranks", tuple(self.ranks))


@dataclass(frozen=True)
class SmartsSpec:
    """Swing-weight aggregation: the modeler rates each child directly on a
    natural scale; ratings are normalized to weights. One rating per child."""

    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))


@dataclass(frozen=True)
class FormulaSpec:
    """Free-form aggregation: an arithmetic expression over direct-child ids."""

    formula: str


AggregationSpec = Union[SmarterSpec, SmartsSpec, FormulaSpec]


# ---------------------------------------------------------------------------
# Value types and raw values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericType:
    """Unbounded numeric measurement, used as-is."""


@dataclass(frozen=True)
class BooleanType:
    """Boolean measurement scored by two modeler-assigned numbers."""

    true_score: float = 1.0
    false_score: float = 0.0


@dataclass(frozen=True)
class CategoricalType:
    """Labelled measurement scored by a modeler-assigned map."""

    scores: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "scores", MappingProxyType(dict(self.scores)))


@dataclass(frozen=True)
class RangedType:
    """Numeric measurement constrained to [minimum, maximum]; the number
    itself is the score, the range only bounds validity."""

    minimum: float
    maximum: float


ValueType = Union[NumericType, BooleanType, CategoricalType, RangedType]

#: A leaf measurement: a number, a flag, or a category label.
#: (bool must be tested before float: Python bools are ints.)
RawValue = Union[bool, float, str]


class ScoreError(ValueError):
    """A raw value does not fit the declared value type."""


def score_raw(value: RawValue, vtype: ValueType) -> float:
    """Map one raw measurement to its numeric score under the given type.

    Numeric and ranged values pass through unchanged (ranged values must
    lie inside the declared bounds); booleans and categories look up their
    modeler-assigned score.
    """
    if isinstance(vtype, BooleanType):
        if not isinstance(value, bool):
            raise ScoreError(f"expected a boolean, got {value!r}")
        return float(vtype.true_score if value else vtype.false_score)
    if isinstance(vtype, CategoricalType):
        if not isinstance(value, str):
            raise ScoreError(f"expected a category label, got {value!r}")
        if value not in vtype.scores:
            known = ", ".join(sorted(vtype.scores))
            raise ScoreError(f"unknown category {value!r} (known: {known})")
        return float(vtype.scores[value])
    if isinstance(vtype, (NumericType, RangedType)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScoreError(f"expected a number, got {value!r}")
        number = float(value)
        if isinstance(vtype, RangedType) and not (vtype.minimum <= number <= vtype.maximum):
            raise ScoreError(
                f"value {number} outside range [{vtype.minimum}, {vtype.maximum}]"
            )
        return number
    raise ScoreError(f"unsupported value type {vtype!r}")


# ---------------------------------------------------------------------------
# The attribute tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QualityAttribute:
    """One node of the quality tree.

    A leaf has a value type (named reference into the model's declarations)
    and an optional direction; an internal node has children plus an
    aggregation strategy. `validate_model` enforces the exclusivity rules.
    """

    id: str
    name: str = ""
    children: tuple["QualityAttribute", ...] = ()
    aggregation: AggregationSpec | None = None
    value_type: str | None = None
    direction: Direction | None = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.name:
            object.__setattr__(self, "name", self.id)
        if self.direction is not None:
            object.__setattr__(self, "direction", Direction(self.direction))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        """Yield this attribute and every descendant, depth-first."""
        yield self
        for child in self.children:
            yield from child.walk()

    def find(self, attribute_id: str) -> "QualityAttribute | None":
        for node in self.walk():
            if node.id == attribute_id:
                return node
        return None


@dataclass(frozen=True)
class QualityModel:
    """A named quality tree plus its value-type declarations and the
    leaf-to-metric-source bindings."""

    name: str
    version: str
    root: QualityAttribute
    value_types: Mapping[str, ValueType] = field(default_factory=dict)
    metric_bindings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "value_types", MappingProxyType(dict(self.value_types)))
        object.__setattr__(self, "metric_bindings", MappingProxyType(dict(self.metric_bindings)))

    def attribute(self, attribute_id: str) -> QualityAttribute:
        found = self.root.find(attribute_id)
        if found is None:
            raise KeyError(f"no attribute with id {attribute_id!r}")
        return found

    def leaves(self) -> list[QualityAttribute]:
        return [a for a in self.root.walk() if a.is_leaf]

    def resolve_type(self, attr: QualityAttribute) -> ValueType:
        """Resolve a leaf's named value-type reference to its declaration."""
        if attr.value_type is None:
            raise KeyError(f"attribute {attr.id!r} declares no value type")
        try:
            return self.value_types[attr.value_type]
        except KeyError:
            raise KeyError(
                f"attribute {attr.id!r} references undeclared value type {attr.value_type!r}"
            ) from None


@dataclass(frozen=True)
class Alternative:
    """A candidate under evaluation, with its measurements keyed by metric
    source id."""

    id: str
    name: str = ""
    metadata: Mapping[str, str] = field(default_factory=dict)
    measurements: Mapping[str, RawValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", self.id)
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))
        object.__setattr__(self, "measurements", MappingProxyType(dict(self.measurements)))
