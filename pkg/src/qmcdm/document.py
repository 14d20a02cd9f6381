"""Reading and writing quality-model documents and alternative datasets.

Model documents are UTF-8 YAML with extension ``.qm``. The canonical
serialization uses 2-space indentation, double-quoted strings, and fixed
key order (model, valueTypes, attributes, metricBindings), so
``serialize_model`` output is byte-stable and ``parse_model`` of it
reproduces the model exactly.

Datasets are CSV (RFC 4180) or JSON arrays of flat objects. The ``id``
column is mandatory; ``displayName`` is optional; columns prefixed
``meta:`` become alternative metadata; every other column is a
measurement keyed by metric-source id. Numeric cells may carry
thousands separators ("66,668").
"""

from __future__ import annotations

import csv
import io
import json
import re
from typing import Any, Mapping

import yaml

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
    RawValue,
    SmarterSpec,
    SmartsSpec,
    ValueType,
)
from .weights import RankWeighting

AGGREGATION_KINDS = ("smarter", "smarts", "expression")
VALUE_TYPE_KINDS = ("numeric", "boolean", "categorical", "ranged")


class ModelParseError(ValueError):
    """Malformed model document; carries line/column for YAML syntax errors
    and a document path for structural errors."""

    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, path: str | None = None):
        self.line = line
        self.column = column
        self.path = path
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif path:
            where = f" (at {path})"
        super().__init__(f"{message}{where}")


class DatasetError(ValueError):
    """Malformed dataset; `cells` lists every (row, column, message)."""

    def __init__(self, message: str, cells: list[tuple[int, str, str]] | None = None):
        self.cells = list(cells or [])
        if self.cells:
            shown = "; ".join(f"row {r}, column {c!r}: {m}" for r, c, m in self.cells[:5])
            more = f" (+{len(self.cells) - 5} more)" if len(self.cells) > 5 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Model documents: parsing
# ---------------------------------------------------------------------------


def parse_model(text: str) -> QualityModel:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = column = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line, column = mark.line + 1, mark.column + 1
        raise ModelParseError(f"invalid document syntax: {exc}", line=line, column=column) from None
    if raw is None:
        raise ModelParseError("missing model header")
    if not isinstance(raw, dict):
        raise ModelParseError("document must be a mapping of sections")

    _reject_unknown_keys(raw, ("model", "valueTypes", "attributes", "metricBindings"), "document")

    header = raw.get("model")
    if not isinstance(header, dict):
        raise ModelParseError("missing model header")
    _reject_unknown_keys(header, ("name", "version"), "model")
    name = _require_str(header, "name", "model")
    version = _require_str(header, "version", "model")

    value_types = _parse_value_types(raw.get("valueTypes") or {})

    attributes = raw.get("attributes")
    if attributes is None:
        raise ModelParseError("missing attributes section")
    seen_ids: set[str] = set()
    root = _parse_attribute(attributes, "attributes", seen_ids)

    bindings_raw = raw.get("metricBindings") or {}
    if not isinstance(bindings_raw, dict):
        raise ModelParseError("metricBindings must be a mapping", path="metricBindings")
    bindings: dict[str, str] = {}
    for key, value in bindings_raw.items():
        if not isinstance(key, str) or not isinstance(value, str):
            raise ModelParseError("metric bindings map attribute ids to source ids",
                                  path=f"metricBindings.{key}")
        bindings[key] = value

    return QualityModel(name=name, version=version, root=root,
                        value_types=value_types, metric_bindings=bindings)


def _reject_unknown_keys(obj: dict, allowed: tuple[str, ...], path: str):
    for key in obj:
        if key not in allowed:
            raise ModelParseError(f"unknown key {key!r}", path=path)


def _require_str(obj: dict, key: str, path: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ModelParseError(f"{key!r} must be a non-empty string", path=path)
    return value


def _parse_value_types(raw: Any) -> dict[str, ValueType]:
    if not isinstance(raw, dict):
        raise ModelParseError("valueTypes must be a mapping", path="valueTypes")
    out: dict[str, ValueType] = {}
    for name, body in raw.items():
        path = f"valueTypes.{name}"
        if not isinstance(name, str) or not isinstance(body, dict):
            raise ModelParseError("each value type is a named mapping", path=path)
        kind = body.get("kind")
        if kind == "numeric":
            _reject_unknown_keys(body, ("kind",), path)
            out[name] = NumericType()
        elif kind == "boolean":
            _reject_unknown_keys(body, ("kind", "trueScore", "falseScore"), path)
            out[name] = BooleanType(
                true_score=_number(body.get("trueScore", 1.0), path, "trueScore"),
                false_score=_number(body.get("falseScore", 0.0), path, "falseScore"),
            )
        elif kind == "categorical":
            _reject_unknown_keys(body, ("kind", "scores"), path)
            scores = body.get("scores")
            if not isinstance(scores, dict):
                raise ModelParseError("categorical type needs a scores mapping", path=path)
            out[name] = CategoricalType(
                scores={str(k): _number(v, path, f"scores.{k}") for k, v in scores.items()}
            )
        elif kind == "ranged":
            _reject_unknown_keys(body, ("kind", "min", "max"), path)
            if "min" not in body or "max" not in body:
                raise ModelParseError("ranged type needs min and max", path=path)
            out[name] = RangedType(
                minimum=_number(body["min"], path, "min"),
                maximum=_number(body["max"], path, "max"),
            )
        else:
            raise ModelParseError(f"unknown value type kind {kind!r}", path=path)
    return out


def _number(value: Any, path: str, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelParseError(f"{key!r} must be a number", path=path)
    return float(value)


def _parse_attribute(raw: Any, path: str, seen_ids: set[str]) -> QualityAttribute:
    if not isinstance(raw, dict):
        raise ModelParseError("attribute must be a mapping", path=path)
    _reject_unknown_keys(raw, ("id", "name", "direction", "valueType", "aggregation", "children"), path)
    attr_id = _require_str(raw, "id", path)
    if attr_id in seen_ids:
        raise ModelParseError(f"duplicate attribute id {attr_id!r}", path=path)
    seen_ids.add(attr_id)

    name = raw.get("name", attr_id)
    if not isinstance(name, str):
        raise ModelParseError("'name' must be a string", path=path)

    direction = raw.get("direction")
    if direction is not None:
        try:
            direction = Direction(direction)
        except ValueError:
            raise ModelParseError(f"direction must be 'benefit' or 'cost', got {direction!r}",
                                  path=path) from None

    value_type = raw.get("valueType")
    if value_type is not None and not isinstance(value_type, str):
        raise ModelParseError("'valueType' must be a declared type name", path=path)

    aggregation = None
    if raw.get("aggregation") is not None:
        aggregation = aggregation_from_obj(raw["aggregation"], path=f"{path}.aggregation")

    children_raw = raw.get("children") or []
    if not isinstance(children_raw, list):
        raise ModelParseError("'children' must be a list", path=path)
    children = tuple(
        _parse_attribute(child, f"{path}.children[{i}]", seen_ids)
        for i, child in enumerate(children_raw)
    )

    return QualityAttribute(id=attr_id, name=name, children=children,
                            aggregation=aggregation, value_type=value_type,
                            direction=direction)


def aggregation_from_obj(raw: Any, path: str = "aggregation"):
    """Build an aggregation spec from its document form; shared with the
    HTTP what-if payloads."""
    if not isinstance(raw, dict):
        raise ModelParseError("aggregation must be a mapping", path=path)
    kind = raw.get("kind")
    if kind == "smarter":
        _reject_unknown_keys(raw, ("kind", "algorithm", "ranks"), path)
        algorithm = raw.get("algorithm")
        try:
            algorithm = RankWeighting(algorithm)
        except ValueError:
            raise ModelParseError(f"unknown rank algorithm {algorithm!r}", path=path) from None
        ranks = raw.get("ranks")
        if not isinstance(ranks, list) or not all(
            isinstance(r, int) and not isinstance(r, bool) for r in ranks
        ):
            raise ModelParseError("'ranks' must be a list of integers", path=path)
        return SmarterSpec(algorithm=algorithm, ranks=tuple(ranks))
    if kind == "smarts":
        _reject_unknown_keys(raw, ("kind", "weights"), path)
        ws = raw.get("weights")
        if not isinstance(ws, list) or not all(
            isinstance(w, (int, float)) and not isinstance(w, bool) for w in ws
        ):
            raise ModelParseError("'weights' must be a list of numbers", path=path)
        return SmartsSpec(weights=tuple(float(w) for w in ws))
    if kind == "expression":
        _reject_unknown_keys(raw, ("kind", "formula"), path)
        formula = raw.get("formula")
        if not isinstance(formula, str):
            raise ModelParseError("'formula' must be a string", path=path)
        return FormulaSpec(formula=formula)
    raise ModelParseError(f"unknown aggregation kind {kind!r}", path=path)


# ---------------------------------------------------------------------------
# Model documents: canonical serialization
# ---------------------------------------------------------------------------


def _q(value: str) -> str:
    # JSON string syntax is a subset of YAML double-quoted scalars; with
    # ensure_ascii the output stays printable regardless of content.
    return json.dumps(value, ensure_ascii=True)


def _num_text(x: float | int) -> str:
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if x == int(x) and abs(x) < 1e16:
        return f"{int(x)}.0"
    s = repr(x)
    if "e" in s:
        mantissa, _, exponent = s.partition("e")
        if "." not in mantissa:
            mantissa += ".0"
        s = f"{mantissa}e{exponent}"
    return s


def serialize_model(model: QualityModel) -> str:
    """Emit the canonical document; `parse_model` of the result equals the
    input model, and serializing again is byte-identical."""
    lines: list[str] = []
    lines.append("model:")
    lines.append(f"  name: {_q(model.name)}")
    lines.append(f"  version: {_q(model.version)}")
    if model.value_types:
        lines.append("valueTypes:")
        for tname in sorted(model.value_types):
            lines.extend(_value_type_lines(tname, model.value_types[tname]))
    lines.append("attributes:")
    lines.extend(_attribute_lines(model.root, indent=1))
    if model.metric_bindings:
        lines.append("metricBindings:")
        for attr_id in sorted(model.metric_bindings):
            lines.append(f"  {_q(attr_id)}: {_q(model.metric_bindings[attr_id])}")
    return "\n".join(lines) + "\n"


def _value_type_lines(name: str, vtype: ValueType) -> list[str]:
    lines = [f"  {_q(name)}:"]
    if isinstance(vtype, NumericType):
        lines.append('    kind: "numeric"')
    elif isinstance(vtype, BooleanType):
        lines.append('    kind: "boolean"')
        lines.append(f"    trueScore: {_num_text(vtype.true_score)}")
        lines.append(f"    falseScore: {_num_text(vtype.false_score)}")
    elif isinstance(vtype, CategoricalType):
        lines.append('    kind: "categorical"')
        lines.append("    scores:")
        for label in sorted(vtype.scores):
            lines.append(f"      {_q(label)}: {_num_text(vtype.scores[label])}")
    elif isinstance(vtype, RangedType):
        lines.append('    kind: "ranged"')
        lines.append(f"    min: {_num_text(vtype.minimum)}")
        lines.append(f"    max: {_num_text(vtype.maximum)}")
    else:
        raise ModelParseError(f"cannot serialize value type {vtype!r}")
    return lines


def _attribute_lines(attr: QualityAttribute, indent: int, list_item: bool = False) -> list[str]:
    pad = "  " * indent
    first = f"{pad[:-2]}- " if list_item else pad
    lines = [f"{first}id: {_q(attr.id)}"]
    lines.append(f"{pad}name: {_q(attr.name)}")
    if attr.direction is not None:
        lines.append(f"{pad}direction: {_q(attr.direction.value)}")
    if attr.value_type is not None:
        lines.append(f"{pad}valueType: {_q(attr.value_type)}")
    if attr.aggregation is not None:
        lines.append(f"{pad}aggregation:")
        lines.extend(_aggregation_lines(attr.aggregation, indent + 1))
    if attr.children:
        lines.append(f"{pad}children:")
        for child in attr.children:
            lines.extend(_attribute_lines(child, indent + 1, list_item=True))
    return lines


def _aggregation_lines(spec, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(spec, SmarterSpec):
        ranks = ", ".join(str(r) for r in spec.ranks)
        return [f'{pad}kind: "smarter"',
                f"{pad}algorithm: {_q(spec.algorithm.value)}",
                f"{pad}ranks: [{ranks}]"]
    if isinstance(spec, SmartsSpec):
        ws = ", ".join(_num_text(w) for w in spec.weights)
        return [f'{pad}kind: "smarts"',
                f"{pad}weights: [{ws}]"]
    if isinstance(spec, FormulaSpec):
        return [f'{pad}kind: "expression"',
                f"{pad}formula: {_q(spec.formula)}"]
    raise ModelParseError(f"cannot serialize aggregation {spec!r}")


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------

_THOUSANDS_RE = re.compile(r"^-?\d{1,3}(?:,\d{3})+(?:\.\d+)?$")
_NUMBER_RE = re.compile(r"^-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


def _cell_to_value(text: str) -> RawValue | None:
    """Heuristic typing for an untyped cell: bool, number (with optional
    thousands separators), or category text. Empty means missing."""
    s = text.strip()
    if s == "":
        return None
    if s.lower() == "true":
        return True
    if s.lower() == "false":
        return False
    if _THOUSANDS_RE.match(s):
        s = s.replace(",", "")
    if _NUMBER_RE.match(s):
        return float(s)
    return text


def _expected_kinds(model: QualityModel) -> dict[str, str]:
    """Map metric-source id -> value-type kind, where resolvable."""
    kinds: dict[str, str] = {}
    by_id = {a.id: a for a in model.root.walk()}
    for attr_id, source_id in model.metric_bindings.items():
        attr = by_id.get(attr_id)
        if attr is None or attr.value_type is None:
            continue
        vtype = model.value_types.get(attr.value_type)
        if isinstance(vtype, (NumericType, RangedType)):
            kinds[source_id] = "number"
        elif isinstance(vtype, BooleanType):
            kinds[source_id] = "boolean"
        elif isinstance(vtype, CategoricalType):
            kinds[source_id] = "category"
    return kinds


def _typed_cell(text: str, kind: str) -> RawValue:
    """Type a cell against the bound leaf's value-type kind; raises
    ValueError with a reason on mismatch."""
    s = text.strip()
    if kind == "number":
        if _THOUSANDS_RE.match(s):
            s = s.replace(",", "")
        if not _NUMBER_RE.match(s):
            raise ValueError("malformed number")
        return float(s)
    if kind == "boolean":
        if s.lower() == "true":
            return True
        if s.lower() == "false":
            return False
        raise ValueError("expected true or false")
    return text


def parse_dataset(text: str, format: str = "csv",
                  model: QualityModel | None = None) -> list[Alternative]:
    """Parse alternatives from CSV or JSON.

    With a model, measurement cells are typed against the bound leaf's
    value type and every unparsable cell is reported with its row and
    column; without one, cells are typed heuristically.
    """
    if format == "csv":
        return _parse_csv(text, model)
    if format == "json":
        return _parse_json(text, model)
    raise DatasetError(f"unknown dataset format {format!r}")


def _finish_alternative(ident: str, display: str, metadata: dict, measurements: dict) -> Alternative:
    return Alternative(id=ident, name=display or ident,
                       metadata=metadata, measurements=measurements)


def _parse_csv(text: str, model: QualityModel | None) -> list[Alternative]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    header = [h.strip() for h in header]
    if "id" not in header:
        raise DatasetError("missing id column")
    kinds = _expected_kinds(model) if model is not None else {}

    alternatives: list[Alternative] = []
    seen: set[str] = set()
    bad_cells: list[tuple[int, str, str]] = []
    for row_no, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        record = dict(zip(header, row))
        ident = (record.get("id") or "").strip()
        if not ident:
            raise DatasetError(f"row {row_no} has an empty id")
        if ident in seen:
            raise DatasetError(f"duplicate id {ident!r} at row {row_no}")
        seen.add(ident)
        display = (record.get("displayName") or "").strip()
        metadata: dict[str, str] = {}
        measurements: dict[str, RawValue] = {}
        for column, cell in record.items():
            if column in ("id", "displayName") or cell is None:
                continue
            if column.startswith("meta:"):
                if cell.strip():
                    metadata[column[len("meta:"):]] = cell.strip()
                continue
            if cell.strip() == "":
                continue
            if column in kinds:
                try:
                    measurements[column] = _typed_cell(cell, kinds[column])
                except ValueError as exc:
                    bad_cells.append((row_no, column, str(exc)))
            else:
                value = _cell_to_value(cell)
                if value is not None:
                    measurements[column] = value
        alternatives.append(_finish_alternative(ident, display, metadata, measurements))
    if bad_cells:
        raise DatasetError("unparsable cells", bad_cells)
    return alternatives


def _parse_json(text: str, model: QualityModel | None) -> list[Alternative]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc}") from None
    if raw is None or raw == "":
        return []
    if not isinstance(raw, list):
        raise DatasetError("dataset must be a JSON array of objects")
    kinds = _expected_kinds(model) if model is not None else {}

    alternatives: list[Alternative] = []
    seen: set[str] = set()
    bad_cells: list[tuple[int, str, str]] = []
    for index, obj in enumerate(raw):
        row_no = index + 1
        if not isinstance(obj, dict):
            raise DatasetError(f"entry {row_no} is not an object")
        ident = obj.get("id")
        if not isinstance(ident, str) or not ident:
            raise DatasetError("missing id column" if "id" not in obj
                               else f"entry {row_no} has an invalid id")
        if ident in seen:
            raise DatasetError(f"duplicate id {ident!r} at entry {row_no}")
        seen.add(ident)
        display = obj.get("displayName") or ""
        metadata: dict[str, str] = {}
        measurements: dict[str, RawValue] = {}
        for key, value in obj.items():
            if key in ("id", "displayName") or value is None:
                continue
            if key.startswith("meta:"):
                metadata[key[len("meta:"):]] = str(value)
                continue
            if isinstance(value, str):
                if value.strip() == "":
                    continue
                if key in kinds:
                    try:
                        measurements[key] = _typed_cell(value, kinds[key])
                    except ValueError as exc:
                        bad_cells.append((row_no, key, str(exc)))
                    continue
                coerced = _cell_to_value(value)
                if coerced is not None:
                    measurements[key] = coerced
            elif isinstance(value, bool):
                measurements[key] = value
            elif isinstance(value, (int, float)):
                if key in kinds and kinds[key] == "boolean":
                    bad_cells.append((row_no, key, "expected true or false"))
                else:
                    measurements[key] = float(value)
            else:
                bad_cells.append((row_no, key, f"unsupported cell type {type(value).__name__}"))
        alternatives.append(_finish_alternative(ident, str(display), metadata, measurements))
    if bad_cells:
        raise DatasetError("unparsable cells", bad_cells)
    return alternatives
