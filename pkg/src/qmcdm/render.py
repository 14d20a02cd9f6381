"""Canonical JSON and plain-text renderings of evaluation results.

The JSON form is byte-stable: keys are sorted and every float is printed
with 6 significant digits, so identical inputs always produce identical
output files and HTTP bodies.
"""

from __future__ import annotations

import json
from typing import Any

from .engine import EvaluationResult, MethodComparison, NodeValue


def _sig6(x: float) -> float:
    return float(f"{float(x):.6g}")


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _sig6(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    return json.dumps(_round_floats(obj), sort_keys=True, ensure_ascii=False,
                      indent=2) + "\n"


def node_value_to_obj(node: NodeValue) -> dict:
    out: dict[str, Any] = {
        "attributeId": node.attribute_id,
        "value": node.value,
        "kind": node.kind,
    }
    if node.weights_used is not None:
        out["weightsUsed"] = list(node.weights_used.weights)
    if node.children:
        out["children"] = [node_value_to_obj(c) for c in node.children]
    return out


def result_to_obj(result: EvaluationResult, method: str | None = None) -> dict:
    return {
        "model": result.model_name,
        "method": method or "declared",
        "ranking": [
            {
                "id": alt_id,
                "utility": value,
                "nodeValues": node_value_to_obj(result.per_alternative[alt_id]),
            }
            for alt_id, value in result.ranking
        ],
    }


def comparison_to_obj(comparison: MethodComparison) -> dict:
    return {
        "methods": list(comparison.methods),
        "rankings": {
            method: [{"id": alt_id, "utility": value} for alt_id, value in ranking]
            for method, ranking in comparison.rankings.items()
        },
        "kendallTau": {a: dict(row) for a, row in comparison.kendall_tau.items()},
        "commonPrefix": list(comparison.common_prefix),
    }


def ranking_table(result: EvaluationResult, limit: int | None = None) -> str:
    rows = result.ranking[:limit] if limit else result.ranking
    width = max([len(alt_id) for alt_id, _ in rows] + [len("alternative")])
    lines = [f"{'#':>3}  {'alternative':<{width}}  utility",
             f"{'-' * 3}  {'-' * width}  {'-' * 8}"]
    for position, (alt_id, value) in enumerate(rows, start=1):
        lines.append(f"{position:>3}  {alt_id:<{width}}  {value:8.6f}")
    return "\n".join(lines)


def comparison_table(comparison: MethodComparison) -> str:
    methods = list(comparison.methods)
    orders = {m: [alt_id for alt_id, _ in comparison.rankings[m]] for m in methods}
    depth = max(len(order) for order in orders.values())
    width = max([len(alt_id) for order in orders.values() for alt_id in order] + [6])

    lines = ["ranking by method", ""]
    header = f"{'#':>3}  " + "  ".join(f"{m:<{width}}" for m in methods)
    lines.append(header)
    lines.append(f"{'-' * 3}  " + "  ".join("-" * width for _ in methods))
    for i in range(depth):
        row = [f"{orders[m][i] if i < len(orders[m]) else '':<{width}}" for m in methods]
        lines.append(f"{i + 1:>3}  " + "  ".join(row))

    lines.append("")
    lines.append("kendall tau distance")
    lines.append("")
    mw = max(len(m) for m in methods)
    lines.append(" " * (mw + 2) + "  ".join(f"{m:>8}" for m in methods))
    for a in methods:
        cells = "  ".join(f"{comparison.kendall_tau[a][b]:8.4f}" for b in methods)
        lines.append(f"{a:<{mw}}  {cells}")

    lines.append("")
    prefix = ", ".join(comparison.common_prefix) or "(none)"
    lines.append(f"common ranking prefix: {prefix}")
    return "\n".join(lines)
