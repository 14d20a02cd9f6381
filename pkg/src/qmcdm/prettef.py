"""Bundled MVC-framework selection case study.

Ships a quality model over four branches (Presentation, Trend,
Technology, Features), a 17-framework dataset with the published fork and
pull-request counts (December 2020), and the Trend rank/weight
configuration. Stars, contributors, release and categorical columns were
never published per framework, so they are placeholders for users to
fill; the quantitative reproduction therefore runs on a Trend subset
(forks + pull requests), fully offline.

Run ``python -m qmcdm.prettef`` to print the subset comparison report.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .document import parse_dataset, parse_model
from .engine import Method, MethodComparison, compare_methods, evaluate
from .model import Alternative, QualityModel
from .render import canonical_json, comparison_table, comparison_to_obj
from .weights import rr_weights

DATA_DIR = Path(__file__).parent / "data" / "prettef"

#: Trend criteria in declaration order, with their published ranks and weights.
TREND_CRITERIA = ("contributors", "stars", "pullRequests", "forks",
                  "releasesPerYear", "language")
TREND_RANKS = (3, 3, 2, 1, 3, 2)
TREND_WEIGHTS = (0.111, 0.111, 0.166, 0.335, 0.111, 0.167)

ALL_METHODS = (Method.ROC, Method.RR, Method.RS, Method.SWING)


def bundle_dir() -> Path:
    return DATA_DIR


def load_model() -> QualityModel:
    """The full four-branch model (not evaluable until the placeholder
    columns are filled)."""
    return parse_model((DATA_DIR / "prettef.qm").read_text(encoding="utf-8"))


def load_subset_model() -> QualityModel:
    """The Trend subset over the two published criteria."""
    return parse_model((DATA_DIR / "prettef_trend_subset.qm").read_text(encoding="utf-8"))


def load_alternatives(model: QualityModel | None = None) -> list[Alternative]:
    text = (DATA_DIR / "alternatives.csv").read_text(encoding="utf-8")
    return parse_dataset(text, "csv", model=model)


@dataclass(frozen=True)
class SubsetReport:
    """Per-method rankings over the published columns plus the agreement
    measures between methods."""

    comparison: MethodComparison
    alternative_count: int

    def as_text(self) -> str:
        lines = [
            "Trend-subset evaluation (forks + pull requests, 2 of 6 criteria published)",
            f"alternatives: {self.alternative_count}",
            "",
            comparison_table(self.comparison),
        ]
        return "\n".join(lines)

    def as_json(self) -> str:
        payload = comparison_to_obj(self.comparison)
        payload["alternatives"] = self.alternative_count
        return canonical_json(payload)


def run_prettef_subset(methods: Sequence[Method | str] = ALL_METHODS) -> SubsetReport:
    """Evaluate the Trend subset across all 17 frameworks under every
    weighting method. Fully offline and deterministic."""
    model = load_subset_model()
    alternatives = load_alternatives(model)
    comparison = compare_methods(model, alternatives, methods)
    return SubsetReport(comparison=comparison, alternative_count=len(alternatives))


def check_published_weights(tolerance: float = 0.005) -> bool:
    """The published Trend weights match the reciprocal-rank formula on the
    published ranks within the given tolerance."""
    computed = rr_weights(TREND_RANKS)
    return all(abs(c - p) <= tolerance for c, p in zip(computed, TREND_WEIGHTS))


def _single_criterion_ranking(source_id: str) -> list[str]:
    """Ranking when only one published criterion is kept (used by the
    reproduction script to sanity-check the dataset)."""
    model = load_subset_model()
    alternatives = load_alternatives(model)
    keep = [a for a in model.root.walk() if a.is_leaf
            and model.metric_bindings[a.id] == source_id]
    if len(keep) != 1:
        raise ValueError(f"no single leaf bound to {source_id!r}")
    single = QualityModel(
        name=f"{model.name} ({source_id} only)", version=model.version,
        root=keep[0],
        value_types=model.value_types,
        metric_bindings={keep[0].id: source_id},
    )
    return [alt_id for alt_id, _ in evaluate(single, alternatives).ranking]


def main() -> int:
    report = run_prettef_subset()
    print(report.as_text())
    print()
    print(f"published Trend weights match rr on ranks {list(TREND_RANKS)}: "
          f"{'yes' if check_published_weights() else 'NO'}")
    print(f"forks-only leader: {_single_criterion_ranking('forks')[0]}")
    print(f"pull-requests-only leader: {_single_criterion_ranking('pullRequests')[0]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
