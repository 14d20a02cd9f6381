"""Command-line interface: weight tables, model validation, evaluation,
method comparison, and the HTTP service.

Exit codes: 0 success, 2 invalid ranks/usage, 3 model parse or validation
failure (issues on stderr), 1 anything else.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .document import (
    DatasetError,
    ModelParseError,
    aggregation_from_obj,
    parse_dataset,
    parse_model,
)
from .engine import EvaluationError, WhatIfOverride, apply_overrides, compare_methods, evaluate
from .providers import GithubClient, MetricCache, MetricSource, ProviderError, resolve_metrics
from .render import (
    canonical_json,
    comparison_table,
    comparison_to_obj,
    ranking_table,
    result_to_obj,
)
from .validation import ModelValidationError, validate_model
from .weights import WeightError, rank_weights

EXIT_INVALID_RANKS = 2
EXIT_VALIDATION = 3


@click.group()
@click.version_option(package_name="qmcdm")
def main():
    """Hierarchical quality models ranked with rank-based MCDM weighting."""


@main.command("weights")
@click.option("--method", type=click.Choice(["roc", "rr", "rs"]), required=True,
              help="Rank-to-weight conversion.")
@click.option("--ranks", required=True,
              help="Comma-separated positive integers, rank 1 most important.")
def weights_cmd(method, ranks):
    """Print the weight vector for a rank assignment (4 decimals)."""
    try:
        parsed = [int(part) for part in ranks.split(",") if part.strip() != ""]
        vector = rank_weights(method, parsed)
    except (ValueError, WeightError) as exc:
        click.echo(f"invalid ranks: {exc}", err=True)
        sys.exit(EXIT_INVALID_RANKS)
    click.echo(" ".join(f"{w:.4f}" for w in vector))


def _load_model(path: Path):
    try:
        model = parse_model(path.read_text(encoding="utf-8"))
    except ModelParseError as exc:
        click.echo(f"model parse error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    issues = validate_model(model)
    if issues:
        for issue in issues:
            click.echo(str(issue), err=True)
        sys.exit(EXIT_VALIDATION)
    return model


def _load_alternatives(path: Path, model):
    fmt = "json" if path.suffix.lower() == ".json" else "csv"
    try:
        return parse_dataset(path.read_text(encoding="utf-8"), fmt, model=model)
    except DatasetError as exc:
        click.echo(f"dataset error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _load_sources(path: Path):
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return [MetricSource(id=s["id"], kind=s.get("kind", "static"),
                             params=s.get("params", {})) for s in raw]
    except (ValueError, KeyError, TypeError, ProviderError) as exc:
        click.echo(f"sources file error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


def _resolve(model, alternatives, sources_path, fixtures, cache_path):
    if sources_path is None:
        return alternatives
    sources = _load_sources(sources_path)
    client = GithubClient(fixtures_dir=fixtures) if fixtures else None
    cache = MetricCache(cache_path) if cache_path else None
    try:
        resolved = resolve_metrics(model, alternatives, sources,
                                   client=client, cache=cache)
    except ProviderError as exc:
        click.echo(f"metric resolution error: {exc}", err=True)
        sys.exit(1)
    for failure in resolved.failures:
        click.echo(f"unresolved: {failure.alternative_id} / {failure.source_id}: "
                   f"{failure.message}", err=True)
    return list(resolved.alternatives)


shared_data_options = [
    click.option("--sources", "sources_path", type=click.Path(exists=True, path_type=Path),
                 default=None, help="JSON file declaring metric sources."),
    click.option("--fixtures", type=click.Path(exists=True, file_okay=False, path_type=Path),
                 default=None, help="Replay recorded HTTP responses from this directory."),
    click.option("--cache", "cache_path", type=click.Path(path_type=Path), default=None,
                 help="JSON-lines metric cache file."),
]


def with_data_options(command):
    for option in reversed(shared_data_options):
        command = option(command)
    return command


def _load_overrides(path: Path):
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return [WhatIfOverride(entry["attributeId"],
                               aggregation_from_obj(entry["replacement"],
                                                    path=f"overrides[{i}]"))
                for i, entry in enumerate(raw)]
    except (ValueError, KeyError, TypeError, ModelParseError) as exc:
        click.echo(f"overrides file error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)


@main.command("evaluate")
@click.argument("model_path", type=click.Path(exists=True, path_type=Path))
@click.argument("data_path", type=click.Path(exists=True, path_type=Path))
@click.option("--method", type=click.Choice(["roc", "rr", "rs", "swing"]), default=None,
              help="Override every rank/swing node's weighting.")
@click.option("--overrides", "overrides_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="JSON what-if override file (attributeId + replacement).")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the full JSON result here.")
@click.option("--format", "output_format", type=click.Choice(["table", "json"]),
              default="table", help="What to print on stdout.")
@with_data_options
def evaluate_cmd(model_path, data_path, method, overrides_path, out_path, output_format,
                 sources_path, fixtures, cache_path):
    """Rank the alternatives in DATA_PATH against MODEL_PATH."""
    model = _load_model(model_path)
    alternatives = _load_alternatives(data_path, model)
    alternatives = _resolve(model, alternatives, sources_path, fixtures, cache_path)
    try:
        if overrides_path is not None:
            model = apply_overrides(model, _load_overrides(overrides_path))
        result = evaluate(model, alternatives, method=method)
    except ModelValidationError as exc:
        for issue in exc.issues:
            click.echo(str(issue), err=True)
        sys.exit(EXIT_VALIDATION)
    except EvaluationError as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    payload = canonical_json(result_to_obj(result, method))
    if out_path is not None:
        out_path.write_text(payload, encoding="utf-8")
    if output_format == "json":
        click.echo(payload, nl=False)
    else:
        click.echo(ranking_table(result, limit=10))


@main.command("compare")
@click.argument("model_path", type=click.Path(exists=True, path_type=Path))
@click.argument("data_path", type=click.Path(exists=True, path_type=Path))
@click.option("--methods", default="roc,rr,rs,swing",
              help="Comma-separated subset of roc,rr,rs,swing.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the JSON comparison here.")
@click.option("--format", "output_format", type=click.Choice(["table", "json"]),
              default="table")
@with_data_options
def compare_cmd(model_path, data_path, methods, out_path, output_format,
                sources_path, fixtures, cache_path):
    """Evaluate under several weighting methods and report agreement."""
    model = _load_model(model_path)
    alternatives = _load_alternatives(data_path, model)
    alternatives = _resolve(model, alternatives, sources_path, fixtures, cache_path)
    try:
        chosen = [m.strip() for m in methods.split(",") if m.strip()]
        comparison = compare_methods(model, alternatives, chosen)
    except ValueError as exc:
        click.echo(f"invalid methods: {exc}", err=True)
        sys.exit(EXIT_INVALID_RANKS)
    except EvaluationError as exc:
        click.echo(f"evaluation error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    payload = canonical_json(comparison_to_obj(comparison))
    if out_path is not None:
        out_path.write_text(payload, encoding="utf-8")
    if output_format == "json":
        click.echo(payload, nl=False)
    else:
        click.echo(comparison_table(comparison))


@main.command("validate")
@click.argument("model_path", type=click.Path(exists=True, path_type=Path))
def validate_cmd(model_path):
    """Check a model document; exit 3 listing issues if any rule fails."""
    try:
        model = parse_model(model_path.read_text(encoding="utf-8"))
    except ModelParseError as exc:
        click.echo(f"model parse error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    issues = validate_model(model)
    if issues:
        for issue in issues:
            click.echo(str(issue), err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(f"ok: {model.name} ({sum(1 for _ in model.root.walk())} attributes)")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8421, show_default=True, type=int)
@click.option("--model", "model_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Preload this model document.")
@click.option("--data", "data_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Preload this dataset.")
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Serve a built workbench directory at /ui.")
def serve_cmd(host, port, model_path, data_path, ui_dir):
    """Start the HTTP API."""
    import uvicorn

    from .service import create_app

    app = create_app(preload_model=model_path, preload_data=data_path, ui_dir=ui_dir)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        click.echo(f"cannot bind {host}:{port}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
