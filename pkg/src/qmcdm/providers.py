"""Metric providers: static dataset values and an optional repository
metrics client with retry, rate-limit surfacing, fixture replay, and a
TTL cache persisted as JSON lines.

Live fetching is strictly optional; everything in the bundled case study
and the test suite runs from static data and recorded fixtures.
"""

from __future__ import annotations

import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Mapping, Sequence
from urllib.parse import urlencode

from .model import Alternative, QualityModel, RawValue

GITHUB_API = "https://api.github.com"
GITHUB_METRICS = ("forks", "stars", "contributors", "pullRequests", "releasesPerYear")
TOKEN_ENV_VAR = "QMCDM_GITHUB_TOKEN"


class ProviderError(Exception):
    pass


class RepositoryNotFound(ProviderError):
    pass


class RateLimited(ProviderError):
    """Carries the epoch second at which the API limit resets."""

    def __init__(self, message: str, reset_at: float | None = None):
        self.reset_at = reset_at
        if reset_at is not None:
            when = datetime.fromtimestamp(reset_at, tz=timezone.utc).isoformat()
            message = f"{message} (resets at {when})"
        super().__init__(message)


@dataclass(frozen=True)
class MetricSource:
    """Where a leaf measurement comes from. Static sources read the
    dataset; github sources fetch `params['metric']` for the repository
    named by params or, failing that, by the alternative's owner/repo
    metadata."""

    id: str
    kind: str = "static"
    params: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", dict(self.params))
        if self.kind not in ("static", "github"):
            raise ProviderError(f"unknown metric source kind {self.kind!r}")
        if self.kind == "github":
            metric = self.params.get("metric")
            if metric not in GITHUB_METRICS:
                raise ProviderError(
                    f"github source {self.id!r} needs metric in {GITHUB_METRICS}, got {metric!r}"
                )


# ---------------------------------------------------------------------------
# HTTP transport (live or fixture replay)
# ---------------------------------------------------------------------------


def fixture_key(path: str, params: Mapping[str, str] | None = None) -> str:
    """File stem a request maps to in a fixture directory."""
    key = path.strip("/").replace("/", "__")
    if params:
        flat = urlencode(sorted(params.items()))
        key += "__" + re.sub(r"[^A-Za-z0-9._-]", "_", flat)
    return key


class FixtureTransport:
    """Replays responses recorded as JSON files: {status, json, headers?}."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def get(self, path, params=None, headers=None, timeout=None):
        target = self.directory / f"{fixture_key(path, params)}.json"
        if not target.exists():
            raise ProviderError(f"no fixture recorded for {path} ({target.name})")
        recorded = json.loads(target.read_text(encoding="utf-8"))
        return (recorded.get("status", 200), recorded.get("json"),
                recorded.get("headers", {}))


class LiveTransport:
    """Thin wrapper over requests; imported lazily so fixture runs stay
    network-free."""

    def __init__(self, timeout: float = 10.0):
        import requests

        self.session = requests.Session()
        self.timeout = timeout
        self.errors = (requests.Timeout, requests.ConnectionError)

    def get(self, path, params=None, headers=None, timeout=None):
        response = self.session.get(GITHUB_API + path, params=params,
                                    headers=headers, timeout=timeout or self.timeout)
        try:
            body = response.json()
        except ValueError:
            body = None
        return response.status_code, body, dict(response.headers)


class GithubClient:
    """Fetches repository metrics with bounded retries.

    Timeouts and connection failures are retried up to `max_retries`
    times with exponential backoff (base 1s, factor 2). 404 and
    rate-limit responses are never retried; they surface immediately.
    """

    def __init__(self, token: str | None = None, transport=None,
                 fixtures_dir: str | Path | None = None,
                 max_retries: int = 3, backoff_base: float = 1.0,
                 sleep: Callable[[float], None] = time.sleep,
                 now: Callable[[], datetime] | None = None):
        if transport is None:
            transport = (FixtureTransport(fixtures_dir) if fixtures_dir is not None
                         else LiveTransport())
        self.transport = transport
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.sleep = sleep
        self.now = now or (lambda: datetime.now(timezone.utc))

    def _headers(self):
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return headers

    def _get(self, path, params=None):
        retriable = getattr(self.transport, "errors", ())
        last_error = None
        for attempt in range(self.max_retries + 1):
            try:
                status, body, headers = self.transport.get(
                    path, params=params, headers=self._headers())
            except retriable as exc:
                last_error = exc
                if attempt < self.max_retries:
                    self.sleep(self.backoff_base * (2 ** attempt))
                continue
            if status == 404:
                raise RepositoryNotFound("repository not found")
            if status == 403:
                reset = headers.get("X-RateLimit-Reset")
                raise RateLimited("rate limit exceeded",
                                  float(reset) if reset else None)
            if status >= 500 and attempt < self.max_retries:
                self.sleep(self.backoff_base * (2 ** attempt))
                continue
            if status != 200:
                raise ProviderError(f"unexpected HTTP {status} for {path}")
            return body, headers
        raise ProviderError(f"request failed after {self.max_retries + 1} attempts: {last_error}")

    def _paginate(self, path, per_page=100):
        page = 1
        while True:
            body, _ = self._get(path, {"per_page": str(per_page), "page": str(page)})
            if not isinstance(body, list):
                raise ProviderError(f"expected a list from {path}")
            yield from body
            if len(body) < per_page:
                return
            page += 1

    def fetch_metric(self, owner: str, repo: str, metric: str) -> float:
        if metric not in GITHUB_METRICS:
            raise ProviderError(f"unknown metric {metric!r}")
        base = f"/repos/{owner}/{repo}"
        if metric in ("forks", "stars"):
            body, _ = self._get(base)
            key = "forks_count" if metric == "forks" else "stargazers_count"
            return float(body[key])
        if metric == "contributors":
            return float(sum(1 for _ in self._paginate(f"{base}/contributors")))
        if metric == "pullRequests":
            body, _ = self._get("/search/issues",
                                {"q": f"repo:{owner}/{repo} type:pr"})
            return float(body["total_count"])
        cutoff = self.now() - timedelta(days=365)
        count = 0
        for release in self._paginate(f"{base}/releases"):
            published = release.get("published_at")
            if published and datetime.fromisoformat(published.replace("Z", "+00:00")) >= cutoff:
                count += 1
        return float(count)


def fetch_github_metric(owner: str, repo: str, metric: str,
                        client: GithubClient | None = None) -> RawValue:
    """One-shot convenience over GithubClient.fetch_metric."""
    return (client or GithubClient()).fetch_metric(owner, repo, metric)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


class MetricCache:
    """TTL cache of fetched metrics, persisted as JSON lines
    (source id, alternative id, value, timestamp). Safe for concurrent
    readers and writers."""

    def __init__(self, path: str | Path, ttl: float = 24 * 3600.0):
        self.path = Path(path)
        self.ttl = float(ttl)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], tuple[RawValue, float]] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                record = json.loads(line)
                self._entries[(record["source"], record["alternative"])] = (
                    record["value"], float(record["fetchedAt"]))

    def lookup(self, source_id: str, alternative_id: str,
               now: float | None = None) -> tuple[RawValue, bool] | None:
        """Return (value, is_fresh) or None when never fetched."""
        now = time.time() if now is None else now
        with self._lock:
            entry = self._entries.get((source_id, alternative_id))
        if entry is None:
            return None
        value, fetched_at = entry
        return value, (now - fetched_at) <= self.ttl

    def store(self, source_id: str, alternative_id: str, value: RawValue,
              now: float | None = None):
        now = time.time() if now is None else now
        record = json.dumps({"source": source_id, "alternative": alternative_id,
                             "value": value, "fetchedAt": now}, sort_keys=True)
        with self._lock:
            self._entries[(source_id, alternative_id)] = (value, now)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(record + "\n")


# ---------------------------------------------------------------------------
# Resolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellFailure:
    alternative_id: str
    source_id: str
    message: str


@dataclass(frozen=True)
class ResolveResult:
    """Alternatives with measurements completed where possible. `failures`
    lists unfetchable cells; `stale` lists cells served from an expired
    cache entry after a failed refresh."""

    alternatives: tuple[Alternative, ...]
    failures: tuple[CellFailure, ...] = ()
    stale: tuple[tuple[str, str], ...] = ()

    @property
    def complete(self) -> bool:
        return not self.failures


def _repo_for(source: MetricSource, alternative: Alternative):
    owner = source.params.get("owner") or alternative.metadata.get("owner")
    repo = source.params.get("repo") or alternative.metadata.get("repo")
    if not owner or not repo:
        raise ProviderError(
            f"source {source.id!r} has no owner/repo for alternative {alternative.id!r}")
    return owner, repo


def resolve_metrics(model: QualityModel, alternatives: Sequence[Alternative],
                    sources: Sequence[MetricSource],
                    client: GithubClient | None = None,
                    cache: MetricCache | None = None,
                    max_workers: int = 4) -> ResolveResult:
    """Complete every alternative's measurements for the model's bound
    sources. Static sources must already be present in the dataset; github
    sources are fetched (through the cache when one is given). Input
    alternatives are never mutated."""
    by_id = {s.id: s for s in sources}
    needed = sorted(set(model.metric_bindings.values()))
    unknown = [s for s in needed if s not in by_id]
    if unknown:
        raise ProviderError(f"undeclared metric sources: {', '.join(unknown)}")

    failures: list[CellFailure] = []
    stale: list[tuple[str, str]] = []
    fetched: dict[tuple[str, str], RawValue] = {}
    jobs = []
    for source_id in needed:
        source = by_id[source_id]
        for alt in alternatives:
            if source_id in alt.measurements:
                continue
            if source.kind == "static":
                failures.append(CellFailure(alt.id, source_id,
                                            "static source missing from dataset"))
                continue
            jobs.append((source, alt))

    github = client
    if github is None and any(source.kind == "github" for source, _ in jobs):
        github = GithubClient()

    def fetch_cell(source: MetricSource, alt: Alternative):
        key = (source.id, alt.id)
        cached = cache.lookup(*key) if cache is not None else None
        if cached is not None and cached[1]:
            fetched[key] = cached[0]
            return
        try:
            owner, repo = _repo_for(source, alt)
            value = github.fetch_metric(owner, repo, source.params["metric"])
        except ProviderError as exc:
            if cached is not None:
                # Refresh failed: serve the expired value, flagged stale.
                fetched[key] = cached[0]
                stale.append(key)
            else:
                failures.append(CellFailure(alt.id, source.id, str(exc)))
            return
        fetched[key] = value
        if cache is not None:
            cache.store(source.id, alt.id, value)

    if jobs:
        with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
            list(pool.map(lambda job: fetch_cell(*job), jobs))

    completed = []
    for alt in alternatives:
        extra = {source_id: fetched[(source_id, alt.id)]
                 for source_id in needed
                 if (source_id, alt.id) in fetched}
        if extra:
            merged = dict(alt.measurements)
            merged.update(extra)
            completed.append(replace(alt, measurements=merged))
        else:
            completed.append(alt)
    return ResolveResult(alternatives=tuple(completed),
                         failures=tuple(sorted(failures, key=lambda f: (f.alternative_id, f.source_id))),
                         stale=tuple(sorted(stale)))
