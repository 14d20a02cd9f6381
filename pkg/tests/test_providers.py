"""Metric providers: fixture-replayed fetches, retry/backoff, cache TTL,
and measurement resolution."""

from datetime import datetime, timezone
from pathlib import Path

import pytest

from qmcdm.model import Alternative, NumericType, QualityAttribute, QualityModel
from qmcdm.providers import (
    GithubClient,
    MetricCache,
    MetricSource,
    ProviderError,
    RateLimited,
    RepositoryNotFound,
    fetch_github_metric,
    resolve_metrics,
)

FIXTURES = Path(__file__).parent / "data" / "github_fixtures"
FROZEN_NOW = datetime(2021, 1, 1, tzinfo=timezone.utc)


def fixture_client(**kwargs):
    kwargs.setdefault("now", lambda: FROZEN_NOW)
    kwargs.setdefault("sleep", lambda _: None)
    return GithubClient(fixtures_dir=FIXTURES, token="test-token", **kwargs)


class TestGithubClient:
    def test_forks_and_stars_from_repo_resource(self):
        client = fixture_client()
        assert client.fetch_metric("octo", "web", "forks") == 66668.0
        assert client.fetch_metric("octo", "web", "stars") == 151000.0

    def test_contributors_counted_across_pages(self):
        assert fixture_client().fetch_metric("octo", "web", "contributors") == 217.0

    def test_pull_requests_from_search_total(self):
        assert fixture_client().fetch_metric("octo", "web", "pullRequests") == 10068.0

    def test_releases_per_year_counts_trailing_365_days(self):
        # The fixture holds 3 releases; exactly 2 fall within a year of the
        # frozen clock.
        assert fixture_client().fetch_metric("octo", "web", "releasesPerYear") == 2.0

    def test_unknown_repository(self):
        with pytest.raises(RepositoryNotFound, match="repository not found"):
            fixture_client().fetch_metric("octo", "ghost", "forks")

    def test_rate_limit_carries_reset_time(self):
        with pytest.raises(RateLimited) as exc:
            fixture_client().fetch_metric("octo", "limited", "forks")
        assert exc.value.reset_at == 1700003600.0
        assert "resets at" in str(exc.value)

    def test_missing_fixture_is_an_error(self):
        with pytest.raises(ProviderError, match="no fixture"):
            fixture_client().fetch_metric("octo", "unrecorded", "forks")

    def test_unknown_metric(self):
        with pytest.raises(ProviderError, match="unknown metric"):
            fixture_client().fetch_metric("octo", "web", "watchers")

    def test_convenience_wrapper(self):
        assert fetch_github_metric("octo", "web", "forks", client=fixture_client()) == 66668.0


class FlakyTransport:
    """Times out a fixed number of times, then succeeds."""

    def __init__(self, failures, status=200, body=None, headers=None):
        self.failures = failures
        self.calls = 0
        self.result = (status, body or {"forks_count": 7}, headers or {})
        self.errors = (TimeoutError,)

    def get(self, path, params=None, headers=None, timeout=None):
        self.calls += 1
        if self.calls <= self.failures:
            raise TimeoutError("timed out")
        return self.result


class TestRetries:
    def test_exponential_backoff_then_success(self):
        delays = []
        client = GithubClient(transport=FlakyTransport(3), sleep=delays.append,
                              token="t")
        assert client.fetch_metric("o", "r", "forks") == 7.0
        assert delays == [1.0, 2.0, 4.0]

    def test_gives_up_after_three_retries(self):
        delays = []
        transport = FlakyTransport(10)
        client = GithubClient(transport=transport, sleep=delays.append, token="t")
        with pytest.raises(ProviderError, match="after 4 attempts"):
            client.fetch_metric("o", "r", "forks")
        assert transport.calls == 4
        assert delays == [1.0, 2.0, 4.0]

    def test_server_errors_retried(self):
        class Flaky5xx:
            calls = 0
            def get(self, path, params=None, headers=None, timeout=None):
                Flaky5xx.calls += 1
                if Flaky5xx.calls < 3:
                    return 502, None, {}
                return 200, {"forks_count": 3}, {}
        client = GithubClient(transport=Flaky5xx(), sleep=lambda _: None, token="t")
        assert client.fetch_metric("o", "r", "forks") == 3.0


class TestMetricSource:
    def test_static_default(self):
        src = MetricSource(id="forks")
        assert src.kind == "static"

    def test_github_requires_metric(self):
        with pytest.raises(ProviderError):
            MetricSource(id="x", kind="github", params={})
        with pytest.raises(ProviderError):
            MetricSource(id="x", kind="github", params={"metric": "watchers"})
        MetricSource(id="x", kind="github", params={"metric": "forks"})

    def test_unknown_kind(self):
        with pytest.raises(ProviderError):
            MetricSource(id="x", kind="gitlab")


class TestMetricCache:
    def test_round_trip_and_persistence(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = MetricCache(path, ttl=100)
        assert cache.lookup("s", "a", now=0) is None
        cache.store("s", "a", 42.0, now=0)
        assert cache.lookup("s", "a", now=50) == (42.0, True)
        assert cache.lookup("s", "a", now=101) == (42.0, False)

        reloaded = MetricCache(path, ttl=100)
        assert reloaded.lookup("s", "a", now=50) == (42.0, True)

    def test_later_entries_win(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = MetricCache(path, ttl=100)
        cache.store("s", "a", 1.0, now=0)
        cache.store("s", "a", 2.0, now=10)
        assert MetricCache(path, ttl=100).lookup("s", "a", now=20) == (2.0, True)


def github_model():
    root = QualityAttribute(id="forks", value_type="count")
    return QualityModel(name="m", version="1", root=root,
                        value_types={"count": NumericType()},
                        metric_bindings={"forks": "gh-forks"})


GH_SOURCE = MetricSource(id="gh-forks", kind="github", params={"metric": "forks"})


class TestResolveMetrics:
    def test_static_values_pass_through(self):
        model = github_model()
        sources = [MetricSource(id="gh-forks", kind="static")]
        alternatives = [Alternative(id="a", measurements={"gh-forks": 5.0})]
        result = resolve_metrics(model, alternatives, sources)
        assert result.complete
        assert result.alternatives[0].measurements["gh-forks"] == 5.0

    def test_already_complete_is_a_no_op(self):
        model = github_model()
        alt = Alternative(id="a", measurements={"gh-forks": 9.0})
        result = resolve_metrics(model, [alt], [GH_SOURCE], client=fixture_client())
        assert result.alternatives == (alt,)

    def test_github_fetch_fills_measurements(self):
        model = github_model()
        alt = Alternative(id="bootstrap", metadata={"owner": "octo", "repo": "web"})
        result = resolve_metrics(model, [alt], [GH_SOURCE], client=fixture_client())
        assert result.complete
        assert result.alternatives[0].measurements["gh-forks"] == 66668.0
        assert alt.measurements == {}  # input untouched

    def test_static_missing_is_reported(self):
        model = github_model()
        sources = [MetricSource(id="gh-forks", kind="static")]
        result = resolve_metrics(model, [Alternative(id="a")], sources)
        assert not result.complete
        assert result.failures[0].alternative_id == "a"
        assert result.failures[0].source_id == "gh-forks"

    def test_fetch_failure_marks_cell(self):
        model = github_model()
        alt = Alternative(id="ghost", metadata={"owner": "octo", "repo": "ghost"})
        result = resolve_metrics(model, [alt], [GH_SOURCE], client=fixture_client())
        assert not result.complete
        assert "not found" in result.failures[0].message

    def test_undeclared_source_rejected(self):
        with pytest.raises(ProviderError, match="undeclared"):
            resolve_metrics(github_model(), [Alternative(id="a")], [])

    def test_cache_serves_fresh_and_flags_stale(self, tmp_path):
        model = github_model()
        alt = Alternative(id="bootstrap", metadata={"owner": "octo", "repo": "web"})
        cache = MetricCache(tmp_path / "c.jsonl", ttl=1e9)
        first = resolve_metrics(model, [alt], [GH_SOURCE],
                                client=fixture_client(), cache=cache)
        assert first.complete and not first.stale

        class DeadTransport:
            def get(self, *a, **k):
                return 500, None, {}

        dead = GithubClient(transport=DeadTransport(), sleep=lambda _: None, token="t")
        warm = resolve_metrics(model, [alt], [GH_SOURCE], client=dead, cache=cache)
        assert warm.complete and not warm.stale  # fresh entry, no fetch attempted

        expired = MetricCache(tmp_path / "c.jsonl", ttl=0)
        stale = resolve_metrics(model, [alt], [GH_SOURCE], client=dead, cache=expired)
        assert stale.complete
        assert stale.stale == (("gh-forks", "bootstrap"),)
        assert stale.alternatives[0].measurements["gh-forks"] == 66668.0

    def test_deterministic_with_fixtures(self):
        model = github_model()
        alternatives = [
            Alternative(id="a", metadata={"owner": "octo", "repo": "web"}),
            Alternative(id="b", metadata={"owner": "octo", "repo": "web"}),
        ]
        first = resolve_metrics(model, alternatives, [GH_SOURCE], client=fixture_client())
        second = resolve_metrics(model, alternatives, [GH_SOURCE], client=fixture_client())
        assert first == second
