"""Rank-based weight elicitation and weighted-additive scoring kernels.

Three rank-to-weight conversions are supported (rank 1 = most important):

* ROC (rank order centroid): the centroid of the simplex region compatible
  with the stated ordering.
* RR (rank reciprocal): weights proportional to 1/rank.
* RS (rank sum): weights proportional to n - rank + 1.

Tied ranks are allowed everywhere. ROC is computed over sorted positions
with tied criteria receiving the mean of the position weights they span;
RR and RS apply their formula to the rank values directly, which handles
ties natively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

#: Absolute tolerance for "weights sum to one" checks.
WEIGHT_SUM_TOL = 1e-9


class WeightError(ValueError):
    """Invalid rank assignment or weight input."""


class RankWeighting(str, Enum):
    """Predefined rank-to-weight conversion methods."""

    ROC = "roc"
    RR = "rr"
    RS = "rs"


@dataclass(frozen=True)
class RankAssignment:
    """Criterion ranks as stated by the decision-maker.

    Rank 1 marks the most important criterion. Ties are permitted, and
    ranks need not form a permutation of 1..n.
    """

    ranks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(self.ranks))
        if not self.ranks:
            raise WeightError("rank list must not be empty")
        for r in self.ranks:
            if isinstance(r, bool) or not isinstance(r, int):
                raise WeightError(f"ranks must be integers, got {r!r}")
            if r < 1:
                raise WeightError(f"ranks must be >= 1, got {r}")

    @property
    def n(self) -> int:
        return len(self.ranks)


@dataclass(frozen=True)
class WeightVector:
    """Normalized criterion weights: non-negative, summing to one."""

    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.weights:
            raise WeightError("weight vector must not be empty")
        for w in self.weights:
            if not math.isfinite(w) or w < 0.0:
                raise WeightError(f"weights must be finite and >= 0, got {w}")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise WeightError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total}")

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i):
        return self.weights[i]


Ranks = Union[RankAssignment, Sequence[int]]


def _as_ranks(ranks: Ranks) -> RankAssignment:
    if isinstance(ranks, RankAssignment):
        return ranks
    return RankAssignment(tuple(ranks))


def _normalized(weights: Iterable[float]) -> WeightVector:
    ws = list(weights)
    total = math.fsum(ws)
    return WeightVector(tuple(w / total for w in ws))


def roc_weights(ranks: Ranks) -> WeightVector:
    """Rank order centroid weights.

    Criteria are sorted ascending by rank (ties broken by original
    position); the criterion at sorted position j out of n receives
    (1/n) * sum(1/k for k = j..n). Tied ranks receive the arithmetic mean
    of the position weights they span, so equal ranks get equal weights.
    """
    ra = _as_ranks(ranks)
    n = ra.n
    # Position weight for 1-based position j: (1/n) * sum_{k=j..n} 1/k.
    # Built back-to-front so each entry is a running suffix sum.
    pos = [0.0] * n
    suffix = 0.0
    for j in range(n - 1, -1, -1):
        suffix += 1.0 / (j + 1)
        pos[j] = suffix / n
    order = sorted(range(n), key=lambda i: (ra.ranks[i], i))
    out = [0.0] * n
    start = 0
    while start < n:
        stop = start
        while stop < n and ra.ranks[order[stop]] == ra.ranks[order[start]]:
            stop += 1
        group_weight = math.fsum(pos[start:stop]) / (stop - start)
        for i in order[start:stop]:
            out[i] = group_weight
        start = stop
    return _normalized(out)


def rr_weights(ranks: Ranks) -> WeightVector:
    """Rank reciprocal weights: w_j = (1/r_j) / sum_k (1/r_k)."""
    ra = _as_ranks(ranks)
    return _normalized(1.0 / r for r in ra.ranks)


def rs_weights(ranks: Ranks) -> WeightVector:
    """Rank sum weights: w_j = (n - r_j + 1) / sum_k (n - r_k + 1).

    This normalized form stays a valid distribution under tied ranks; for
    a strict permutation of 1..n it reduces to 2(n + 1 - r_j) / (n(n + 1)).
    Ranks above n would produce a non-positive score and are rejected.
    """
    ra = _as_ranks(ranks)
    n = ra.n
    for r in ra.ranks:
        if r > n:
            raise WeightError(f"rank-exceeds-count: rank {r} with only {n} criteria")
    return _normalized(float(n - r + 1) for r in ra.ranks)


_RANK_METHODS = {
    RankWeighting.ROC: roc_weights,
    RankWeighting.RR: rr_weights,
    RankWeighting.RS: rs_weights,
}


def rank_weights(method: RankWeighting | str, ranks: Ranks) -> WeightVector:
    """Dispatch to one of the rank-to-weight methods by name."""
    return _RANK_METHODS[RankWeighting(method)](ranks)


def smarts_normalize(raw: Sequence[float]) -> WeightVector:
    """Normalize decision-maker swing ratings: w_j / sum_k w_k."""
    if len(raw) == 0:
        raise WeightError("weight list must not be empty")
    for w in raw:
        if not math.isfinite(w) or w <= 0.0:
            raise WeightError(f"swing ratings must be finite and > 0, got {w}")
    return _normalized(float(w) for w in raw)


def scale_values(values: Sequence[float], direction: str = "benefit") -> list[float]:
    """Min-max scale one criterion's scores across all alternatives to [0, 1].

    Benefit criteria map the largest value to 1, cost criteria map the
    smallest value to 1. A degenerate range (all values equal) maps every
    alternative to the neutral 0.5.
    """
    if len(values) == 0:
        raise WeightError("cannot scale an empty value list")
    vals = [float(v) for v in values]
    for v in vals:
        if not math.isfinite(v):
            raise WeightError(f"values must be finite, got {v}")
    if direction not in ("benefit", "cost"):
        raise WeightError(f"direction must be 'benefit' or 'cost', got {direction!r}")
    lo, hi = min(vals), max(vals)
    if lo == hi:
        return [0.5] * len(vals)
    span = hi - lo
    if direction == "benefit":
        return [(v - lo) / span for v in vals]
    return [(hi - v) / span for v in vals]


def utility(weights: WeightVector | Sequence[float], values: Sequence[float]) -> float:
    """Weighted additive utility: the dot product of weights and values."""
    ws = tuple(weights.weights if isinstance(weights, WeightVector) else weights)
    if len(ws) != len(values):
        raise WeightError(f"length mismatch: {len(ws)} weights vs {len(values)} values")
    return math.fsum(w * float(v) for w, v in zip(ws, values))
