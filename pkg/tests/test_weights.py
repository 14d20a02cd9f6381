"""Weight elicitation kernels: worked examples against independent oracles,
plus the algebraic properties every method must satisfy."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmcdm.weights import (
    RankAssignment,
    WeightError,
    WeightVector,
    rank_weights,
    roc_weights,
    rr_weights,
    rs_weights,
    scale_values,
    smarts_normalize,
    utility,
)

# ---------------------------------------------------------------------------
# Independent oracles (straight transcriptions of the defining formulas,
# no code shared with the implementation)
# ---------------------------------------------------------------------------


def oracle_roc_strict(ranks):
    """ROC by direct summation; valid only for strict permutations of 1..n."""
    n = len(ranks)
    return [sum(1.0 / k for k in range(r, n + 1)) / n for r in ranks]


def oracle_rr(ranks):
    total = sum(1.0 / r for r in ranks)
    return [(1.0 / r) / total for r in ranks]


def oracle_rs(ranks):
    n = len(ranks)
    total = sum(n - r + 1 for r in ranks)
    return [(n - r + 1) / total for r in ranks]


def oracle_rs_closed_form(ranks):
    """The closed form for strict permutations: 2(n+1-r) / (n(n+1))."""
    n = len(ranks)
    return [2.0 * (n + 1 - r) / (n * (n + 1)) for r in ranks]


ranks_lists = st.lists(st.integers(min_value=1, max_value=12), min_size=1, max_size=12)


def strict_permutations(max_n):
    import itertools

    for n in range(1, max_n + 1):
        yield from itertools.permutations(range(1, n + 1))


# ---------------------------------------------------------------------------
# Worked examples
# ---------------------------------------------------------------------------


class TestRocWeights:
    def test_single_criterion_gets_all_weight(self):
        assert roc_weights([1]).weights == (1.0,)

    def test_two_criteria(self):
        got = roc_weights([1, 2])
        assert got.weights == pytest.approx(oracle_roc_strict([1, 2]), abs=1e-12)
        assert got.weights == pytest.approx((0.75, 0.25), abs=1e-12)

    def test_three_criteria(self):
        got = roc_weights([1, 2, 3])
        assert got.weights == pytest.approx(oracle_roc_strict([1, 2, 3]), abs=1e-12)
        assert got.weights == pytest.approx((0.6111, 0.2778, 0.1111), abs=1e-4)

    def test_matches_direct_summation_on_all_small_permutations(self):
        for perm in strict_permutations(6):
            got = roc_weights(list(perm))
            assert got.weights == pytest.approx(oracle_roc_strict(perm), abs=1e-12)

    def test_ties_average_the_spanned_positions(self):
        # Positions 1 and 2 of a 3-criterion ROC average to (0.6111 + 0.2778) / 2.
        got = roc_weights([1, 1, 2])
        expected_tied = (oracle_roc_strict([1, 2, 3])[0] + oracle_roc_strict([1, 2, 3])[1]) / 2
        assert got.weights[0] == pytest.approx(expected_tied, abs=1e-12)
        assert got.weights[0] == got.weights[1]

    def test_empty_rank_list_rejected(self):
        with pytest.raises(WeightError):
            roc_weights([])


class TestRrWeights:
    def test_single(self):
        assert rr_weights([1]).weights == (1.0,)

    def test_two_criteria(self):
        assert rr_weights([1, 2]).weights == pytest.approx((0.6667, 0.3333), abs=1e-4)

    def test_published_trend_ranks(self):
        # Six criteria ranked [3,3,2,1,3,2]; reciprocals sum to 3.
        got = rr_weights([3, 3, 2, 1, 3, 2])
        assert got.weights == pytest.approx(
            (0.111, 0.111, 0.167, 0.333, 0.111, 0.167), abs=0.005
        )
        assert got.weights == pytest.approx(oracle_rr([3, 3, 2, 1, 3, 2]), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(WeightError):
            rr_weights([])


class TestRsWeights:
    def test_examples(self):
        assert rs_weights([1]).weights == (1.0,)
        assert rs_weights([1, 2, 3]).weights == pytest.approx((0.5, 1 / 3, 1 / 6), abs=1e-4)
        # Tied ranks: scores (n - r + 1) are 4,4,5,6,4,5 over a total of 28.
        assert rs_weights([3, 3, 2, 1, 3, 2]).weights == pytest.approx(
            (4 / 28, 4 / 28, 5 / 28, 6 / 28, 4 / 28, 5 / 28), abs=1e-12
        )

    def test_rank_exceeding_count_rejected(self):
        with pytest.raises(WeightError, match="rank-exceeds-count"):
            rs_weights([1, 5])

    def test_closed_form_on_strict_permutations(self):
        for perm in strict_permutations(7):
            got = rs_weights(list(perm))
            assert got.weights == pytest.approx(oracle_rs_closed_form(perm), abs=1e-12)


class TestSmartsNormalize:
    def test_examples(self):
        assert smarts_normalize([5]).weights == (1.0,)
        assert smarts_normalize([10, 10, 10, 10]).weights == (0.25, 0.25, 0.25, 0.25)
        assert smarts_normalize([2, 1, 1]).weights == (0.5, 0.25, 0.25)

    def test_rejects_non_positive_and_empty(self):
        with pytest.raises(WeightError):
            smarts_normalize([])
        with pytest.raises(WeightError):
            smarts_normalize([1.0, 0.0])
        with pytest.raises(WeightError):
            smarts_normalize([1.0, -2.0])

    @given(st.lists(st.floats(min_value=0.01, max_value=1e6), min_size=1, max_size=10),
           st.floats(min_value=0.001, max_value=1000.0))
    def test_scale_invariance(self, raw, factor):
        base = smarts_normalize(raw)
        scaled = smarts_normalize([factor * w for w in raw])
        assert scaled.weights == pytest.approx(base.weights, abs=1e-9)


class TestScaleValues:
    def test_fork_counts(self):
        # Fork counts for three frameworks: 3406, 66668, 20550.
        got = scale_values([3406, 66668, 20550], "benefit")
        assert got == pytest.approx([0.0, 1.0, (20550 - 3406) / (66668 - 3406)], abs=1e-12)
        assert got == pytest.approx([0.0, 1.0, 0.2710], abs=1e-4)

    def test_cost_reverses(self):
        assert scale_values([1, 2, 3], "cost") == [1.0, 0.5, 0.0]

    def test_degenerate_range_is_neutral(self):
        assert scale_values([7, 7, 7], "benefit") == [0.5, 0.5, 0.5]

    def test_rejects_non_finite(self):
        with pytest.raises(WeightError):
            scale_values([1.0, float("nan")])
        with pytest.raises(WeightError):
            scale_values([])

    @given(st.lists(st.integers(min_value=-1000, max_value=1000), min_size=2, max_size=20),
           st.integers(min_value=1, max_value=50),
           st.integers(min_value=-100, max_value=100))
    def test_affine_invariance(self, values, a, b):
        base = scale_values(values, "benefit")
        moved = scale_values([a * v + b for v in values], "benefit")
        assert moved == pytest.approx(base, abs=1e-9)


class TestUtility:
    def test_examples(self):
        assert utility(WeightVector((1.0,)), [0.7]) == 0.7
        assert utility(WeightVector((0.5, 0.5)), [0.2, 0.8]) == pytest.approx(0.5)

    def test_convex_combination_identity(self):
        w = rr_weights([2, 1, 3])
        assert utility(w, [0.37, 0.37, 0.37]) == pytest.approx(0.37)

    def test_length_mismatch(self):
        with pytest.raises(WeightError):
            utility(WeightVector((1.0,)), [0.1, 0.2])

    @given(st.lists(st.integers(min_value=1, max_value=8), min_size=2, max_size=8),
           st.data())
    def test_monotone_in_each_value(self, ranks, data):
        w = rr_weights(ranks)
        values = data.draw(st.lists(st.floats(min_value=0, max_value=1),
                                    min_size=len(ranks), max_size=len(ranks)))
        index = data.draw(st.integers(min_value=0, max_value=len(ranks) - 1))
        bumped = list(values)
        bumped[index] = min(1.0, bumped[index] + 0.25)
        assert utility(w, bumped) >= utility(w, values) - 1e-12

    @given(st.lists(st.tuples(st.floats(min_value=0.01, max_value=10),
                              st.floats(min_value=0, max_value=1)),
                    min_size=1, max_size=10))
    def test_permutation_equivariance(self, pairs):
        raw = [p[0] for p in pairs]
        values = [p[1] for p in pairs]
        w = smarts_normalize(raw)
        base = utility(w, values)
        shuffled = list(range(len(pairs)))
        random.Random(7).shuffle(shuffled)
        w2 = smarts_normalize([raw[i] for i in shuffled])
        v2 = [values[i] for i in shuffled]
        assert utility(w2, v2) == pytest.approx(base, abs=1e-9)


# ---------------------------------------------------------------------------
# Cross-method properties
# ---------------------------------------------------------------------------


ALL_METHODS = (roc_weights, rr_weights, rs_weights)


@pytest.mark.parametrize("method", ALL_METHODS, ids=["roc", "rr", "rs"])
@given(ranks=ranks_lists)
@settings(max_examples=200)
def test_weights_are_a_distribution(method, ranks):
    n = len(ranks)
    ranks = [min(r, n) for r in ranks]  # keep rs applicable
    got = method(ranks)
    assert len(got) == n
    assert all(w >= 0 for w in got)
    assert math.fsum(got.weights) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("method", ALL_METHODS, ids=["roc", "rr", "rs"])
@given(ranks=ranks_lists)
@settings(max_examples=200)
def test_monotone_and_tie_symmetric(method, ranks):
    n = len(ranks)
    ranks = [min(r, n) for r in ranks]
    got = method(ranks)
    for i in range(n):
        for j in range(n):
            if ranks[i] < ranks[j]:
                assert got[i] >= got[j] - 1e-12
            elif ranks[i] == ranks[j]:
                assert got[i] == pytest.approx(got[j], abs=1e-12)


@given(ranks=ranks_lists)
@settings(max_examples=200)
def test_rr_rs_strictly_monotone(ranks):
    n = len(ranks)
    ranks = [min(r, n) for r in ranks]
    for method in (rr_weights, rs_weights):
        got = method(ranks)
        for i in range(n):
            for j in range(n):
                if ranks[i] < ranks[j]:
                    assert got[i] > got[j]


def test_rank_assignment_validation():
    with pytest.raises(WeightError):
        RankAssignment(())
    with pytest.raises(WeightError):
        RankAssignment((0,))
    with pytest.raises(WeightError):
        RankAssignment((1.5,))
    assert RankAssignment((2, 1)).n == 2


def test_weight_vector_validation():
    with pytest.raises(WeightError):
        WeightVector((0.5, 0.6))
    with pytest.raises(WeightError):
        WeightVector((1.5, -0.5))
    assert len(WeightVector((0.25, 0.75))) == 2


def test_rank_weights_dispatch():
    assert rank_weights("roc", [1, 2]) == roc_weights([1, 2])
    assert rank_weights("rr", [1, 2]) == rr_weights([1, 2])
    assert rank_weights("rs", [1, 2]) == rs_weights([1, 2])
