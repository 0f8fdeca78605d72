from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kneser.combinatorics import binomial, ksubset_array
from kneser.elimination import (
    Edge,
    EliminationParams,
    OffPalette,
    PopularPair,
    eliminate,
    first_monochromatic_pair,
    verify_popular_pair,
)
from kneser.oracles import (
    CanonicalColoring,
    ColoringOracle,
    ConstantColoring,
    FunctionColoring,
    HardColoring,
    OracleInconsistency,
)

RELAXED = EliminationParams(relax_size_threshold=True, exhaustive_small_k=False)


def naive_first_pair(rows, colors):
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            if colors[a] == colors[b] and not set(rows[a]) & set(rows[b]):
                return a, b
    return None


@given(st.integers(4, 9), st.integers(1, 3), st.integers(1, 4), st.integers(1, 60), st.integers(0, 10**6))
@settings(max_examples=150, deadline=None)
def test_first_pair_matches_naive(n, k, palette, m, seed):
    k = min(k, n // 2)
    rng = np.random.default_rng(seed)
    all_rows = ksubset_array(range(1, n + 1), k)
    rows = all_rows[rng.integers(0, len(all_rows), m)]
    colors = rng.integers(1, palette + 1, m)
    assert first_monochromatic_pair(rows, colors) == naive_first_pair(rows.tolist(), colors.tolist())


def test_first_pair_budget_falls_back_to_consecutive():
    rows = np.array([[1, 2], [1, 3], [3, 4], [5, 6]])
    colors = np.array([1, 1, 1, 1])
    assert first_monochromatic_pair(rows, colors) == (0, 2)
    assert first_monochromatic_pair(rows, colors, pair_budget=1) == (2, 3)


def test_constant_coloring_gives_edge():
    n, k = 12, 3
    X, C = list(range(1, 13)), list(range(1, 8))
    outcome, stats = eliminate(n, k, X, C, ConstantColoring(n, k), np.random.default_rng(0), RELAXED)
    assert isinstance(outcome, Edge)
    assert not set(outcome.A) & set(outcome.B)
    assert stats.samples == n**3


def test_canonical_coloring_gives_off_palette():
    n, k = 20, 3
    X, C = list(range(1, n + 1)), list(range(1, n - 2 * k + 2))
    oracle = CanonicalColoring(n, k)
    for seed in range(5):
        outcome, stats = eliminate(n, k, X, C, oracle, np.random.default_rng(seed), RELAXED)
        assert isinstance(outcome, OffPalette)
        assert outcome.color == n - 2 * k + 2
        assert set(outcome.A) <= set(range(n - 2 * k + 2, n + 1))
        assert stats.off_palette_fraction > 0


def test_canonical_coloring_popular_pair_is_diagonal():
    n, k = 20, 3
    X, C = list(range(1, n + 1)), list(range(1, n - 2 * k + 2))
    params = EliminationParams(sample_count_override=6, relax_size_threshold=True)
    seen = 0
    for seed in range(40):
        outcome, stats = eliminate(n, k, X, C, CanonicalColoring(n, k), np.random.default_rng(seed), params)
        if isinstance(outcome, PopularPair):
            seen += 1
            i = outcome.i_star
            assert outcome.j_star == i
            # every sampled set colored i contains i
            assert stats.gamma_tilde_row[i] == stats.alpha_tilde[i]
    assert seen > 0


def test_exhaustive_small_k_finds_edge():
    n, k = 40, 2
    oracle = HardColoring(n, k, 1)
    X, C = list(range(1, n + 1)), list(range(1, n - 2 * k + 2))
    params = EliminationParams(relax_size_threshold=True)
    outcome, stats = eliminate(n, k, X, C, oracle, np.random.default_rng(0), params)
    assert stats.exhaustive and stats.samples == binomial(n, k)
    assert isinstance(outcome, Edge)


def test_argument_validation():
    oracle = ConstantColoring(10, 2)
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        eliminate(10, 2, range(1, 11), range(1, 6), oracle, rng, RELAXED)  # wrong palette size
    with pytest.raises(ValueError):
        eliminate(10, 2, range(1, 11), range(1, 8), oracle, rng)  # |X| < 8k^4
    with pytest.raises(ValueError):
        eliminate(10, 2, range(2, 11), [2, 3, 4, 5, 8], oracle, rng, RELAXED)  # color 8 out of range


class FlakyColoring(ColoringOracle):
    """Batch answers and single answers disagree."""

    def __init__(self, n, k):
        super().__init__(n, k, n - 2 * k + 1)

    def _colors(self, rows):
        return np.ones(len(rows), dtype=np.int64)

    def _color(self, A):
        return 1 + A[0] % self.palette_size


def test_inconsistent_oracle_is_caught():
    n, k = 12, 3
    with pytest.raises(OracleInconsistency):
        eliminate(n, k, range(1, n + 1), range(1, 8), FlakyColoring(n, k), np.random.default_rng(0), RELAXED)


def test_determinism():
    n, k = 30, 3
    oracle = HardColoring(n, k, 2)
    params = EliminationParams(sample_count_override=200, relax_size_threshold=True)
    runs = [eliminate(n, k, range(1, n + 1), range(1, n - 4), oracle, np.random.default_rng(4), params)
            for _ in range(2)]
    assert runs[0][0] == runs[1][0]
    assert runs[0][1].alpha_tilde == runs[1][1].alpha_tilde


def test_verify_popular_pair_zero_for_unique_vertex():
    n, k = 8, 2
    oracle = FunctionColoring(n, k, 5, lambda A: 1 if A == (1, 2) else 2)
    # A = {1, 3} meets the only vertex of color 1
    assert verify_popular_pair(n, k, range(1, 9), oracle, 1, 8) == 0


def test_verify_popular_pair_star_class():
    n, k, j = 10, 2, 4
    oracle = FunctionColoring(n, k, 7, lambda A: 1 if j in A else 2)
    X = list(range(1, 11))
    got = verify_popular_pair(n, k, X, oracle, 1, j)
    # worst A avoiding j: two elements of X \ {j}, which kill two sets {j, a}
    assert got == Fraction(n - 1 - 2, binomial(10, 2))


def brute_popular_pair(n, k, X, oracle, i, j):
    members = [B for B in combinations(sorted(X), k) if oracle.color(B) == i]
    total = binomial(len(X), k)
    return min(
        Fraction(sum(1 for B in members if not set(A) & set(B)), total)
        for A in combinations([e for e in range(1, n + 1) if e != j], k)
    )


@pytest.mark.parametrize("n,k,xs", [(8, 2, 8), (9, 2, 7), (9, 3, 9), (10, 3, 8)])
def test_verify_popular_pair_matches_brute_force(n, k, xs):
    rng = np.random.default_rng(n + xs)
    for seed in range(4):
        oracle = HardColoring(n, k, seed)
        X = sorted(rng.choice(np.arange(1, n + 1), xs, replace=False).tolist())
        i = int(rng.integers(1, n - 2 * k + 2))
        j = X[int(rng.integers(0, xs))]
        assert verify_popular_pair(n, k, X, oracle, i, j) == brute_popular_pair(n, k, X, oracle, i, j)
