from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kneser.combinatorics import (
    are_disjoint,
    binomial,
    check_ksubset,
    common_elements,
    density_correction,
    disjointness_correction,
    ekr_bound,
    enumerate_ksubsets,
    enumerate_stable_ksubsets,
    hilton_milner_bound,
    hilton_milner_extremal_family,
    is_intersecting,
    is_stable,
    ksubset_array,
    lemma8_edge_density_bound,
    lemma10_disjoint_prob_bound,
    sample_uniform_ksubset,
    sample_uniform_ksubsets,
    schrijver_vertex_count,
)


def test_binomial_values():
    assert binomial(5, 2) == 10
    assert binomial(128, 2) == 8128
    assert all(binomial(n, 0) == 1 for n in range(20))
    assert binomial(3, 5) == 0
    assert binomial(648, 3) == 648 * 647 * 646 // 6


def test_enumerate_ksubsets():
    assert list(enumerate_ksubsets([1, 2, 3], 2)) == [(1, 2), (1, 3), (2, 3)]
    assert len(list(enumerate_ksubsets(range(1, 7), 2))) == 15
    assert list(enumerate_ksubsets([1, 2], 3)) == []
    rows = ksubset_array(range(1, 7), 3)
    assert rows.shape == (20, 3)
    assert [tuple(r) for r in rows.tolist()] == list(combinations(range(1, 7), 3))


def test_check_ksubset_rejects_bad_sets():
    check_ksubset((1, 4), 5, 2)
    for bad in [(1,), (4, 1), (1, 1), (0, 2), (2, 6)]:
        with pytest.raises(ValueError):
            check_ksubset(bad, 5, 2)


def test_sample_single_subset_forced():
    for seed in range(5):
        assert sample_uniform_ksubset([1, 2], 2, np.random.default_rng(seed)) == (1, 2)


def test_sample_determinism():
    a = sample_uniform_ksubset(range(1, 30), 4, np.random.default_rng(11))
    b = sample_uniform_ksubset(range(1, 30), 4, np.random.default_rng(11))
    assert a == b


def test_sample_frequencies_uniform():
    rng = np.random.default_rng(2024)
    rows = sample_uniform_ksubsets(range(1, 7), 2, rng, 60000)
    _, counts = np.unique(rows, axis=0, return_counts=True)
    assert len(counts) == 15
    assert np.all(np.abs(counts / 60000 - 1 / 15) <= 0.01)


def test_scalar_sampler_frequencies_uniform():
    rng = np.random.default_rng(5)
    tally = {}
    for _ in range(15000):
        A = sample_uniform_ksubset(range(1, 7), 2, rng)
        tally[A] = tally.get(A, 0) + 1
    assert len(tally) == 15
    assert all(abs(c / 15000 - 1 / 15) <= 0.01 for c in tally.values())


def test_scalar_sampler_uses_k_draws():
    rng = np.random.default_rng(3)
    twin = np.random.default_rng(3)
    sample_uniform_ksubset(range(1, 50), 5, rng)
    for _ in range(5):
        twin.integers(0, 2)
    assert rng.integers(0, 2**40) == twin.integers(0, 2**40)


@given(st.integers(4, 20), st.integers(1, 5), st.integers(0, 2**32))
@settings(max_examples=60)
def test_batch_samples_are_sorted_distinct_subsets(n, k, seed):
    k = min(k, n)
    rows = sample_uniform_ksubsets(range(1, n + 1), k, np.random.default_rng(seed), 50)
    assert rows.shape == (50, k)
    assert np.all(np.diff(rows, axis=1) > 0)
    assert rows.min() >= 1 and rows.max() <= n


def test_is_stable():
    assert is_stable((1, 3), 6)
    assert not is_stable((1, 6), 6)
    assert is_stable((2, 4, 6), 7)
    assert not is_stable((1, 2), 6)


def test_stable_enumeration_small():
    assert list(enumerate_stable_ksubsets(6, 2)) == [
        (1, 3), (1, 4), (1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)
    ]
    assert list(enumerate_stable_ksubsets(4, 2)) == [(1, 3), (2, 4)]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_stable_enumeration_matches_filter(k):
    for n in range(2 * k, 15):
        filtered = [A for A in combinations(range(1, n + 1), k) if is_stable(A, n)]
        assert list(enumerate_stable_ksubsets(n, k)) == filtered
        assert len(filtered) == schrijver_vertex_count(n, k)


def test_schrijver_counts_frozen():
    assert schrijver_vertex_count(6, 2) == 9
    assert schrijver_vertex_count(4, 2) == 2
    assert schrijver_vertex_count(10, 3) == 50
    assert schrijver_vertex_count(12, 3) == comb(10, 3) - comb(8, 1)


def test_ekr_and_hilton_milner_bounds():
    assert ekr_bound(6, 2) == 5
    assert ekr_bound(8, 3) == 21
    for k in range(2, 6):
        assert ekr_bound(2 * k, k) == comb(2 * k - 1, k - 1)
    assert hilton_milner_bound(6, 2) == 3
    assert hilton_milner_bound(8, 3) == 16


def test_hilton_milner_family_examples():
    fam = hilton_milner_extremal_family(6, 2, (1, 2), 3)
    assert set(fam) == {(1, 3), (2, 3), (1, 2)}
    fam = hilton_milner_extremal_family(8, 3, (1, 2, 3), 4)
    assert len(fam) == 16


@pytest.mark.parametrize("k", [2, 3, 4])
def test_hilton_milner_family_properties(k):
    for n in range(2 * k, 13):
        fam = hilton_milner_extremal_family(n, k, tuple(range(1, k + 1)), k + 1)
        assert len(fam) == hilton_milner_bound(n, k)
        assert is_intersecting(fam)
        assert not common_elements(fam)


@given(st.lists(st.integers(1, 12), min_size=1, max_size=5, unique=True),
       st.lists(st.integers(1, 12), min_size=1, max_size=5, unique=True))
def test_are_disjoint_matches_sets(A, B):
    assert are_disjoint(A, B) == (not set(A) & set(B))


def test_are_disjoint_examples():
    assert are_disjoint((1, 2), (3, 4))
    assert not are_disjoint((1, 2), (2, 3))


def test_edge_density_examples():
    r = lemma8_edge_density_bound(24, 3, 9 * 22, Fraction(1))
    assert r.preconditions_met
    assert r.value <= 0
    size = Fraction(binomial(648, 3), 1296)
    r = lemma8_edge_density_bound(648, 3, size, Fraction(1, 2))
    assert r.preconditions_met
    assert r.value >= Fraction(3, 32)


def test_edge_density_flags_preconditions():
    assert not lemma8_edge_density_bound(10, 2, 40, Fraction(1, 2)).preconditions_met
    assert not lemma8_edge_density_bound(10, 3, 10, Fraction(1, 2)).preconditions_met
    with pytest.raises((TypeError, ValueError)):
        lemma8_edge_density_bound(10, 3, 100, 0.5)


def test_edge_density_matches_closed_form():
    n, k, F, g = 11, 3, 150, Fraction(2, 5)
    t = Fraction(comb(n - 2, k - 2), F)
    expected = Fraction(1, 2) * (1 - g - k * t) * (1 - k * k * t)
    assert lemma8_edge_density_bound(n, k, F, g).value == expected


def test_edge_density_on_constructed_family():
    # all 3-subsets of [10] that avoid element 10, plus a few through it
    F = [A for A in combinations(range(1, 11), 3) if 10 not in A]
    F += [(1, 2, 10), (3, 4, 10)]
    counts = np.bincount([e for A in F for e in A], minlength=11)
    gamma = Fraction(int(counts.max()), len(F))
    report = lemma8_edge_density_bound(10, 3, len(F), gamma)
    assert report.preconditions_met
    hits = sum(1 for A in F for B in F if not set(A) & set(B))
    assert Fraction(hits, len(F) ** 2) >= report.value


def test_disjointness_examples():
    for x, F in [(10, 7), (30, 100)]:
        g = Fraction(3, 5)
        assert lemma10_disjoint_prob_bound(x, 2, F, g).value == g - Fraction(2, F)
    for k in range(2, 7):
        x = 8 * k**3
        F = Fraction(binomial(x, k), 2 * x)
        for g in (Fraction(0), Fraction(1, 2), Fraction(1)):
            assert g - Fraction(1, 4) <= lemma10_disjoint_prob_bound(x, k, F, g).value


def test_corrections():
    assert density_correction(8 * 81, 3) == Fraction(2 * 27 * 2, 647)
    for k in range(3, 7):
        assert density_correction(8 * k**4, k) <= Fraction(1, 4)
    for k in range(2, 7):
        assert disjointness_correction(8 * k**3, k) <= Fraction(1, 4)
