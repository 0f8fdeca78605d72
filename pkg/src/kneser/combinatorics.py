"""Exact combinatorial primitives on k-subsets of a finite ground set.

Subsets are plain sorted tuples of 1-based integers. Bulk operations work
on ``(m, k)`` integer arrays whose rows are sorted k-subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Iterator, Sequence

import numpy as np

KSubset = tuple[int, ...]


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient; zero when ``k > n`` or ``k < 0``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def as_ksubset(elements: Iterable[int]) -> KSubset:
    """Canonicalize an iterable of distinct integers into a sorted tuple."""
    A = tuple(sorted(int(e) for e in elements))
    if len(set(A)) != len(A):
        raise ValueError(f"repeated elements in {A}")
    return A


def check_ksubset(A: Sequence[int], n: int, k: int) -> None:
    if len(A) != k:
        raise ValueError(f"expected a {k}-subset, got {tuple(A)}")
    prev = 0
    for e in A:
        if not isinstance(e, (int, np.integer)) or e <= prev or e > n:
            raise ValueError(f"{tuple(A)} is not a sorted {k}-subset of [1, {n}]")
        prev = e


def mask(A: Iterable[int]) -> int:
    """Bit mask of a subset (bit ``e`` set for element ``e``)."""
    out = 0
    for e in A:
        out |= 1 << int(e)
    return out


def are_disjoint(A: Iterable[int], B: Iterable[int]) -> bool:
    return mask(A) & mask(B) == 0


def enumerate_ksubsets(X: Iterable[int], k: int) -> Iterator[KSubset]:
    """All k-subsets of ``X`` in lexicographic order."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return combinations(sorted(X), k)


def ksubset_array(X: Iterable[int], k: int) -> np.ndarray:
    """The lexicographic enumeration of ``enumerate_ksubsets`` as an array."""
    X = sorted(X)
    count = binomial(len(X), k)
    flat = np.fromiter(
        (e for A in combinations(X, k) for e in A), dtype=np.int64, count=count * k
    )
    return flat.reshape(count, k)


def sample_uniform_ksubset(X: Sequence[int], k: int, rng: np.random.Generator) -> KSubset:
    """Draw a uniform k-subset of ``X``.

    Index-shrinking selection: draw ``r_j`` uniform in ``[0, |X| - j)`` for
    ``j = 0..k-1`` and map it to the ``r_j``-th index not yet chosen. Exactly
    ``k`` bounded-integer draws are consumed per call.
    """
    X = sorted(X)
    N = len(X)
    if k > N:
        raise ValueError(f"cannot draw a {k}-subset from {N} elements")
    chosen: list[int] = []
    for j in range(k):
        r = int(rng.integers(0, N - j))
        for p in sorted(chosen):
            if r >= p:
                r += 1
        chosen.append(r)
    return tuple(X[i] for i in sorted(chosen))


def sample_uniform_ksubsets(
    X: Sequence[int], k: int, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Vectorized ``sample_uniform_ksubset``: ``size`` independent rows.

    Consumes ``k`` array draws of length ``size`` (one per selection step),
    so the stream differs from ``size`` scalar calls but is equally fixed.
    """
    Xa = np.asarray(sorted(X), dtype=np.int64)
    N = len(Xa)
    if k > N:
        raise ValueError(f"cannot draw a {k}-subset from {N} elements")
    chosen = np.empty((size, k), dtype=np.int64)
    for j in range(k):
        r = rng.integers(0, N - j, size=size, dtype=np.int64)
        prev = np.sort(chosen[:, :j], axis=1)
        for t in range(j):
            r += r >= prev[:, t]
        chosen[:, j] = r
    chosen.sort(axis=1)
    return Xa[chosen]


def is_stable(A: Sequence[int], n: int) -> bool:
    """No two cyclically consecutive elements of ``[n]``."""
    s = set(A)
    if 1 in s and n in s and n > 1:
        return False
    return not any(e + 1 in s for e in s)


def enumerate_stable_ksubsets(n: int, k: int) -> Iterator[KSubset]:
    """Stable k-subsets of ``[n]`` in lexicographic order."""
    if k < 1 or n < 2 * k:
        raise ValueError(f"need k >= 1 and n >= 2k, got n={n}, k={k}")

    def extend(prefix: list[int], start: int) -> Iterator[KSubset]:
        if len(prefix) == k:
            yield tuple(prefix)
            return
        # room for the remaining elements with gaps of at least 2
        last = n - 2 * (k - len(prefix) - 1)
        if prefix and prefix[0] == 1:
            last = min(last, n - 1 - 2 * (k - len(prefix) - 1))
        for e in range(start, last + 1):
            prefix.append(e)
            yield from extend(prefix, e + 2)
            prefix.pop()

    return extend([], 1)


def schrijver_vertex_count(n: int, k: int) -> int:
    if k < 2 or n < 2 * k:
        raise ValueError(f"formula needs k >= 2 and n >= 2k, got n={n}, k={k}")
    return binomial(n - k + 1, k) - binomial(n - k - 1, k - 2)


def ekr_bound(n: int, k: int) -> int:
    if n < 2 * k:
        raise ValueError(f"need n >= 2k, got n={n}, k={k}")
    return binomial(n - 1, k - 1)


def hilton_milner_bound(n: int, k: int) -> int:
    if k < 2 or n < 2 * k:
        raise ValueError(f"need k >= 2 and n >= 2k, got n={n}, k={k}")
    return binomial(n - 1, k - 1) - binomial(n - k - 1, k - 1) + 1


def hilton_milner_extremal_family(n: int, k: int, F: Sequence[int], i: int) -> set[KSubset]:
    """The non-trivial intersecting family {A : i in A, A meets F} + {F}."""
    F = as_ksubset(F)
    if k < 2 or n < 2 * k:
        raise ValueError(f"need k >= 2 and n >= 2k, got n={n}, k={k}")
    check_ksubset(F, n, k)
    if i in F:
        raise ValueError(f"element {i} must lie outside {F}")
    if not 1 <= i <= n:
        raise ValueError(f"element {i} outside [1, {n}]")
    fmask = mask(F)
    family = {A for A in combinations(range(1, n + 1), k) if i in A and mask(A) & fmask}
    family.add(F)
    return family


def is_intersecting(family: Iterable[Sequence[int]]) -> bool:
    masks = [mask(A) for A in family]
    return all(a & b for a, b in combinations(masks, 2))


def common_elements(family: Iterable[Sequence[int]]) -> set[int]:
    family = list(family)
    if not family:
        return set()
    out = set(family[0])
    for A in family[1:]:
        out &= set(A)
    return out


@dataclass(frozen=True)
class BoundReport:
    value: Fraction
    preconditions_met: bool
    terms: dict[str, Fraction] = field(default_factory=dict)


def _rational(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("bounds take exact rationals, not floats")
    if not isinstance(x, (int, Rational)):
        raise TypeError(f"expected an exact rational, got {type(x).__name__}")
    return Fraction(x)


def lemma8_edge_density_bound(n: int, k: int, family_size, gamma) -> BoundReport:
    """Lower bound on the probability that two independent uniform members
    of a family with no element in more than a ``gamma`` fraction are disjoint.

    Computed for any input; ``preconditions_met`` records whether
    ``k >= 3``, ``n >= 2k``, ``|F| >= k^2 C(n-2, k-2)`` and ``0 < gamma <= 1``.
    """
    size = _rational(family_size)
    gamma = _rational(gamma)
    b = binomial(n - 2, k - 2)
    k_term = Fraction(k * b) / size
    k2_term = Fraction(k * k * b) / size
    first = 1 - gamma - k_term
    second = 1 - k2_term
    ok = k >= 3 and n >= 2 * k and size >= k * k * b and 0 < gamma <= 1
    return BoundReport(
        value=first * second / 2,
        preconditions_met=ok,
        terms={
            "k_over_F_binom": k_term,
            "k2_over_F_binom": k2_term,
            "first_factor": first,
            "second_factor": second,
        },
    )


def lemma10_disjoint_prob_bound(x_size: int, k: int, family_size, gamma) -> BoundReport:
    """Lower bound on the probability that a uniform member of a family on
    ``X`` avoids a fixed k-set missing an element of frequency ``>= gamma``."""
    size = _rational(family_size)
    gamma = _rational(gamma)
    k_term = Fraction(k * binomial(x_size - 2, k - 2)) / size
    ok = k >= 2 and x_size >= 2 * k and 0 < gamma <= 1 and size > 0
    return BoundReport(
        value=gamma - k_term,
        preconditions_met=ok,
        terms={"k_over_F_binom": k_term},
    )


def density_correction(n: int, k: int) -> Fraction:
    # k^2/|F| * C(n-2,k-2) at |F| = C(n,k)/(2n), in closed form
    return Fraction(2 * k**3 * (k - 1), n - 1)


def disjointness_correction(x_size: int, k: int) -> Fraction:
    # k/|F| * C(|X|-2,k-2) at |F| = C(|X|,k)/(2|X|), in closed form
    return Fraction(2 * k**2 * (k - 1), x_size - 1)
