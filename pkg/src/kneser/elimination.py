"""One randomized element-elimination round.

Given a ground set ``X``, a palette ``C`` with ``|C| = |X| - 2k + 1`` and a
coloring oracle, a round returns one of

* ``Edge(A, B)``: a monochromatic edge inside ``C(X, k)``;
* ``OffPalette(A, color)``: a vertex of ``C(X, k)`` whose color is not in ``C``;
* ``PopularPair(i_star, j_star)``: a heavy color and the element most
  frequent on it, to be removed from ``C`` and ``X`` respectively.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .combinatorics import KSubset, binomial, ksubset_array, sample_uniform_ksubsets
from .oracles import BudgetExceeded, ColoringOracle, OracleInconsistency

DEFAULT_PAIR_BUDGET = 10**8
DEFAULT_ENUMERATION_BUDGET = 10**7
_CHUNK = 512


@dataclass(frozen=True)
class Edge:
    A: KSubset
    B: KSubset


@dataclass(frozen=True)
class OffPalette:
    A: KSubset
    color: int


@dataclass(frozen=True)
class PopularPair:
    i_star: int
    j_star: int


EliminationOutcome = Union[Edge, OffPalette, PopularPair]


@dataclass(frozen=True)
class EliminationParams:
    sample_count_override: int | None = None
    exhaustive_small_k: bool = True
    # allow |X| < 8k^4; the success guarantee is void for such calls
    relax_size_threshold: bool = False
    pair_budget: int = DEFAULT_PAIR_BUDGET

    def __post_init__(self):
        if self.sample_count_override is not None and self.sample_count_override < 1:
            raise ValueError("sample count must be at least 1")

    def sample_count(self, n: int) -> int:
        return self.sample_count_override if self.sample_count_override is not None else n**3

    @property
    def heuristic(self) -> bool:
        return self.sample_count_override is not None or self.relax_size_threshold


@dataclass
class EmpiricalStats:
    alpha_tilde: dict[int, Fraction] = field(default_factory=dict)
    gamma_tilde_row: dict[int, Fraction] = field(default_factory=dict)
    off_palette_fraction: Fraction = Fraction(0)
    samples: int = 0
    exhaustive: bool = False


def _row_keys(rows: np.ndarray, base: int) -> np.ndarray | None:
    k = rows.shape[1]
    if base ** (k + 1) >= 2**62:
        return None
    key = np.zeros(len(rows), dtype=np.int64)
    for j in range(k):
        key = key * base + rows[:, j]
    return key


def _first_pair_in_class(rows: np.ndarray, width: int) -> tuple[int, int] | None:
    """First ``(a, b)``, ``a < b`` lexicographically, with rows ``a``, ``b`` disjoint."""
    D = len(rows)
    if D < 2:
        return None
    inc = np.zeros((D, width), dtype=np.float32)
    inc[np.arange(D)[:, None], rows] = 1.0
    if inc.sum(axis=0).max() == D:
        return None  # a common element: the class is a star
    for start in range(0, D - 1, _CHUNK):
        stop = min(start + _CHUNK, D)
        hit = (inc[start:stop] @ inc.T) == 0
        hit &= np.arange(D)[None, :] > np.arange(start, stop)[:, None]
        rows_hit = np.flatnonzero(hit.any(axis=1))
        if len(rows_hit):
            a = int(rows_hit[0])
            return start + a, int(np.argmax(hit[a]))
    return None


def first_monochromatic_pair(
    rows: np.ndarray, colors: np.ndarray, pair_budget: int = DEFAULT_PAIR_BUDGET
) -> tuple[int, int] | None:
    """Lexicographically first index pair ``(t, t')``, ``t < t'``, with
    ``rows[t]``, ``rows[t']`` disjoint and equally colored.

    Repeated sets are collapsed to their first occurrence before pairs are
    scanned, which does not change the answer. When the number of
    distinct-set pairs exceeds ``pair_budget`` only the consecutive pairs
    ``(2s, 2s+1)`` are checked.
    """
    m = len(rows)
    if m < 2:
        return None
    width = int(rows.max()) + 1
    keys = _row_keys(rows, width)
    if keys is None:
        _, inverse = np.unique(rows, axis=0, return_inverse=True)
        keys = inverse.reshape(-1).astype(np.int64)
    colors = colors.astype(np.int64)
    span = int(keys.max()) + 1
    if colors.min() >= 0 and int(colors.max()) < 2**62 // span:
        _, first = np.unique(colors * span + keys, return_index=True)
    else:
        _, first = np.unique(np.column_stack([colors, keys]), axis=0, return_index=True)
    first.sort()
    dcolors = colors[first]

    by_color: dict[int, np.ndarray] = {}
    order = np.argsort(dcolors, kind="stable")
    bounds = np.flatnonzero(np.diff(dcolors[order])) + 1
    for group in np.split(order, bounds):
        if len(group) > 1:
            by_color[int(dcolors[group[0]])] = first[group]

    if sum(len(g) ** 2 for g in by_color.values()) > pair_budget:
        return _consecutive_pair(rows, colors)

    best = None
    for idx in by_color.values():
        found = _first_pair_in_class(rows[idx], width)
        if found is not None:
            cand = (int(idx[found[0]]), int(idx[found[1]]))
            if best is None or cand < best:
                best = cand
    return best


def _consecutive_pair(rows: np.ndarray, colors: np.ndarray) -> tuple[int, int] | None:
    half = len(rows) // 2 * 2
    left, right = rows[0:half:2], rows[1:half:2]
    same = colors[0:half:2] == colors[1:half:2]
    disjoint = ~(left[:, :, None] == right[:, None, :]).any(axis=(1, 2))
    hits = np.flatnonzero(same & disjoint)
    if len(hits) == 0:
        return None
    s = int(hits[0])
    return 2 * s, 2 * s + 1


def _as_tuple(row) -> KSubset:
    return tuple(int(e) for e in row)


def _verified_edge(oracle: ColoringOracle, A: KSubset, B: KSubset) -> Edge:
    if set(A) & set(B) or oracle.color(A) != oracle.color(B):
        raise OracleInconsistency(f"edge {A}, {B} failed re-verification")
    return Edge(A, B)


def _verified_off_palette(oracle: ColoringOracle, A: KSubset, palette: set[int]) -> OffPalette:
    c = oracle.color(A)
    if c in palette:
        raise OracleInconsistency(f"vertex {A} changed color on re-query")
    return OffPalette(A, c)


def eliminate(
    n: int,
    k: int,
    X: Iterable[int],
    C: Iterable[int],
    oracle: ColoringOracle,
    rng: np.random.Generator,
    params: EliminationParams = EliminationParams(),
) -> tuple[EliminationOutcome, EmpiricalStats]:
    X = sorted(X)
    C = set(C)
    if len(C) != len(X) - 2 * k + 1:
        raise ValueError(f"palette has {len(C)} colors, need |X| - 2k + 1 = {len(X) - 2 * k + 1}")
    if any(not 1 <= c <= n - 2 * k + 1 for c in C):
        raise ValueError(f"palette must lie in [1, {n - 2 * k + 1}]")
    if not params.relax_size_threshold and len(X) < 8 * k**4:
        raise ValueError(f"|X| = {len(X)} < 8k^4 = {8 * k**4}; pass relax_size_threshold")

    if k <= 2 and params.exhaustive_small_k:
        if binomial(len(X), k) > DEFAULT_ENUMERATION_BUDGET:
            raise BudgetExceeded(f"C({len(X)}, {k}) vertices exceed the enumeration budget")
        rows = ksubset_array(X, k)
        exhaustive = True
    else:
        rows = sample_uniform_ksubsets(X, k, rng, params.sample_count(n))
        exhaustive = False
    colors = oracle.colors(rows)
    stats = _statistics(rows, colors, X, C, exhaustive)

    pair = first_monochromatic_pair(rows, colors, params.pair_budget)
    if pair is not None:
        return _verified_edge(oracle, _as_tuple(rows[pair[0]]), _as_tuple(rows[pair[1]])), stats

    in_palette = np.isin(colors, np.fromiter(C, dtype=np.int64, count=len(C)))
    off = np.flatnonzero(~in_palette)
    if len(off):
        return _verified_off_palette(oracle, _as_tuple(rows[off[0]]), C), stats

    if exhaustive:
        raise OracleInconsistency(
            f"C(X, {k}) has no monochromatic edge and no off-palette vertex"
        )
    i_star = min(C, key=lambda c: (-stats.alpha_tilde[c], c))
    j_star = min(X, key=lambda j: (-stats.gamma_tilde_row[j], j))
    return PopularPair(i_star, j_star), stats


def _statistics(rows, colors, X, C, exhaustive) -> EmpiricalStats:
    m = len(rows)
    values, freq = np.unique(colors, return_counts=True)
    counts = dict(zip(values.tolist(), freq.tolist()))
    alpha = {c: Fraction(counts.get(c, 0), m) for c in sorted(C)}
    off = Fraction(m - sum(counts.get(c, 0) for c in C), m)
    i_star = min(C, key=lambda c: (-alpha[c], c))
    members = rows[colors == i_star].reshape(-1)
    elem_counts = np.bincount(members, minlength=max(X) + 1)
    gamma = {j: Fraction(int(elem_counts[j]), m) for j in X}
    return EmpiricalStats(alpha, gamma, off, m, exhaustive)


def verify_popular_pair(
    n: int,
    k: int,
    X: Sequence[int],
    oracle: ColoringOracle,
    i: int,
    j: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Fraction:
    """Exact ``min_A Pr_B[c(B) = i and A, B disjoint]`` over k-subsets ``A``
    of ``[n]`` avoiding ``j``, with ``B`` uniform on ``C(X, k)``.

    Only ``A ∩ X`` matters and adding elements can only lower the count, so
    the minimum is taken over the largest feasible patterns ``T ⊆ X \\ {j}``;
    disjoint counts come from inclusion-exclusion over subsets of ``T``.
    """
    X = sorted(X)
    total = binomial(len(X), k)
    if total > budget:
        raise BudgetExceeded(f"C({len(X)}, {k}) = {total} exceeds budget {budget}")
    rows = ksubset_array(X, k)
    colors = oracle.colors(rows)
    members = [tuple(r) for r in rows[colors == i].tolist()]

    contains: Counter = Counter()
    for B in members:
        for size in range(k + 1):
            for S in combinations(B, size):
                contains[S] += 1

    outside = n - len(X) + (0 if j in X else -1)
    rest = [e for e in X if e != j]
    pattern_size = min(k, len(rest))
    if k - pattern_size > outside:
        raise ValueError("no k-subset of [n] avoids j")
    worst = len(members)
    for T in combinations(rest, pattern_size):
        count = 0
        for size in range(len(T) + 1):
            sign = -1 if size % 2 else 1
            for S in combinations(T, size):
                count += sign * contains.get(S, 0)
        worst = min(worst, count)
    return Fraction(worst, total)

