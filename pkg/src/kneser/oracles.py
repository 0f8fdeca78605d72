"""Black-box access to Kneser-graph colorings.

A coloring oracle answers point queries ``color(A)`` for k-subsets ``A`` of
``[n]``; ``colors(rows)`` is the batched form over an ``(m, k)`` array and
must agree with ``color`` row by row. Subset oracles answer "does ``B``
contain a vertex of color ``i``".
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .combinatorics import KSubset, binomial, check_ksubset, mask

MASK64 = (1 << 64) - 1
DEFAULT_SUBSET_BUDGET = 10**7

_HARD_TAG = 0x6B6E657365720001
_RANDOM_TAG = 0x6B6E657365720002


class KneserError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceeded(KneserError):
    def __init__(self, message: str, query=None):
        super().__init__(message)
        self.query = query


class OracleInconsistency(KneserError):
    """An oracle gave answers that no fixed coloring could give."""


def _splitmix(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _splitmix_array(z: np.ndarray) -> np.ndarray:
    z = z + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def vertex_hash(A: Sequence[int], seed: int, tag: int) -> int:
    """Seed-keyed 64-bit hash of a sorted vertex."""
    h = _splitmix((seed ^ tag) & MASK64)
    for e in A:
        h = _splitmix(h ^ int(e))
    return h


def vertex_hash_rows(rows: np.ndarray, seed: int, tag: int) -> np.ndarray:
    h = np.full(len(rows), _splitmix((seed ^ tag) & MASK64), dtype=np.uint64)
    for j in range(rows.shape[1]):
        h = _splitmix_array(h ^ rows[:, j].astype(np.uint64))
    return h


class ColoringOracle:
    """Point-query access to a coloring of the k-subsets of ``[n]``.

    Subclasses implement ``_color``; ``_colors`` defaults to a loop. All
    queries are validated: a malformed vertex raises ``ValueError``.
    """

    def __init__(self, n: int, k: int, palette_size: int):
        if k < 1 or n < 2 * k:
            raise ValueError(f"need n >= 2k >= 2, got n={n}, k={k}")
        self.n = n
        self.k = k
        self.palette_size = palette_size

    def color(self, A: Sequence[int]) -> int:
        A = tuple(int(e) for e in A)
        check_ksubset(A, self.n, self.k)
        return self._color(A)

    def colors(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[1] != self.k:
            raise ValueError(f"expected an (m, {self.k}) array of vertices")
        if len(rows):
            if rows.min() < 1 or rows.max() > self.n or np.any(np.diff(rows, axis=1) <= 0):
                raise ValueError(f"rows are not sorted {self.k}-subsets of [1, {self.n}]")
        return self._colors(rows)

    def _color(self, A: KSubset) -> int:
        raise NotImplementedError

    def _colors(self, rows: np.ndarray) -> np.ndarray:
        return np.fromiter((self._color(tuple(int(e) for e in r)) for r in rows),
                           dtype=np.int64, count=len(rows))


class CanonicalColoring(ColoringOracle):
    """Color ``min(A)`` when ``min(A) <= n-2k+1``, else the extra color ``n-2k+2``.

    A proper coloring with ``n-2k+2`` colors, so not a problem instance.
    """

    def __init__(self, n: int, k: int):
        super().__init__(n, k, n - 2 * k + 2)
        self.cut = n - 2 * k + 1

    def _color(self, A):
        return A[0] if A[0] <= self.cut else self.cut + 1

    def _colors(self, rows):
        first = rows[:, 0]
        return np.where(first <= self.cut, first, self.cut + 1)


class HardColoring(ColoringOracle):
    """The canonical coloring with its last class (k-subsets of the final
    ``2k-1`` elements) recolored by a seed-keyed hash into ``[n-2k+1]``."""

    def __init__(self, n: int, k: int, seed: int):
        super().__init__(n, k, n - 2 * k + 1)
        self.cut = n - 2 * k + 1
        self.seed = seed

    def _recolor(self, A) -> int:
        return 1 + vertex_hash(A, self.seed, _HARD_TAG) % self.cut

    def _color(self, A):
        return A[0] if A[0] <= self.cut else self._recolor(A)

    def _colors(self, rows):
        out = rows[:, 0].copy()
        tail = out > self.cut
        if tail.any():
            h = vertex_hash_rows(rows[tail], self.seed, _HARD_TAG)
            out[tail] = 1 + (h % np.uint64(self.cut)).astype(np.int64)
        return out

    def recolored_vertices(self) -> list[KSubset]:
        return list(combinations(range(self.cut + 1, self.n + 1), self.k))


class RandomColoring(ColoringOracle):
    """Each vertex gets a hash-uniform color in ``[n-2k+1]``; stateless."""

    def __init__(self, n: int, k: int, seed: int):
        super().__init__(n, k, n - 2 * k + 1)
        self.seed = seed

    def _color(self, A):
        return 1 + vertex_hash(A, self.seed, _RANDOM_TAG) % self.palette_size

    def _colors(self, rows):
        h = vertex_hash_rows(rows, self.seed, _RANDOM_TAG)
        return 1 + (h % np.uint64(self.palette_size)).astype(np.int64)


class ConstantColoring(ColoringOracle):
    def __init__(self, n: int, k: int, value: int = 1):
        super().__init__(n, k, n - 2 * k + 1)
        self.value = value

    def _color(self, A):
        return self.value

    def _colors(self, rows):
        return np.full(len(rows), self.value, dtype=np.int64)


class FunctionColoring(ColoringOracle):
    """Wraps a plain function ``f(A: tuple) -> int``."""

    def __init__(self, n: int, k: int, palette_size: int, func: Callable[[KSubset], int]):
        super().__init__(n, k, palette_size)
        self.func = func

    def _color(self, A):
        return int(self.func(A))


@dataclass
class QueryTranscript:
    point_queries: int = 0
    subset_queries: int = 0
    samples_drawn: int = 0

    def serialize(self) -> str:
        return (f"point_queries={self.point_queries} subset_queries={self.subset_queries} "
                f"samples_drawn={self.samples_drawn}")


class CountingOracle(ColoringOracle):
    """Counts point queries made through it; safe under concurrent use."""

    def __init__(self, inner: ColoringOracle, transcript: QueryTranscript | None = None):
        super().__init__(inner.n, inner.k, inner.palette_size)
        self.inner = inner
        self.transcript = transcript if transcript is not None else QueryTranscript()
        self._lock = threading.Lock()

    def _bump(self, count: int) -> None:
        with self._lock:
            self.transcript.point_queries += count

    def _color(self, A):
        self._bump(1)
        return self.inner._color(A)

    def _colors(self, rows):
        self._bump(len(rows))
        return self.inner._colors(rows)


# -- subset queries ---------------------------------------------------------

class SubsetColorOracle:
    """Answers whether a set ``B`` contains a k-subset of color ``i``."""

    n: int
    k: int
    palette_size: int

    def contains_color(self, i: int, B: Iterable[int]) -> bool:
        B = sorted(set(int(e) for e in B))
        if B and (B[0] < 1 or B[-1] > self.n):
            raise ValueError(f"set {B} is not a subset of [1, {self.n}]")
        if not 1 <= i <= self.palette_size:
            raise ValueError(f"color {i} outside palette [1, {self.palette_size}]")
        if len(B) < self.k:
            return False
        return self._contains(i, B)

    def _contains(self, i: int, B: list[int]) -> bool:
        raise NotImplementedError


class EnumeratingSubsetOracle(SubsetColorOracle):
    """Subset queries answered by enumerating the k-subsets of ``B``."""

    def __init__(self, point: ColoringOracle, budget: int = DEFAULT_SUBSET_BUDGET):
        self.point = point
        self.n, self.k, self.palette_size = point.n, point.k, point.palette_size
        self.budget = budget

    def _contains(self, i, B):
        if binomial(len(B), self.k) > self.budget:
            raise BudgetExceeded(
                f"subset query enumerates {binomial(len(B), self.k)} > {self.budget} vertices",
                query=(i, tuple(B)),
            )
        return any(self.point.color(A) == i for A in combinations(B, self.k))


class CanonicalSubsetOracle(SubsetColorOracle):
    """Closed-form subset queries for canonical and hard colorings."""

    def __init__(self, point: CanonicalColoring | HardColoring):
        self.point = point
        self.n, self.k = point.n, point.k
        self.palette_size = point.palette_size
        self.cut = point.cut
        self._recolored: dict[int, list[int]] = {}
        if isinstance(point, HardColoring):
            for A in point.recolored_vertices():
                self._recolored.setdefault(point.color(A), []).append(mask(A))

    def _contains(self, i, B):
        bset = set(B)
        if i <= self.cut and i in bset and sum(1 for e in B if e > i) >= self.k - 1:
            return True
        if i == self.cut + 1:
            # extra color of the canonical coloring
            return sum(1 for e in B if e > self.cut) >= self.k
        bmask = mask(B)
        return any(a & bmask == a for a in self._recolored.get(i, ()))


def subset_oracle_from_point_oracle(instance: "KneserInstance | ColoringOracle",
                                    budget: int = DEFAULT_SUBSET_BUDGET) -> EnumeratingSubsetOracle:
    oracle = instance.oracle if isinstance(instance, KneserInstance) else instance
    return EnumeratingSubsetOracle(oracle, budget)


# -- instances and descriptors ----------------------------------------------

@dataclass
class KneserInstance:
    n: int
    k: int
    palette_size: int
    oracle: ColoringOracle
    description: str = ""

    def color(self, A: Sequence[int]) -> int:
        return self.oracle.color(A)

    def contains_color(self, i: int, B: Iterable[int]) -> bool:
        return self.subset_oracle().contains_color(i, B)

    def subset_oracle(self) -> SubsetColorOracle:
        if isinstance(self.oracle, (CanonicalColoring, HardColoring)):
            return CanonicalSubsetOracle(self.oracle)
        return EnumeratingSubsetOracle(self.oracle)


def make_canonical_coloring(n: int, k: int) -> KneserInstance:
    oracle = CanonicalColoring(n, k)
    return KneserInstance(n, k, oracle.palette_size, oracle, "canonical")


def make_hard_instance(n: int, k: int, seed: int) -> KneserInstance:
    oracle = HardColoring(n, k, seed)
    return KneserInstance(n, k, oracle.palette_size, oracle, f"hard seed={seed}")


def make_random_coloring(n: int, k: int, seed: int) -> KneserInstance:
    oracle = RandomColoring(n, k, seed)
    return KneserInstance(n, k, oracle.palette_size, oracle, f"random seed={seed}")


def make_constant_coloring(n: int, k: int, value: int = 1) -> KneserInstance:
    oracle = ConstantColoring(n, k, value)
    return KneserInstance(n, k, oracle.palette_size, oracle, f"constant {value}")


def verify_edge(instance: KneserInstance | ColoringOracle, A: Sequence[int], B: Sequence[int]) -> bool:
    """True iff ``A`` and ``B`` are disjoint vertices of equal color.

    Exactly two point queries when both are valid vertices.
    """
    oracle = instance.oracle if isinstance(instance, KneserInstance) else instance
    try:
        check_ksubset(tuple(A), oracle.n, oracle.k)
        check_ksubset(tuple(B), oracle.n, oracle.k)
    except ValueError:
        return False
    if mask(A) & mask(B):
        return False
    return oracle.color(A) == oracle.color(B)


COLORINGS = ("canonical", "hard", "random")


@dataclass(frozen=True)
class KneserDescriptor:
    n: int
    k: int
    coloring: str
    seed: int = 0

    def __post_init__(self):
        if self.coloring not in COLORINGS:
            raise ValueError(f"unknown coloring {self.coloring!r}")
        if self.k < 1 or self.n < 2 * self.k:
            raise ValueError(f"need n >= 2k >= 2, got n={self.n}, k={self.k}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def to_text(self) -> str:
        return f"kneser n={self.n} k={self.k}\ncoloring={self.coloring} seed={self.seed}\n"

    def build(self) -> KneserInstance:
        if self.coloring == "canonical":
            inst = make_canonical_coloring(self.n, self.k)
        elif self.coloring == "hard":
            inst = make_hard_instance(self.n, self.k, self.seed)
        else:
            inst = make_random_coloring(self.n, self.k, self.seed)
        inst.description = f"{self.coloring} seed={self.seed}"
        return inst


def parse_fields(line: str, expected: Sequence[str], head: str | None = None) -> dict[str, str]:
    """Parse ``key=value`` tokens; every expected key exactly once, nothing else."""
    tokens = line.split()
    if head is not None:
        if not tokens or tokens[0] != head:
            raise ValueError(f"expected line starting with {head!r}, got {line!r}")
        tokens = tokens[1:]
    out: dict[str, str] = {}
    for tok in tokens:
        key, eq, value = tok.partition("=")
        if not eq or not value:
            raise ValueError(f"malformed token {tok!r}")
        if key not in expected:
            raise ValueError(f"unknown key {key!r}")
        if key in out:
            raise ValueError(f"duplicate key {key!r}")
        out[key] = value
    missing = [k for k in expected if k not in out]
    if missing:
        raise ValueError(f"missing keys {missing}")
    return out


def parse_int(value: str, name: str) -> int:
    if not value.isdigit():
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def parse_kneser_descriptor(text: str) -> KneserDescriptor:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != 2:
        raise ValueError("a kneser descriptor has exactly two lines")
    head = parse_fields(lines[0], ("n", "k"), head="kneser")
    body = parse_fields(lines[1], ("coloring", "seed"))
    return KneserDescriptor(
        n=parse_int(head["n"], "n"),
        k=parse_int(head["k"], "k"),
        coloring=body["coloring"],
        seed=parse_int(body["seed"], "seed"),
    )
