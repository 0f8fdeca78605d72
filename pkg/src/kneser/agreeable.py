"""Agreeable sets and their two-way connection with the Kneser problem.

A set ``S`` of items is agreeable to agent ``i`` when ``u_i(S) >= u_i(M \\ S)``.
Every instance with ``l`` monotone agents over ``m`` items has a set of size
at most ``min(floor((m + l) / 2), m)`` agreeable to all of them.

All utility values are ``Fraction``s; comparisons are exact.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .combinatorics import KSubset, check_ksubset, mask
from .oracles import (
    ColoringOracle,
    KneserDescriptor,
    KneserError,
    KneserInstance,
    OracleInconsistency,
    SubsetColorOracle,
    parse_fields,
    parse_int,
)
from .solvers import SOLUTION, SolverParams, SolverResult, solve


class UtilityProfile:
    """``l`` set functions over items ``1..m``, accessed one value at a time."""

    def __init__(self, m: int, ell: int, description: str = ""):
        if m < 1 or ell < 1:
            raise ValueError("need at least one item and one agent")
        self.m = m
        self.ell = ell
        self.description = description
        self.queries = 0
        self._lock = threading.Lock()

    @property
    def items(self) -> frozenset[int]:
        return frozenset(range(1, self.m + 1))

    def value(self, i: int, S: Iterable[int]) -> Fraction:
        if not 1 <= i <= self.ell:
            raise ValueError(f"agent {i} outside [1, {self.ell}]")
        S = frozenset(S)
        if S and (min(S) < 1 or max(S) > self.m):
            raise ValueError(f"items {sorted(S)} outside [1, {self.m}]")
        with self._lock:
            self.queries += 1
        v = Fraction(self._value(i, S))
        if v < 0:
            raise ValueError(f"negative utility {v} for agent {i}")
        return v

    def _value(self, i: int, S: frozenset[int]) -> Fraction:
        raise NotImplementedError

    def complement(self, S: Iterable[int]) -> frozenset[int]:
        return self.items - frozenset(S)

    def margin(self, i: int, S: Iterable[int]) -> Fraction:
        S = frozenset(S)
        return self.value(i, S) - self.value(i, self.complement(S))

    def is_agreeable(self, S: Iterable[int]) -> bool:
        S = frozenset(S)
        return all(self.margin(i, S) >= 0 for i in range(1, self.ell + 1))


class AdditiveProfile(UtilityProfile):
    def __init__(self, weights: Sequence[Sequence], description: str = "additive"):
        rows = [[Fraction(w) for w in row] for row in weights]
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("weights must be a non-empty rectangular matrix")
        if any(w < 0 for row in rows for w in row):
            raise ValueError("weights must be non-negative")
        super().__init__(len(rows[0]), len(rows), description)
        self.weights = rows

    def _value(self, i, S):
        row = self.weights[i - 1]
        return sum((row[e - 1] for e in S), Fraction(0))


class FunctionProfile(UtilityProfile):
    """Utilities from a plain function ``f(i, S) -> rational``; monotonicity
    is the caller's promise and is not checked."""

    def __init__(self, m: int, ell: int, func: Callable[[int, frozenset], object], description: str = "function"):
        super().__init__(m, ell, description)
        self.func = func

    def _value(self, i, S):
        return self.func(i, S)


class KneserDerivedProfile(UtilityProfile):
    """``u_i(S) = 1`` iff ``S`` contains a k-subset of color ``i``.

    One subset query per utility query; monotone whenever the subset
    oracle is consistent.
    """

    def __init__(self, subset_oracle: SubsetColorOracle, description: str = "kneser-derived"):
        n, k = subset_oracle.n, subset_oracle.k
        super().__init__(n, n - 2 * k + 1, description)
        self.subset_oracle = subset_oracle
        self.k = k

    def _value(self, i, S):
        return Fraction(int(self.subset_oracle.contains_color(i, S)))


def make_additive_profile(m: int, ell: int, weights: Sequence[Sequence]) -> AdditiveProfile:
    profile = AdditiveProfile(weights)
    if (profile.m, profile.ell) != (m, ell):
        raise ValueError(f"weights are {profile.ell}x{profile.m}, expected {ell}x{m}")
    return profile


def random_additive_profile(m: int, ell: int, rng: np.random.Generator, denominator: int = 12) -> AdditiveProfile:
    """Random rational weights ``p/q`` with ``0 <= p <= 3q``."""
    nums = rng.integers(0, 3 * denominator + 1, size=(ell, m))
    dens = rng.integers(1, denominator + 1, size=(ell, m))
    weights = [[Fraction(int(p), int(q)) for p, q in zip(pr, qr)] for pr, qr in zip(nums, dens)]
    return AdditiveProfile(weights, description="additive random")


@dataclass
class AgreeableSolution:
    S: frozenset[int]
    bound: int
    margins: dict[int, Fraction] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.S)


@dataclass(frozen=True)
class ViolationCertificate:
    """Agent ``agent`` values ``S`` above its strict superset ``T``."""

    agent: int
    S: frozenset[int]
    T: frozenset[int]
    value_S: Fraction
    value_T: Fraction


class MonotonicityViolation(KneserError):
    def __init__(self, certificate: ViolationCertificate):
        super().__init__(
            f"agent {certificate.agent} values {sorted(certificate.S)} at {certificate.value_S} "
            f"> {certificate.value_T} for superset {sorted(certificate.T)}"
        )
        self.certificate = certificate


class SolverFailure(KneserError):
    def __init__(self, result: SolverResult):
        super().__init__(f"Kneser solver returned {result.kind}")
        self.result = result


def size_bound(m: int, ell: int) -> int:
    return min((m + ell) // 2, m)


def reduction_k(m: int, ell: int) -> int:
    return (m - ell + 1) // 2


class ReductionColoring(ColoringOracle):
    """``c(A)``: the first agent strictly preferring ``A`` to its complement,
    or ``l`` when none does. At most ``2l`` utility queries per color."""

    def __init__(self, profile: UtilityProfile):
        m, ell = profile.m, profile.ell
        k = reduction_k(m, ell)
        super().__init__(m, k, m - 2 * k + 1)
        self.profile = profile
        self.ell = ell

    def _color(self, A):
        S = frozenset(A)
        rest = self.profile.complement(S)
        for i in range(1, self.ell + 1):
            if self.profile.value(i, S) > self.profile.value(i, rest):
                return i
        return self.ell


def reduce_to_kneser(profile: UtilityProfile) -> KneserInstance:
    if profile.ell >= profile.m:
        raise ValueError("l >= m: the full item set is already a solution")
    oracle = ReductionColoring(profile)
    assert profile.ell <= oracle.palette_size
    return KneserInstance(oracle.n, oracle.k, oracle.palette_size, oracle,
                          f"agreeable reduction of {profile.description}")


def _solution(profile: UtilityProfile, S: frozenset[int]) -> AgreeableSolution:
    margins = {i: profile.margin(i, S) for i in range(1, profile.ell + 1)}
    return AgreeableSolution(S, size_bound(profile.m, profile.ell), margins)


def map_kneser_solution(profile: UtilityProfile, A: Sequence[int], B: Sequence[int]) -> AgreeableSolution:
    """Turn a monochromatic edge of the reduction coloring into an agreeable set.

    One of ``M \\ A`` and ``M \\ B`` is agreeable to every monotone agent. If
    neither is, the failed monotonicity step is returned as a certificate
    inside ``MonotonicityViolation``.
    """
    A, B = frozenset(A), frozenset(B)
    if A & B:
        raise ValueError("A and B must be disjoint")
    bound = size_bound(profile.m, profile.ell)
    for S in (profile.complement(A), profile.complement(B)):
        margins = {i: profile.margin(i, S) for i in range(1, profile.ell + 1)}
        if all(v >= 0 for v in margins.values()):
            return AgreeableSolution(S, bound, margins)

    # both complements rejected: find the agent i where the inequality chain breaks
    MA, MB = profile.complement(A), profile.complement(B)
    for i in range(1, profile.ell + 1):
        uA, uMA = profile.value(i, A), profile.value(i, MA)
        uB, uMB = profile.value(i, B), profile.value(i, MB)
        if uA > uMA and uB > uMB:
            if uB > uMA and B < MA:
                raise MonotonicityViolation(ViolationCertificate(i, B, MA, uB, uMA))
            if uA > uMB and A < MB:
                raise MonotonicityViolation(ViolationCertificate(i, A, MB, uA, uMB))
    raise OracleInconsistency("neither complement is agreeable and no monotonicity violation was found")


def solve_agreeable(profile: UtilityProfile, strategy: str = "fpt", seed: int = 0,
                    params: SolverParams = SolverParams()) -> AgreeableSolution:
    if profile.ell >= profile.m:
        return _solution(profile, profile.items)
    instance = reduce_to_kneser(profile)
    result = solve(instance, strategy, seed, params)
    if result.kind != SOLUTION:
        raise SolverFailure(result)
    return map_kneser_solution(profile, result.A, result.B)


def search_agreeable_exhaustive(profile: UtilityProfile) -> AgreeableSolution:
    """Smallest agreeable set within the size bound; lexicographic within a size."""
    bound = size_bound(profile.m, profile.ell)
    items = sorted(profile.items)
    for size in range(bound + 1):
        for S in combinations(items, size):
            if profile.is_agreeable(S):
                return _solution(profile, frozenset(S))
    raise OracleInconsistency("no agreeable set within the size bound; utilities are not monotone")


# -- the reverse direction --------------------------------------------------

def reduce_kneser_to_agreeable(instance: KneserInstance, subset_oracle: SubsetColorOracle | None = None) -> KneserDerivedProfile:
    oracle = subset_oracle if subset_oracle is not None else instance.subset_oracle()
    return KneserDerivedProfile(oracle, description=f"kneser-derived {instance.description}")


@dataclass(frozen=True)
class PeelResult:
    A: KSubset
    B: KSubset
    color: int
    removals: int
    subset_queries: int


def map_agreeable_solution_back(instance: KneserInstance, S: Iterable[int],
                                subset_oracle: SubsetColorOracle | None = None) -> PeelResult:
    """Recover a monochromatic edge from an agreeable set of the derived profile.

    ``A`` is the first k-subset of the complement; ``S`` is then shrunk one
    element at a time, always dropping the smallest element whose removal
    keeps a vertex of color ``c(A)`` inside, until ``k`` elements remain.
    """
    oracle = subset_oracle if subset_oracle is not None else instance.subset_oracle()
    n, k = instance.n, instance.k
    current = sorted(set(int(e) for e in S))
    if len(current) > n - k:
        raise ValueError(f"|S| = {len(current)} exceeds n - k = {n - k}")
    rest = [e for e in range(1, n + 1) if e not in set(current)]
    A = tuple(rest[:k])
    i = instance.color(A)
    queries = 1
    if not oracle.contains_color(i, current):
        raise ValueError(f"S holds no vertex of color {i}: it is not agreeable to agent {i}")
    removals = 0
    while len(current) > k:
        for e in current:
            trial = [x for x in current if x != e]
            queries += 1
            if oracle.contains_color(i, trial):
                current = trial
                removals += 1
                break
        else:
            raise OracleInconsistency(
                f"{current} contains color {i} but no element can be dropped"
            )
    B = tuple(current)
    check_ksubset(B, n, k)
    if instance.color(B) != i or mask(A) & mask(B):
        raise OracleInconsistency("peeled set does not match the subset oracle")
    return PeelResult(A, B, i, removals, queries)


# -- descriptor files -------------------------------------------------------

def parse_rational(text: str) -> Fraction:
    num, slash, den = text.partition("/")
    if not num.isdigit() or (slash and not den.isdigit()):
        raise ValueError(f"bad rational literal {text!r}")
    if slash:
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(num))


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_weights(text: str) -> list[list[Fraction]]:
    rows = [[parse_rational(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("weights must be a non-empty rectangular matrix")
    return rows


def format_weights(weights: Sequence[Sequence[Fraction]]) -> str:
    return "".join(" ".join(format_rational(Fraction(w)) for w in row) + "\n" for row in weights)


@dataclass(frozen=True)
class AgreeableDescriptor:
    m: int
    ell: int
    utilities: str
    weights: str | None = None
    kneser: KneserDescriptor | None = None

    def __post_init__(self):
        if self.utilities == "additive":
            if self.weights is None or self.kneser is not None:
                raise ValueError("additive utilities take a weights path only")
        elif self.utilities == "kneser-derived":
            if self.kneser is None or self.weights is not None:
                raise ValueError("kneser-derived utilities take n, k, coloring and seed")
            kd = self.kneser
            if (self.m, self.ell) != (kd.n, kd.n - 2 * kd.k + 1):
                raise ValueError(f"kneser-derived profile needs m = n and l = n - 2k + 1")
            if kd.coloring == "canonical":
                raise ValueError("the canonical coloring is not a problem instance")
        else:
            raise ValueError(f"unknown utilities {self.utilities!r}")

    def to_text(self) -> str:
        head = f"agreeable m={self.m} l={self.ell}\n"
        if self.utilities == "additive":
            return head + f"utilities=additive weights={self.weights}\n"
        kd = self.kneser
        return head + f"utilities=kneser-derived n={kd.n} k={kd.k} coloring={kd.coloring} seed={kd.seed}\n"

    def build(self, base: Path | None = None) -> UtilityProfile:
        if self.utilities == "additive":
            path = Path(self.weights)
            if base is not None and not path.is_absolute():
                path = base / path
            return make_additive_profile(self.m, self.ell, parse_weights(path.read_text()))
        return reduce_kneser_to_agreeable(self.kneser.build())


def parse_agreeable_descriptor(text: str) -> AgreeableDescriptor:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != 2:
        raise ValueError("an agreeable descriptor has exactly two lines")
    head = parse_fields(lines[0], ("m", "l"), head="agreeable")
    kind = lines[1].split()[0] if lines[1].split() else ""
    m, ell = parse_int(head["m"], "m"), parse_int(head["l"], "l")
    if kind == "utilities=additive":
        body = parse_fields(lines[1], ("utilities", "weights"))
        return AgreeableDescriptor(m, ell, "additive", weights=body["weights"])
    if kind == "utilities=kneser-derived":
        body = parse_fields(lines[1], ("utilities", "n", "k", "coloring", "seed"))
        kd = KneserDescriptor(parse_int(body["n"], "n"), parse_int(body["k"], "k"),
                              body["coloring"], parse_int(body["seed"], "seed"))
        return AgreeableDescriptor(m, ell, "kneser-derived", kneser=kd)
    raise ValueError(f"unknown utilities line {lines[1]!r}")
