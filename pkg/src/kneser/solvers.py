"""Solvers for the Kneser problem: find a monochromatic edge of ``K(n, k)``
colored with ``n - 2k + 1`` colors.

``solve_fpt`` is the randomized fixed-parameter algorithm, ``solve_schrijver``
the deterministic search over stable sets, ``solve_bruteforce`` the full
enumeration used as a reference.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .combinatorics import KSubset, binomial, enumerate_stable_ksubsets, ksubset_array, sample_uniform_ksubsets
from .elimination import (
    DEFAULT_ENUMERATION_BUDGET,
    Edge,
    EliminationParams,
    OffPalette,
    PopularPair,
    _first_pair_in_class,
    eliminate,
    first_monochromatic_pair,
)
from .oracles import BudgetExceeded, CountingOracle, KneserInstance, QueryTranscript, verify_edge

SOLUTION = "solution"
FAILURE = "failure"
VIOLATION = "violation"


@dataclass
class HistoryRecord:
    round: int
    color: int
    element: int
    ground: tuple[int, ...]


@dataclass
class GroundState:
    """Surviving elements and colors plus the elimination history."""

    n: int
    k: int
    X: list[int]
    C: list[int]
    history: list[HistoryRecord] = field(default_factory=list)

    @classmethod
    def initial(cls, n: int, k: int) -> "GroundState":
        return cls(n, k, list(range(1, n + 1)), list(range(1, n - 2 * k + 2)))

    def eliminate(self, color: int, element: int) -> None:
        if color not in self.C or element not in self.X:
            raise ValueError(f"cannot remove color {color} / element {element}")
        self.history.append(HistoryRecord(len(self.history), color, element, tuple(self.X)))
        self.X.remove(element)
        self.C.remove(color)
        assert len(self.C) == len(self.X) - 2 * self.k + 1

    def record_for(self, color: int) -> HistoryRecord | None:
        for rec in self.history:
            if rec.color == color:
                return rec
        return None


@dataclass(frozen=True)
class SolverParams:
    n_stop_override: int | None = None
    elimination: EliminationParams = EliminationParams()
    retry_count: int = 0
    backref_sample_count: int | None = None  # default n^2

    def n_stop(self, k: int) -> int:
        return self.n_stop_override if self.n_stop_override is not None else 8 * k**4

    def backref_samples(self, n: int) -> int:
        return self.backref_sample_count if self.backref_sample_count is not None else n * n


@dataclass
class SolverResult:
    kind: str
    A: KSubset = ()
    B: KSubset = ()
    seed: int = 0
    iterations_used: int = 0
    point_queries: int = 0
    phase2_vertices_enumerated: int = 0
    elapsed: float = 0.0
    heuristic: bool = False
    transcript: QueryTranscript = field(default_factory=QueryTranscript)

    @property
    def solved(self) -> bool:
        return self.kind == SOLUTION

    def serialize(self) -> str:
        return (
            f"result={self.kind} A={','.join(map(str, self.A))} B={','.join(map(str, self.B))} "
            f"seed={self.seed} queries={self.point_queries} iterations={self.iterations_used}"
        )


def parse_result(line: str) -> SolverResult:
    fields = dict(tok.split("=", 1) for tok in line.split())
    if set(fields) != {"result", "A", "B", "seed", "queries", "iterations"}:
        raise ValueError(f"malformed result line {line!r}")

    def subset(text: str) -> KSubset:
        return tuple(int(e) for e in text.split(",")) if text else ()

    return SolverResult(
        kind=fields["result"],
        A=subset(fields["A"]),
        B=subset(fields["B"]),
        seed=int(fields["seed"]),
        point_queries=int(fields["queries"]),
        iterations_used=int(fields["iterations"]),
    )


def _rng(seed: int, attempt: int = 0) -> np.random.Generator:
    if attempt == 0:
        return np.random.default_rng(seed)
    return np.random.default_rng([seed, attempt])


# Returned edges are re-verified against the raw oracle; those two queries
# are not part of the solver's transcript.
def _finish(result: SolverResult, counting: CountingOracle, started: float) -> SolverResult:
    result.point_queries = counting.transcript.point_queries
    result.transcript = counting.transcript
    result.elapsed = time.perf_counter() - started
    return result


def _back_reference(
    instance_oracle: CountingOracle,
    state: GroundState,
    A: KSubset,
    color: int,
    rng: np.random.Generator,
    samples: int,
    result: SolverResult,
) -> SolverResult:
    """Search ``C(X_r, k)`` for a partner of ``A`` colored ``color``, where
    round ``r`` removed ``color``."""
    rec = state.record_for(color)
    if rec is None:
        result.kind, result.A = VIOLATION, A
        return result
    assert rec.element not in A, "a removed element reappeared in a surviving vertex"
    rows = sample_uniform_ksubsets(rec.ground, state.k, rng, samples)
    instance_oracle.transcript.samples_drawn += samples
    # queries are issued one at a time, stopping at the first partner
    amask = 0
    for e in A:
        amask |= 1 << e
    for row in rows.tolist():
        B = tuple(row)
        bmask = 0
        for e in B:
            bmask |= 1 << e
        if instance_oracle.color(B) == color and not amask & bmask:
            if not verify_edge(instance_oracle.inner, A, B):
                raise AssertionError("back-reference edge failed verification")
            result.kind, result.A, result.B = SOLUTION, A, B
            return result
    result.kind = FAILURE
    return result


def _solve_fpt_once(instance: KneserInstance, seed: int, attempt: int, params: SolverParams) -> SolverResult:
    started = time.perf_counter()
    n, k = instance.n, instance.k
    counting = CountingOracle(instance.oracle)
    rng = _rng(seed, attempt)
    state = GroundState.initial(n, k)
    n_stop = params.n_stop(k)
    if n_stop < 2 * k:
        raise ValueError(f"n_stop must be at least 2k = {2 * k}")
    elim = params.elimination
    if n_stop < 8 * k**4 and not elim.relax_size_threshold:
        elim = replace(elim, relax_size_threshold=True)
    result = SolverResult(FAILURE, seed=seed, heuristic=elim.heuristic)
    backref = params.backref_samples(n)

    s = max(n - n_stop, 0)
    for _ in range(s):
        outcome, stats = eliminate(n, k, state.X, state.C, counting, rng, elim)
        counting.transcript.samples_drawn += 0 if stats.exhaustive else stats.samples
        result.iterations_used += 1
        if isinstance(outcome, Edge):
            result.kind, result.A, result.B = SOLUTION, outcome.A, outcome.B
            return _finish(result, counting, started)
        if isinstance(outcome, OffPalette):
            return _finish(
                _back_reference(counting, state, outcome.A, outcome.color, rng, backref, result),
                counting, started,
            )
        assert isinstance(outcome, PopularPair)
        state.eliminate(outcome.i_star, outcome.j_star)

    # second phase: every vertex on the surviving ground set
    total = binomial(len(state.X), k)
    if total > DEFAULT_ENUMERATION_BUDGET:
        raise BudgetExceeded(f"phase 2 would enumerate {total} vertices")
    rows = ksubset_array(state.X, k)
    colors = counting.colors(rows)
    result.phase2_vertices_enumerated = len(rows)
    palette = np.asarray(state.C, dtype=np.int64)
    off = np.flatnonzero(~np.isin(colors, palette))
    if len(off):
        A = tuple(int(e) for e in rows[off[0]])
        return _finish(
            _back_reference(counting, state, A, int(colors[off[0]]), rng, backref, result),
            counting, started,
        )
    pair = _phase2_pair(rows, colors)
    if pair is None:
        raise AssertionError("no monochromatic edge although all colors lie in C_s")
    A, B = (tuple(int(e) for e in rows[t]) for t in pair)
    if not verify_edge(instance.oracle, A, B):
        raise AssertionError("phase-2 edge failed verification")
    result.kind, result.A, result.B = SOLUTION, A, B
    return _finish(result, counting, started)


def _phase2_pair(rows: np.ndarray, colors: np.ndarray) -> tuple[int, int] | None:
    # color classes in increasing size, ties by color; first hit wins
    values, counts = np.unique(colors, return_counts=True)
    width = int(rows.max()) + 1
    for _, color in sorted(zip(counts.tolist(), values.tolist())):
        idx = np.flatnonzero(colors == color)
        found = _first_pair_in_class(rows[idx], width)
        if found is not None:
            return int(idx[found[0]]), int(idx[found[1]])
    return None


def solve_fpt(instance: KneserInstance, seed: int = 0, params: SolverParams = SolverParams()) -> SolverResult:
    """Randomized fixed-parameter search for a monochromatic edge.

    Phase 1 runs ``max(n - n_stop, 0)`` elimination rounds; phase 2
    enumerates the surviving ``C(X_s, k)``. A vertex carrying a color
    removed at round ``r`` is matched by sampling ``C(X_r, k)``. Failure is
    a returned value; ``retry_count`` reruns with derived seeds.
    """
    transcript = QueryTranscript()
    result = None
    for attempt in range(params.retry_count + 1):
        result = _solve_fpt_once(instance, seed, attempt, params)
        transcript.point_queries += result.transcript.point_queries
        transcript.samples_drawn += result.transcript.samples_drawn
        if result.kind != FAILURE:
            break
    result.seed = seed
    result.transcript = transcript
    result.point_queries = transcript.point_queries
    return result


def _solve_enumerated(instance: KneserInstance, rows: np.ndarray, seed: int) -> SolverResult:
    started = time.perf_counter()
    counting = CountingOracle(instance.oracle)
    colors = counting.colors(rows)
    result = SolverResult(FAILURE, seed=seed)
    pair = first_monochromatic_pair(rows, colors, pair_budget=10**18)
    if pair is not None:
        A, B = (tuple(int(e) for e in rows[t]) for t in pair)
        if not verify_edge(instance.oracle, A, B):
            raise AssertionError("edge failed verification")
        result.kind, result.A, result.B = SOLUTION, A, B
    return _finish(result, counting, started)


def solve_schrijver(instance: KneserInstance, seed: int = 0) -> SolverResult:
    """Query every stable k-subset and return the first monochromatic edge.

    Deterministic; the query count before verification equals the number
    of stable vertices.
    """
    stable = list(enumerate_stable_ksubsets(instance.n, instance.k))
    rows = np.asarray(stable, dtype=np.int64).reshape(len(stable), instance.k)
    return _solve_enumerated(instance, rows, seed)


def solve_bruteforce(
    instance: KneserInstance, seed: int = 0, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> SolverResult:
    total = binomial(instance.n, instance.k)
    if total > budget:
        raise BudgetExceeded(f"C({instance.n}, {instance.k}) = {total} exceeds budget {budget}")
    rows = ksubset_array(range(1, instance.n + 1), instance.k)
    return _solve_enumerated(instance, rows, seed)


STRATEGIES = {
    "fpt": solve_fpt,
    "schrijver": solve_schrijver,
    "brute": solve_bruteforce,
}


def solve(instance: KneserInstance, strategy: str, seed: int = 0,
          params: SolverParams = SolverParams()) -> SolverResult:
    if strategy == "fpt":
        return solve_fpt(instance, seed, params)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return STRATEGIES[strategy](instance, seed)


def enumerate_monochromatic_edges(instance: KneserInstance) -> list[tuple[KSubset, KSubset]]:
    """Every monochromatic edge, for desk-scale inspection."""
    rows = ksubset_array(range(1, instance.n + 1), instance.k)
    colors = instance.oracle.colors(rows)
    vertices = [tuple(r) for r in rows.tolist()]
    masks = [sum(1 << e for e in A) for A in vertices]
    out = []
    for a in range(len(vertices)):
        for b in range(a + 1, len(vertices)):
            if colors[a] == colors[b] and not masks[a] & masks[b]:
                out.append((vertices[a], vertices[b]))
    return out
