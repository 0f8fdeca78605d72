"""Seeded experiment runs over one instance descriptor."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .oracles import parse_kneser_descriptor, verify_edge
from .solvers import SOLUTION, SolverParams, SolverResult, solve

HEADER = "seed\tresult\tqueries\titerations\tphase2_vertices\tverified\telapsed\tA\tB"


@dataclass(frozen=True)
class ExperimentSpec:
    descriptor: str  # descriptor text, not a path
    strategy: str
    seeds: tuple[int, int]  # inclusive range
    params: SolverParams = SolverParams()
    jobs: int = 1

    def __post_init__(self):
        lo, hi = self.seeds
        if lo < 0 or hi < lo:
            raise ValueError(f"empty or negative seed range {lo}-{hi}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        parse_kneser_descriptor(self.descriptor)


@dataclass
class Row:
    seed: int
    result: SolverResult | None
    verified: bool
    error: str = ""

    def to_line(self) -> str:
        r = self.result
        if r is None:
            return f"{self.seed}\terror\t\t\t\t\t\t{self.error}\t"
        return "\t".join([
            str(self.seed), r.kind, str(r.point_queries), str(r.iterations_used),
            str(r.phase2_vertices_enumerated), str(int(self.verified)), f"{r.elapsed:.6f}",
            ",".join(map(str, r.A)), ",".join(map(str, r.B)),
        ])


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    rows: list[Row] = field(default_factory=list)

    @property
    def successes(self) -> int:
        return sum(1 for r in self.rows if r.result is not None and r.result.kind == SOLUTION and r.verified)

    @property
    def success_rate(self) -> Fraction:
        return Fraction(self.successes, len(self.rows))

    def aggregates(self) -> dict[str, str]:
        done = [r.result for r in self.rows if r.result is not None]
        queries = [r.point_queries for r in done] or [0]
        elapsed = sorted(r.elapsed for r in done) or [0.0]

        def pct(p: float) -> float:
            return elapsed[min(len(elapsed) - 1, int(p * len(elapsed)))]

        return {
            "seeds": str(len(self.rows)),
            "successes": str(self.successes),
            "success_rate": str(self.success_rate),
            "mean_queries": str(Fraction(sum(queries), len(queries))),
            "median_queries": str(statistics.median(Fraction(q) for q in queries)),
            "elapsed_p50": f"{pct(0.5):.6f}",
            "elapsed_p90": f"{pct(0.9):.6f}",
            "elapsed_max": f"{elapsed[-1]:.6f}",
        }

    def to_text(self) -> str:
        lines = [HEADER] + [r.to_line() for r in self.rows]
        lines += [f"# {k}={v}" for k, v in self.aggregates().items()]
        return "\n".join(lines) + "\n"


def _run_seed(descriptor: str, strategy: str, seed: int, params: SolverParams) -> Row:
    instance = parse_kneser_descriptor(descriptor).build()
    try:
        result = solve(instance, strategy, seed, params)
    except Exception as exc:  # recorded per row, the run continues
        return Row(seed, None, False, f"{type(exc).__name__}: {exc}")
    ok = result.kind == SOLUTION and verify_edge(instance, result.A, result.B)
    return Row(seed, result, ok)


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    lo, hi = spec.seeds
    seeds = range(lo, hi + 1)
    args = [(spec.descriptor, spec.strategy, s, spec.params) for s in seeds]
    if spec.jobs == 1:
        rows = [_run_seed(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_run_seed, *zip(*args)))
    return ExperimentReport(spec, rows)
