"""Acceptance checks, one function per criterion.

Each check returns a ``Check`` with a pass flag and a one-line detail; the
``acceptance`` CLI subcommand and ``tests/test_acceptance.py`` both run them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import agreeable as ag
from .combinatorics import (
    are_disjoint,
    binomial,
    common_elements,
    density_correction,
    disjointness_correction,
    enumerate_stable_ksubsets,
    hilton_milner_bound,
    hilton_milner_extremal_family,
    is_intersecting,
    lemma8_edge_density_bound,
    lemma10_disjoint_prob_bound,
    mask,
)
from .elimination import EliminationParams, PopularPair, eliminate, verify_popular_pair
from .oracles import make_hard_instance, make_random_coloring, verify_edge
from .solvers import SOLUTION, SolverParams, solve_bruteforce, solve_fpt, solve_schrijver

SAMPLING = SolverParams(elimination=EliminationParams(exhaustive_small_k=False))


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0

    def line(self, timed: bool = False) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.number:>2} {self.name}: {self.detail}"
        return text + f" ({self.elapsed:.1f}s)" if timed else text


def existence() -> tuple[bool, str]:
    failures = 0
    for n, k in [(5, 2), (6, 2), (7, 2), (8, 3)]:
        for seed in range(1000):
            inst = make_random_coloring(n, k, seed)
            res = solve_bruteforce(inst, seed)
            if not (res.kind == SOLUTION and verify_edge(inst, res.A, res.B)):
                failures += 1
    return failures == 0, f"{failures} failures over 4x1000 random colorings"


def schrijver() -> tuple[bool, str]:
    bad_counts = []
    for k in range(2, 6):
        for n in range(2 * k, 15):
            enumerated = sum(1 for _ in enumerate_stable_ksubsets(n, k))
            formula = binomial(n - k + 1, k) - binomial(n - k - 1, k - 2)
            if enumerated != formula:
                bad_counts.append((n, k))
    expected = binomial(8, 3) - binomial(6, 1)
    bad_runs = 0
    for seed in range(200):
        inst = make_random_coloring(10, 3, seed)
        res = solve_schrijver(inst)
        if not (res.kind == SOLUTION and verify_edge(inst, res.A, res.B)
                and res.point_queries == expected):
            bad_runs += 1
    return not bad_counts and bad_runs == 0, (
        f"count mismatches {bad_counts or 'none'}; {bad_runs}/200 bad runs at (10,3), "
        f"queries == {expected}"
    )


def fpt_end_to_end(seeds: int = 100) -> tuple[bool, str]:
    parts, ok = [], True
    for label, params in (("m=n^3 sampling", SAMPLING), ("exhaustive k<=2", SolverParams())):
        for n in (132, 140):
            wins = 0
            for seed in range(seeds):
                inst = make_hard_instance(n, 2, seed)
                res = solve_fpt(inst, seed, params)
                if res.kind == SOLUTION and verify_edge(inst, res.A, res.B):
                    wins += 1
            rate = Fraction(wins, seeds)
            ok &= rate >= Fraction(99, 100)
            parts.append(f"{label} n={n}: {wins}/{seeds}")
    return ok, "; ".join(parts)


def popular_pair_contract(wanted: int = 20, max_seeds: int = 400) -> tuple[bool, str]:
    # with m = n^3 the samples cover C(X, 2) and always expose an edge, so the
    # round is run with m = |X| to reach the popular-pair branch
    n, k = 128, 2
    X = list(range(1, n + 1))
    C = list(range(1, n - 2 * k + 2))
    params = EliminationParams(sample_count_override=n, exhaustive_small_k=False)
    threshold = Fraction(1, 16 * n)
    checked, worst = 0, None
    for seed in range(max_seeds):
        inst = make_hard_instance(n, k, seed)
        outcome, _ = eliminate(n, k, X, C, inst.oracle, np.random.default_rng(seed), params)
        if not isinstance(outcome, PopularPair):
            continue
        value = verify_popular_pair(n, k, X, inst.oracle, outcome.i_star, outcome.j_star)
        worst = value if worst is None else min(worst, value)
        checked += 1
        if value < threshold:
            return False, f"seed {seed}: probability {value} < 1/{16 * n}"
        if checked == wanted:
            break
    return checked == wanted, f"{checked} popular pairs, min probability {worst} >= 1/{16 * n}"


def _pair_probability(F) -> Fraction:
    masks = [mask(A) for A in F]
    hits = sum(1 for a in masks for b in masks if not a & b)
    return Fraction(hits, len(F) ** 2)


def _max_frequency(F, n) -> Fraction:
    counts = np.bincount([e for A in F for e in A], minlength=n + 1)
    return Fraction(int(counts.max()), len(F))


def edge_density_families(count: int = 100, seed: int = 8):
    """Random families over ``[n]``, ``n <= 12``, large enough for the bound;
    half are pulled toward a star to vary the maximum element frequency."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = 2 + len(out) % 2
        n = int(rng.integers(2 * k, 13))
        vertices = list(combinations(range(1, n + 1), k))
        lo = k * k * binomial(n - 2, k - 2)
        if lo > len(vertices):
            continue
        size = int(rng.integers(lo, len(vertices) + 1))
        if len(out) % 4 < 2:
            picks = rng.choice(len(vertices), size, replace=False)
        else:
            center = int(rng.integers(1, n + 1))
            weights = np.array([8.0 if center in A else 1.0 for A in vertices])
            picks = rng.choice(len(vertices), size, replace=False, p=weights / weights.sum())
        out.append((n, k, [vertices[i] for i in sorted(picks)]))
    return out


def edge_density() -> tuple[bool, str]:
    violations = 0
    for n, k, F in edge_density_families():
        report = lemma8_edge_density_bound(n, k, len(F), _max_frequency(F, n))
        # k = 2 families are checked with only the k >= 3 precondition relaxed
        assert report.preconditions_met or k == 2
        if _pair_probability(F) < report.value:
            violations += 1
    # with |F| >= C(n, k) / 2n the term k^2/|F| C(n-2, k-2) is at most the correction
    symbolic = all(
        density_correction(8 * k**4, k) <= Fraction(1, 4)
        and Fraction(k * k * binomial(8 * k**4 - 2, k - 2) * 2 * 8 * k**4, binomial(8 * k**4, k))
        == density_correction(8 * k**4, k)
        for k in range(3, 7)
    )
    return violations == 0 and symbolic, (
        f"{violations} violations over 100 families; correction <= 1/4 at n=8k^4, k=3..6: {symbolic}"
    )


def disjointness_families(count: int = 60, seed: int = 10):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        k = int(rng.integers(2, 4))
        x_size = int(rng.integers(2 * k, 15))
        n = x_size + int(rng.integers(0, 3))
        X = sorted(rng.choice(np.arange(1, n + 1), x_size, replace=False).tolist())
        j = X[int(rng.integers(0, x_size))]
        vertices = list(combinations(X, k))
        bias = float(rng.uniform(4.0, 20.0))
        weights = np.array([bias if j in A else 1.0 for A in vertices])
        size = int(rng.integers(len(vertices) // 4 + 1, len(vertices) + 1))
        picks = rng.choice(len(vertices), size, replace=False, p=weights / weights.sum())
        F = [vertices[i] for i in sorted(picks)]
        # j must be popular: in more than half of the family
        if 2 * sum(1 for A in F if j in A) > len(F):
            out.append((n, k, X, j, F))
    return out


def disjointness() -> tuple[bool, str]:
    violations, checked = 0, 0
    for n, k, X, j, F in disjointness_families():
        gamma = Fraction(sum(1 for A in F if j in A), len(F))
        bound = lemma10_disjoint_prob_bound(len(X), k, len(F), gamma).value
        masks = [mask(B) for B in F]
        for A in combinations([e for e in range(1, n + 1) if e != j], k):
            a = mask(A)
            checked += 1
            if Fraction(sum(1 for b in masks if not a & b), len(F)) < bound:
                violations += 1
    step = all(disjointness_correction(8 * k**3, k) <= Fraction(1, 4) for k in range(2, 7))
    return violations == 0 and step, (
        f"{violations} violations over {checked} (family, A) pairs; 2k^2(k-1)/(|X|-1) <= 1/4 "
        f"at |X|=8k^3, k=2..6: {step}"
    )


def max_nontrivial_intersecting(n: int, k: int) -> int:
    """Largest intersecting family of k-subsets of ``[n]`` without a common
    element, by branch and bound over cliques of the intersection graph."""
    vertices = [mask(A) for A in combinations(range(1, n + 1), k)]
    best = 0

    def common(family_mask_and: int) -> bool:
        return family_mask_and != 0

    def extend(chosen: list[int], inter: int, candidates: list[int]) -> None:
        nonlocal best
        if len(chosen) > best and not common(inter):
            best = len(chosen)
        if len(chosen) + len(candidates) <= best:
            return
        for pos, v in enumerate(candidates):
            if len(chosen) + len(candidates) - pos <= best:
                return
            rest = [w for w in candidates[pos + 1:] if w & v]
            extend(chosen + [v], inter & v, rest)

    extend([], (1 << (n + 1)) - 1, vertices)
    return best


def hilton_milner() -> tuple[bool, str]:
    bad = []
    for k in range(2, 5):
        for n in range(2 * k, 13):
            F = tuple(range(1, k + 1))
            fam = hilton_milner_extremal_family(n, k, F, k + 1)
            if not (len(fam) == hilton_milner_bound(n, k) and is_intersecting(fam)
                    and not common_elements(fam)):
                bad.append((n, k))
    maxima = {n: max_nontrivial_intersecting(n, 2) for n in (6, 7)}
    ok = not bad and all(v == 3 == hilton_milner_bound(n, 2) for n, v in maxima.items())
    return ok, f"construction failures {bad or 'none'}; exhaustive maxima {maxima}"


def agreeable_forward(seeds: int = 200) -> tuple[bool, str]:
    violations = 0
    strategies = ("brute", "schrijver", "fpt")
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 13))
        ell = int(rng.integers(1, m))
        profile = ag.random_additive_profile(m, ell, rng)
        sol = ag.solve_agreeable(profile, strategies[seed % 3], seed)
        k = ag.reduction_k(m, ell)
        if not _agreeable_ok(profile, sol, m - k):
            violations += 1
    spots = []
    for (m, ell, strategy) in ((10, 8, "fpt"), (12, 2, "schrijver")):
        for seed in range(5):
            profile = ag.random_additive_profile(m, ell, np.random.default_rng(1000 + seed))
            sol = ag.solve_agreeable(profile, strategy, seed)
            spots.append(_agreeable_ok(profile, sol, m - ag.reduction_k(m, ell)))
    return violations == 0 and all(spots), (
        f"{violations}/{seeds} violations; spot checks (10,8) fpt and (12,2) schrijver: "
        f"{sum(spots)}/{len(spots)} ok"
    )


def _agreeable_ok(profile, sol, expected_size) -> bool:
    S = sol.S
    rest = profile.complement(S)
    margins_ok = all(
        sum((profile.weights[i][e - 1] for e in S), Fraction(0))
        >= sum((profile.weights[i][e - 1] for e in rest), Fraction(0))
        for i in range(profile.ell)
    )
    return margins_ok and len(S) == expected_size <= (profile.m + profile.ell) // 2


def reverse_round_trip(chains: int = 10_000) -> tuple[bool, str]:
    failures, bad_peels, trips = 0, 0, 0
    for n in (6, 8, 10):
        for seed in range(10):
            inst = make_hard_instance(n, 2, seed)
            profile = ag.reduce_kneser_to_agreeable(inst)
            sol = ag.search_agreeable_exhaustive(profile)
            peel = ag.map_agreeable_solution_back(inst, sol.S)
            trips += 1
            if not verify_edge(inst, peel.A, peel.B):
                failures += 1
            if peel.removals != len(sol.S) - 2:
                bad_peels += 1
    rng = np.random.default_rng(99)
    non_monotone = 0
    for c in range(chains):
        n = (6, 8, 10)[c % 3]
        inst = make_hard_instance(n, 2, int(rng.integers(0, 10)))
        profile = ag.reduce_kneser_to_agreeable(inst)
        agent = int(rng.integers(1, profile.ell + 1))
        order = rng.permutation(np.arange(1, n + 1)).tolist()
        values = [profile.value(agent, order[:t]) for t in range(n + 1)]
        if any(a > b for a, b in zip(values, values[1:])):
            non_monotone += 1
    ok = failures == 0 and bad_peels == 0 and non_monotone == 0
    return ok, (f"{failures}/{trips} unverified round trips, {bad_peels} peels with != |S|-k removals, "
                f"{non_monotone}/{chains} non-monotone chains")


ROUNDS = SolverParams(elimination=EliminationParams(sample_count_override=140, exhaustive_small_k=False))

DETERMINISM_RUNS = {
    "fpt sampling": lambda: solve_fpt(make_hard_instance(132, 2, 5), 5, SAMPLING),
    "fpt default": lambda: solve_fpt(make_hard_instance(140, 2, 6), 6),
    # few samples per round: twelve elimination rounds, argmax ties matter
    "fpt rounds": lambda: solve_fpt(make_hard_instance(140, 2, 0), 0, ROUNDS),
    "fpt back-reference": lambda: solve_fpt(make_hard_instance(140, 2, 3), 3, ROUNDS),
    "fpt k=3 heuristic": lambda: solve_fpt(
        make_random_coloring(40, 3, 2), 2,
        SolverParams(n_stop_override=20, elimination=EliminationParams(sample_count_override=2000)),
    ),
    "schrijver": lambda: solve_schrijver(make_random_coloring(12, 3, 4)),
    "brute": lambda: solve_bruteforce(make_random_coloring(9, 3, 4)),
    "agreeable fpt": lambda: ag.solve_agreeable(
        ag.random_additive_profile(9, 3, np.random.default_rng(3)), "fpt", 3),
}

# Reference outputs recorded from the current implementation. A change in
# sampling, tie-breaking or scan order shows up here even when each version
# is self-consistent.
DETERMINISM_REFERENCE = {
    'fpt sampling': 'result=solution A=69,117 B=130,131 seed=5 queries=2299970 iterations=1 | point_queries=2299970 subset_queries=0 samples_drawn=2299968',
    'fpt default': 'result=solution A=2,3 B=139,140 seed=6 queries=9732 iterations=1 | point_queries=9732 subset_queries=0 samples_drawn=0',
    'fpt rounds': 'result=solution A=112,113 B=138,139 seed=0 queries=9808 iterations=12 | point_queries=9808 subset_queries=0 samples_drawn=1680',
    'fpt back-reference': 'result=solution A=138,139 B=13,43 seed=3 queries=9812 iterations=12 | point_queries=9812 subset_queries=0 samples_drawn=21280',
    'fpt k=3 heuristic': 'result=solution A=31,34,38 B=2,12,25 seed=2 queries=2002 iterations=1 | point_queries=2002 subset_queries=0 samples_drawn=2000',
    'schrijver': 'result=solution A=1,3,5 B=2,4,10 seed=0 queries=112 iterations=0 | point_queries=112 subset_queries=0 samples_drawn=0',
    'brute': 'result=solution A=1,2,3 B=4,5,6 seed=0 queries=84 iterations=0 | point_queries=84 subset_queries=0 samples_drawn=0',
    'agreeable fpt': 'S=4,5,6,7,8,9',
}


def fingerprint(result) -> str:
    if isinstance(result, ag.AgreeableSolution):
        return "S=" + ",".join(map(str, sorted(result.S)))
    return result.serialize() + " | " + result.transcript.serialize()


def determinism() -> tuple[bool, str]:
    unstable, drifted = [], []
    for name, fn in DETERMINISM_RUNS.items():
        first, second = fingerprint(fn()), fingerprint(fn())
        if first != second:
            unstable.append(name)
        elif DETERMINISM_REFERENCE.get(name, first) != first:
            drifted.append(name)
    return not unstable and not drifted, (
        f"{len(DETERMINISM_RUNS)} runs; non-deterministic: {unstable or 'none'}; "
        f"differ from reference: {drifted or 'none'}"
    )


CRITERIA = [
    (1, "existence guarantee", existence),
    (2, "schrijver solver", schrijver),
    (3, "fpt end-to-end", fpt_end_to_end),
    (4, "popular-pair contract", popular_pair_contract),
    (5, "edge-density bound", edge_density),
    (6, "disjointness bound", disjointness),
    (7, "hilton-milner", hilton_milner),
    (8, "agreeable forward", agreeable_forward),
    (9, "reverse round trip", reverse_round_trip),
    (10, "determinism", determinism),
]


def run_check(number: int) -> Check:
    for num, name, fn in CRITERIA:
        if num == number:
            started = time.perf_counter()
            passed, detail = fn()
            return Check(num, name, bool(passed), detail, time.perf_counter() - started)
    raise KeyError(number)


def run_all(numbers=None, echo=print, timing=None) -> list[Check]:
    """Run the selected checks; ``echo`` gets the stable summary lines and
    ``timing`` (if given) the elapsed seconds per check."""
    out = []
    for num, name, _ in CRITERIA:
        if numbers is None or num in numbers:
            check = run_check(num)
            if echo is not None:
                echo(check.line())
            if timing is not None:
                timing(f"criterion {num} ({name}): {check.elapsed:.1f}s")
            out.append(check)
    return out
