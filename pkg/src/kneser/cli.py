"""Command-line front end.

Exit statuses: 0 solution (or accepted / all passed), 1 failure or rejected,
2 input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import acceptance
from .agreeable import (
    AgreeableDescriptor,
    MonotonicityViolation,
    SolverFailure,
    parse_agreeable_descriptor,
    parse_weights,
    solve_agreeable,
)
from .elimination import EliminationParams
from .harness import ExperimentSpec, run_experiment
from .oracles import KneserDescriptor, KneserError, OracleInconsistency, parse_kneser_descriptor, verify_edge
from .solvers import SOLUTION, SolverParams, solve

EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load(path: str):
    """Parse a descriptor file as either kind."""
    text = _read(path)
    first = text.split(None, 1)[0] if text.strip() else ""
    try:
        if first == "kneser":
            return parse_kneser_descriptor(text)
        if first == "agreeable":
            return parse_agreeable_descriptor(text)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    raise InputError(f"{path}: not a kneser or agreeable descriptor")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _params(args) -> SolverParams:
    elim = EliminationParams(
        sample_count_override=args.samples,
        exhaustive_small_k=not args.sampling,
    )
    return SolverParams(
        n_stop_override=args.n_stop,
        elimination=elim,
        retry_count=args.retries,
        backref_sample_count=args.backref_samples,
    )


def _subset(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(e) for e in text.split(",") if e.strip())
    except ValueError as exc:
        raise InputError(f"malformed set {text!r}") from exc


def cmd_generate(args) -> int:
    try:
        if args.kind == "kneser":
            desc = KneserDescriptor(args.n, args.k, args.coloring, args.seed)
        elif args.utilities == "additive":
            if args.weights is None:
                raise InputError("additive utilities need --weights")
            weights = parse_weights(_read(args.weights))
            if len(weights) != args.l or any(len(row) != args.m for row in weights):
                raise InputError(f"{args.weights} is not an {args.l} x {args.m} matrix")
            desc = AgreeableDescriptor(args.m, args.l, "additive", weights=args.weights)
        else:
            if args.n is None or args.k is None:
                raise InputError("kneser-derived utilities need --n and --k")
            kd = KneserDescriptor(args.n, args.k, args.coloring, args.seed)
            desc = AgreeableDescriptor(args.m, args.l, "kneser-derived", kneser=kd)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(desc.to_text(), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    desc = _load(args.file)
    params = _params(args)
    if isinstance(desc, AgreeableDescriptor):
        try:
            profile = desc.build(Path(args.file).parent)
        except (OSError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        try:
            sol = solve_agreeable(profile, args.strategy, args.seed, params)
        except SolverFailure as exc:
            print(exc.result.serialize())
            return EXIT_FAILURE
        except MonotonicityViolation as exc:
            c = exc.certificate
            print(f"result=violation agent={c.agent} S={','.join(map(str, sorted(c.S)))} "
                  f"T={','.join(map(str, sorted(c.T)))} seed={args.seed}")
            return EXIT_FAILURE
        print(f"result=solution S={','.join(map(str, sorted(sol.S)))} size={sol.size} seed={args.seed}")
        return EXIT_OK
    result = solve(desc.build(), args.strategy, args.seed, params)
    print(result.serialize())
    return EXIT_OK if result.kind == SOLUTION else EXIT_FAILURE


def cmd_verify(args) -> int:
    desc = _load(args.file)
    if not isinstance(desc, KneserDescriptor):
        raise InputError("verify takes a kneser descriptor")
    A, B = _subset(args.A), _subset(args.B)
    for S in (A, B):
        if len(S) != desc.k or len(set(S)) != desc.k or not all(1 <= e <= desc.n for e in S):
            raise InputError(f"{S} is not a {desc.k}-subset of [1, {desc.n}]")
    ok = verify_edge(desc.build(), A, B)
    print("accept" if ok else "reject")
    return EXIT_OK if ok else EXIT_FAILURE


def _seed_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError as exc:
        raise InputError(f"malformed seed range {text!r}") from exc


def cmd_bench(args) -> int:
    text = _read(args.file)
    try:
        spec = ExperimentSpec(text, args.strategy, _seed_range(args.seeds), _params(args), args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = run_experiment(spec)
    _write(report.to_text(), args.out)
    if args.out not in (None, "-"):
        agg = report.aggregates()
        print(f"successes={agg['successes']}/{agg['seeds']} success_rate={agg['success_rate']}")
    return EXIT_OK


def cmd_acceptance(args) -> int:
    checks = acceptance.run_all(set(args.only) if args.only else None,
                                timing=lambda msg: print(msg, file=sys.stderr))
    failed = [c.number for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} criteria passed")
    return EXIT_FAILURE if failed else EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", choices=("fpt", "schrijver", "brute"), default="fpt")
    p.add_argument("--n-stop", type=int, help="phase-1 stopping size (default 8k^4)")
    p.add_argument("--samples", type=int, help="samples per elimination round (default n^3)")
    p.add_argument("--backref-samples", type=int, help="back-reference samples (default n^2)")
    p.add_argument("--retries", type=int, default=0)
    p.add_argument("--sampling", action="store_true",
                   help="sample even when k <= 2 instead of enumerating C(X, k)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kneser", description="Monochromatic edges in Kneser graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write an instance descriptor")
    gen.add_argument("kind", choices=("kneser", "agreeable"))
    gen.add_argument("--n", type=int)
    gen.add_argument("--k", type=int)
    gen.add_argument("--coloring", choices=("canonical", "hard", "random"), default="hard")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--m", type=int)
    gen.add_argument("--l", type=int)
    gen.add_argument("--utilities", choices=("additive", "kneser-derived"), default="additive")
    gen.add_argument("--weights", help="weights file, one agent per line")
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_generate)

    sol = sub.add_parser("solve", help="solve an instance file")
    sol.add_argument("file")
    sol.add_argument("--seed", type=int, default=0)
    _add_solver_flags(sol)
    sol.set_defaults(func=cmd_solve)

    ver = sub.add_parser("verify", help="check a claimed monochromatic edge")
    ver.add_argument("file")
    ver.add_argument("--A", required=True, help="comma-separated elements")
    ver.add_argument("--B", required=True, help="comma-separated elements")
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="run a solver over a seed range")
    ben.add_argument("file")
    ben.add_argument("--seeds", required=True, help="inclusive range lo-hi")
    ben.add_argument("--jobs", type=int, default=1)
    ben.add_argument("--out", help="report path (default stdout)")
    _add_solver_flags(ben)
    ben.set_defaults(func=cmd_bench)

    acc = sub.add_parser("acceptance", help="run the acceptance checks")
    acc.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    acc.set_defaults(func=cmd_acceptance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.command == "generate":
        needed = ("n", "k") if args.kind == "kneser" else ("m", "l")
        missing = [f"--{f}" for f in needed if getattr(args, f) is None]
        if missing:
            print(f"error: generate {args.kind} needs {' '.join(missing)}", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OracleInconsistency, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (KneserError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
