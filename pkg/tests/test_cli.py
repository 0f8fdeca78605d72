from fractions import Fraction

import pytest

from kneser.cli import EXIT_FAILURE, EXIT_INPUT, EXIT_OK, main
from kneser.harness import HEADER, ExperimentSpec, run_experiment
from kneser.oracles import CountingOracle, KneserDescriptor, parse_kneser_descriptor
from kneser.solvers import SolverParams, parse_result, solve_fpt


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_round_trip(tmp_path, capsys):
    path = tmp_path / "h.txt"
    code, _, _ = run(capsys, "generate", "kneser", "--n", 132, "--k", 2, "--coloring", "hard",
                     "--seed", 7, "-o", path)
    assert code == EXIT_OK
    text = path.read_text()
    assert parse_kneser_descriptor(text).to_text() == text
    assert parse_kneser_descriptor(text) == KneserDescriptor(132, 2, "hard", 7)


def test_generate_rejects_bad_parameters(capsys):
    code, _, err = run(capsys, "generate", "kneser", "--n", 3, "--k", 2)
    assert code == EXIT_INPUT and "n >= 2k" in err
    code, _, _ = run(capsys, "generate", "kneser", "--k", 2)
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "generate", "agreeable", "--m", 8, "--l", 3,
                     "--utilities", "kneser-derived", "--n", 8, "--k", 2)
    assert code == EXIT_INPUT


def test_generate_agreeable_additive(tmp_path, capsys):
    weights = tmp_path / "w.txt"
    weights.write_text("\n".join(" ".join(["1/2"] * 8) for _ in range(4)) + "\n")
    code, out, _ = run(capsys, "generate", "agreeable", "--m", 8, "--l", 4, "--utilities", "additive",
                       "--weights", weights)
    assert code == EXIT_OK
    assert out == f"agreeable m=8 l=4\nutilities=additive weights={weights}\n"
    code, _, _ = run(capsys, "generate", "agreeable", "--m", 9, "--l", 4, "--weights", weights)
    assert code == EXIT_INPUT


def test_solve_and_verify_pipeline(tmp_path, capsys):
    path = tmp_path / "h.txt"
    path.write_text(KneserDescriptor(132, 2, "hard", 3).to_text())
    code, out, _ = run(capsys, "solve", path, "--strategy", "fpt", "--seed", 1)
    assert code == EXIT_OK and out.startswith("result=solution ")
    res = parse_result(out.strip())
    code, out, _ = run(capsys, "verify", path, "--A", ",".join(map(str, res.A)), "--B", ",".join(map(str, res.B)))
    assert code == EXIT_OK and out.strip() == "accept"
    code, out, _ = run(capsys, "verify", path, "--A", "1,2", "--B", "1,2")
    assert code == EXIT_FAILURE and out.strip() == "reject"
    code, _, _ = run(capsys, "verify", path, "--A", "1,200", "--B", "3,4")
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "verify", path, "--A", "1,x", "--B", "3,4")
    assert code == EXIT_INPUT


def test_solve_is_deterministic(tmp_path, capsys):
    path = tmp_path / "r.txt"
    path.write_text(KneserDescriptor(6, 2, "random", 4).to_text())
    outs = [run(capsys, "solve", path, "--strategy", "schrijver")[1] for _ in range(2)]
    assert outs[0] == outs[1] and outs[0].startswith("result=solution")


def test_solve_failure_and_input_errors(tmp_path, capsys):
    canon = tmp_path / "c.txt"
    canon.write_text(KneserDescriptor(9, 2, "canonical").to_text())
    code, out, _ = run(capsys, "solve", canon, "--strategy", "brute")
    assert code == EXIT_FAILURE and out.startswith("result=failure")
    bad = tmp_path / "bad.txt"
    bad.write_text("kneser n=10\n")
    assert run(capsys, "solve", bad)[0] == EXIT_INPUT
    assert run(capsys, "solve", tmp_path / "missing.txt")[0] == EXIT_INPUT
    assert run(capsys, "solve", canon, "--strategy", "magic")[0] == EXIT_INPUT


def test_solve_overrides(tmp_path, capsys):
    path = tmp_path / "h.txt"
    path.write_text(KneserDescriptor(30, 3, "hard", 1).to_text())
    code, out, _ = run(capsys, "solve", path, "--n-stop", 20, "--samples", 500, "--backref-samples", 900,
                       "--retries", 2, "--seed", 5)
    assert code in (EXIT_OK, EXIT_FAILURE)
    assert parse_result(out.strip()).seed == 5


def test_solve_agreeable(tmp_path, capsys):
    (tmp_path / "w.txt").write_text("1 2 3 4 5\n5 4 3 2 1\n")
    path = tmp_path / "a.txt"
    path.write_text("agreeable m=5 l=2\nutilities=additive weights=w.txt\n")
    code, out, _ = run(capsys, "solve", path, "--strategy", "schrijver")
    assert code == EXIT_OK
    assert out.startswith("result=solution S=") and "size=3" in out
    derived = tmp_path / "d.txt"
    derived.write_text("agreeable m=8 l=5\nutilities=kneser-derived n=8 k=2 coloring=hard seed=2\n")
    code, out, _ = run(capsys, "solve", derived, "--strategy", "brute")
    assert code == EXIT_OK


def test_bench_report(tmp_path, capsys):
    path = tmp_path / "h.txt"
    path.write_text(KneserDescriptor(132, 2, "hard", 0).to_text())
    out_path = tmp_path / "report.tsv"
    code, out, _ = run(capsys, "bench", path, "--seeds", "0-4", "--out", out_path)
    assert code == EXIT_OK and "successes=5/5" in out
    lines = out_path.read_text().splitlines()
    assert lines[0] == HEADER
    assert len([l for l in lines if l and not l.startswith("#")]) == 6
    assert "# success_rate=1" in lines
    assert run(capsys, "bench", path, "--seeds", "5-4")[0] == EXIT_INPUT


def test_bench_queries_match_traced_run():
    desc = KneserDescriptor(132, 2, "hard", 9)
    report = run_experiment(ExperimentSpec(desc.to_text(), "fpt", (3, 3)))
    inst = desc.build()
    counting = CountingOracle(inst.oracle)
    inst.oracle = counting
    res = solve_fpt(inst, 3)
    assert report.rows[0].result.point_queries == res.point_queries == counting.transcript.point_queries


def test_bench_parallel_matches_sequential():
    text = KneserDescriptor(140, 2, "hard", 2).to_text()
    seq = run_experiment(ExperimentSpec(text, "fpt", (0, 5)))
    par = run_experiment(ExperimentSpec(text, "fpt", (0, 5), jobs=2))
    deterministic = lambda rep: [(r.seed, r.result.serialize(), r.verified) for r in rep.rows]
    assert deterministic(seq) == deterministic(par)
    keys = ("seeds", "successes", "success_rate", "mean_queries", "median_queries")
    assert {k: seq.aggregates()[k] for k in keys} == {k: par.aggregates()[k] for k in keys}
    assert seq.success_rate == Fraction(seq.successes, 6)


def test_bench_records_errors_per_row():
    text = KneserDescriptor(40, 8, "random", 0).to_text()
    report = run_experiment(ExperimentSpec(text, "brute", (0, 1)))
    assert [r.result for r in report.rows] == [None, None]
    assert all("BudgetExceeded" in r.error for r in report.rows)
    assert report.success_rate == 0


def test_experiment_spec_validation():
    text = KneserDescriptor(10, 2, "hard", 0).to_text()
    with pytest.raises(ValueError):
        ExperimentSpec(text, "fpt", (3, 2))
    with pytest.raises(ValueError):
        ExperimentSpec(text, "fpt", (0, 2), jobs=0)
    with pytest.raises(ValueError):
        ExperimentSpec("kneser n=1\n", "fpt", (0, 2))


def test_acceptance_subcommand_subset(capsys):
    code, out, err = run(capsys, "acceptance", "--only", 7, 10)
    assert code == EXIT_OK
    assert out.count("[PASS]") == 2 and "2/2 criteria passed" in out
    assert "criterion 7" in err
    assert run(capsys, "acceptance", "--only", 7, 10)[1] == out
