import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from triangle_linsolve.bench import CSV_HEADER, ExperimentRow, emit_csv, run_grid, summarize
from triangle_linsolve.cli import main
from triangle_linsolve.instances import InstanceSpec, generate
from triangle_linsolve.linalg import read_vector, write_matrix_market, write_vector
from triangle_linsolve.solver import SolverConfig, solve


def test_run_grid_two_methods():
    rows = run_grid(["GeneralUniform"], [100], [0.01], [1], ["TA", "BiCGSTAB"])
    assert [r.method for r in rows] == ["TA", "BiCGSTAB"]
    ta, bicg = rows
    assert ta.outcome_tag == "EpsSolution" and ta.residual <= 0.01
    # dense uniform matrices surround the origin with eigenvalues; BiCGSTAB
    # does not reach the tolerance there and must say so
    assert bicg.outcome_tag in ("Converged", "NotConverged", "Breakdown")
    assert (bicg.outcome_tag == "Converged") == (bicg.residual <= 0.01)


def test_run_grid_cardinality_and_order():
    rows = run_grid(["GeneralUniform", "LowRank"], [100, 200], [0.1, 0.05], [1, 2, 3], ["TA", "BiCGSTAB"])
    assert len(rows) == 48
    keys = [(r.kind, r.n, r.epsilon, r.seed, r.method) for r in rows]
    assert keys[:3] == [("GeneralUniform", 100, 0.1, 1, "TA"), ("GeneralUniform", 100, 0.1, 1, "BiCGSTAB"),
                        ("GeneralUniform", 100, 0.1, 2, "TA")]
    assert keys[-1] == ("LowRank", 200, 0.05, 3, "BiCGSTAB")


@pytest.mark.parametrize("empty", ["kinds", "dims", "epsilons", "seeds", "methods"])
def test_run_grid_rejects_empty_lists(empty):
    args = dict(kinds=["LowRank"], dims=[10], epsilons=[0.1], seeds=[1], methods=["TA"])
    args[empty] = []
    with pytest.raises(ValueError):
        run_grid(**args)


def test_run_grid_rejects_unknown_method():
    with pytest.raises(ValueError):
        run_grid(["LowRank"], [10], [0.1], [1], ["GMRES"])


def test_failed_cell_is_recorded_and_grid_continues():
    # LowRank needs min(m, n) >= 2, so dim 1 fails at generation
    rows = run_grid(["LowRank"], [1, 10], [0.1], [1], ["TA"])
    assert [r.outcome_tag for r in rows][0] == "error"
    assert rows[1].outcome_tag == "EpsSolution"


def test_row_reproduces_from_seed():
    rows = run_grid(["IllConditioned"], [30], [0.05], [7], ["TA"])
    row = rows[0]
    inst = generate(InstanceSpec(row.kind, row.m, row.n, row.seed))
    out = solve(inst.A, inst.b, SolverConfig(epsilon=row.epsilon))
    assert (out.iterations, out.residual, out.tag.value) == (row.iterations, row.residual, row.outcome_tag)


def _without_wall_time(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    col = rows[0].index("wall_time_ms")
    return [r[:col] + r[col + 1:] for r in rows]


def test_emit_csv_deterministic_except_wall_time(tmp_path):
    grid = dict(kinds=["LowRank", "GeneralGaussian"], dims=[20], epsilons=[0.1, 0.01], seeds=[1, 2],
                methods=["TA", "BiCGSTAB", "SteepestDescent"])
    emit_csv(run_grid(**grid), tmp_path / "a.csv")
    emit_csv(run_grid(**grid), tmp_path / "b.csv")
    assert _without_wall_time(tmp_path / "a.csv") == _without_wall_time(tmp_path / "b.csv")


def test_emit_csv_shapes(tmp_path):
    emit_csv([], tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_bytes() == (",".join(CSV_HEADER) + "\r\n").encode()
    assert ",".join(CSV_HEADER) == "method,kind,m,n,epsilon,seed,wall_time_ms,iterations,residual,normal_residual,outcome"
    row = ExperimentRow("TA", "LowRank", 3, 3, 0.1, 1, 1.5, 4, 0.01, 0.002, "EpsSolution")
    emit_csv([row], tmp_path / "one.csv")
    assert len((tmp_path / "one.csv").read_text().splitlines()) == 2


def test_emit_csv_error_has_path(tmp_path):
    target = tmp_path / "missing-dir" / "out.csv"
    with pytest.raises(OSError, match="missing-dir"):
        emit_csv([], target)


def test_summarize_medians():
    rows = [ExperimentRow("TA", "LowRank", 5, 5, 0.1, s, float(t), it, 0.0, 0.0, "EpsSolution")
            for s, t, it in [(1, 3, 10), (2, 1, 30), (3, 2, 20)]]
    (summary,) = summarize(rows)
    assert summary["median_wall_time_ms"] == 2.0 and summary["median_iterations"] == 20
    assert summary["seeds"] == 3


@pytest.fixture
def system_files(tmp_path):
    def write(A, b, name):
        a_path, b_path = tmp_path / f"{name}_A.mtx", tmp_path / f"{name}_b.mtx"
        write_matrix_market(a_path, np.asarray(A, dtype=float))
        write_vector(b_path, np.asarray(b, dtype=float))
        return str(a_path), str(b_path)
    return write


def test_cli_solve_eps_solution(system_files, tmp_path, capsys):
    A, b = system_files(np.eye(2), [2.0, 0.0], "id")
    x_out = tmp_path / "x.mtx"
    trace = tmp_path / "trace.csv"
    code = main(["solve", A, b, "--epsilon", "0.01", "--r0", "1", "--x-out", str(x_out), "--trace", str(trace)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tag"] == "EpsSolution" and report["radius_history"] == [1.0, 2.0]
    np.testing.assert_array_equal(read_vector(x_out), [2.0, 0.0])
    lines = trace.read_text().splitlines()
    assert lines[0] == "iter,gap,radius,alpha,event"
    assert [line.split(",")[-1] for line in lines[1:]] == ["pivot", "witness", "radius", "pivot", "near"]


def test_cli_solve_unsolvable_and_normal_equation(system_files, capsys):
    A, b = system_files([[1.0, 0.0], [0.0, 0.0]], [0.0, 1.0], "rank1")
    assert main(["solve", A, b]) == 3
    assert json.loads(capsys.readouterr().out)["tag"] == "Unsolvable"
    assert main(["solve", A, b, "--unsolvable-margin", "inf"]) == 2
    assert json.loads(capsys.readouterr().out)["tag"] == "NormalEqEpsSolution"


def test_cli_solve_inconclusive(system_files, capsys):
    A, b = system_files(np.diag([1.0, 0.1]), [0.0, 1.0], "cap")
    assert main(["solve", A, b, "--r0", "1", "--radius-cap", "4"]) == 1
    assert json.loads(capsys.readouterr().out)["tag"] == "Inconclusive"


def test_cli_membership(system_files, capsys):
    A, b = system_files(np.eye(2), [2.0, 0.0], "mem")
    assert main(["membership", A, b, "--radius", "1"]) == 4
    report = json.loads(capsys.readouterr().out)
    assert report["tag"] == "Witness"
    assert (report["delta_lower"], report["delta_upper"], report["radius_lower_bound"]) == (0.5, 1.0, 2.0)
    assert main(["membership", A, b, "--radius", "2", "--pivot-mode", "strict"]) == 0
    assert json.loads(capsys.readouterr().out)["tag"] == "NearPoint"


def test_cli_missing_file_is_error(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "nope.mtx"), str(tmp_path / "nope_b.mtx")]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_gen_then_solve(tmp_path, capsys):
    prefix = tmp_path / "low"
    assert main(["gen", "--kind", "LowRank", "--m", "30", "--seed", "3", "--out", str(prefix)]) == 0
    paths = json.loads(capsys.readouterr().out)
    assert main(["solve", paths["A"], paths["b"], "--epsilon", "0.01"]) == 0
    assert json.loads(capsys.readouterr().out)["residual"] <= 0.01


def test_cli_bench(tmp_path, capsys):
    out, summary = tmp_path / "grid.csv", tmp_path / "summary.json"
    code = main(["bench", "--kinds", "LowRank", "--dims", "20", "--eps", "0.1", "0.01", "--seeds", "1", "2",
                 "--methods", "TA", "BiCGSTAB", "--out", str(out), "--summary", str(summary)])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    assert {r["outcome"] for r in rows if r["method"] == "TA"} == {"EpsSolution"}
    assert len(json.loads(summary.read_text())) == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "triangle_linsolve", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for verb in ("solve", "membership", "bench", "gen"):
        assert verb in proc.stdout
