"""
Tests for the accuracy, timing and SLQ benchmark suites and the rbdad CLI
"""
import json

import numpy as np
import pandas as pd
import pytest

from src.bench import run_accuracy_suite, run_slq_demo, run_timing_suite
from src.bench.accuracy import Comparison
import src.bench.cli as cli
from src.bench.cli import EXIT_BREACH, EXIT_ERROR, EXIT_OK, main
from src.bench.schemas import SlqComparison
from src.bench.slq_demo import compare_providers, resolve_provider
from src.bench.timing import COMPILED_OVER_NUMDIFF, median_time_ns
from src.deriv import Provider


@pytest.fixture(scope="module")
def pendulum_path(models_dir):
    return models_dir / "pendulum.rbd"


def test_accuracy_suite_on_pendulum(pendulum_path, tmp_path):
    report = run_accuracy_suite(pendulum_path, n_states=5, cross_check_states=2)
    assert report.model == "pendulum"
    assert report.passed, [row.model_dump() for row in report.failures]

    frame = report.to_frame()
    assert set(frame["function"]) == {"fd", "fd_tau", "id", "kinematics"}
    assert (frame["provider_b"] == "closed_form").any()
    assert (frame["n_states"] <= 5).all()

    path = report.write_csv(tmp_path)
    assert path.name == "accuracy.csv"
    assert len(pd.read_csv(path)) == len(frame)


def test_comparison_reports_breach():
    """A difference outside the band fails the cell"""
    points = [np.zeros(2)]
    comparison = Comparison("f", "a", "b", lambda x: np.ones((1, 1)), lambda x: np.zeros((1, 1)), points, 1e-12)
    row = comparison.run()
    assert not row.passed
    assert row.max_abs_diff == 1.0

    banded = Comparison("f", "a", "b", lambda x: np.zeros((1, 1)), lambda x: np.zeros((1, 1)), points, 1e-3, lower=1e-9)
    assert not banded.run().passed


def test_median_time_respects_budget():
    calls = []
    median, count = median_time_ns(calls.append, np.zeros(1), repetitions=50, warmup=3, guard_runs=2, budget_seconds=1.0)
    assert median >= 0.0
    assert count == 100
    assert len(calls) == 103


def test_timing_suite_on_pendulum(pendulum_path, tmp_path):
    emit_dir = tmp_path / "emit"
    report = run_timing_suite(
        pendulum_path, repetitions=5, emit_dir=emit_dir, warmup=1, guard_runs=1, budget_seconds=0.5,
    )
    assert len(report.rows) == 15
    assert {row.function for row in report.rows} == {"fd", "id", "kinematics"}
    compiled = [row for row in report.rows if row.provider == Provider.COMPILED_AD.value]
    assert all(row.instruction_count > 0 for row in compiled)
    assert report.median("fd", "numdiff", "n/a") > 0.0
    with pytest.raises(KeyError):
        report.median("fd", "analytic", "n/a")

    names = sorted(path.name for path in report.emitted)
    assert "pendulum_fd_fwd.c.txt" in names
    assert "pendulum_id_rev.c.txt" in names
    assert len(names) == 6
    assert all((emit_dir / name).exists() for name in names)

    timing_path, checks_path = report.write_csv(tmp_path)
    assert len(pd.read_csv(timing_path)) == 15
    checks = pd.read_csv(checks_path)
    assert "fd_compiled_over_numdiff" in set(checks["name"])


def test_slq_demo_writes_reports(problems_dir, tmp_path):
    report, solution = run_slq_demo(problems_dir / "double_integrator.json", "compiled", tmp_path)
    assert report.problem == "double_integrator"
    assert report.provider == "compiled_ad"
    assert report.converged
    assert report.final_cost == solution.cost

    costs = pd.read_csv(tmp_path / "costs.csv")
    assert list(costs.columns) == ["iteration", "cost"]
    assert costs["cost"].iloc[0] == pytest.approx(solution.cost_history[0], rel=1e-11)
    assert (costs["cost"].diff().dropna() <= 0.0).all()

    trajectory = pd.read_csv(tmp_path / "trajectory.csv")
    assert list(trajectory.columns) == ["t", "x0", "x1", "u0"]
    assert len(trajectory) == 21
    assert np.isnan(trajectory["u0"].iloc[-1])
    assert (tmp_path / "timings.csv").exists()


def test_compare_providers(problems_dir, tmp_path):
    comparison = compare_providers(problems_dir / "double_integrator.json", tmp_path)
    assert comparison.max_relative_cost_gap < 1e-2
    assert comparison.compared_iterations >= 2
    assert comparison.passed == (
        comparison.total_ratio > 1.0 and comparison.linearization_ratio >= COMPILED_OVER_NUMDIFF
    )
    assert "passed" in pd.read_csv(tmp_path / "comparison.csv").columns
    assert (tmp_path / "numdiff" / "costs.csv").exists()


def test_resolve_provider():
    assert resolve_provider("numdiff") == Provider.NUMDIFF
    assert resolve_provider("compiled") == Provider.COMPILED_AD
    assert resolve_provider("forward_ad") == Provider.FORWARD_AD
    with pytest.raises(ValueError):
        resolve_provider("symbolic")


def test_cli_accuracy(pendulum_path, tmp_path, capsys):
    code = main(["accuracy", "--model", str(pendulum_path), "--states", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert (tmp_path / "accuracy.csv").exists()
    assert "closed_form" in capsys.readouterr().out


def test_cli_slq(problems_dir, tmp_path, capsys):
    code = main(["slq", "--problem", str(problems_dir / "double_integrator.json"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["problem"] == "double_integrator"


def test_cli_slq_comparison_exit_code(problems_dir, monkeypatch):
    """--provider both fails the run when the compiled solve misses its speedup"""
    outcome = {}

    def fake_compare(*args, **kwargs):
        ratio = outcome["linearization_ratio"]
        return SlqComparison(
            problem="double_integrator", compiled_seconds=1.0, numdiff_seconds=2.0, total_ratio=2.0,
            linearization_ratio=ratio, max_relative_cost_gap=0.0, compared_iterations=3,
            passed=ratio >= COMPILED_OVER_NUMDIFF,
        )

    monkeypatch.setattr(cli, "compare_providers", fake_compare)
    argv = ["slq", "--problem", str(problems_dir / "double_integrator.json"), "--provider", "both"]
    outcome["linearization_ratio"] = 3.0
    assert main(argv) == EXIT_BREACH
    outcome["linearization_ratio"] = 8.0
    assert main(argv) == EXIT_OK


def test_cli_errors_exit_nonzero(tmp_path):
    assert main(["accuracy", "--model", str(tmp_path / "missing.rbd")]) == EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["slq", "--problem", str(bad)]) == EXIT_ERROR
    with pytest.raises(SystemExit):
        main(["timing"])
