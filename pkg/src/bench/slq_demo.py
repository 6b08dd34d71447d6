"""
SLQ demo: solve a problem file and dump cost history, per-iteration
timings and the optimized trajectory as CSV
"""
import time
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import settings
from src.bench.schemas import SlqComparison, SlqIterationRow, SlqReport, rows_to_frame
from src.bench.timing import COMPILED_OVER_NUMDIFF
from src.deriv.engine import Provider
from src.slq.problem import SlqProblem, load_problem
from src.slq.solver import SlqSolution, slq_solve
from src.utils.logger import get_logger
from src.utils.validators import FileValidator

logger = get_logger(__name__)

# CLI names for the two providers the demo compares
PROVIDER_ALIASES = {
    "numdiff": Provider.NUMDIFF,
    "compiled": Provider.COMPILED_AD,
}


def resolve_provider(name: Union[str, Provider]) -> Provider:
    if isinstance(name, Provider):
        return name
    return PROVIDER_ALIASES.get(name) or Provider(name)


def iteration_rows(solution: SlqSolution) -> list:
    provider = solution.provider.value
    rows = [SlqIterationRow(provider=provider, iteration=0, cost=solution.cost_history[0])]
    for it in solution.iterations:
        rows.append(SlqIterationRow(
            provider=provider,
            iteration=it.iteration,
            cost=it.cost,
            step=it.step,
            regularization=it.regularization,
            linearization_seconds=it.linearization_seconds,
            backward_seconds=it.backward_seconds,
            line_search_seconds=it.line_search_seconds,
        ))
    return rows


def trajectory_frame(problem: SlqProblem, solution: SlqSolution) -> pd.DataFrame:
    """One row per knot: time, state, input (NaN input on the final knot)"""
    n_steps = solution.inputs.shape[0]
    inputs = np.vstack([solution.inputs, np.full((1, problem.nu), np.nan)])
    frame = pd.DataFrame(solution.states, columns=[f"x{i}" for i in range(problem.nx)])
    for j in range(problem.nu):
        frame[f"u{j}"] = inputs[:, j]
    frame.insert(0, "t", np.arange(n_steps + 1) * problem.dt)
    return frame


def write_solution(problem: SlqProblem, solution: SlqSolution, out_dir: Union[str, Path]) -> list:
    """Write costs.csv, timings.csv and trajectory.csv"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = iteration_rows(solution)
    costs = rows_to_frame(rows, SlqIterationRow)[["iteration", "cost"]]
    timings = rows_to_frame(rows, SlqIterationRow).drop(columns=["cost"])

    paths = [out_dir / "costs.csv", out_dir / "timings.csv", out_dir / "trajectory.csv"]
    costs.to_csv(paths[0], index=False, float_format="%.12e")
    timings.to_csv(paths[1], index=False, float_format="%.6e")
    trajectory_frame(problem, solution).to_csv(paths[2], index=False, float_format="%.9e")
    logger.info(f"SLQ results written to {out_dir}")
    return paths


def run_slq_demo(
    problem_path: Union[str, Path],
    provider: Union[str, Provider] = Provider.COMPILED_AD,
    out_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
    max_iterations: Optional[int] = None,
) -> Tuple[SlqReport, SlqSolution]:
    """
    Solve an SLQ problem file and write its reports

    Args:
        problem_path: JSON problem file
        provider: ``numdiff``, ``compiled`` or any Provider value
        out_dir: Report directory (OUTPUT_DIR/<problem>/<provider> by default)
        threads: Worker threads for the linearization
        max_iterations: Override the problem's iteration limit

    Returns:
        (SlqReport, SlqSolution)
    """
    provider = resolve_provider(provider)
    problem = load_problem(FileValidator.validate_problem_file(problem_path))
    out_dir = Path(out_dir) if out_dir is not None else settings.OUTPUT_DIR / problem.name / provider.value

    start = time.perf_counter()
    solution = slq_solve(problem, provider, max_iterations=max_iterations, threads=threads)
    elapsed = time.perf_counter() - start

    paths = write_solution(problem, solution, out_dir)
    report = SlqReport(
        problem=problem.name,
        provider=provider.value,
        converged=solution.converged,
        iterations=len(solution.iterations),
        final_cost=solution.cost,
        terminal_state_error=float(np.linalg.norm(solution.states[-1] - problem.x_final)),
        total_seconds=elapsed,
        linearization_seconds=solution.linearization_seconds,
        files=[str(p) for p in paths],
    )
    logger.info(
        f"SLQ '{problem.name}' with {provider.value}: cost {report.final_cost:.6g} after "
        f"{report.iterations} iterations in {elapsed:.2f}s (converged={report.converged})"
    )
    return report, solution


def compare_providers(
    problem_path: Union[str, Path],
    out_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
    max_iterations: Optional[int] = None,
) -> SlqComparison:
    """
    Solve with compiled AD and with numerical differences and compare runtimes

    The comparison passes when the compiled solve is faster overall and its
    linearization at least COMPILED_OVER_NUMDIFF times faster.
    """
    base = Path(out_dir) if out_dir is not None else None
    results = {}
    for alias in ("compiled", "numdiff"):
        target = base / alias if base is not None else None
        results[alias] = run_slq_demo(problem_path, alias, target, threads, max_iterations)

    (compiled, compiled_solution), (numdiff, numdiff_solution) = results["compiled"], results["numdiff"]
    n = min(len(compiled_solution.cost_history), len(numdiff_solution.cost_history))
    a = np.asarray(compiled_solution.cost_history[:n])
    b = np.asarray(numdiff_solution.cost_history[:n])
    gap = float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300))) if n else 0.0

    total_ratio = numdiff.total_seconds / compiled.total_seconds
    linearization_ratio = numdiff.linearization_seconds / max(compiled.linearization_seconds, 1e-12)
    comparison = SlqComparison(
        problem=compiled.problem,
        compiled_seconds=compiled.total_seconds,
        numdiff_seconds=numdiff.total_seconds,
        total_ratio=total_ratio,
        linearization_ratio=linearization_ratio,
        max_relative_cost_gap=gap,
        compared_iterations=n,
        passed=total_ratio > 1.0 and linearization_ratio >= COMPILED_OVER_NUMDIFF,
    )
    log = logger.info if comparison.passed else logger.warning
    log(
        f"SLQ '{comparison.problem}': numdiff/compiled total {total_ratio:.2f}x, "
        f"linearization {linearization_ratio:.2f}x (floor {COMPILED_OVER_NUMDIFF:g}), cost gap {gap:.2e} "
        f"-> {'ok' if comparison.passed else 'BREACH'}"
    )
    if base is not None:
        rows_to_frame([comparison], SlqComparison).to_csv(base / "comparison.csv", index=False)
    return comparison


__all__ = [
    "PROVIDER_ALIASES",
    "resolve_provider",
    "iteration_rows",
    "trajectory_frame",
    "write_solution",
    "run_slq_demo",
    "compare_providers",
]
