"""
Timing suite: median Jacobian evaluation time per (function, provider, mode)
"""
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from config.settings import settings
from src.bench.schemas import TimingCheck, TimingRow, rows_to_frame
from src.compile.derivatives import JacobianMode
from src.compile.emit import write_source
from src.deriv.engine import JacobianEngine, Provider, get_engine
from src.deriv.functions import FunctionKind
from src.model.parser import load_model
from src.model.robot_model import RobotModel
from src.utils.logger import get_logger
from src.utils.validators import FileValidator

logger = get_logger(__name__)

COMPILED_OVER_NUMDIFF = 5.0
MODE_LABELS = {JacobianMode.FORWARD: "fwd", JacobianMode.REVERSE: "rev"}


@dataclass(frozen=True)
class TimingCell:
    function: str
    provider: str
    mode: str
    evaluate: Callable[[np.ndarray], object]
    point: np.ndarray
    instruction_count: Optional[int] = None

    @property
    def label(self) -> str:
        return f"{self.function}/{self.provider}/{self.mode}"


@dataclass
class TimingReport:
    model: str
    rows: List[TimingRow] = field(default_factory=list)
    checks: List[TimingCheck] = field(default_factory=list)
    emitted: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def median(self, function: str, provider: str, mode: str) -> float:
        for row in self.rows:
            if (row.function, row.provider, row.mode) == (function, provider, mode):
                return row.median_ns
        raise KeyError(f"No timing cell {function}/{provider}/{mode}")

    def to_frame(self) -> pd.DataFrame:
        return rows_to_frame(self.rows, TimingRow)

    def write_csv(self, directory: Union[str, Path]) -> List[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        timing_path = directory / "timing.csv"
        self.to_frame().to_csv(timing_path, index=False, float_format="%.1f")
        checks_path = directory / "timing_checks.csv"
        rows_to_frame(self.checks, TimingCheck).to_csv(checks_path, index=False, float_format="%.3f")
        logger.info(f"Timing report written to {timing_path}")
        return [timing_path, checks_path]


def median_time_ns(
    fn: Callable[[np.ndarray], object],
    x: np.ndarray,
    repetitions: int,
    warmup: int,
    guard_runs: int,
    budget_seconds: float,
) -> tuple:
    """
    Median per-call time over guard runs

    Each guard run times up to ``repetitions`` calls and stops early once its
    share of the budget is spent. The reported value is the median of the
    per-run medians.

    Returns:
        (median_ns, total timed calls)
    """
    for _ in range(warmup):
        fn(x)

    per_run = budget_seconds / guard_runs
    medians = []
    total = 0
    for _ in range(guard_runs):
        samples = []
        deadline = time.perf_counter() + per_run
        while len(samples) < repetitions:
            start = time.perf_counter_ns()
            fn(x)
            samples.append(time.perf_counter_ns() - start)
            if time.perf_counter() > deadline:
                break
        medians.append(float(np.median(samples)))
        total += len(samples)
    return float(np.median(medians)), total


def _kinds(model: RobotModel) -> List[tuple]:
    kinds = [("fd", FunctionKind.FORWARD_DYNAMICS), ("id", FunctionKind.INVERSE_DYNAMICS)]
    if model.end_effectors:
        kinds.append(("kinematics", FunctionKind.KINEMATICS))
    return kinds


def _engine_cells(name: str, engine: JacobianEngine) -> List[TimingCell]:
    x = engine.probe_point
    cells = [
        TimingCell(name, Provider.NUMDIFF.value, "n/a", lambda p: engine.jacobian(p, Provider.NUMDIFF), x),
        TimingCell(name, Provider.FORWARD_AD.value, "fwd", lambda p: engine.jacobian(p, Provider.FORWARD_AD), x),
        TimingCell(name, Provider.REVERSE_AD.value, "rev", lambda p: engine.jacobian(p, Provider.REVERSE_AD), x),
    ]
    for mode in (JacobianMode.FORWARD, JacobianMode.REVERSE):
        program = engine.compiled(mode)
        cells.append(TimingCell(
            name, Provider.COMPILED_AD.value, MODE_LABELS[mode], program, x, program.program.n_instructions,
        ))
    return cells


def _check(name: str, report: TimingReport, slow: tuple, fast: tuple, threshold: float, strict: bool) -> TimingCheck:
    ratio = report.median(*slow) / max(report.median(*fast), 1.0)
    passed = ratio > threshold if strict else ratio >= threshold
    check = TimingCheck(
        name=name, slow="/".join(slow), fast="/".join(fast), ratio=ratio, threshold=threshold, passed=passed,
    )
    log = logger.info if passed else logger.error
    log(f"{name}: ratio {ratio:.2f} (threshold {threshold:g}) -> {'ok' if passed else 'BREACH'}")
    return check


def build_checks(report: TimingReport, functions: Sequence[str], default_modes: dict) -> List[TimingCheck]:
    """Speedup checks: compiled vs numdiff on fd, compiled vs tape replay everywhere"""
    checks = []
    if "fd" in functions:
        checks.append(_check(
            "fd_compiled_over_numdiff", report,
            ("fd", Provider.NUMDIFF.value, "n/a"),
            ("fd", Provider.COMPILED_AD.value, default_modes["fd"]),
            COMPILED_OVER_NUMDIFF, strict=False,
        ))
    for name in functions:
        checks.append(_check(
            f"{name}_compiled_over_tape", report,
            (name, Provider.REVERSE_AD.value, "rev"),
            (name, Provider.COMPILED_AD.value, default_modes[name]),
            1.0, strict=True,
        ))
    return checks


def run_timing_suite(
    model_path: Union[str, Path],
    repetitions: Optional[int] = None,
    emit_dir: Optional[Union[str, Path]] = None,
    threads: int = 1,
    warmup: Optional[int] = None,
    guard_runs: Optional[int] = None,
    budget_seconds: Optional[float] = None,
) -> TimingReport:
    """
    Time every derivative provider on the model's fd, id and kinematics maps

    Args:
        model_path: Robot model file
        repetitions: Timed calls per guard run (TIMING_REPETITIONS by default)
        emit_dir: Write the compiled programs' source text here
        threads: Worker threads for recording and compiling; timing itself is sequential
        warmup: Untimed calls before each cell
        guard_runs: Independent timing runs per cell
        budget_seconds: Wall-clock cap per cell

    Returns:
        TimingReport with rows, speedup checks and emitted files
    """
    repetitions = repetitions or settings.TIMING_REPETITIONS
    warmup = settings.TIMING_WARMUP if warmup is None else warmup
    guard_runs = guard_runs or settings.TIMING_GUARD_RUNS
    budget_seconds = budget_seconds or settings.TIMING_BUDGET_SECONDS

    if sys.gettrace() is not None:
        logger.warning("A tracer or debugger is active; timings will not be representative")

    model = load_model(FileValidator.validate_model_file(model_path))
    kinds = _kinds(model)
    engines = {name: get_engine(model, kind) for name, kind in kinds}
    logger.info(f"Timing suite on '{model.name}': {repetitions} repetitions, {guard_runs} guard runs")

    def prepare(name: str) -> List[TimingCell]:
        return _engine_cells(name, engines[name])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            cell_groups = list(executor.map(prepare, engines))
    else:
        cell_groups = [prepare(name) for name in engines]

    report = TimingReport(model.name)
    for cell in (cell for group in cell_groups for cell in group):
        median, count = median_time_ns(cell.evaluate, cell.point, repetitions, warmup, guard_runs, budget_seconds)
        report.rows.append(TimingRow(
            function=cell.function,
            provider=cell.provider,
            mode=cell.mode,
            median_ns=median,
            repetitions=count,
            instruction_count=cell.instruction_count,
        ))
        logger.info(f"{cell.label}: {median / 1e3:.1f} µs over {count} calls")

    default_modes = {name: MODE_LABELS[engine.default_mode] for name, engine in engines.items()}
    report.checks = build_checks(report, list(engines), default_modes)

    if emit_dir is not None:
        for name, engine in engines.items():
            for mode, label in MODE_LABELS.items():
                program = engine.compiled(mode).program
                report.emitted.append(write_source(program, f"{model.name}_{name}", label, emit_dir))
    return report


__all__ = [
    "COMPILED_OVER_NUMDIFF",
    "TimingCell",
    "TimingReport",
    "median_time_ns",
    "build_checks",
    "run_timing_suite",
]
