"""Accuracy, timing and SLQ benchmark suites behind the rbdad command"""
from src.bench.accuracy import AccuracyReport, run_accuracy_suite
from src.bench.schemas import AccuracyRow, SlqComparison, SlqIterationRow, SlqReport, TimingCheck, TimingRow
from src.bench.slq_demo import compare_providers, run_slq_demo
from src.bench.timing import TimingReport, run_timing_suite

__all__ = [
    "AccuracyReport",
    "run_accuracy_suite",
    "AccuracyRow",
    "SlqComparison",
    "SlqIterationRow",
    "SlqReport",
    "TimingCheck",
    "TimingRow",
    "compare_providers",
    "run_slq_demo",
    "TimingReport",
    "run_timing_suite",
]
