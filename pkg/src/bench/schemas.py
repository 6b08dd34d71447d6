"""
Pydantic models for benchmark report rows
"""
from typing import List, Optional, Sequence, Type

import pandas as pd
from pydantic import BaseModel, Field


class AccuracyRow(BaseModel):
    """One provider-vs-provider comparison"""
    function: str = Field(..., description="Differentiated function, e.g. fd_tau")
    provider_a: str = Field(..., description="Provider under test")
    provider_b: str = Field(..., description="Reference provider")
    metric: str = Field("max_abs", description="Bounded quantity: max_abs or frobenius")
    max_abs_diff: float = Field(..., ge=0.0, description="Largest entry-wise difference over all states")
    frobenius_diff: float = Field(..., ge=0.0, description="Largest Frobenius-norm difference over all states")
    lower_bound: float = Field(0.0, ge=0.0, description="Minimum admissible max_abs_diff")
    upper_bound: float = Field(..., gt=0.0, description="Maximum admissible max_abs_diff")
    n_states: int = Field(..., gt=0, description="Number of random states compared")
    passed: bool = Field(..., description="Difference inside the admissible band")

    class Config:
        json_schema_extra = {
            "example": {
                "function": "fd_tau",
                "provider_a": "compiled_ad",
                "provider_b": "analytic_ltl",
                "metric": "frobenius",
                "max_abs_diff": 3.1e-15,
                "frobenius_diff": 8.2e-15,
                "lower_bound": 0.0,
                "upper_bound": 1e-12,
                "n_states": 100,
                "passed": True,
            }
        }


class TimingRow(BaseModel):
    """Median evaluation time of one (function, provider, mode) cell"""
    function: str = Field(..., description="Differentiated function")
    provider: str = Field(..., description="Derivative provider")
    mode: str = Field(..., description="fwd, rev or n/a")
    median_ns: float = Field(..., ge=0.0, description="Median time per Jacobian evaluation")
    repetitions: int = Field(..., gt=0, description="Timed evaluations")
    instruction_count: Optional[int] = Field(None, description="Straight-line program length, compiled provider only")


class TimingCheck(BaseModel):
    """Ratio of two timing cells against a threshold"""
    name: str = Field(..., description="What is compared")
    slow: str = Field(..., description="Cell expected to be slower")
    fast: str = Field(..., description="Cell expected to be faster")
    ratio: float = Field(..., description="slow median / fast median")
    threshold: float = Field(..., description="Minimum admissible ratio (exclusive when 1)")
    passed: bool


class SlqIterationRow(BaseModel):
    """One SLQ iteration"""
    provider: str = Field(..., description="Derivative provider")
    iteration: int = Field(..., ge=0, description="0 is the initial rollout")
    cost: float = Field(..., description="Cost after the iteration")
    step: Optional[float] = Field(None, description="Accepted line-search step")
    regularization: Optional[float] = Field(None, description="Riccati regularization used")
    linearization_seconds: float = Field(0.0, ge=0.0)
    backward_seconds: float = Field(0.0, ge=0.0)
    line_search_seconds: float = Field(0.0, ge=0.0)


class SlqReport(BaseModel):
    """Summary of an SLQ demo run"""
    problem: str
    provider: str
    converged: bool
    iterations: int
    final_cost: float
    terminal_state_error: float = Field(..., description="Norm of x_N - x_final")
    total_seconds: float
    linearization_seconds: float = 0.0
    files: List[str] = Field(default_factory=list, description="CSV files written")


class SlqComparison(BaseModel):
    """Compiled AD against numerical differences on the same problem"""
    problem: str
    compiled_seconds: float
    numdiff_seconds: float
    total_ratio: float = Field(..., description="numdiff / compiled total solve time")
    linearization_ratio: float = Field(..., description="numdiff / compiled linearization time")
    max_relative_cost_gap: float = Field(..., description="Largest per-iteration relative cost difference")
    compared_iterations: int
    passed: bool = Field(..., description="Compiled solve faster overall and linearization speedup above the floor")


def rows_to_frame(rows: Sequence[BaseModel], model: Type[BaseModel]) -> pd.DataFrame:
    """DataFrame with one column per schema field, in declaration order"""
    columns = list(model.model_fields)
    return pd.DataFrame([row.model_dump() for row in rows], columns=columns)


__all__ = ["AccuracyRow", "TimingRow", "TimingCheck", "SlqIterationRow", "SlqReport", "SlqComparison", "rows_to_frame"]
