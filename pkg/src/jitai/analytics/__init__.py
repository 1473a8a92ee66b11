"""Receptivity metrics, nonparametric tests, and report assembly."""

from .metrics import average_reward, completion_rate, response_times
from .stats import (
    StatTestResult,
    StatTestKind,
    chi_square_tail,
    dunn_posthoc,
    kruskal_wallis,
    mann_whitney_u,
    normal_tail,
    tail_probability,
)
from .report import build_report, render_text, report_csv_rows

__all__ = [
    "average_reward",
    "completion_rate",
    "response_times",
    "StatTestResult",
    "StatTestKind",
    "chi_square_tail",
    "dunn_posthoc",
    "kruskal_wallis",
    "mann_whitney_u",
    "normal_tail",
    "tail_probability",
    "build_report",
    "render_text",
    "report_csv_rows",
]
