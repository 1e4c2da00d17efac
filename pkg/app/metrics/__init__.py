"""Delivery, delay, overhead and throughput metrics plus multi-seed aggregation."""

from .aggregate import AggregateReport, MetricSummary, aggregate, aggregate_groups
from .compute import (
    MetricsReport,
    build_report,
    compute_aeed,
    compute_pdf,
    compute_ro,
    compute_tp,
)
from .csvio import read_sweep_csv, write_aggregate_csv, write_runs_csv
from .ranking import format_rank, level_table, ordering_holds, points_satisfying

__all__ = [
    "AggregateReport",
    "MetricSummary",
    "MetricsReport",
    "aggregate",
    "aggregate_groups",
    "build_report",
    "compute_aeed",
    "compute_pdf",
    "compute_ro",
    "compute_tp",
    "format_rank",
    "level_table",
    "ordering_holds",
    "points_satisfying",
    "read_sweep_csv",
    "write_aggregate_csv",
    "write_runs_csv",
]
