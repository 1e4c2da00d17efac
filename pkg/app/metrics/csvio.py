"""Sweep CSV files: one row per run plus optional ``seed=agg`` rows."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, Optional, TextIO, Union

import pandas as pd

from ..core.errors import ConfigError
from .aggregate import AggregateReport, MetricSummary
from .compute import MetricsReport

RUN_COLUMNS = [
    "protocol",
    "nodes",
    "pause_time",
    "seed",
    "pdf",
    "aeed_s",
    "ro",
    "tp_bps",
    "sent",
    "delivered",
    "dropped",
]
STD_COLUMNS = ["pdf_std", "aeed_s_std", "ro_std", "tp_bps_std"]
AGG_SEED = "agg"

Target = Union[str, Path, TextIO]


def _run_row(report: MetricsReport) -> Dict[str, Any]:
    return {
        "protocol": report.protocol,
        "nodes": report.nodes,
        "pause_time": report.pause_time,
        "seed": str(report.seed),
        "pdf": report.pdf,
        "aeed_s": report.aeed,
        "ro": report.ro,
        "tp_bps": report.tp,
        "sent": report.data_sent,
        "delivered": report.data_delivered,
        "dropped": report.data_dropped,
    }


def _mean(summary: Optional[MetricSummary]) -> Optional[float]:
    return None if summary is None else summary.mean


def _std(summary: Optional[MetricSummary]) -> Optional[float]:
    return None if summary is None else summary.std


def _agg_row(agg: AggregateReport) -> Dict[str, Any]:
    return {
        "protocol": agg.protocol,
        "nodes": agg.nodes,
        "pause_time": agg.pause_time,
        "seed": AGG_SEED,
        "pdf": _mean(agg.pdf),
        "aeed_s": _mean(agg.aeed),
        "ro": agg.ro.mean,
        "tp_bps": agg.tp.mean,
        "sent": agg.data_sent,
        "delivered": agg.data_delivered,
        "dropped": agg.data_dropped,
        "pdf_std": _std(agg.pdf),
        "aeed_s_std": _std(agg.aeed),
        "ro_std": agg.ro.std,
        "tp_bps_std": agg.tp.std,
    }


def runs_frame(reports: Iterable[MetricsReport]) -> pd.DataFrame:
    return pd.DataFrame([_run_row(report) for report in reports], columns=RUN_COLUMNS)


def aggregates_frame(aggregates: Iterable[AggregateReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [_agg_row(agg) for agg in aggregates], columns=RUN_COLUMNS + STD_COLUMNS
    )


def _write(frame: pd.DataFrame, target: Target) -> None:
    frame.to_csv(target, index=False, na_rep="", float_format="%.6g", lineterminator="\n")


def write_runs_csv(reports: Iterable[MetricsReport], target: Target) -> None:
    _write(runs_frame(reports), target)


def write_aggregate_csv(aggregates: Iterable[AggregateReport], target: Target) -> None:
    _write(aggregates_frame(aggregates), target)


def read_sweep_csv(path: Union[str, Path]) -> pd.DataFrame:
    """Load a sweep CSV; the ``seed`` column stays textual because of ``agg`` rows."""

    frame = pd.read_csv(path, dtype={"seed": str})
    missing = [column for column in RUN_COLUMNS if column not in frame.columns]
    if missing:
        raise ConfigError(f"missing columns {', '.join(missing)}", field="csv")
    return frame


def run_rows(frame: pd.DataFrame) -> pd.DataFrame:
    return frame[frame["seed"] != AGG_SEED]


__all__ = [
    "AGG_SEED",
    "RUN_COLUMNS",
    "STD_COLUMNS",
    "aggregates_frame",
    "read_sweep_csv",
    "run_rows",
    "runs_frame",
    "write_aggregate_csv",
    "write_runs_csv",
]
