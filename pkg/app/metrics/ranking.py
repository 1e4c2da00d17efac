"""Ordinal comparison of protocols from sweep rows."""

from __future__ import annotations

import operator
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import pandas as pd

from .csvio import run_rows

METRICS: Tuple[str, ...] = ("pdf", "aeed_s", "ro", "tp_bps")
METRIC_TITLES: Dict[str, str] = {
    "pdf": "Packet delivery fraction",
    "aeed_s": "Average end-to-end delay",
    "ro": "Routing overhead",
    "tp_bps": "Throughput",
}
LEVELS: Tuple[str, ...] = ("High", "Medium", "Low", "Very low")

_RELATIONS: Dict[str, Callable[[float, float], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


def point_means(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean of each metric per ``(pause_time, protocol)`` over the run rows."""

    rows = run_rows(frame)
    return rows.groupby(["pause_time", "protocol"], sort=True)[list(METRICS)].mean()


def overall_means(frame: pd.DataFrame) -> pd.DataFrame:
    """Mean of the per-point means, one row per protocol."""

    return point_means(frame).groupby(level="protocol").mean()


def level_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Label each protocol per metric; the largest mean is ``High``.

    Protocols whose mean is undefined for a metric get ``n/a``.
    """

    means = overall_means(frame)
    table = pd.DataFrame(index=means.index, columns=list(METRICS), dtype=object)
    for metric in METRICS:
        column = means[metric].dropna().sort_values(ascending=False, kind="mergesort")
        for position, protocol in enumerate(column.index):
            table.loc[protocol, metric] = LEVELS[min(position, len(LEVELS) - 1)]
        table[metric] = table[metric].fillna("n/a")
    return table


def point_orderings(frame: pd.DataFrame) -> pd.DataFrame:
    """Protocols sorted by descending mean, per metric and pause-time point."""

    means = point_means(frame)
    records: List[Dict[str, object]] = []
    for metric in METRICS:
        for pause_time, group in means[metric].groupby(level="pause_time"):
            ordered = group.droplevel("pause_time").dropna()
            ordered = ordered.sort_values(ascending=False, kind="mergesort")
            records.append(
                {
                    "metric": metric,
                    "pause_time": pause_time,
                    "ordering": " > ".join(str(p) for p in ordered.index),
                }
            )
    return pd.DataFrame(records, columns=["metric", "pause_time", "ordering"])


def ordering_holds(
    values: Mapping[str, float], chain: Sequence[str], relations: Sequence[str]
) -> bool:
    """Check ``chain[0] rel[0] chain[1] rel[1] chain[2] ...`` on *values*.

    A protocol missing from *values* (or with a NaN) makes the check fail.
    """

    if len(relations) != len(chain) - 1:
        raise ValueError("need exactly one relation between consecutive protocols")
    for (left, right), rel in zip(zip(chain, chain[1:]), relations):
        a, b = values.get(left), values.get(right)
        if a is None or b is None or pd.isna(a) or pd.isna(b):
            return False
        if not _RELATIONS[rel](a, b):
            return False
    return True


def points_satisfying(
    frame: pd.DataFrame, metric: str, chain: Sequence[str], relations: Sequence[str]
) -> int:
    """Number of pause-time points at which the ordering holds for *metric*."""

    means = point_means(frame)[metric]
    count = 0
    for _, group in means.groupby(level="pause_time"):
        values = group.droplevel("pause_time").to_dict()
        if ordering_holds(values, chain, relations):
            count += 1
    return count


def format_rank(frame: pd.DataFrame) -> str:
    levels = level_table(frame).rename(columns=METRIC_TITLES)
    levels.index = [str(protocol).upper() for protocol in levels.index]
    orderings = point_orderings(frame)
    orderings["metric"] = orderings["metric"].map(METRIC_TITLES)
    return (
        "Performance comparison\n"
        + levels.to_string()
        + "\n\nOrdering per pause time (highest first)\n"
        + orderings.to_string(index=False)
        + "\n"
    )


__all__ = [
    "LEVELS",
    "METRICS",
    "format_rank",
    "level_table",
    "ordering_holds",
    "overall_means",
    "point_means",
    "point_orderings",
    "points_satisfying",
]
