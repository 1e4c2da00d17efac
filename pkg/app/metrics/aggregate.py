"""Multi-seed statistics over :class:`~app.metrics.compute.MetricsReport` values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ConfigError, EmptyInput
from .compute import MetricsReport


@dataclass(frozen=True, slots=True)
class MetricSummary:
    mean: float
    std: float
    min: float
    max: float
    count: int

    @classmethod
    def of(cls, values: Sequence[float]) -> Optional["MetricSummary"]:
        if not values:
            return None
        data = np.asarray(values, dtype=float)
        std = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
        return cls(
            mean=float(np.mean(data)),
            std=std,
            min=float(np.min(data)),
            max=float(np.max(data)),
            count=int(data.size),
        )


@dataclass(frozen=True, slots=True)
class AggregateReport:
    protocol: str
    nodes: int
    pause_time: float
    runs: int
    pdf: Optional[MetricSummary]
    aeed: Optional[MetricSummary]
    ro: MetricSummary
    tp: MetricSummary
    pdf_excluded: int
    data_sent: int
    data_delivered: int
    data_dropped: int


GroupKey = Tuple[str, int, float]


def _key(report: MetricsReport) -> GroupKey:
    return (report.protocol, report.nodes, report.pause_time)


def aggregate(reports: Sequence[MetricsReport]) -> AggregateReport:
    """Sample statistics of one scenario point across seeds.

    Undefined ``pdf`` values are left out and counted in ``pdf_excluded``;
    undefined delays are simply left out.
    """

    if not reports:
        raise EmptyInput("aggregate needs at least one report")
    keys = {_key(report) for report in reports}
    if len(keys) > 1:
        raise ConfigError("reports differ in more than the seed", field="reports")
    protocol, nodes, pause_time = keys.pop()
    pdfs = [r.pdf for r in reports if r.pdf is not None]
    aeeds = [r.aeed for r in reports if r.aeed is not None]
    ro = MetricSummary.of([float(r.ro) for r in reports])
    tp = MetricSummary.of([r.tp for r in reports])
    assert ro is not None and tp is not None
    return AggregateReport(
        protocol=protocol,
        nodes=nodes,
        pause_time=pause_time,
        runs=len(reports),
        pdf=MetricSummary.of(pdfs),
        aeed=MetricSummary.of(aeeds),
        ro=ro,
        tp=tp,
        pdf_excluded=len(reports) - len(pdfs),
        data_sent=sum(r.data_sent for r in reports),
        data_delivered=sum(r.data_delivered for r in reports),
        data_dropped=sum(r.data_dropped for r in reports),
    )


def aggregate_groups(reports: Iterable[MetricsReport]) -> List[AggregateReport]:
    """Aggregate per ``(protocol, nodes, pause_time)``, keeping first-seen order."""

    groups: Dict[GroupKey, List[MetricsReport]] = {}
    for report in reports:
        groups.setdefault(_key(report), []).append(report)
    return [aggregate(group) for group in groups.values()]


__all__ = ["AggregateReport", "MetricSummary", "aggregate", "aggregate_groups"]
