"""The four performance metrics, computed from a packet trace."""

from __future__ import annotations

import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence

from pydantic import BaseModel, Field

from ..core.errors import ConfigError, MalformedTrace, NoDeliveredPackets
from ..core.messages import CONTROL_KINDS, MessageKind
from ..netsim.trace import TraceEvent, TraceRecord

logger = logging.getLogger(__name__)

_TERMINAL = (TraceEvent.RECV, TraceEvent.DROP)


class MetricsReport(BaseModel):
    protocol: str
    nodes: int
    pause_time: float
    seed: int
    duration: float
    pdf: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    aeed: Optional[float] = None
    ro: int = 0
    tp: float = 0.0
    data_sent: int = 0
    data_delivered: int = 0
    data_dropped: int = 0
    in_flight: int = 0


def _data_records(trace: Sequence[TraceRecord]) -> List[tuple[int, TraceRecord]]:
    return [(i, rec) for i, rec in enumerate(trace, start=1) if rec.kind is MessageKind.DATA]


def check_lifecycles(trace: Sequence[TraceRecord]) -> None:
    """Every Data packet has exactly one send and at most one terminal record.

    Only counts are checked, so records sharing a timestamp may appear in any
    order. Raises :class:`MalformedTrace` naming the first offending line.
    """

    sends: Counter[int] = Counter()
    terminals: Counter[int] = Counter()
    for line, rec in _data_records(trace):
        if rec.event is TraceEvent.SEND:
            sends[rec.msg_id] += 1
            if sends[rec.msg_id] > 1:
                raise MalformedTrace(f"packet {rec.msg_id} sent twice", line=line)
        elif rec.event in _TERMINAL:
            terminals[rec.msg_id] += 1
            if terminals[rec.msg_id] > 1:
                raise MalformedTrace(f"packet {rec.msg_id} terminated twice", line=line)
    for line, rec in _data_records(trace):
        if rec.msg_id not in sends:
            raise MalformedTrace(f"packet {rec.msg_id} was never sent", line=line)


def _send_times(trace: Iterable[TraceRecord]) -> Dict[int, float]:
    return {
        rec.msg_id: rec.time
        for rec in trace
        if rec.kind is MessageKind.DATA and rec.event is TraceEvent.SEND
    }


def _deliveries(trace: Iterable[TraceRecord]) -> List[TraceRecord]:
    return [
        rec
        for rec in trace
        if rec.kind is MessageKind.DATA and rec.event is TraceEvent.RECV and rec.node == rec.dst
    ]


def compute_pdf(trace: Sequence[TraceRecord]) -> Optional[float]:
    """Delivered over sent Data packets; ``None`` when nothing was sent."""

    check_lifecycles(trace)
    sent = len(_send_times(trace))
    if sent == 0:
        return None
    return len(_deliveries(trace)) / sent


def compute_aeed(trace: Sequence[TraceRecord]) -> float:
    """Mean source-send to destination-receive delay of delivered packets."""

    sent = _send_times(trace)
    delays = [rec.time - sent[rec.msg_id] for rec in _deliveries(trace) if rec.msg_id in sent]
    if not delays:
        raise NoDeliveredPackets("no Data packet reached its destination")
    return sum(delays) / len(delays)


def compute_ro(trace: Iterable[TraceRecord]) -> int:
    """Number of hop-wise routing-message transmissions."""

    return sum(
        1
        for rec in trace
        if rec.kind in CONTROL_KINDS and rec.event in (TraceEvent.SEND, TraceEvent.FORWARD)
    )


def compute_tp(trace: Iterable[TraceRecord], duration: float) -> float:
    """Delivered payload bits per second of scenario time."""

    if duration <= 0:
        raise ConfigError("must be > 0", field="duration")
    bits = sum(rec.size * 8 for rec in _deliveries(trace))
    return bits / duration


def build_report(
    trace: Sequence[TraceRecord],
    *,
    protocol: str,
    nodes: int,
    pause_time: float,
    seed: int,
    duration: float,
) -> MetricsReport:
    pdf = compute_pdf(trace)
    sent = len(_send_times(trace))
    delivered = len(_deliveries(trace))
    dropped = sum(
        1 for rec in trace if rec.kind is MessageKind.DATA and rec.event is TraceEvent.DROP
    )
    try:
        aeed: Optional[float] = compute_aeed(trace)
    except NoDeliveredPackets:
        aeed = None
    return MetricsReport(
        protocol=protocol,
        nodes=nodes,
        pause_time=pause_time,
        seed=seed,
        duration=duration,
        pdf=pdf,
        aeed=aeed,
        ro=compute_ro(trace),
        tp=compute_tp(trace, duration),
        data_sent=sent,
        data_delivered=delivered,
        data_dropped=dropped,
        in_flight=sent - delivered - dropped,
    )


__all__ = [
    "MetricsReport",
    "build_report",
    "check_lifecycles",
    "compute_aeed",
    "compute_pdf",
    "compute_ro",
    "compute_tp",
]
