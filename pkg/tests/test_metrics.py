from __future__ import annotations

import io
import itertools
import math
import random
from typing import List

import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.backend.pipeline import report_for
from app.core.errors import ConfigError, EmptyInput, MalformedTrace, NoDeliveredPackets
from app.core.messages import Message, MessageKind
from app.metrics.aggregate import aggregate, aggregate_groups
from app.metrics.compute import (
    MetricsReport,
    build_report,
    check_lifecycles,
    compute_aeed,
    compute_pdf,
    compute_ro,
    compute_tp,
)
from app.metrics.csvio import (
    AGG_SEED,
    RUN_COLUMNS,
    STD_COLUMNS,
    read_sweep_csv,
    write_aggregate_csv,
    write_runs_csv,
)
from app.metrics.ranking import (
    format_rank,
    level_table,
    ordering_holds,
    point_orderings,
    points_satisfying,
)
from app.netsim.engine import run
from app.netsim.radio import frame_size, tx_time
from app.netsim.scenario import Flow
from app.netsim.trace import TraceEvent, TraceRecord
from app.routing.actions import DropReason

S, F, R, D = TraceEvent.SEND, TraceEvent.FORWARD, TraceEvent.RECV, TraceEvent.DROP


def _data(time: float, event: TraceEvent, node: int, msg_id: int, **extra: object) -> TraceRecord:
    return TraceRecord(
        time, event, node, msg_id, MessageKind.DATA, 512, 0, 3, **extra  # type: ignore[arg-type]
    )


def _control(time: float, event: TraceEvent, node: int, msg_id: int) -> TraceRecord:
    return TraceRecord(time, event, node, msg_id, MessageKind.RREQ, 23, 0, 3)


def _delivered(count: int, *, sent_at: float = 0.0, delay: float = 0.25) -> List[TraceRecord]:
    trace: List[TraceRecord] = []
    for msg_id in range(1, count + 1):
        trace.append(_data(sent_at, S, 0, msg_id))
        trace.append(_data(sent_at + delay, R, 3, msg_id))
    return trace


# ----------------------------------------------------------------------
# Per-run metrics
# ----------------------------------------------------------------------
def test_pdf_counts_deliveries_over_sends() -> None:
    trace = _delivered(19)
    trace += [_data(0.0, S, 0, 20), _data(0.1, D, 1, 20, drop_reason=DropReason.NO_ROUTE)]
    assert compute_pdf(trace) == pytest.approx(0.95)


def test_pdf_is_undefined_without_sends() -> None:
    assert compute_pdf([_control(0.0, S, 0, 1)]) is None


def test_relay_receptions_are_not_deliveries() -> None:
    trace = [_data(0.0, S, 0, 1), _data(0.1, R, 1, 1), _data(0.1, F, 1, 1)]
    assert compute_pdf(trace) == 0.0


def test_aeed_averages_delivered_delays() -> None:
    assert compute_aeed(_delivered(4)) == pytest.approx(0.25)
    trace = [
        _data(1.0, S, 0, 1),
        _data(1.1, R, 3, 1),
        _data(2.0, S, 0, 2),
        _data(2.3, R, 3, 2),
    ]
    assert compute_aeed(trace) == pytest.approx(0.2)


def test_aeed_needs_a_delivery() -> None:
    with pytest.raises(NoDeliveredPackets):
        compute_aeed([_data(0.0, S, 0, 1)])


def test_ro_counts_control_transmissions_only() -> None:
    trace = [_control(0.0, S, 0, 9)] + [_control(0.1, F, n, 9) for n in range(1, 6)]
    trace += [TraceRecord(0.2, R, 1, 9, MessageKind.RREQ, 23, 0, 3)]
    assert compute_ro(trace) == 6
    assert compute_ro(_delivered(5)) == 0


def test_tp_is_delivered_bits_per_second() -> None:
    assert compute_tp(_delivered(10), 1.0) == 40960.0
    assert compute_tp([_data(0.0, S, 0, 1)], 1.0) == 0.0
    with pytest.raises(ConfigError):
        compute_tp([], 0.0)


def test_double_send_names_the_line() -> None:
    trace = [_data(0.0, S, 0, 1), _control(0.0, S, 0, 2), _data(0.1, S, 0, 1)]
    with pytest.raises(MalformedTrace) as info:
        check_lifecycles(trace)
    assert info.value.line == 3


def test_terminal_without_send_is_rejected() -> None:
    with pytest.raises(MalformedTrace) as info:
        check_lifecycles([_data(0.1, R, 3, 7)])
    assert info.value.line == 1


def test_build_report_fills_counts() -> None:
    trace = _delivered(3) + [_data(0.5, S, 0, 4)]
    report = build_report(trace, protocol="dymo", nodes=4, pause_time=0.0, seed=1, duration=10.0)
    assert report.pdf == pytest.approx(0.75)
    assert report.data_sent == 4
    assert report.data_delivered == 3
    assert report.in_flight == 1
    assert report.aeed == pytest.approx(0.25)


# ----------------------------------------------------------------------
# Aggregation
# ----------------------------------------------------------------------
def _report(
    pdf: float | None, *, seed: int = 1, protocol: str = "dymo", ro: int = 10
) -> MetricsReport:
    return MetricsReport(
        protocol=protocol,
        nodes=60,
        pause_time=0.0,
        seed=seed,
        duration=100.0,
        pdf=pdf,
        aeed=None if pdf is None else 0.1,
        ro=ro,
        tp=1000.0,
    )


def test_identical_values_have_zero_spread() -> None:
    result = aggregate([_report(0.9, seed=s) for s in range(3)])
    assert result.pdf is not None
    assert result.pdf.mean == pytest.approx(0.9)
    assert result.pdf.std == 0.0
    assert result.runs == 3


def test_sample_standard_deviation() -> None:
    result = aggregate([_report(0.8, seed=1), _report(1.0, seed=2)])
    assert result.pdf is not None
    assert result.pdf.mean == pytest.approx(0.9)
    assert result.pdf.std == pytest.approx(math.sqrt(0.02))


def test_undefined_pdf_is_excluded_and_counted() -> None:
    result = aggregate([_report(None, seed=1), _report(0.5, seed=2)])
    assert result.pdf_excluded == 1
    assert result.pdf is not None and result.pdf.count == 1


def test_aggregate_rejects_empty_and_mixed_input() -> None:
    with pytest.raises(EmptyInput):
        aggregate([])
    with pytest.raises(ConfigError):
        aggregate([_report(0.9), _report(0.9, protocol="aodv")])


def test_groups_keep_first_seen_order() -> None:
    reports = [_report(0.9, protocol="aodv"), _report(0.8), _report(0.7, protocol="aodv", seed=2)]
    assert [g.protocol for g in aggregate_groups(reports)] == ["aodv", "dymo"]


# ----------------------------------------------------------------------
# CSV and ranking
# ----------------------------------------------------------------------
def test_runs_csv_header_and_agg_rows(tmp_path) -> None:
    reports = [_report(0.8, seed=1), _report(1.0, seed=2)]
    buffer = io.StringIO()
    write_runs_csv(reports, buffer)
    assert buffer.getvalue().splitlines()[0] == ",".join(RUN_COLUMNS)

    path = tmp_path / "agg.csv"
    write_aggregate_csv(aggregate_groups(reports), path)
    frame = read_sweep_csv(path)
    assert list(frame.columns) == RUN_COLUMNS + STD_COLUMNS
    assert frame.loc[0, "seed"] == AGG_SEED
    assert frame.loc[0, "pdf"] == pytest.approx(0.9)


def test_read_sweep_csv_requires_columns(tmp_path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("protocol,nodes\ndymo,60\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_sweep_csv(path)


def _sweep_frame() -> pd.DataFrame:
    rows = []
    for pause_time, values in ((0.0, (0.9, 0.8, 0.7)), (20.0, (0.95, 0.9, 0.97))):
        for protocol, pdf in zip(("dymo", "aodv", "dsr"), values):
            rows.append(
                {
                    "protocol": protocol,
                    "nodes": 60,
                    "pause_time": pause_time,
                    "seed": "1",
                    "pdf": pdf,
                    "aeed_s": 0.1,
                    "ro": 100,
                    "tp_bps": 1000.0,
                    "sent": 10,
                    "delivered": 9,
                    "dropped": 1,
                }
            )
    rows.append({**rows[0], "seed": AGG_SEED, "pdf": 0.0})
    return pd.DataFrame(rows, columns=RUN_COLUMNS)


def test_level_table_ranks_by_mean() -> None:
    table = level_table(_sweep_frame())
    assert table.loc["dymo", "pdf"] == "High"
    assert table.loc["aodv", "pdf"] == "Medium"
    assert table.loc["dsr", "pdf"] == "Low"


def test_ordering_checks() -> None:
    values = {"dymo": 0.9, "aodv": 0.8, "dsr": 0.8}
    assert ordering_holds(values, ["dymo", "aodv", "dsr"], [">", ">="])
    assert not ordering_holds(values, ["dymo", "aodv", "dsr"], [">", ">"])
    assert not ordering_holds(values, ["dymo", "dsdv"], [">"])
    with pytest.raises(ValueError):
        ordering_holds(values, ["dymo", "aodv"], [])


def test_points_satisfying_counts_pause_times() -> None:
    frame = _sweep_frame()
    assert points_satisfying(frame, "pdf", ["dymo", "aodv"], [">"]) == 2
    assert points_satisfying(frame, "pdf", ["dymo", "dsr"], [">"]) == 1


def test_format_rank_has_both_tables() -> None:
    frame = _sweep_frame()
    text = format_rank(frame)
    assert text.startswith("Performance comparison")
    assert "DYMO" in text
    assert len(point_orderings(frame)) == 8


# ----------------------------------------------------------------------
# Trace properties
# ----------------------------------------------------------------------
@st.composite
def flow_traces(draw: st.DrawFn, src: int, dst: int, first_id: int) -> List[TraceRecord]:
    """One flow's records on a half-second grid, so equal timestamps are common."""

    size = draw(st.sampled_from([64, 512, 1500]))
    trace: List[TraceRecord] = []
    for msg_id in range(first_id, first_id + draw(st.integers(0, 12))):
        sent = draw(st.integers(0, 8)) / 2
        trace.append(TraceRecord(sent, S, src, msg_id, MessageKind.DATA, size, src, dst))
        outcome = draw(st.sampled_from(["delivered", "dropped", "in_flight"]))
        if outcome == "delivered":
            received = sent + draw(st.integers(0, 6)) / 4
            trace.append(TraceRecord(received, R, dst, msg_id, MessageKind.DATA, size, src, dst))
        elif outcome == "dropped":
            trace.append(
                TraceRecord(
                    sent + 0.5, D, src, msg_id, MessageKind.DATA, size, src, dst,
                    DropReason.NO_ROUTE,
                )
            )
    for offset in range(draw(st.integers(0, 4))):
        event = draw(st.sampled_from([S, F]))
        trace.append(_control(draw(st.integers(0, 8)) / 2, event, src, first_id + 500 + offset))
    return sorted(trace, key=lambda rec: rec.time)


def _trace_report(trace: List[TraceRecord], duration: float = 10.0) -> MetricsReport:
    return build_report(
        trace, protocol="dymo", nodes=5, pause_time=0.0, seed=1, duration=duration
    )


@settings(max_examples=300, deadline=None)
@given(flow_traces(0, 3, 1), st.randoms(use_true_random=False))
def test_pdf_ignores_order_among_simultaneous_records(
    trace: List[TraceRecord], rnd: random.Random
) -> None:
    groups = [list(group) for _, group in itertools.groupby(trace, key=lambda rec: rec.time)]
    for group in groups:
        rnd.shuffle(group)
    shuffled = [rec for group in groups for rec in group]
    assert compute_pdf(shuffled) == compute_pdf(trace)


@settings(max_examples=300, deadline=None)
@given(flow_traces(0, 3, 1), st.floats(min_value=0.5, max_value=100.0))
def test_throughput_never_exceeds_the_offered_load(
    trace: List[TraceRecord], duration: float
) -> None:
    offered = sum(
        rec.size * 8 for rec in trace if rec.kind is MessageKind.DATA and rec.event is S
    )
    assert compute_tp(trace, duration) <= offered / duration


@settings(max_examples=300, deadline=None)
@given(flow_traces(0, 3, 1), flow_traces(1, 4, 1000))
def test_two_flow_metrics_are_weighted_per_flow_metrics(
    first: List[TraceRecord], second: List[TraceRecord]
) -> None:
    a, b, both = _trace_report(first), _trace_report(second), _trace_report(first + second)

    assert both.data_sent == a.data_sent + b.data_sent
    assert both.data_delivered == a.data_delivered + b.data_delivered
    if both.data_sent == 0:
        assert both.pdf is None
    else:
        weighted = sum((r.pdf or 0.0) * r.data_sent for r in (a, b)) / both.data_sent
        assert both.pdf == pytest.approx(weighted)
    if both.data_delivered == 0:
        assert both.aeed is None
    else:
        weighted = sum((r.aeed or 0.0) * r.data_delivered for r in (a, b)) / both.data_delivered
        assert both.aeed == pytest.approx(weighted)
    assert both.ro == a.ro + b.ro
    assert both.tp == pytest.approx(a.tp + b.tp)


# ----------------------------------------------------------------------
# Metrics of engine runs
# ----------------------------------------------------------------------
def test_lossless_throughput_is_pdf_times_offered_rate(static_scenario) -> None:
    positions = {0: (100.0, 400.0), 1: (300.0, 400.0), 2: (500.0, 400.0)}
    flows = [Flow(src=0, dst=2, packet_size=512, interval=0.1, stop=8.0)]
    report = report_for(run(static_scenario(positions, flows, duration=10.0)))

    assert report.in_flight == 0
    assert report.pdf == 1.0
    offered = report.data_sent * 512 * 8 / report.duration
    assert report.tp == pytest.approx(report.pdf * offered)


def test_delay_includes_time_waiting_in_the_transmit_queue(static_scenario) -> None:
    # One packet sets up the route, then three packets leave node 0 at once.
    positions = {0: (100.0, 400.0), 1: (300.0, 400.0)}
    flows = [Flow(src=0, dst=1, stop=1.05)] + [
        Flow(src=0, dst=1, packet_size=1500, start=3.0, stop=3.05) for _ in range(3)
    ]
    result = run(static_scenario(positions, flows, duration=5.0))

    burst = {rec.msg_id for rec in result.trace if rec.event is S and rec.time == 3.0}
    assert len(burst) == 3
    records = [rec for rec in result.trace if rec.msg_id in burst]
    frame = frame_size(
        Message(kind=MessageKind.DATA, orig=0, target=1, ttl=32, payload_size=1500)
    )
    airtime = tx_time(frame, 2e6)
    # Delays are one, two and three airtimes: the later ones waited their turn.
    assert compute_aeed(records) == pytest.approx(2 * airtime)
