"""Deterministic discrete-event engine driving one router per node.

Events are ordered by ``(time, seq)``; ``seq`` is the insertion counter, so two
runs of the same scenario process events in the same order and emit the same
trace. The engine knows nothing protocol specific: it feeds routers inputs and
executes the :mod:`~app.routing.actions` they return.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional, Sequence, Set, Tuple

from ..core.errors import ConfigError, SimulationError
from ..core.messages import Message, MessageKind, msg_originator
from ..routing.actions import (
    Broadcast,
    Deliver,
    Drop,
    DropReason,
    RouterAction,
    SetTimer,
    Unicast,
)
from ..routing.base import Router
from ..routing.dymo import DEFAULT_ENERGY
from ..routing.factory import build_router
from .mobility import MobilityModel
from .prng import StreamId, substream
from .radio import Frame, LinkFailure, RadioMedium, TransmitQueue, frame_size, tx_time
from .scenario import Scenario
from .topology import describe_connectivity, unit_disk_graph
from .trace import TraceEvent, TraceRecord
from .traffic import CbrSource, cbr_emit

logger = logging.getLogger(__name__)

Probe = Callable[[float, int, Message, int], None]


class EventKind(IntEnum):
    TX_COMPLETE = 1
    RECEIVE = 2
    TIMER_FIRE = 3
    TRAFFIC_EMIT = 4
    LINK_BREAK = 5
    SIM_END = 6


@dataclass(order=True, slots=True)
class Event:
    time: float
    seq: int
    kind: EventKind = field(compare=False)
    node: int = field(compare=False, default=-1)
    payload: Any = field(compare=False, default=None)


class EventQueue:
    """Min-heap on ``(time, seq)`` that refuses to schedule into the past."""

    def __init__(self) -> None:
        self._heap: List[Event] = []
        self._seq = 0
        self.now = 0.0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, time: float, kind: EventKind, node: int = -1, payload: Any = None) -> Event:
        if time < self.now:
            raise SimulationError(f"event at {time:.6f} scheduled before now={self.now:.6f}")
        event = Event(time, self._seq, kind, node, payload)
        self._seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> Event:
        event = heapq.heappop(self._heap)
        self.now = event.time
        return event


@dataclass(slots=True)
class SimulationResult:
    scenario: Scenario
    trace: List[TraceRecord]
    routers: List[Router]
    paths: Dict[int, List[int]]
    in_flight: Set[int]
    events_processed: int = 0


class Simulation:
    def __init__(self, scenario: Scenario, probe: Optional[Probe] = None) -> None:
        self.scenario = scenario
        self.probe = probe
        self.events = EventQueue()
        self.mobility = MobilityModel(scenario)
        self.radio = RadioMedium(self.mobility, scenario.radio_range, scenario.bitrate)
        self.routers: List[Router] = [
            build_router(
                scenario.protocol,
                node,
                overrides=scenario.protocol_config,
                energy=scenario.energies.get(node, DEFAULT_ENERGY),
                rng=substream(scenario.seed, StreamId.PROTOCOL, node),
            )
            for node in range(scenario.node_count)
        ]
        self.queues = [
            TransmitQueue(scenario.queue_capacity) for _ in range(scenario.node_count)
        ]
        self.sources = [
            CbrSource.for_flow(flow, scenario.duration) for flow in scenario.resolved_flows()
        ]
        self.trace: List[TraceRecord] = []
        self.paths: Dict[int, List[int]] = {}
        self._open_data: Set[int] = set()

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------
    def run(self) -> SimulationResult:
        scenario = self.scenario
        logger.info(
            "Running %s with %d nodes, seed=%d, duration=%.1fs, %d flows",
            scenario.protocol,
            scenario.node_count,
            scenario.seed,
            scenario.duration,
            len(self.sources),
        )
        graph = unit_disk_graph(self.mobility.snapshot(0.0), scenario.radio_range)
        logger.info("Initial topology: %s", describe_connectivity(graph))

        for node, router in enumerate(self.routers):
            self._execute(node, router.on_tick(0.0), 0.0)
        for index, source in enumerate(self.sources):
            first = source.emission(0)
            if first is not None:
                self.events.push(first, EventKind.TRAFFIC_EMIT, source.flow.src, (index, 0))
        self.events.push(scenario.duration, EventKind.SIM_END)

        processed = 0
        while self.events:
            event = self.events.pop()
            processed += 1
            if event.kind is EventKind.SIM_END:
                break
            self._dispatch(event)

        logger.info(
            "Finished %s seed=%d: %d events, %d trace records, %d packets in flight",
            scenario.protocol,
            scenario.seed,
            processed,
            len(self.trace),
            len(self._open_data),
        )
        return SimulationResult(
            scenario=scenario,
            trace=self.trace,
            routers=self.routers,
            paths=self.paths,
            in_flight=set(self._open_data),
            events_processed=processed,
        )

    # ------------------------------------------------------------------
    # Event handlers
    # ------------------------------------------------------------------
    def _dispatch(self, event: Event) -> None:
        now = event.time
        node = event.node
        kind = event.kind
        if kind is EventKind.TRAFFIC_EMIT:
            self._emit(node, event.payload, now)
        elif kind is EventKind.RECEIVE:
            msg, sender = event.payload
            self._receive(node, msg, sender, now)
        elif kind is EventKind.TX_COMPLETE:
            self._tx_complete(node, now)
        elif kind is EventKind.LINK_BREAK:
            neighbor, failed = event.payload
            logger.debug("t=%.6f node %d: unicast to %d failed", now, node, neighbor)
            self._execute(node, self.routers[node].on_link_break(neighbor, now, failed), now)
        elif kind is EventKind.TIMER_FIRE:
            self._execute(node, self.routers[node].on_timer(now, event.payload), now)

    def _emit(self, node: int, payload: Tuple[int, int], now: float) -> None:
        index, k = payload
        source = self.sources[index]
        router = self.routers[node]
        packet, next_time = cbr_emit(source, k, router.next_msg_id(), self.scenario.data_ttl)
        if next_time is not None:
            self.events.push(next_time, EventKind.TRAFFIC_EMIT, node, (index, k + 1))

        self._record(TraceEvent.SEND, node, packet, now)
        self.paths[packet.msg_id] = [node]
        self._open_data.add(packet.msg_id)
        if packet.target == node:
            self._record(TraceEvent.RECV, node, packet, now)
            self._open_data.discard(packet.msg_id)
            return
        self._execute(node, router.on_data(packet, now), now)

    def _receive(self, node: int, msg: Message, sender: int, now: float) -> None:
        if self.probe is not None:
            self.probe(now, node, msg, sender)
        if msg.kind is MessageKind.DATA and msg.msg_id in self.paths:
            self.paths[msg.msg_id].append(node)
        self._execute(node, self.routers[node].process_message(msg, sender, now), now)

    def _tx_complete(self, node: int, now: float) -> None:
        queue = self.queues[node]
        queue.busy = False
        frame = queue.pop()
        if frame is not None:
            self._start_tx(node, frame, now)

    # ------------------------------------------------------------------
    # Action execution
    # ------------------------------------------------------------------
    def _execute(self, node: int, actions: Sequence[RouterAction], now: float) -> None:
        for action in actions:
            if isinstance(action, Broadcast):
                self._transmit(node, Frame(action.message), now)
            elif isinstance(action, Unicast):
                if action.next_hop == node:
                    raise ConfigError(
                        f"router {node} asked to transmit to itself", field="next_hop"
                    )
                self._transmit(node, Frame(action.message, action.next_hop), now)
            elif isinstance(action, Deliver):
                self._record(TraceEvent.RECV, node, action.message, now)
                self._open_data.discard(action.message.msg_id)
            elif isinstance(action, Drop):
                self._record(TraceEvent.DROP, node, action.message, now, action.reason)
                self._open_data.discard(action.message.msg_id)
            elif isinstance(action, SetTimer):
                self.events.push(max(action.time, now), EventKind.TIMER_FIRE, node, action.tag)

    def _transmit(self, node: int, frame: Frame, now: float) -> None:
        queue = self.queues[node]
        if not queue.busy:
            self._start_tx(node, frame, now)
        elif not queue.enqueue(frame):
            self._record(TraceEvent.DROP, node, frame.message, now, DropReason.DROP_TAIL)
            self._open_data.discard(frame.message.msg_id)

    def _start_tx(self, node: int, frame: Frame, now: float) -> None:
        msg = frame.message
        queue = self.queues[node]
        queue.busy = True
        if msg.kind.is_control:
            event = TraceEvent.SEND if msg_originator(msg.msg_id) == node else TraceEvent.FORWARD
            self._record(event, node, msg, now)
        elif msg.orig != node:
            self._record(TraceEvent.FORWARD, node, msg, now)

        size = frame.size
        if frame.next_hop is None:
            for reception in self.radio.broadcast(node, size, now):
                self.events.push(
                    reception.time, EventKind.RECEIVE, reception.receiver, (msg, node)
                )
        else:
            outcome = self.radio.unicast(node, frame.next_hop, size, now)
            if isinstance(outcome, LinkFailure):
                self.events.push(
                    outcome.time, EventKind.LINK_BREAK, node, (outcome.neighbor, msg)
                )
            else:
                self.events.push(
                    outcome.time, EventKind.RECEIVE, outcome.receiver, (msg, node)
                )
        self.events.push(now + tx_time(size, self.radio.bitrate), EventKind.TX_COMPLETE, node)

    def _record(
        self,
        event: TraceEvent,
        node: int,
        msg: Message,
        now: float,
        reason: Optional[DropReason] = None,
    ) -> None:
        size = msg.payload_size if msg.kind is MessageKind.DATA else frame_size(msg)
        self.trace.append(
            TraceRecord(
                time=now,
                event=event,
                node=node,
                msg_id=msg.msg_id,
                kind=msg.kind,
                size=size,
                src=msg.orig,
                dst=msg.target,
                drop_reason=reason,
            )
        )


def run(scenario: Scenario, probe: Optional[Probe] = None) -> SimulationResult:
    """Simulate *scenario* from t=0 to its duration and return the trace and final state."""

    return Simulation(scenario, probe).run()


__all__ = [
    "Event",
    "EventKind",
    "EventQueue",
    "Probe",
    "Simulation",
    "SimulationResult",
    "run",
]
