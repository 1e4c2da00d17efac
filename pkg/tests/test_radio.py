from __future__ import annotations

import pytest

from app.core.errors import ConfigError
from app.core.messages import Message, MessageKind
from app.netsim.mobility import MobilityModel
from app.netsim.radio import (
    Frame,
    LinkFailure,
    RadioMedium,
    Reception,
    TransmitQueue,
    frame_size,
    tx_time,
)
from app.netsim.scenario import make_scenario


@pytest.fixture
def radio() -> RadioMedium:
    scenario = make_scenario(
        node_count=3,
        duration=10,
        pause_time=10,
        positions={0: (0.0, 0.0), 1: (250.0, 0.0), 2: (0.0, 250.1)},
    )
    return RadioMedium(MobilityModel(scenario), scenario.radio_range, scenario.bitrate)


def _data(size: int = 512) -> Message:
    return Message(kind=MessageKind.DATA, orig=0, target=1, ttl=32, payload_size=size)


def test_tx_time_of_530_byte_frame() -> None:
    assert tx_time(530, 2_000_000) == pytest.approx(0.00212)


def test_frame_size_counts_header_and_payload() -> None:
    assert frame_size(_data(512)) == 23 + 512
    assert Frame(_data(512)).is_broadcast


def test_range_boundary_is_inclusive(radio: RadioMedium) -> None:
    assert radio.neighbors(0, 0.0) == [1]
    assert radio.in_range(0, 1, 0.0)
    assert not radio.in_range(0, 2, 0.0)


def test_broadcast_reaches_neighbors_after_tx_time(radio: RadioMedium) -> None:
    receptions = radio.broadcast(0, 535, now=1.0)
    assert receptions == [Reception(1, 1.0 + tx_time(535, 2_000_000))]


def test_unicast_in_range_is_received_once(radio: RadioMedium) -> None:
    outcome = radio.unicast(0, 1, 535, now=0.0)
    assert isinstance(outcome, Reception)
    assert outcome.receiver == 1


def test_unicast_out_of_range_fails(radio: RadioMedium) -> None:
    outcome = radio.unicast(0, 2, 535, now=0.0)
    assert isinstance(outcome, LinkFailure)
    assert outcome.neighbor == 2


def test_unicast_to_self_is_a_config_error(radio: RadioMedium) -> None:
    with pytest.raises(ConfigError):
        radio.unicast(0, 0, 535, now=0.0)


def test_queue_drops_tail_when_full() -> None:
    queue = TransmitQueue(capacity=15)
    frames = [Frame(_data(), 1) for _ in range(16)]
    assert all(queue.enqueue(frame) for frame in frames[:15])
    assert not queue.enqueue(frames[15])
    assert len(queue) == 15
    assert queue.pop() is frames[0]
