from __future__ import annotations

from app.core.messages import AddressBlock, Message, MessageKind
from app.core.table import RouteCandidate
from app.netsim.prng import StreamId, substream
from app.routing.actions import Broadcast, Drop, DropReason, SetTimer, Unicast
from app.routing.aodv import HELLO_TAG, AodvRouter
from app.routing.dsdv import INFINITE_METRIC, DsdvRouter
from app.routing.dsr import DsrRouteCache, DsrRouter
from app.routing.dymo import DymoRouter


def _rreq_via_2() -> Message:
    return Message(
        kind=MessageKind.RREQ,
        orig=1,
        orig_seqnum=1,
        target=10,
        hop_count=1,
        ttl=31,
        accumulated=(AddressBlock(2, 0, 0),),
    )


def _data(orig: int = 0, target: int = 3) -> Message:
    return Message(kind=MessageKind.DATA, orig=orig, target=target, ttl=32, payload_size=512)


# ----------------------------------------------------------------------
# AODV
# ----------------------------------------------------------------------
def test_aodv_learns_only_the_originator() -> None:
    aodv = AodvRouter(6)
    relayed = [a for a in aodv.process_message(_rreq_via_2(), 2, 1.0) if isinstance(a, Broadcast)]
    assert aodv.known_destinations(1.0) == {1}
    assert relayed[0].message.accumulated == _rreq_via_2().accumulated
    assert relayed[0].message.hop_count == 2

    dymo = DymoRouter(6)
    dymo.process_message(_rreq_via_2(), 2, 1.0)
    assert dymo.known_destinations(1.0) == {1, 2}


def test_aodv_hello_timer_rearms() -> None:
    aodv = AodvRouter(0, rng=substream(1, StreamId.PROTOCOL, 0))
    (first,) = aodv.on_tick(0.0)
    assert isinstance(first, SetTimer) and 0.0 <= first.time < 1.0
    actions = aodv.on_timer(first.time, HELLO_TAG)
    hello = actions[0].message  # type: ignore[union-attr]
    assert hello.kind is MessageKind.HELLO and hello.ttl == 1
    assert SetTimer(first.time + 1.0, HELLO_TAG) in actions
    assert aodv.hellos_sent == 1


def test_aodv_two_missed_hellos_break_the_link() -> None:
    aodv = AodvRouter(0)
    aodv.process_message(Message(kind=MessageKind.HELLO, orig=5, target=5, ttl=1), 5, 0.0)
    rreq = Message(kind=MessageKind.RREQ, orig=5, orig_seqnum=3, target=9, ttl=32)
    aodv.process_message(rreq, 5, 0.1)
    assert aodv.known_destinations(0.1) == {5}

    quiet = aodv.on_timer(1.9, HELLO_TAG)
    assert not [a for a in quiet if isinstance(a, Broadcast) and a.message.kind is MessageKind.RERR]

    actions = aodv.on_timer(2.5, HELLO_TAG)
    rerrs = [
        a.message
        for a in actions
        if isinstance(a, Broadcast) and a.message.kind is MessageKind.RERR
    ]
    assert len(rerrs) == 1 and rerrs[0].unreachable == ((5, 3),)
    assert 5 not in aodv.neighbors
    assert aodv.known_destinations(2.5) == set()


def test_aodv_prefers_shorter_path_with_same_seqnum() -> None:
    aodv, dymo = AodvRouter(0), DymoRouter(0)
    for router in (aodv, dymo):
        router.table.offer(RouteCandidate(9, 1, 4, 3), 0.0, 5.0)
        router.table.offer(RouteCandidate(9, 2, 4, 2), 0.1, 5.0)
    assert aodv.table.get(9).next_hop == 2  # type: ignore[union-attr]
    assert dymo.table.get(9).next_hop == 1  # type: ignore[union-attr]


# ----------------------------------------------------------------------
# DSDV
# ----------------------------------------------------------------------
def _update(orig: int, *rows: tuple[int, int, int]) -> Message:
    return Message(
        kind=MessageKind.TABLE_UPDATE,
        orig=orig,
        target=orig,
        ttl=1,
        accumulated=tuple(AddressBlock(*row) for row in rows),
    )


def test_dsdv_full_dump_advertises_even_seqnum() -> None:
    router = DsdvRouter(4)
    actions = router.on_timer(0.0, "dump")
    dump = actions[0].message  # type: ignore[union-attr]
    assert dump.kind is MessageKind.TABLE_UPDATE
    assert dump.accumulated[0] == AddressBlock(4, 2, 0)
    assert router.dumps_sent == 1
    assert SetTimer(15.0, "dump") in actions


def test_dsdv_installs_neighbor_rows_and_triggers_update() -> None:
    router = DsdvRouter(1)
    actions = router.process_message(_update(2, (2, 2, 0), (3, 4, 1)), 2, 1.0)
    assert router.known_destinations(1.0) == {2, 3}
    assert router.routes[3].metric == 2 and router.routes[3].next_hop == 2
    triggered = actions[0].message  # type: ignore[union-attr]
    assert triggered.addresses == (2, 3)


def test_dsdv_prefers_newer_then_shorter() -> None:
    router = DsdvRouter(1)
    router.process_message(_update(2, (9, 4, 3)), 2, 1.0)
    router.process_message(_update(5, (9, 4, 1)), 5, 1.1)
    assert router.routes[9].next_hop == 5
    router.process_message(_update(2, (9, 6, 4)), 2, 1.2)
    assert router.routes[9].next_hop == 2 and router.routes[9].seqnum == 6
    assert router.process_message(_update(5, (9, 6, 1)), 5, 1.3)
    assert router.routes[9].next_hop == 5


def test_dsdv_link_break_propagates_odd_seqnum() -> None:
    middle, downstream = DsdvRouter(1), DsdvRouter(0)
    middle.process_message(_update(2, (2, 2, 0)), 2, 1.0)
    downstream.process_message(_update(1, (1, 2, 0), (2, 2, 1)), 1, 1.1)
    assert downstream.known_destinations(1.1) == {1, 2}

    actions = middle.on_link_break(2, 5.0)
    broken = actions[0].message  # type: ignore[union-attr]
    assert broken.accumulated == (AddressBlock(2, 3, INFINITE_METRIC),)

    downstream.process_message(broken, 1, 5.001)
    assert downstream.known_destinations(5.001) == {1}


def test_dsdv_buffers_until_route_appears() -> None:
    router = DsdvRouter(0)
    packet = _data(0, 3)
    actions = router.on_data(packet, 1.0)
    assert actions == [SetTimer(16.0, "buffer")]
    flushed = router.process_message(_update(1, (1, 2, 0), (3, 2, 2)), 1, 2.0)
    assert Unicast(packet, 1) in flushed


def test_dsdv_buffered_packets_expire() -> None:
    router = DsdvRouter(0)
    packet = _data(0, 3)
    router.on_data(packet, 1.0)
    assert router.on_timer(16.0, "buffer") == [Drop(packet, DropReason.NO_ROUTE)]


# ----------------------------------------------------------------------
# DSR
# ----------------------------------------------------------------------
def test_dsr_cache_stores_prefixes_and_prefers_short_routes() -> None:
    cache = DsrRouteCache(0)
    assert cache.add((0, 2, 4, 3)) == 3
    assert cache.add((0, 1, 3)) == 2
    assert cache.best(3) == (0, 1, 3)
    assert cache.routes(3) == [(0, 2, 4, 3), (0, 1, 3)]
    assert cache.destinations() == {1, 2, 3, 4}


def test_dsr_cache_rejects_foreign_or_looping_paths() -> None:
    cache = DsrRouteCache(0)
    assert cache.add((1, 2)) == 0
    assert cache.add((0, 1, 0)) == 0
    assert cache.size() == 0


def test_dsr_cache_only_shrinks_on_link_removal() -> None:
    cache = DsrRouteCache(0)
    cache.add((0, 1, 3))
    cache.add((0, 2, 4, 3))
    before = cache.size()
    assert cache.remove_link(1, 0) == 2
    assert cache.size() == before - 2
    assert cache.best(3) == (0, 2, 4, 3)


def test_dsr_falls_back_to_second_cached_route_without_rreq() -> None:
    router = DsrRouter(0)
    router.cache.add((0, 1, 3))
    router.cache.add((0, 2, 4, 3))
    (first,) = router.on_data(_data(), 1.0)
    assert isinstance(first, Unicast) and first.next_hop == 1
    assert first.message.addresses == (0, 1, 3)

    (retry,) = router.on_link_break(1, 1.01, failed=first.message)
    assert isinstance(retry, Unicast) and retry.next_hop == 2
    assert retry.message.addresses == (0, 2, 4, 3)
    assert router.rreq_originations == 0


def test_dsr_target_answers_every_copy_with_the_full_path() -> None:
    router = DsrRouter(3)
    copies = [
        Message(
            kind=MessageKind.RREQ,
            orig=0,
            orig_seqnum=1,
            target=3,
            ttl=30,
            accumulated=(AddressBlock(a), AddressBlock(b)),
        )
        for a, b in ((1, 2), (4, 5))
    ]
    replies = [router.process_message(rreq, rreq.addresses[-1], 1.0)[0] for rreq in copies]
    assert [r.next_hop for r in replies] == [2, 5]  # type: ignore[union-attr]
    assert [r.message.addresses for r in replies] == [(1, 2), (4, 5)]  # type: ignore[union-attr]
    assert router.cache.best(0) in {(3, 2, 1, 0), (3, 5, 4, 0)}


def test_dsr_source_learns_route_from_reply() -> None:
    router = DsrRouter(0)
    router.on_data(_data(), 1.0)
    rrep = Message(
        kind=MessageKind.RREP,
        orig=3,
        target=0,
        ttl=32,
        accumulated=(AddressBlock(1), AddressBlock(2)),
    )
    (sent,) = router.process_message(rrep, 1, 1.01)
    assert isinstance(sent, Unicast) and sent.next_hop == 1
    assert sent.message.addresses == (0, 1, 2, 3)


def test_dsr_forwarder_reports_broken_link_to_source() -> None:
    router = DsrRouter(1)
    routed = _data().replace(accumulated=(AddressBlock(0), AddressBlock(1), AddressBlock(3)))
    forwarded = router.process_message(routed, 0, 1.0)
    assert forwarded == [Unicast(routed.replace(ttl=31, hop_count=1), 3)]

    failed = forwarded[0].message  # type: ignore[union-attr]
    actions = router.on_link_break(3, 1.01, failed=failed)
    assert actions[0] == Drop(failed, DropReason.LINK_BREAK)
    rerr = actions[1]
    assert isinstance(rerr, Unicast) and rerr.next_hop == 0
    assert rerr.message.unreachable == ((3, None),)
    assert router.cache.best(3) is None
