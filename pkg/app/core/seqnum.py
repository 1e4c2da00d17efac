"""Sequence numbers: 32-bit unsigned values compared circularly."""

from __future__ import annotations

from enum import Enum

SEQNUM_BITS = 32
SEQNUM_MOD = 1 << SEQNUM_BITS
SEQNUM_MASK = SEQNUM_MOD - 1
_HALF = 1 << (SEQNUM_BITS - 1)


class Ordering(str, Enum):
    SUPERIOR = "Superior"
    SAME = "Same"
    INFERIOR = "Inferior"


def seqnum_compare(incoming: int, existing: int) -> Ordering:
    """Compare *incoming* against *existing* using signed 32-bit differences.

    The single ambiguous distance (exactly 2**31 apart) is resolved by numeric
    order so that the relation stays antisymmetric.
    """

    diff = (incoming - existing) & SEQNUM_MASK
    if diff == 0:
        return Ordering.SAME
    if diff == _HALF:
        return Ordering.SUPERIOR if incoming > existing else Ordering.INFERIOR
    return Ordering.SUPERIOR if diff < _HALF else Ordering.INFERIOR


def next_seqnum(value: int, step: int = 1) -> int:
    return (value + step) & SEQNUM_MASK


__all__ = [
    "SEQNUM_BITS",
    "SEQNUM_MOD",
    "SEQNUM_MASK",
    "Ordering",
    "seqnum_compare",
    "next_seqnum",
]
