"""Protocol-neutral building blocks: sequence numbers, messages, tables, codec."""

from .codec import decode_message, encode_message, encoded_size
from .errors import (
    ConfigError,
    DecodeError,
    DecodeReason,
    DuplicateAddress,
    EncodeError,
    SimulationError,
)
from .messages import AddressBlock, Message, MessageKind, append_address
from .seqnum import Ordering, seqnum_compare
from .table import (
    RouteCandidate,
    RouteEntry,
    RouteState,
    RoutingTable,
    UpdateDecision,
    aodv_update_decision,
    route_update_decision,
)

__all__ = [
    "AddressBlock",
    "ConfigError",
    "DecodeError",
    "DecodeReason",
    "DuplicateAddress",
    "EncodeError",
    "Message",
    "MessageKind",
    "Ordering",
    "RouteCandidate",
    "RouteEntry",
    "RouteState",
    "RoutingTable",
    "SimulationError",
    "UpdateDecision",
    "aodv_update_decision",
    "append_address",
    "decode_message",
    "encode_message",
    "encoded_size",
    "route_update_decision",
    "seqnum_compare",
]
