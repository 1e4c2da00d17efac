"""AODV baseline: DYMO without path accumulation, plus HELLO-based neighbour liveness."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import ClassVar, Dict, List, Optional

from ..core.messages import Message, MessageKind
from ..core.table import UpdatePolicy, aodv_update_decision
from .actions import Broadcast, RouterAction, SetTimer
from .base import UniformSource
from .dymo import DEFAULT_ENERGY, DymoConfig, DymoRouter

logger = logging.getLogger(__name__)

HELLO_TAG = "hello"


@dataclass(slots=True)
class AodvConfig(DymoConfig):
    hello_interval: float = 1.0
    allowed_hello_loss: int = 2


class AodvRouter(DymoRouter):
    """Route discovery learns only the originator; neighbours are tracked by HELLOs.

    A neighbour that stays silent for more than ``allowed_hello_loss`` HELLO
    intervals is treated exactly like a unicast failure towards it.
    """

    protocol = "aodv"
    update_policy: ClassVar[UpdatePolicy] = aodv_update_decision

    def __init__(
        self,
        node_id: int,
        config: Optional[AodvConfig] = None,
        *,
        energy: float = DEFAULT_ENERGY,
        rng: Optional[UniformSource] = None,
    ) -> None:
        cfg = config or AodvConfig()
        super().__init__(node_id, cfg, energy=energy)
        self.config: AodvConfig = cfg
        self.neighbors: Dict[int, float] = {}
        self.hellos_sent = 0
        self._rng = rng

    # ------------------------------------------------------------------
    # Router interface
    # ------------------------------------------------------------------
    def on_tick(self, now: float) -> List[RouterAction]:
        phase = self._rng.random() if self._rng is not None else 0.0
        return [SetTimer(now + phase * self.config.hello_interval, HELLO_TAG)]

    def process_message(self, msg: Message, sender: int, now: float) -> List[RouterAction]:
        self.neighbors[sender] = now
        return super().process_message(msg, sender, now)

    def on_timer(self, now: float, tag: Optional[str] = None) -> List[RouterAction]:
        actions: List[RouterAction] = []
        if tag == HELLO_TAG:
            actions.append(Broadcast(self._build_hello()))
            actions.append(SetTimer(now + self.config.hello_interval, HELLO_TAG))
            actions.extend(self._expire_neighbors(now))
        actions.extend(super().on_timer(now, tag))
        return actions

    def on_link_break(
        self, neighbor: int, now: float, failed: Optional[Message] = None
    ) -> List[RouterAction]:
        self.neighbors.pop(neighbor, None)
        return super().on_link_break(neighbor, now, failed)

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------
    def _learn(self, msg: Message, sender: int, now: float) -> None:
        # No accumulated blocks: only the originator becomes reachable.
        self._offer(msg.orig, sender, msg.orig_seqnum, msg.hop_count + 1, now)

    def _relay(self, msg: Message) -> Optional[Message]:
        return msg.replace(ttl=msg.ttl - 1, hop_count=min(msg.hop_count + 1, 255))

    def _build_hello(self) -> Message:
        self.hellos_sent += 1
        return Message(
            kind=MessageKind.HELLO,
            orig=self.node_id,
            orig_seqnum=self.own_seqnum,
            target=self.node_id,
            hop_count=0,
            ttl=1,
            msg_id=self.next_msg_id(),
        )

    def _expire_neighbors(self, now: float) -> List[RouterAction]:
        limit = self.config.allowed_hello_loss * self.config.hello_interval
        silent = sorted(n for n, heard in self.neighbors.items() if now - heard > limit)
        actions: List[RouterAction] = []
        for neighbor in silent:
            logger.debug("node %d missed HELLOs from %d", self.node_id, neighbor)
            actions.extend(self.on_link_break(neighbor, now))
        return actions


__all__ = ["AodvConfig", "AodvRouter", "HELLO_TAG"]
