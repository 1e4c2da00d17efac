"""Per-node routing state machines: DYMO and the AODV, DSDV and DSR baselines."""

from .actions import Broadcast, Deliver, Drop, DropReason, RouterAction, SetTimer, Unicast
from .aodv import AodvConfig, AodvRouter
from .base import Router
from .dsdv import DsdvConfig, DsdvRouter
from .dsr import DsrConfig, DsrRouteCache, DsrRouter
from .dymo import DymoConfig, DymoRouter, EnergyDecision
from .factory import PROTOCOLS, build_config, build_router

__all__ = [
    "AodvConfig",
    "AodvRouter",
    "Broadcast",
    "Deliver",
    "Drop",
    "DropReason",
    "DsdvConfig",
    "DsdvRouter",
    "DsrConfig",
    "DsrRouteCache",
    "DsrRouter",
    "DymoConfig",
    "DymoRouter",
    "EnergyDecision",
    "PROTOCOLS",
    "Router",
    "RouterAction",
    "SetTimer",
    "Unicast",
    "build_config",
    "build_router",
]
