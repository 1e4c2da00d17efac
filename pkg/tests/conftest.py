from __future__ import annotations

from typing import Callable, Dict, Iterable, Mapping, Tuple

import pytest

from app.netsim.scenario import Flow, Scenario, make_scenario

Point = Tuple[float, float]
StaticFactory = Callable[..., Scenario]

# 1-2-6-10 is the shortest path from 1 to 10; node 5 links 2 and 6 from below.
# The remaining nodes sit in a corner cluster out of reach of the path.
FIGURE_POSITIONS: Dict[int, Point] = {
    0: (50.0, 50.0),
    1: (50.0, 400.0),
    2: (250.0, 400.0),
    3: (100.0, 50.0),
    4: (50.0, 100.0),
    5: (350.0, 580.0),
    6: (450.0, 400.0),
    7: (100.0, 100.0),
    8: (150.0, 50.0),
    9: (150.0, 100.0),
    10: (650.0, 400.0),
}

# Out of 2's range, still within range of 5 and 10.
FIGURE_MOVED_SIX: Point = (500.0, 500.0)

# 0-1-2-3-4, 200 m apart: only consecutive nodes hear each other.
LINE_POSITIONS: Dict[int, Point] = {i: (200.0 * i, 400.0) for i in range(5)}


@pytest.fixture
def static_scenario() -> StaticFactory:
    """Build a motionless scenario from explicit positions and flows."""

    def build(
        positions: Mapping[int, Point],
        flows: Iterable[Flow] = (),
        *,
        protocol: str = "dymo",
        duration: float = 10.0,
        **extra: object,
    ) -> Scenario:
        return make_scenario(
            node_count=max(positions) + 1,
            positions=dict(positions),
            flows=tuple(flows),
            flow_count=0,
            protocol=protocol,
            duration=duration,
            pause_time=duration,
            **extra,
        )

    return build


@pytest.fixture
def figure_positions() -> Dict[int, Point]:
    return dict(FIGURE_POSITIONS)


@pytest.fixture
def moved_six() -> Point:
    return FIGURE_MOVED_SIX


@pytest.fixture
def line_positions() -> Dict[int, Point]:
    return dict(LINE_POSITIONS)
