"""Random-waypoint trajectories evaluated in closed form.

Each node's path is generated once, up front, as a list of linear legs. Pauses
are legs whose start and end points coincide, so :meth:`Trajectory.position_at`
is a binary search plus one interpolation.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence

import numpy as np

from .prng import StreamId, Xoshiro256, substream
from .scenario import Move, Scenario
from .topology import Point, random_connected_positions

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class Leg:
    start_time: float
    end_time: float
    origin: Point
    destination: Point

    def position_at(self, t: float) -> Point:
        span = self.end_time - self.start_time
        if span <= 0 or t >= self.end_time:
            return self.destination
        if t <= self.start_time:
            return self.origin
        frac = (t - self.start_time) / span
        x0, y0 = self.origin
        x1, y1 = self.destination
        return (x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac)


class Trajectory:
    """Piecewise-linear path; holds the last point after the final leg."""

    def __init__(self, legs: Sequence[Leg]) -> None:
        if not legs:
            raise ValueError("a trajectory needs at least one leg")
        self.legs = list(legs)
        self._starts = [leg.start_time for leg in self.legs]

    @classmethod
    def stationary(cls, point: Point) -> "Trajectory":
        return cls([Leg(0.0, 0.0, point, point)])

    def position_at(self, t: float) -> Point:
        idx = bisect.bisect_right(self._starts, t) - 1
        return self.legs[max(idx, 0)].position_at(t)

    def waypoints(self) -> List[Point]:
        return [leg.destination for leg in self.legs]

    def truncated(self, at: float, point: Point) -> "Trajectory":
        """Follow this path until *at*, then jump to *point* and stay there."""

        kept = [leg for leg in self.legs if leg.start_time < at]
        if kept and kept[-1].end_time > at:
            last = kept[-1]
            kept[-1] = Leg(last.start_time, at, last.origin, last.position_at(at))
        kept.append(Leg(at, at, point, point))
        return Trajectory(kept)


class RandomWaypoint:
    """Pause, pick a uniform waypoint, travel at a uniform speed, repeat."""

    def __init__(
        self,
        field_x: float,
        field_y: float,
        speed_min: float,
        speed_max: float,
        pause_time: float,
    ) -> None:
        self.field_x = field_x
        self.field_y = field_y
        self.speed_min = speed_min
        self.speed_max = speed_max
        self.pause_time = pause_time

    def random_point(self, rng: Xoshiro256) -> Point:
        return (rng.uniform(0.0, self.field_x), rng.uniform(0.0, self.field_y))

    def generate(self, start: Point, rng: Xoshiro256, duration: float) -> Trajectory:
        if self.pause_time >= duration:
            return Trajectory.stationary(start)
        legs: List[Leg] = []
        t = 0.0
        here = start
        while t < duration:
            if self.pause_time > 0:
                legs.append(Leg(t, t + self.pause_time, here, here))
                t += self.pause_time
                if t >= duration:
                    break
            target = self.random_point(rng)
            speed = rng.uniform(self.speed_min, self.speed_max)
            travel = math.dist(here, target) / speed
            legs.append(Leg(t, t + travel, here, target))
            t += travel
            here = target
        return Trajectory(legs)


class MobilityModel:
    """Positions of every node of a scenario at any time in ``[0, duration]``."""

    def __init__(self, scenario: Scenario) -> None:
        model = RandomWaypoint(
            scenario.field_x,
            scenario.field_y,
            scenario.speed_min,
            scenario.speed_max,
            scenario.pause_time,
        )
        placement = self._connected_placement(scenario) if scenario.connected else {}
        self.trajectories: List[Trajectory] = []
        for node in range(scenario.node_count):
            rng = substream(scenario.seed, StreamId.MOBILITY, node)
            start = scenario.positions.get(node)
            if start is None:
                start = placement.get(node) or model.random_point(rng)
            self.trajectories.append(model.generate(start, rng, scenario.duration))
        self._apply_moves(scenario.moves)
        self._cache_time = math.nan
        self._cache: np.ndarray = np.zeros((scenario.node_count, 2))

    @staticmethod
    def _connected_placement(scenario: Scenario) -> Dict[int, Point]:
        # index past the last node
        rng = substream(scenario.seed, StreamId.MOBILITY, scenario.node_count)
        return random_connected_positions(
            scenario.node_count,
            scenario.field_x,
            scenario.field_y,
            scenario.radio_range,
            rng,
        )

    def _apply_moves(self, moves: Iterable[Move]) -> None:
        for move in sorted(moves, key=lambda m: (m.time, m.node)):
            self.trajectories[move.node] = self.trajectories[move.node].truncated(
                move.time, (move.x, move.y)
            )

    def position_at(self, node: int, t: float) -> Point:
        return self.trajectories[node].position_at(t)

    def positions_at(self, t: float) -> np.ndarray:
        """``(node_count, 2)`` array of positions; the last result is cached."""

        if t != self._cache_time:
            self._cache = np.array(
                [trajectory.position_at(t) for trajectory in self.trajectories],
                dtype=float,
            )
            self._cache_time = t
        return self._cache

    def snapshot(self, t: float) -> Dict[int, Point]:
        return {node: self.position_at(node, t) for node in range(len(self.trajectories))}


__all__ = ["Leg", "Trajectory", "RandomWaypoint", "MobilityModel", "Point"]
