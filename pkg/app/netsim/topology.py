"""Unit-disk connectivity graphs built with networkx."""

from __future__ import annotations

import itertools
import logging
import math
from typing import Dict, Mapping, Optional, Tuple

import networkx as nx

from ..core.errors import ConfigError
from .prng import Xoshiro256

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


def unit_disk_graph(positions: Mapping[int, Point], radio_range: float) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(positions)
    for a, b in itertools.combinations(sorted(positions), 2):
        if math.dist(positions[a], positions[b]) <= radio_range:
            graph.add_edge(a, b)
    return graph


def shortest_hops(graph: nx.Graph, src: int, dst: int) -> Optional[int]:
    try:
        return int(nx.shortest_path_length(graph, src, dst))
    except nx.NetworkXNoPath:
        return None


def random_connected_positions(
    node_count: int,
    field_x: float,
    field_y: float,
    radio_range: float,
    rng: Xoshiro256,
    *,
    max_attempts: int = 1000,
) -> Dict[int, Point]:
    """Uniform placements, redrawn until the unit-disk graph is connected."""

    for attempt in range(1, max_attempts + 1):
        positions = {
            node: (rng.uniform(0.0, field_x), rng.uniform(0.0, field_y))
            for node in range(node_count)
        }
        if nx.is_connected(unit_disk_graph(positions, radio_range)):
            logger.debug("connected placement found after %d attempts", attempt)
            return positions
    raise ConfigError(
        f"no connected placement of {node_count} nodes after {max_attempts} attempts",
        field="radio_range",
    )


def describe_connectivity(graph: nx.Graph) -> str:
    components = nx.number_connected_components(graph)
    degrees = [degree for _, degree in graph.degree()]
    mean_degree = sum(degrees) / len(degrees) if degrees else 0.0
    return (
        f"{graph.number_of_edges()} links, {components} components, "
        f"mean degree {mean_degree:.2f}"
    )


__all__ = [
    "describe_connectivity",
    "random_connected_positions",
    "shortest_hops",
    "unit_disk_graph",
]
