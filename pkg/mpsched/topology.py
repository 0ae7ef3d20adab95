"""Build links and routes for a scenario.

Every path has one shared bottleneck per direction. Each flow crossing a path, the MPTCP subflow
and every background flow alike, gets its own access and egress side links, so flows only meet in
the bottleneck queues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .const import QUEUE_RED, SIDE_QUEUE_BYTES, STREAM_QUEUE_BASE
from .rng import RngStream
from .sim_core import Direction, DropTail, Link, QueueDiscipline, Route, SimpleRed

if TYPE_CHECKING:
    from .scenario import PathSpec, QueueSpec, ScenarioConfig
    from .units import SimTime


def bdp_bytes(bandwidth: int, rtt: SimTime) -> int:
    """Bandwidth-delay product in bytes, rounded down.

    >>> bdp_bytes(500_000, 24_000_000)
    12000
    """
    return bandwidth * rtt // 1_000_000_000


def path_rtt(path: PathSpec) -> SimTime:
    """Uncongested propagation RTT of a path, side links included."""
    return path.forward.delay + path.reverse.delay + 4 * path.side_delay


def bottleneck_queue(spec: QueueSpec, bandwidth: int, rtt: SimTime, packet_size: int) -> QueueDiscipline:
    """Queue sized to the path BDP unless the scenario gives a capacity; never below one packet."""
    capacity = spec.capacity_bytes if spec.capacity_bytes is not None else bdp_bytes(bandwidth, rtt)
    capacity = max(capacity, packet_size)
    if spec.policy == QUEUE_RED:
        return QueueDiscipline(capacity, SimpleRed(spec.red_min_frac, spec.red_max_frac, spec.red_max_drop_prob))
    return QueueDiscipline(capacity, DropTail())


@dataclass
class FlowRoutes:
    """Routes for a single-path flow or one MPTCP subflow."""

    data: Route
    """Sender to receiver"""
    ack: Route
    """Receiver to sender"""


@dataclass
class PathLinks:
    """The two bottlenecks of one path and the routes of every flow crossing it."""

    forward: Link
    """Sender-side to receiver-side bottleneck"""
    backward: Link
    """Receiver-side to sender-side bottleneck"""
    mptcp: FlowRoutes
    """Routes of the MPTCP subflow"""
    background_fwd: list[FlowRoutes] = field(default_factory=list)
    """Competing flows sending in the forward direction"""
    background_bwd: list[FlowRoutes] = field(default_factory=list)
    """Competing flows sending in the backward direction"""


@dataclass
class Topology:
    """All links of a run."""

    paths: list[PathLinks]
    """Per path, in path id order"""
    links: list[Link] = field(default_factory=list)
    """Every link, bottlenecks and side links"""

    @property
    def forward_routes(self) -> list[Route]:
        return [path.mptcp.data for path in self.paths]

    @property
    def backward_routes(self) -> list[Route]:
        return [path.mptcp.ack for path in self.paths]

    @property
    def bottlenecks(self) -> list[Link]:
        return [link for path in self.paths for link in (path.forward, path.backward)]

    def queue_bounds_hold(self) -> bool:
        """No link ever held more bytes than its queue capacity."""
        return all(link.max_occupancy <= link.queue.capacity_bytes for link in self.links)


class _Builder:
    def __init__(self, cfg: ScenarioConfig, seed: int) -> None:
        self.cfg = cfg
        self.seed = seed
        self.links: list[Link] = []
        self._queues = 0

    def _link(self, name: str, bandwidth: int, delay: SimTime, queue: QueueDiscipline, direction: Direction) -> Link:
        rng = None
        if isinstance(queue.policy, SimpleRed):
            rng = RngStream(self.seed, STREAM_QUEUE_BASE + self._queues)
            self._queues += 1
        link = Link(name, bandwidth, delay, queue, direction, rng)
        self.links.append(link)
        return link

    def _side(self, name: str, bottleneck: Link, path: PathSpec) -> Link:
        bandwidth = max(1, math.floor(bottleneck.bandwidth * path.side_bandwidth_factor))
        return self._link(name, bandwidth, path.side_delay, QueueDiscipline(SIDE_QUEUE_BYTES), bottleneck.direction)

    def _flow(self, name: str, data_over: Link, ack_over: Link, path: PathSpec) -> FlowRoutes:
        data = Route(
            (self._side(f"{name}.data.in", data_over, path), data_over, self._side(f"{name}.data.out", data_over, path))
        )
        ack = Route(
            (self._side(f"{name}.ack.in", ack_over, path), ack_over, self._side(f"{name}.ack.out", ack_over, path))
        )
        return FlowRoutes(data, ack)

    def path(self, path_id: int, path: PathSpec) -> PathLinks:
        rtt = path_rtt(path)
        packet_size = self.cfg.packet_size
        forward = self._link(
            f"p{path_id}.fwd",
            path.forward.bandwidth,
            path.forward.delay,
            bottleneck_queue(path.queue, path.forward.bandwidth, rtt, packet_size),
            Direction.FORWARD,
        )
        backward = self._link(
            f"p{path_id}.bwd",
            path.reverse.bandwidth,
            path.reverse.delay,
            bottleneck_queue(path.queue, path.reverse.bandwidth, rtt, packet_size),
            Direction.BACKWARD,
        )
        links = PathLinks(forward, backward, self._flow(f"p{path_id}.mptcp", forward, backward, path))
        for k in range(path.background_flows_fwd):
            links.background_fwd.append(self._flow(f"p{path_id}.bgf{k}", forward, backward, path))
        for k in range(path.background_flows_bwd):
            links.background_bwd.append(self._flow(f"p{path_id}.bgb{k}", backward, forward, path))
        return links


def build_topology(cfg: ScenarioConfig, seed: int) -> Topology:
    """
    Create the links of one run.

    Args:
    ----
        cfg (ScenarioConfig): scenario
        seed (int): run seed, feeds the RED drop streams

    Returns:
    -------
        topology: per-path bottlenecks and flow routes

    """
    builder = _Builder(cfg, seed)
    paths = [builder.path(path_id, path) for path_id, path in enumerate(cfg.paths)]
    return Topology(paths, builder.links)
