"""Discrete-event engine, links, queues and packet forwarding."""

from __future__ import annotations

import heapq
import logging
import struct
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from functools import partial
from hashlib import blake2b
from typing import TYPE_CHECKING

from .commons import SimulationContractError
from .const import (
    RED_MAX_DROP_PROB,
    RED_MAX_FRAC,
    RED_MIN_FRAC,
)
from .units import SimTime, serialization_time

if TYPE_CHECKING:
    from collections.abc import Callable

    from .rng import RngStream

_LOGGER = logging.getLogger(__name__)

_TRACE_RECORD = struct.Struct("<qqB")


class EventKind(IntEnum):
    """What an event stands for; part of the trace digest."""

    PACKET_ARRIVAL = 1
    TIMER_EXPIRY = 2
    APP_DATA_AVAILABLE = 3


@dataclass(order=True, slots=True)
class Event:
    """Pending simulator event, ordered by ``(fire_at, seq_no)``."""

    fire_at: SimTime
    """Dispatch time"""
    seq_no: int
    """Insertion sequence, breaks ties between equal ``fire_at``"""
    kind: EventKind = field(compare=False)
    """Event kind"""
    action: Callable[[], None] = field(compare=False, repr=False)
    """Callback run on dispatch"""


class Simulator:
    """Single-threaded event loop over integer-nanosecond time."""

    def __init__(self) -> None:
        self.now: SimTime = 0
        self.dispatched = 0
        self._queue: list[Event] = []
        self._next_seq = 0
        self._digest = blake2b(digest_size=16)

    def event(self, fire_at: SimTime, kind: EventKind, action: Callable[[], None]) -> Event:
        """Create an event stamped with the next insertion sequence number."""
        event = Event(fire_at, self._next_seq, kind, action)
        self._next_seq += 1
        return event

    def schedule(self, event: Event) -> None:
        """Add ``event`` to the pending set."""
        if event.fire_at < self.now:
            msg = f"event {event.kind.name} scheduled at {event.fire_at} before now={self.now}"
            raise SimulationContractError(msg)
        heapq.heappush(self._queue, event)

    def schedule_at(self, fire_at: SimTime, kind: EventKind, action: Callable[[], None]) -> Event:
        """Create and schedule an event at an absolute time."""
        event = self.event(fire_at, kind, action)
        self.schedule(event)
        return event

    def schedule_after(self, delay: SimTime, kind: EventKind, action: Callable[[], None]) -> Event:
        """Create and schedule an event ``delay`` after now."""
        return self.schedule_at(self.now + delay, kind, action)

    @property
    def pending(self) -> int:
        """Number of events not yet dispatched."""
        return len(self._queue)

    @property
    def trace_digest(self) -> str:
        """Digest over every dispatched ``(fire_at, seq_no, kind)``."""
        return self._digest.hexdigest()

    def run_until(self, end: SimTime) -> int:
        """
        Dispatch every event with ``fire_at <= end``.

        Args:
        ----
            end (SimTime): inclusive horizon

        Returns:
        -------
            count: number of events dispatched by this call

        """
        queue = self._queue
        count = 0
        while queue and queue[0].fire_at <= end:
            event = heapq.heappop(queue)
            self.now = event.fire_at
            self._digest.update(_TRACE_RECORD.pack(event.fire_at, event.seq_no, event.kind))
            event.action()
            count += 1
        self.now = max(self.now, end)
        self.dispatched += count
        _LOGGER.debug("Dispatched %d events up to t=%d ns, %d pending", count, end, len(queue))
        return count


class QueuePolicy(ABC):
    """Active queue management curve."""

    @abstractmethod
    def drop_probability(self, occupancy: int, capacity: int) -> float:
        """Drop probability for an arrival that finds ``occupancy`` bytes queued."""


@dataclass
class DropTail(QueuePolicy):
    """Drop only on overflow."""

    def drop_probability(self, occupancy: int, capacity: int) -> float:  # noqa: ARG002
        return 0.0


@dataclass
class SimpleRed(QueuePolicy):
    """RED on the instantaneous queue length, gentle mode off."""

    min_frac: float = RED_MIN_FRAC
    """Below ``min_frac * capacity`` nothing is dropped"""
    max_frac: float = RED_MAX_FRAC
    """At ``max_frac * capacity`` the drop probability reaches ``max_drop_prob``"""
    max_drop_prob: float = RED_MAX_DROP_PROB
    """Drop probability at the upper threshold"""

    def __post_init__(self) -> None:
        if not 0 <= self.min_frac < self.max_frac <= 1:
            msg = f"need 0 <= min_frac < max_frac <= 1, got {self.min_frac}, {self.max_frac}"
            raise ValueError(msg)
        if not 0 <= self.max_drop_prob <= 1:
            msg = f"max_drop_prob must be in [0, 1], got {self.max_drop_prob}"
            raise ValueError(msg)

    def drop_probability(self, occupancy: int, capacity: int) -> float:
        low = self.min_frac * capacity
        high = self.max_frac * capacity
        if occupancy < low:
            return 0.0
        if occupancy > high:
            return 1.0
        return self.max_drop_prob * (occupancy - low) / (high - low)


@dataclass
class QueueDiscipline:
    """Byte-bounded FIFO queue with a drop policy."""

    capacity_bytes: int
    """Hard limit on queued bytes"""
    policy: QueuePolicy = field(default_factory=DropTail)
    """Early drop curve"""

    def admit(self, occupancy: int, size: int, rng: RngStream | None) -> bool:
        """Decide whether an arriving packet of ``size`` bytes is queued."""
        if occupancy + size > self.capacity_bytes:
            return False
        probability = self.policy.drop_probability(occupancy, self.capacity_bytes)
        if probability <= 0.0:
            return True
        if probability >= 1.0 or rng is None:
            return False
        return rng.uniform() >= probability


class Direction(IntEnum):
    """Link direction relative to the MPTCP sender."""

    FORWARD = 0
    BACKWARD = 1


class Link:
    """Store-and-forward FIFO link: queue, serializer and propagation delay."""

    def __init__(  # noqa: PLR0913
        self,
        name: str,
        bandwidth: int,
        prop_delay: SimTime,
        queue: QueueDiscipline,
        direction: Direction = Direction.FORWARD,
        rng: RngStream | None = None,
    ) -> None:
        if bandwidth <= 0:
            msg = f"link {name}: bandwidth must be positive, got {bandwidth}"
            raise ValueError(msg)
        if prop_delay < 0:
            msg = f"link {name}: prop_delay must be non-negative, got {prop_delay}"
            raise ValueError(msg)
        self.name = name
        self.bandwidth = bandwidth
        self.prop_delay = prop_delay
        self.queue = queue
        self.direction = direction
        self._rng = rng
        self._backlog: deque[tuple[SimTime, int]] = deque()
        self._occupancy = 0
        self._last_departure: SimTime = 0
        self._last_enqueue: SimTime = 0
        self.max_occupancy = 0
        self.accepted = 0
        self.dropped = 0

    def __repr__(self) -> str:
        return f"Link({self.name}, {self.bandwidth} B/s, {self.prop_delay} ns, cap={self.queue.capacity_bytes})"

    def occupancy(self, now: SimTime) -> int:
        """Bytes queued or in service at ``now``."""
        backlog = self._backlog
        while backlog and backlog[0][0] <= now:
            self._occupancy -= backlog.popleft()[1]
        return self._occupancy

    def transmit(self, packet_size: int, enqueue_time: SimTime) -> SimTime | None:
        """
        Offer a packet to the link.

        Args:
        ----
            packet_size (int): bytes on the wire
            enqueue_time (SimTime): arrival time at the queue

        Returns:
        -------
            arrival: time the last bit reaches the far end, or None when the queue drops it

        """
        if packet_size <= 0:
            msg = f"link {self.name}: packet size must be positive, got {packet_size}"
            raise SimulationContractError(msg)
        if enqueue_time < self._last_enqueue:
            msg = f"link {self.name}: enqueue at {enqueue_time} precedes {self._last_enqueue}"
            raise SimulationContractError(msg)
        self._last_enqueue = enqueue_time
        occupancy = self.occupancy(enqueue_time)
        if not self.queue.admit(occupancy, packet_size, self._rng):
            self.dropped += 1
            return None
        departure = max(self._last_departure, enqueue_time) + serialization_time(packet_size, self.bandwidth)
        self._last_departure = departure
        self._backlog.append((departure, packet_size))
        self._occupancy = occupancy + packet_size
        self.max_occupancy = max(self.max_occupancy, self._occupancy)
        self.accepted += 1
        return departure + self.prop_delay


def link_transmit(link: Link, packet_size: int, enqueue_time: SimTime) -> SimTime | None:
    """Offer one packet to ``link``; None means dropped."""
    return link.transmit(packet_size, enqueue_time)


@dataclass(frozen=True)
class Route:
    """Ordered hops a packet crosses."""

    links: tuple[Link, ...]
    """Hops from source to destination"""

    def propagation_delay(self) -> SimTime:
        """Sum of hop propagation delays."""
        return sum(link.prop_delay for link in self.links)


@dataclass
class LedgerCounts:
    """Packet counters for one category."""

    injected: int = 0
    """Packets handed to the network"""
    delivered: int = 0
    """Packets that reached their destination"""
    dropped: int = 0
    """Packets dropped by a queue"""
    in_flight: int = 0
    """Packets still between hops"""

    def reconciles(self) -> bool:
        """Every injected packet is delivered, dropped or in flight."""
        return self.in_flight >= 0 and self.injected == self.delivered + self.dropped + self.in_flight


class PacketLedger:
    """Conservation bookkeeping per packet category."""

    def __init__(self) -> None:
        self.counts: dict[str, LedgerCounts] = {}

    def __getitem__(self, category: str) -> LedgerCounts:
        return self.counts.setdefault(category, LedgerCounts())

    def inject(self, category: str) -> None:
        counts = self[category]
        counts.injected += 1
        counts.in_flight += 1

    def deliver(self, category: str) -> None:
        counts = self[category]
        counts.delivered += 1
        counts.in_flight -= 1

    def drop(self, category: str) -> None:
        counts = self[category]
        counts.dropped += 1
        counts.in_flight -= 1

    def reconciles(self) -> bool:
        """All categories reconcile."""
        return all(counts.reconciles() for counts in self.counts.values())


class Network:
    """Moves packets hop by hop over routes, one arrival event per hop."""

    def __init__(self, sim: Simulator) -> None:
        self.sim = sim
        self.ledger = PacketLedger()

    def send(
        self,
        route: Route,
        size: int,
        category: str,
        deliver: Callable[[], None],
        on_drop: Callable[[], None] | None = None,
    ) -> None:
        """Inject a packet at ``now``; ``deliver`` runs when it leaves the last hop."""
        self.ledger.inject(category)
        self._hop(route.links, 0, size, category, deliver, on_drop)

    def _hop(  # noqa: PLR0913
        self,
        links: tuple[Link, ...],
        index: int,
        size: int,
        category: str,
        deliver: Callable[[], None],
        on_drop: Callable[[], None] | None,
    ) -> None:
        arrival = links[index].transmit(size, self.sim.now)
        if arrival is None:
            self.ledger.drop(category)
            if on_drop is not None:
                on_drop()
            return
        if index + 1 == len(links):
            self.sim.schedule_at(arrival, EventKind.PACKET_ARRIVAL, partial(self._arrive, category, deliver))
        else:
            self.sim.schedule_at(
                arrival,
                EventKind.PACKET_ARRIVAL,
                partial(self._hop, links, index + 1, size, category, deliver, on_drop),
            )

    def _arrive(self, category: str, deliver: Callable[[], None]) -> None:
        self.ledger.deliver(category)
        deliver()
