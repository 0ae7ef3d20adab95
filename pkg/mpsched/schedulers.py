"""Pull-based packet schedulers.

A scheduler is only ever asked, by a subflow whose congestion window has room, which index of
the shared send buffer it should transmit next. It never initiates a transmission itself.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar, Protocol

from .const import NS_PER_SECOND, SCHEDULER_FDPS, SCHEDULER_FIFO, SCHEDULER_RTT_HALF

if TYPE_CHECKING:
    from .fd_estimator import DelayDiffMatrix
    from .rng import RngStream
    from .units import SimTime

_LOGGER = logging.getLogger(__name__)


class DelayMatrix(Protocol):
    """Anything that answers pairwise forward-delay differences."""

    n_paths: int

    def delta_between(self, i: int, j: int, now: SimTime | None = None) -> float | None:
        """``T_i - T_j`` in nanoseconds, or None without an estimate."""


class PathStateView(Protocol):
    """Sender state a scheduler may read."""

    n_paths: int
    estimator: DelayDiffMatrix

    def srtt(self, path_id: int) -> SimTime | None:
        """Smoothed RTT of a path, None before its first sample."""

    def throughput(self, path_id: int) -> float:
        """Average throughput of a path in bytes per second."""


@dataclass(frozen=True, slots=True)
class SchedulerQuery:
    """A subflow asking for data."""

    requesting_path: int
    """Path whose window opened"""
    buffer_len: int
    """Segments available to the scheduler"""
    now: SimTime
    """Sender time of the query"""


@dataclass
class NegCountTable:
    """Per-path count of pairwise comparisons won."""

    counts: list[int] = field(default_factory=list)
    """Wins per path"""

    def argmax(self) -> int:
        """Path with the most wins, lowest index on ties."""
        best = 0
        for path_id, count in enumerate(self.counts):
            if count > self.counts[best]:
                best = path_id
        return best


def count_negatives(matrix: DelayMatrix, rng: RngStream, now: SimTime | None = None) -> NegCountTable:
    """Tally, over every pair i < j, which path has the shorter forward delay."""
    n_paths = matrix.n_paths
    table = NegCountTable([0] * n_paths)
    for i in range(n_paths):
        for j in range(i + 1, n_paths):
            delta = matrix.delta_between(i, j, now)
            if delta is None:
                continue
            if delta < 0:
                table.counts[i] += 1
            elif delta > 0:
                table.counts[j] += 1
            elif rng.bernoulli(0.5):
                table.counts[i] += 1
            else:
                table.counts[j] += 1
    return table


def find_shortest_fd_path(matrix: DelayMatrix, rng: RngStream, now: SimTime | None = None) -> int:
    """Path with the shortest estimated forward delay; path 0 when nothing is known."""
    return count_negatives(matrix, rng, now).argmax()


def fdps_pick_index(
    query: SchedulerQuery,
    matrix: DelayMatrix,
    best_path: int,
    x_star: float,
    mss: int,
) -> int:
    """
    Send-buffer index for the requesting path.

    The fastest path always takes the head of the buffer. A slower path skips the segments the
    fastest path will deliver while the slower path's packet is still travelling:
    ``floor(delta_seconds * x_star / mss)``, clamped into the buffer.

    Args:
    ----
        query (SchedulerQuery): the requesting subflow
        matrix (DelayMatrix): forward-delay differences
        best_path (int): shortest forward-delay path
        x_star (float): average throughput of ``best_path`` in bytes per second
        mss (int): segment size in bytes

    Returns:
    -------
        index: position in ``[0, query.buffer_len)``

    """
    if query.requesting_path == best_path:
        return 0
    delta = matrix.delta_between(query.requesting_path, best_path, query.now)
    if delta is None or delta <= 0 or x_star <= 0:
        return 0
    index = math.floor(delta * x_star / (NS_PER_SECOND * mss))
    return min(max(index, 0), query.buffer_len - 1)


class Scheduler(ABC):
    """Base pull scheduler."""

    name: ClassVar[str]

    def __init__(self) -> None:
        self._view: PathStateView | None = None
        self.queries = 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name}, queries={self.queries})"

    def bind(self, view: PathStateView) -> None:
        """Attach the sender whose buffer this scheduler serves."""
        self._view = view

    @property
    def view(self) -> PathStateView:
        if self._view is None:
            msg = f"scheduler {self.name} is not bound to a sender"
            raise RuntimeError(msg)
        return self._view

    def schedule(self, query: SchedulerQuery) -> int:
        """Answer one pull: the send-buffer index to transmit."""
        if query.buffer_len < 1:
            msg = f"query on path {query.requesting_path} with an empty buffer"
            raise ValueError(msg)
        self.queries += 1
        return self._select(query)

    @abstractmethod
    def _select(self, query: SchedulerQuery) -> int:
        """Pick an index for a non-empty buffer."""


class FifoScheduler(Scheduler):
    """Always the head of the buffer."""

    name = SCHEDULER_FIFO

    def _select(self, query: SchedulerQuery) -> int:  # noqa: ARG002
        return 0


class FdpsScheduler(Scheduler):
    """Shortest forward-delay path takes the head; slower paths skip ahead by their delay gap."""

    name = SCHEDULER_FDPS

    def __init__(self, mss: int, rng: RngStream) -> None:
        super().__init__()
        self.mss = mss
        self._rng = rng
        self._best_path = 0
        self._next_refresh: SimTime | None = None
        self.refreshes = 0

    def delay_matrix(self) -> DelayMatrix:
        """Differences used for path selection and index computation."""
        return self.view.estimator

    def best_path(self, now: SimTime) -> int:
        """Cached shortest forward-delay path, recomputed once per smallest path RTT."""
        if self._next_refresh is None or now >= self._next_refresh:
            view = self.view
            best_path = find_shortest_fd_path(self.delay_matrix(), self._rng, now)
            if best_path != self._best_path:
                _LOGGER.debug("%s: shortest forward-delay path %d -> %d at t=%d", self.name, self._best_path, best_path, now)
            self._best_path = best_path
            self.refreshes += 1
            rtts = [rtt for rtt in (view.srtt(path_id) for path_id in range(view.n_paths)) if rtt is not None]
            self._next_refresh = now + min(rtts) if rtts else now
        return self._best_path

    def _select(self, query: SchedulerQuery) -> int:
        best_path = self.best_path(query.now)
        return fdps_pick_index(
            query,
            self.delay_matrix(),
            best_path,
            self.view.throughput(best_path),
            self.mss,
        )


class RttHalfMatrix:
    """Forward-delay differences approximated as half the smoothed-RTT difference."""

    def __init__(self, view: PathStateView) -> None:
        self._view = view
        self.n_paths = view.n_paths

    def delta_between(self, i: int, j: int, now: SimTime | None = None) -> float | None:  # noqa: ARG002
        if i == j:
            return 0.0
        rtt_i = self._view.srtt(i)
        rtt_j = self._view.srtt(j)
        if rtt_i is None or rtt_j is None:
            return None
        return (rtt_i - rtt_j) / 2


class RttHalfScheduler(FdpsScheduler):
    """FDPS structure with RTT/2 standing in for the forward delay."""

    name = SCHEDULER_RTT_HALF

    def delay_matrix(self) -> DelayMatrix:
        return RttHalfMatrix(self.view)


def make_scheduler(name: str, mss: int, rng: RngStream) -> Scheduler:
    """Build a scheduler by its configured name."""
    if name == SCHEDULER_FIFO:
        return FifoScheduler()
    if name == SCHEDULER_FDPS:
        return FdpsScheduler(mss, rng)
    if name == SCHEDULER_RTT_HALF:
        return RttHalfScheduler(mss, rng)
    msg = f"unknown scheduler {name!r}"
    raise ValueError(msg)
