"""MPTCP sender and receiver models.

The sender keeps one shared send buffer of MSS-sized segments and one congestion-controlled
subflow per path. Whenever a subflow's window has room for another segment it pulls one from
the buffer, asking the scheduler which index to take. Every data packet is acknowledged
individually; the ACK echoes the packet's sending timestamp next to the receiver's arrival
timestamp, which is all the forward-delay estimator needs.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from functools import partial
from typing import TYPE_CHECKING, NamedTuple

from .commons import SimulationContractError
from .const import (
    CATEGORY_ACK,
    CATEGORY_DATA,
    DUPACK_THRESHOLD,
    INITIAL_CWND_SEGMENTS,
    INITIAL_SSTHRESH_BYTES,
    RTO_INITIAL_NS,
    RTO_MAX_NS,
    RTO_MIN_NS,
    RTTVAR_GAIN,
    SRTT_GAIN,
    STALE_SRTT_MULTIPLE,
    THROUGHPUT_GAIN,
)
from .fd_estimator import DelayDiffMatrix, PathSample
from .packets import AckPacket, DataPacket
from .reorder_metrics import ArrivalRecord
from .schedulers import Scheduler, SchedulerQuery
from .sim_core import EventKind, Network, Route, Simulator
from .units import SimTime, to_seconds

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

_LOGGER = logging.getLogger(__name__)

# Longest contiguous run reported in a single SACK block.
SACK_BLOCK_SPAN_LIMIT = 64


@dataclass(slots=True)
class SentSegment:
    """A segment a subflow has put on the wire and not yet seen acknowledged."""

    data_seq: int
    """Connection-level sequence"""
    subflow_seq: int
    """Subflow-level sequence"""
    path_id: int
    """Owning subflow"""
    ts_sent: SimTime
    """Time of the latest (re)transmission"""
    is_retransmission: bool = False
    """Latest transmission was a retransmission"""
    in_pipe: bool = True
    """Counted in the subflow's inflight bytes"""
    sacked: bool = False
    """Selectively acknowledged"""
    lost: bool = False
    """Declared lost and waiting for retransmission"""
    tx_order: int = 0
    """Position of the latest transmission among all transmissions on the subflow"""


class SendBuffer:
    """Shared buffer of unsent segments, refilled by a greedy application.

    Index ``k`` is the k-th unsent segment. Taking a segment closes the gap. Retransmissions are
    held in front of the shared segments, pinned to the subflow that lost them.
    """

    def __init__(self, capacity: int, app_limit: int | None = None) -> None:
        if capacity < 1:
            msg = f"send buffer needs room for at least one segment, got {capacity}"
            raise ValueError(msg)
        self.capacity = capacity
        self.app_limit = app_limit
        self._segments: list[int] = []
        self._next_new_seq = 0
        self._retransmissions: dict[int, list[SentSegment]] = {}
        self.refill()

    def __len__(self) -> int:
        return len(self._segments)

    def __repr__(self) -> str:
        return f"SendBuffer({len(self._segments)}/{self.capacity}, head={self.head_data_seq})"

    @property
    def head_data_seq(self) -> int:
        """data_seq at index 0."""
        return self._segments[0] if self._segments else self._next_new_seq

    @property
    def segments(self) -> tuple[int, ...]:
        """Unsent data_seq values by index."""
        return tuple(self._segments)

    def refill(self) -> None:
        """Top the buffer up with new application data."""
        while len(self._segments) < self.capacity and (
            self.app_limit is None or self._next_new_seq < self.app_limit
        ):
            self._segments.append(self._next_new_seq)
            self._next_new_seq += 1

    def take(self, index: int) -> int:
        """Remove and return the data_seq at ``index``; later segments shift down."""
        if not 0 <= index < len(self._segments):
            msg = f"index {index} outside send buffer of length {len(self._segments)}"
            raise SimulationContractError(msg)
        data_seq = self._segments.pop(index)
        self.refill()
        return data_seq

    def requeue(self, path_id: int, segment: SentSegment) -> None:
        """Put a lost segment back at the front, reserved for its own subflow."""
        pending = self._retransmissions.setdefault(path_id, [])
        bisect.insort(pending, segment, key=lambda queued: queued.subflow_seq)

    def pending_retransmissions(self, path_id: int) -> int:
        return len(self._retransmissions.get(path_id, ()))

    def take_retransmission(self, path_id: int) -> SentSegment | None:
        """Oldest segment waiting for retransmission on ``path_id``."""
        pending = self._retransmissions.get(path_id)
        if not pending:
            return None
        return pending.pop(0)


class AckOutcome(NamedTuple):
    """What a subflow learned from one ACK."""

    stale: bool
    newly_acked: int
    sample_eligible: bool
    fast_retransmit: SentSegment | None
    lost: list[SentSegment]


class Subflow:
    """Per-path congestion control, RTT and loss recovery state.

    Window and inflight are counted in MSS payload bytes. Inflight excludes segments that were
    selectively acknowledged or declared lost and not yet retransmitted. Loss recovery is
    SACK-based: a segment is lost once a later transmission on the same path is delivered.
    """

    def __init__(
        self,
        path_id: int,
        mss: int,
        packet_size: int,
        initial_cwnd_segments: int = INITIAL_CWND_SEGMENTS,
    ) -> None:
        self.path_id = path_id
        self.mss = mss
        self.packet_size = packet_size
        self.cwnd = initial_cwnd_segments * mss
        self.ssthresh = INITIAL_SSTHRESH_BYTES
        self.srtt: SimTime | None = None
        self.rttvar: SimTime = 0
        self.rto: SimTime = RTO_INITIAL_NS
        self.rto_deadline: SimTime | None = None
        self.timer_pending = False
        self.inflight = 0
        self.avg_throughput_x = 0.0
        self.snd_una = 0
        self.snd_nxt = 0
        self.outstanding: dict[int, SentSegment] = {}
        self.dupacks = 0
        self.in_recovery = False
        self.recover = 0
        self.high_delivered_tx = -1
        self._rto_rearmed = False
        self.transmissions = 0
        self.retransmissions = 0
        self.fast_retransmits = 0
        self.timeouts = 0
        self.stale_acks = 0
        self.duplicate_acks = 0
        self._last_ack_at: SimTime | None = None
        self._unrated_bytes = 0

    def __repr__(self) -> str:
        return (
            f"Subflow(p{self.path_id} cwnd={self.cwnd} ssthresh={self.ssthresh} "
            f"inflight={self.inflight} srtt={self.srtt} x={self.avg_throughput_x:.0f})"
        )

    def can_send(self) -> bool:
        """Window has room for one more segment."""
        return self.cwnd - self.inflight >= self.mss

    def register_send(self, data_seq: int, now: SimTime) -> SentSegment:
        """Account for a first transmission."""
        segment = SentSegment(data_seq, self.snd_nxt, self.path_id, now, tx_order=self.transmissions)
        self.outstanding[segment.subflow_seq] = segment
        self.snd_nxt += 1
        self.inflight += self.mss
        self.transmissions += 1
        if self.rto_deadline is None:
            self.rto_deadline = now + self.rto
        return segment

    def register_retransmit(self, segment: SentSegment, now: SimTime) -> None:
        """Account for a retransmission; the segment gets a fresh timestamp."""
        segment.ts_sent = now
        segment.is_retransmission = True
        segment.tx_order = self.transmissions
        segment.lost = False
        if not segment.in_pipe:
            segment.in_pipe = True
            self.inflight += self.mss
        self.transmissions += 1
        self.retransmissions += 1
        if self.rto_deadline is None:
            self.rto_deadline = now + self.rto

    def is_outstanding(self, segment: SentSegment) -> bool:
        """Segment still needs delivering."""
        return self.outstanding.get(segment.subflow_seq) is segment and not segment.sacked

    def _leave_pipe(self, segment: SentSegment) -> None:
        if segment.in_pipe:
            segment.in_pipe = False
            self.inflight -= self.mss

    def _flight_size(self) -> int:
        return sum(self.mss for segment in self.outstanding.values() if not segment.sacked)

    def update_rtt(self, sample: SimTime) -> None:
        """Exponentially smoothed RTT (gains 1/8 and 1/4); the first sample is taken as is."""
        if self.srtt is None:
            self.srtt = sample
            self.rttvar = sample // 2
        else:
            self.rttvar += round((abs(self.srtt - sample) - self.rttvar) * RTTVAR_GAIN)
            self.srtt += round((sample - self.srtt) * SRTT_GAIN)
        self.rto = min(max(self.srtt + 4 * self.rttvar, RTO_MIN_NS), RTO_MAX_NS)

    def update_throughput(self, acked_wire_bytes: int, now: SimTime) -> None:
        """EWMA of the per-ACK delivery rate in bytes per second."""
        if self._last_ack_at is None:
            self._last_ack_at = now
            if self.srtt:
                self.avg_throughput_x = (self.cwnd / self.mss) * self.packet_size / to_seconds(self.srtt)
            return
        self._unrated_bytes += acked_wire_bytes
        elapsed = now - self._last_ack_at
        if elapsed <= 0:
            return
        rate = self._unrated_bytes / to_seconds(elapsed)
        self.avg_throughput_x += THROUGHPUT_GAIN * (rate - self.avg_throughput_x)
        self._unrated_bytes = 0
        self._last_ack_at = now

    def on_ack(self, ack: AckPacket, now: SimTime) -> AckOutcome:  # noqa: C901, PLR0912
        """
        Process one ACK: retire segments, grow or cut the window, detect losses.

        Links never reorder packets, so once a transmission is known delivered, every earlier
        transmission on this subflow that is still unacknowledged was dropped. Recovery declares
        all of them lost at once, including retransmissions that were lost again.

        Args:
        ----
            ack (AckPacket): acknowledgement received on this path
            now (SimTime): sender clock

        Returns:
        -------
            outcome: newly acknowledged segment count, estimator eligibility and
                segments to retransmit

        """
        if ack.cum_subflow_ack < self.snd_una:
            self.stale_acks += 1
            return AckOutcome(stale=True, newly_acked=0, sample_eligible=False, fast_retransmit=None, lost=[])
        if ack.duplicate:
            self.duplicate_acks += 1

        echoed = self.outstanding.get(ack.echo_subflow_seq)
        if echoed is not None and echoed.ts_sent == ack.echo_ts_sent:
            self.high_delivered_tx = max(self.high_delivered_tx, echoed.tx_order)

        newly = 0
        advanced = ack.cum_subflow_ack > self.snd_una
        for subflow_seq in range(self.snd_una, ack.cum_subflow_ack):
            segment = self.outstanding.pop(subflow_seq, None)
            if segment is not None and not segment.sacked:
                newly += 1
                self._leave_pipe(segment)
        self.snd_una = max(self.snd_una, ack.cum_subflow_ack)
        echoed = self.outstanding.get(ack.echo_subflow_seq)
        if echoed is not None:
            newly += self._sack(echoed)
        if self.in_recovery or ack.echo_subflow_seq > self.snd_una:
            newly += self._sack_delivered_data(ack)

        sample_eligible = not ack.duplicate and not ack.echo_retransmission and newly > 0
        if sample_eligible:
            self.update_rtt(now - ack.echo_ts_sent)
        if newly:
            self.update_throughput(newly * self.packet_size, now)

        fast_retransmit = None
        lost: list[SentSegment] = []
        if advanced:
            self.dupacks = 0
            if self.in_recovery and self.snd_una >= self.recover:
                self.in_recovery = False
                self.cwnd = max(self.ssthresh, self.mss)
        elif self.snd_una in self.outstanding:
            self.dupacks += 1
            if self.dupacks >= DUPACK_THRESHOLD and not self.in_recovery:
                lost = self._enter_fast_recovery()
                if lost:
                    fast_retransmit = lost.pop(0)
        if self.in_recovery and fast_retransmit is None:
            lost = self._declare_losses()

        if newly and not self.in_recovery:
            for _ in range(newly):
                if self.cwnd < self.ssthresh:
                    self.cwnd += self.mss
                else:
                    self.cwnd += max(1, self.mss * self.mss // self.cwnd)

        # During recovery only the first partial ACK pushes the timer back.
        if not self.outstanding:
            self.rto_deadline = None
        elif advanced and not (self.in_recovery and self._rto_rearmed):
            self.rto_deadline = now + self.rto
            self._rto_rearmed = self.in_recovery
        return AckOutcome(
            stale=False,
            newly_acked=newly,
            sample_eligible=sample_eligible,
            fast_retransmit=fast_retransmit,
            lost=lost,
        )

    def _sack(self, segment: SentSegment) -> int:
        if segment.sacked:
            return 0
        segment.sacked = True
        self._leave_pipe(segment)
        return 1

    def _sack_delivered_data(self, ack: AckPacket) -> int:
        """SACK segments the receiver reports at connection level, covering ACKs lost on the way back."""
        newly = 0
        for segment in self.outstanding.values():
            if segment.sacked:
                continue
            data_seq = segment.data_seq
            if data_seq < ack.cum_data_ack or any(low <= data_seq <= high for low, high in ack.sack_ranges):
                newly += self._sack(segment)
        return newly

    def _is_lost(self, segment: SentSegment) -> bool:
        return not segment.sacked and not segment.lost and segment.tx_order < self.high_delivered_tx

    def _declare_losses(self) -> list[SentSegment]:
        """Mark lost every transmission older than the latest delivered one, in subflow order."""
        lost = [segment for segment in self.outstanding.values() if self._is_lost(segment)]
        for segment in lost:
            segment.lost = True
            self._leave_pipe(segment)
        return lost

    def _enter_fast_recovery(self) -> list[SentSegment]:
        if not any(self._is_lost(segment) for segment in self.outstanding.values()):
            return []
        self.ssthresh = max(self.inflight // 2, 2 * self.mss)
        self.cwnd = self.ssthresh
        self.in_recovery = True
        self.recover = self.snd_nxt
        self._rto_rearmed = False
        self.fast_retransmits += 1
        return self._declare_losses()

    def on_timeout(self, now: SimTime) -> list[SentSegment]:
        """
        Retransmission timeout: collapse the window and declare every unacknowledged segment lost.

        Returns
        -------
            lost: segments to retransmit, in subflow order

        """
        if not self.outstanding:
            self.rto_deadline = None
            return []
        self.timeouts += 1
        self.ssthresh = max(self._flight_size() // 2, 2 * self.mss)
        self.cwnd = self.mss
        self.dupacks = 0
        self.in_recovery = False
        self.recover = self.snd_nxt
        if self.rto * 2 >= RTO_MAX_NS:
            _LOGGER.warning("Path %d: retransmission timeout backed off to %.1f s", self.path_id, to_seconds(RTO_MAX_NS))
        self.rto = min(self.rto * 2, RTO_MAX_NS)
        self.rto_deadline = now + self.rto
        lost = []
        for segment in self.outstanding.values():
            if segment.sacked or segment.lost:
                continue
            segment.lost = True
            self._leave_pipe(segment)
            lost.append(segment)
        return lost


def retransmit_policy(subflow: Subflow, send_buffer: SendBuffer, now: SimTime) -> list[SentSegment]:
    """Timeout handling: requeue every segment the subflow now considers lost at the buffer front."""
    lost = subflow.on_timeout(now)
    for segment in lost:
        send_buffer.requeue(subflow.path_id, segment)
    return lost


@dataclass
class ReceiverState:
    """Receiver-side reassembly state."""

    next_expected: int = 0
    """Lowest data_seq not yet delivered"""
    reorder_buffer: set[int] = field(default_factory=set)
    """data_seq values held for re-sorting"""
    clock_offset_dT: SimTime = 0  # noqa: N815
    """Receiver clock minus simulator clock"""
    subflow_expected: dict[int, int] = field(default_factory=dict)
    """Next expected subflow_seq per path"""
    subflow_held: dict[int, set[int]] = field(default_factory=dict)
    """Out-of-order subflow_seq values per path"""


class ReceiveResult(NamedTuple):
    """Receiver response to one data packet."""

    ack: AckPacket
    delivered: list[int]
    occupancy_after: int
    duplicate: bool


def _sack_block(held: set[int], data_seq: int) -> list[tuple[int, int]]:
    if data_seq not in held:
        return []
    low = high = data_seq
    while low - 1 in held and data_seq - low < SACK_BLOCK_SPAN_LIMIT:
        low -= 1
    while high + 1 in held and high - data_seq < SACK_BLOCK_SPAN_LIMIT:
        high += 1
    return [(low, high)]


def receiver_on_data(state: ReceiverState, packet: DataPacket, now: SimTime) -> ReceiveResult:
    """
    Accept one data packet: deliver what became contiguous and build the ACK.

    Args:
    ----
        state (ReceiverState): receiver state, updated in place
        packet (DataPacket): arriving packet
        now (SimTime): simulator clock at arrival

    Returns:
    -------
        result: ACK, data_seq values delivered to the application, buffer occupancy after
            delivery, and whether the packet was a duplicate

    """
    path_id = packet.path_id
    expected = state.subflow_expected.get(path_id, 0)
    held_subflow = state.subflow_held.setdefault(path_id, set())
    if packet.subflow_seq >= expected:
        held_subflow.add(packet.subflow_seq)
        while expected in held_subflow:
            held_subflow.discard(expected)
            expected += 1
        state.subflow_expected[path_id] = expected

    data_seq = packet.data_seq
    held = state.reorder_buffer
    duplicate = data_seq < state.next_expected or data_seq in held
    delivered: list[int] = []
    if not duplicate:
        if data_seq == state.next_expected:
            delivered.append(data_seq)
            following = data_seq + 1
            while following in held:
                held.discard(following)
                delivered.append(following)
                following += 1
            state.next_expected = following
        else:
            held.add(data_seq)

    ack = AckPacket(
        path_id=path_id,
        cum_data_ack=state.next_expected,
        echo_ts_sent=packet.ts_sent,
        ts_received=now + state.clock_offset_dT,
        cum_subflow_ack=expected,
        echo_subflow_seq=packet.subflow_seq,
        sack_ranges=_sack_block(held, data_seq),
        duplicate=duplicate,
        echo_retransmission=packet.is_retransmission,
    )
    return ReceiveResult(ack, delivered, len(held), duplicate)


class Receiver:
    """MPTCP receiver: in-order delivery plus the arrival record for reordering metrics."""

    def __init__(self, clock_offset: SimTime = 0, record_arrivals: bool = True) -> None:  # noqa: FBT001, FBT002
        self.state = ReceiverState(clock_offset_dT=clock_offset)
        self.record_arrivals = record_arrivals
        self.delivered_count = 0
        self.duplicates = 0
        self._arrivals: list[tuple[int, int]] = []

    def on_data(self, packet: DataPacket, now: SimTime) -> ReceiveResult:
        result = receiver_on_data(self.state, packet, now)
        if result.duplicate:
            self.duplicates += 1
        elif self.record_arrivals:
            self._arrivals.append((packet.data_seq, result.occupancy_after))
        for data_seq in result.delivered:
            if data_seq != self.delivered_count:
                msg = f"delivered data_seq {data_seq}, expected {self.delivered_count}"
                raise SimulationContractError(msg)
            self.delivered_count += 1
        return result

    def record(self) -> ArrivalRecord:
        """Unique arrivals so far."""
        return ArrivalRecord(tuple(self._arrivals))


class MptcpSender:
    """Shared send buffer, one subflow per path, pull dispatch into the scheduler."""

    def __init__(  # noqa: PLR0913
        self,
        sim: Simulator,
        network: Network,
        routes: Sequence[Route],
        scheduler: Scheduler,
        send_buffer: SendBuffer,
        deliver: Callable[[DataPacket], None],
        *,
        mss: int,
        packet_size: int,
        initial_cwnd_segments: int = INITIAL_CWND_SEGMENTS,
        category: str = CATEGORY_DATA,
    ) -> None:
        if not routes:
            msg = "a sender needs at least one path"
            raise ValueError(msg)
        self.sim = sim
        self.network = network
        self.routes = tuple(routes)
        self.n_paths = len(self.routes)
        self.send_buffer = send_buffer
        self.mss = mss
        self.packet_size = packet_size
        self.category = category
        self.subflows = [Subflow(path_id, mss, packet_size, initial_cwnd_segments) for path_id in range(self.n_paths)]
        self.estimator = DelayDiffMatrix(self.n_paths)
        self.scheduler = scheduler
        self.scheduler.bind(self)
        self.pull_slots = [0] * self.n_paths
        self.samples = 0
        self.cum_data_ack = 0
        self._deliver = deliver

    def __repr__(self) -> str:
        return f"MptcpSender({self.scheduler.name}, {self.subflows})"

    def srtt(self, path_id: int) -> SimTime | None:
        return self.subflows[path_id].srtt

    def throughput(self, path_id: int) -> float:
        return self.subflows[path_id].avg_throughput_x

    def start(self) -> None:
        """Application data becomes available at ``now``; every subflow opens its window."""
        self.sim.schedule_at(self.sim.now, EventKind.APP_DATA_AVAILABLE, self._on_app_data)

    def _on_app_data(self) -> None:
        for path_id in range(self.n_paths):
            self.on_window_open(path_id)

    def on_window_open(self, path_id: int) -> int:
        """
        Fill the subflow's open window, one pull per free MSS slot.

        Args:
        ----
            path_id (int): subflow whose window may have room

        Returns:
        -------
            sent: number of segments transmitted

        """
        subflow = self.subflows[path_id]
        buffer = self.send_buffer
        sent = 0
        while subflow.can_send():
            segment = self._next_retransmission(subflow)
            if segment is not None:
                self.pull_slots[path_id] += 1
                self._transmit(subflow, segment)
                sent += 1
                continue
            if not len(buffer):
                break
            self.pull_slots[path_id] += 1
            index = self.scheduler.schedule(SchedulerQuery(path_id, len(buffer), self.sim.now))
            data_seq = buffer.take(index)
            self._transmit(subflow, subflow.register_send(data_seq, self.sim.now))
            sent += 1
        return sent

    def _next_retransmission(self, subflow: Subflow) -> SentSegment | None:
        while (segment := self.send_buffer.take_retransmission(subflow.path_id)) is not None:
            if subflow.is_outstanding(segment):
                subflow.register_retransmit(segment, self.sim.now)
                return segment
        return None

    def _transmit(self, subflow: Subflow, segment: SentSegment) -> None:
        packet = DataPacket(
            data_seq=segment.data_seq,
            subflow_seq=segment.subflow_seq,
            path_id=subflow.path_id,
            size=self.packet_size,
            ts_sent=segment.ts_sent,
            is_retransmission=segment.is_retransmission,
        )
        self.network.send(self.routes[subflow.path_id], self.packet_size, self.category, partial(self._deliver, packet))
        self._ensure_timer(subflow)

    def on_ack(self, path_id: int, ack: AckPacket) -> None:
        """Feed an ACK to its subflow, the estimator and loss recovery, then refill the window."""
        if ack.path_id != path_id:
            msg = f"ACK for path {ack.path_id} delivered to subflow {path_id}"
            raise SimulationContractError(msg)
        subflow = self.subflows[path_id]
        now = self.sim.now
        outcome = subflow.on_ack(ack, now)
        if outcome.stale:
            return
        self.cum_data_ack = max(self.cum_data_ack, ack.cum_data_ack)
        if outcome.sample_eligible:
            self.estimator.ingest_sample(PathSample(path_id, ack.echo_ts_sent, ack.ts_received), now)
            self.samples += 1
            rtts = [rtt for rtt in (flow.srtt for flow in self.subflows) if rtt is not None]
            self.estimator.stale_after = STALE_SRTT_MULTIPLE * max(rtts)
        for segment in outcome.lost:
            self.send_buffer.requeue(path_id, segment)
        if outcome.fast_retransmit is not None:
            subflow.register_retransmit(outcome.fast_retransmit, now)
            self._transmit(subflow, outcome.fast_retransmit)
        self._ensure_timer(subflow)
        self.on_window_open(path_id)

    def _ensure_timer(self, subflow: Subflow) -> None:
        if subflow.rto_deadline is not None and not subflow.timer_pending:
            subflow.timer_pending = True
            self.sim.schedule_at(
                max(subflow.rto_deadline, self.sim.now),
                EventKind.TIMER_EXPIRY,
                partial(self._on_timer, subflow.path_id),
            )

    def _on_timer(self, path_id: int) -> None:
        subflow = self.subflows[path_id]
        subflow.timer_pending = False
        deadline = subflow.rto_deadline
        if deadline is None:
            return
        if self.sim.now < deadline:
            self._ensure_timer(subflow)
            return
        lost = retransmit_policy(subflow, self.send_buffer, self.sim.now)
        _LOGGER.debug("Path %d: timeout at t=%d, %d segments requeued", path_id, self.sim.now, len(lost))
        self._ensure_timer(subflow)
        self.on_window_open(path_id)

    @property
    def retransmissions(self) -> int:
        return sum(subflow.retransmissions for subflow in self.subflows)


class MptcpConnection:
    """A sender and receiver joined by per-path forward and backward routes."""

    def __init__(  # noqa: PLR0913
        self,
        sim: Simulator,
        network: Network,
        forward_routes: Sequence[Route],
        backward_routes: Sequence[Route],
        scheduler: Scheduler,
        *,
        mss: int,
        packet_size: int,
        send_buffer_segments: int,
        initial_cwnd_segments: int = INITIAL_CWND_SEGMENTS,
        clock_offset: SimTime = 0,
        app_limit: int | None = None,
        category: str = CATEGORY_DATA,
        ack_category: str = CATEGORY_ACK,
        record_arrivals: bool = True,
    ) -> None:
        if len(forward_routes) != len(backward_routes):
            msg = f"{len(forward_routes)} forward routes but {len(backward_routes)} backward routes"
            raise ValueError(msg)
        self.sim = sim
        self.network = network
        self.backward_routes = tuple(backward_routes)
        self.ack_category = ack_category
        self.receiver = Receiver(clock_offset, record_arrivals)
        self.sender = MptcpSender(
            sim,
            network,
            forward_routes,
            scheduler,
            SendBuffer(send_buffer_segments, app_limit),
            self._on_data_arrival,
            mss=mss,
            packet_size=packet_size,
            initial_cwnd_segments=initial_cwnd_segments,
            category=category,
        )

    def start(self) -> None:
        self.sender.start()

    def _on_data_arrival(self, packet: DataPacket) -> None:
        result = self.receiver.on_data(packet, self.sim.now)
        ack = result.ack
        self.network.send(
            self.backward_routes[packet.path_id],
            ack.size,
            self.ack_category,
            partial(self.sender.on_ack, packet.path_id, ack),
        )
