"""Data Classes for transport packets."""

from __future__ import annotations

import textwrap
from dataclasses import dataclass, field

from .const import ACK_SIZE
from .units import SimTime


@dataclass(slots=True)
class DataPacket:
    """MSS-sized data segment carrying the sender's timestamp option."""

    data_seq: int
    """Connection-level sequence number, in segments"""
    subflow_seq: int
    """Sequence number within the subflow"""
    path_id: int
    """Path the segment travels on"""
    size: int
    """Bytes on the wire"""
    ts_sent: SimTime
    """Sender clock at (re)transmission"""
    is_retransmission: bool = False
    """Whether this is a retransmission"""

    def __repr__(self) -> str:
        return textwrap.dedent("""Data({} sf={} p{} @{}{})""").format(
            self.data_seq, self.subflow_seq, self.path_id, self.ts_sent, " R" if self.is_retransmission else ""
        )


@dataclass(slots=True)
class AckPacket:
    """Per-packet acknowledgement echoing the sender timestamp next to the receiver's."""

    path_id: int
    """Path the acknowledged segment arrived on"""
    cum_data_ack: int
    """Next expected connection-level sequence number"""
    echo_ts_sent: SimTime
    """``ts_sent`` of the segment that triggered this ACK (sender clock)"""
    ts_received: SimTime
    """Arrival time of that segment on the receiver clock"""
    cum_subflow_ack: int
    """Next expected subflow sequence number on this path"""
    echo_subflow_seq: int
    """Subflow sequence of the segment that triggered this ACK"""
    sack_ranges: list[tuple[int, int]] = field(default_factory=list)
    """Inclusive connection-level ranges held above ``cum_data_ack``"""
    duplicate: bool = False
    """The triggering segment had already been received"""
    echo_retransmission: bool = False
    """The triggering segment was a retransmission"""
    size: int = ACK_SIZE
    """Bytes on the wire"""

    def __repr__(self) -> str:
        return textwrap.dedent("""Ack(p{} data<{} sf<{} echo={}/{}{})""").format(
            self.path_id,
            self.cum_data_ack,
            self.cum_subflow_ack,
            self.echo_ts_sent,
            self.ts_received,
            " dup" if self.duplicate else "",
        )
