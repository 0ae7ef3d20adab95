"""Receiver-side reordering metrics.

RBD (reorder buffer-occupancy density) is the normalized histogram of how many packets sit in a
hypothetical re-sort buffer right after each unique arrival; ``RBD[0]`` is the share of packets
that could be handed to the application immediately. RD (reorder density) is the normalized
histogram of each packet's displacement, arrival position minus sequence position.
"""

from __future__ import annotations

import heapq
import textwrap
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence


class HistogramKind(Enum):
    """Which reordering metric a histogram holds."""

    RBD = "rbd"
    RD = "rd"


@dataclass(frozen=True)
class ArrivalRecord:
    """Unique data arrivals at the receiver, in arrival order."""

    entries: tuple[tuple[int, int], ...] = ()
    """(data_seq, occupancy after delivery processing) per arrival"""

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for data_seq, occupancy in self.entries:
            if occupancy < 0:
                msg = f"negative occupancy {occupancy} for data_seq {data_seq}"
                raise ValueError(msg)
            if data_seq in seen:
                msg = f"data_seq {data_seq} recorded twice"
                raise ValueError(msg)
            seen.add(data_seq)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return textwrap.dedent("""ArrivalRecord({} arrivals)""").format(len(self.entries))

    @property
    def sequence(self) -> list[int]:
        """data_seq values in arrival order."""
        return [data_seq for data_seq, _ in self.entries]

    @property
    def occupancies(self) -> list[int]:
        """Occupancy after each arrival."""
        return [occupancy for _, occupancy in self.entries]

    @classmethod
    def from_sequence(cls, arrivals: Sequence[int], first_seq: int | None = None) -> ArrivalRecord:
        """
        Replay unique arrivals through an unbounded re-sort buffer.

        Args:
        ----
            arrivals (Sequence[int]): data_seq values in arrival order, no duplicates
            first_seq (int | None): [Optional] first sequence the application expects,
                defaults to the smallest arrival

        Returns:
        -------
            record: arrivals paired with the buffer occupancy after each one

        """
        if not arrivals:
            return cls()
        expected = min(arrivals) if first_seq is None else first_seq
        held: list[int] = []
        entries = []
        for data_seq in arrivals:
            heapq.heappush(held, data_seq)
            while held and held[0] == expected:
                heapq.heappop(held)
                expected += 1
            entries.append((data_seq, len(held)))
        return cls(tuple(entries))


@dataclass
class ReorderHistogram:
    """Sparse normalized histogram."""

    kind: HistogramKind
    """RBD (index >= 0) or RD (signed index)"""
    bins: dict[int, float] = field(default_factory=dict)
    """index -> density"""

    def __repr__(self) -> str:
        return textwrap.dedent("""{}{}""").format(self.kind.name, self.items())

    def __getitem__(self, index: int) -> float:
        return self.bins.get(index, 0.0)

    def items(self) -> list[tuple[int, float]]:
        """(index, density) pairs sorted by index."""
        return sorted(self.bins.items())

    def total(self) -> float:
        """Sum of densities; 1 for a non-empty record."""
        return float(sum(self.bins.values()))

    def mass(self, indices: Iterable[int]) -> float:
        """Density summed over ``indices``."""
        return float(sum(self[index] for index in indices))


def _normalize(kind: HistogramKind, counts: Counter[int], total: int) -> ReorderHistogram:
    if total == 0:
        return ReorderHistogram(kind)
    return ReorderHistogram(kind, {index: count / total for index, count in sorted(counts.items())})


def compute_rbd(record: ArrivalRecord) -> ReorderHistogram:
    """Normalized histogram of the buffer occupancy after each unique arrival."""
    return _normalize(HistogramKind.RBD, Counter(record.occupancies), len(record))


def displacements(record: ArrivalRecord) -> list[int]:
    """Arrival position minus sequence position for each packet (both 1-based).

    The sequence position of a packet is its rank among the recorded sequence numbers, which is
    its 1-based sequence number when every packet from the first one arrived.
    """
    sequence = record.sequence
    rank = {data_seq: position for position, data_seq in enumerate(sorted(sequence), start=1)}
    return [position - rank[data_seq] for position, data_seq in enumerate(sequence, start=1)]


def compute_rd(record: ArrivalRecord) -> ReorderHistogram:
    """Normalized histogram of packet displacements."""
    return _normalize(HistogramKind.RD, Counter(displacements(record)), len(record))


def mean_occupancy(record: ArrivalRecord) -> float:
    """Average occupancy over the arrivals of one run; 0 for an empty record."""
    if not record.entries:
        return 0.0
    return float(np.mean(record.occupancies))


def occupancy_stats(records: Sequence[ArrivalRecord]) -> tuple[float, float]:
    """
    Mean and sample standard deviation of per-run mean occupancy, taken across runs.

    Args:
    ----
        records (Sequence[ArrivalRecord]): one record per run

    Returns:
    -------
        stats: (mean, std) in MSS units; std is 0 for a single run

    """
    if not records:
        msg = "need at least one run"
        raise ValueError(msg)
    return summarize_means([mean_occupancy(record) for record in records])


def summarize_means(run_means: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation of per-run means; std is 0 for a single run."""
    values = np.asarray(run_means, dtype=float)
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1))


def pool_histograms(histograms: Sequence[tuple[ReorderHistogram, int]]) -> ReorderHistogram:
    """Merge per-run histograms, weighting each by its number of arrivals."""
    if not histograms:
        msg = "nothing to pool"
        raise ValueError(msg)
    kind = histograms[0][0].kind
    total = sum(weight for _, weight in histograms)
    if total == 0:
        return ReorderHistogram(kind)
    pooled: dict[int, float] = {}
    for histogram, weight in histograms:
        if histogram.kind is not kind:
            msg = f"cannot pool {histogram.kind.name} with {kind.name}"
            raise ValueError(msg)
        for index, density in histogram.bins.items():
            pooled[index] = pooled.get(index, 0.0) + density * weight
    return ReorderHistogram(kind, {index: value / total for index, value in sorted(pooled.items())})
