"""Forward-delay difference estimation from ACK-echoed timestamps.

For two samples ``a`` (path i) and ``b`` (path j) the sending-time difference is
``ds = b.ts_sent - a.ts_sent`` and the receiving-time difference is
``dr = b.ts_received - a.ts_received``. A constant receiver clock offset appears in both receive
stamps and cancels, so ``ds - dr`` equals ``T_i - T_j``, the difference of the two forward
delays, without any clock synchronization.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass
from hashlib import blake2b

from .const import ESTIMATOR_ALPHA, ESTIMATOR_HISTORY
from .units import SimTime


_ESTIMATE_RECORD = struct.Struct("<BBd")


@dataclass(frozen=True, slots=True)
class PathSample:
    """One (sent, received) timestamp pair echoed back on a path."""

    path_id: int
    """Path the data packet travelled"""
    ts_sent: SimTime
    """Sender clock"""
    ts_received: SimTime
    """Receiver clock"""


def raw_delta(a: PathSample, b: PathSample) -> int:
    """
    Forward delay of ``a``'s path minus that of ``b``'s path.

    Args:
    ----
        a (PathSample): sample on path i
        b (PathSample): sample on path j, j != i

    Returns:
    -------
        delta: signed nanoseconds, negative when path i is faster

    """
    if a.path_id == b.path_id:
        msg = f"samples must come from different paths, both are on path {a.path_id}"
        raise ValueError(msg)
    sent_diff = b.ts_sent - a.ts_sent
    received_diff = b.ts_received - a.ts_received
    return sent_diff - received_diff


class DelayDiffMatrix:
    """Smoothed pairwise forward-delay differences over ``n_paths`` paths."""

    def __init__(
        self,
        n_paths: int,
        alpha: float = ESTIMATOR_ALPHA,
        history: int = ESTIMATOR_HISTORY,
    ) -> None:
        if n_paths < 1:
            msg = f"need at least one path, got {n_paths}"
            raise ValueError(msg)
        self.n_paths = n_paths
        self.alpha = alpha
        self.freshness: list[SimTime | None] = [None] * n_paths
        self.stale_after: SimTime | None = None
        self.updates = 0
        self._delta: list[list[float | None]] = [[None] * n_paths for _ in range(n_paths)]
        self._latest: list[PathSample | None] = [None] * n_paths
        self._history: list[deque[PathSample]] = [deque(maxlen=history) for _ in range(n_paths)]
        self._digest = blake2b(digest_size=16)

    def __repr__(self) -> str:
        return f"DelayDiffMatrix(n_paths={self.n_paths}, updates={self.updates})"

    @property
    def estimate_digest(self) -> str:
        """Digest over every smoothed value published so far, in order."""
        return self._digest.hexdigest()

    def recent_samples(self, path_id: int) -> tuple[PathSample, ...]:
        """Most recent samples retained for ``path_id``, oldest first."""
        return tuple(self._history[path_id])

    def ingest_sample(self, sample: PathSample, now: SimTime | None = None) -> None:
        """Store ``sample`` and fold its difference against every other sampled path."""
        path_id = sample.path_id
        if not 0 <= path_id < self.n_paths:
            msg = f"path_id {path_id} outside [0, {self.n_paths})"
            raise ValueError(msg)
        self._latest[path_id] = sample
        self._history[path_id].append(sample)
        self.freshness[path_id] = sample.ts_sent if now is None else now
        for other, latest in enumerate(self._latest):
            if other == path_id or latest is None:
                continue
            self.update_pair(path_id, other, raw_delta(sample, latest))

    def update_pair(self, i: int, j: int, raw: float) -> None:
        """EWMA-fold ``raw`` (``T_i - T_j``) into the pair; the mirror entry is kept antisymmetric."""
        if i == j:
            msg = f"cannot update a path against itself ({i})"
            raise ValueError(msg)
        if i > j:
            i, j, raw = j, i, -raw
        previous = self._delta[i][j]
        value = float(raw) if previous is None else (1 - self.alpha) * previous + self.alpha * raw
        self._delta[i][j] = value
        self._delta[j][i] = -value
        self.updates += 1
        self._digest.update(_ESTIMATE_RECORD.pack(i, j, value))

    def delta_between(self, i: int, j: int, now: SimTime | None = None) -> float | None:
        """
        Smoothed ``T_i - T_j`` in nanoseconds.

        Args:
        ----
            i (int): path id
            j (int): path id
            now (SimTime | None): [Optional] sender time, enables the staleness check

        Returns:
        -------
            delta: estimate, 0 on the diagonal, None when no estimate is available

        """
        if i == j:
            return 0.0
        if self._is_stale(i, now) or self._is_stale(j, now):
            return None
        return self._delta[i][j]

    def _is_stale(self, path_id: int, now: SimTime | None) -> bool:
        fresh = self.freshness[path_id]
        if fresh is None or now is None or self.stale_after is None:
            return False
        return now - fresh > self.stale_after
