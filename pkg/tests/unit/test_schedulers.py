"""Test the pull schedulers."""

import unittest
from dataclasses import dataclass, field

import numpy as np
import pytest

from mpsched.const import DEFAULT_MSS
from mpsched.fd_estimator import DelayDiffMatrix
from mpsched.rng import RngStream
from mpsched.schedulers import (
    FdpsScheduler,
    FifoScheduler,
    NegCountTable,
    RttHalfMatrix,
    RttHalfScheduler,
    SchedulerQuery,
    count_negatives,
    fdps_pick_index,
    find_shortest_fd_path,
    make_scheduler,
)
from mpsched.units import ms


class FixedMatrix:
    """Antisymmetric matrix built from true forward delays, optionally scaled."""

    def __init__(self, delays: list[float], scale: float = 1.0) -> None:
        self.n_paths = len(delays)
        self.delays = delays
        self.scale = scale

    def delta_between(self, i: int, j: int, now: int | None = None) -> float | None:  # noqa: ARG002
        return (self.delays[i] - self.delays[j]) * self.scale


@dataclass
class FakeView:
    """Sender state seen by a scheduler."""

    n_paths: int
    srtts: list[int | None] = field(default_factory=list)
    rates: list[float] = field(default_factory=list)
    estimator: DelayDiffMatrix = None

    def __post_init__(self) -> None:
        if self.estimator is None:
            self.estimator = DelayDiffMatrix(self.n_paths)
        self.srtts = self.srtts or [None] * self.n_paths
        self.rates = self.rates or [0.0] * self.n_paths

    def srtt(self, path_id: int) -> int | None:
        return self.srtts[path_id]

    def throughput(self, path_id: int) -> float:
        return self.rates[path_id]


class TestShortestPath(unittest.TestCase):
    """Test path selection."""

    def test_single_path(self) -> None:
        """One path is always the shortest."""
        assert find_shortest_fd_path(FixedMatrix([5.0]), RngStream(1, 0)) == 0

    def test_three_path_counts(self) -> None:
        """T0 < T1 < T2 gives counts [2, 1, 0]."""
        matrix = FixedMatrix([0.0, ms(5), ms(9)])
        table = count_negatives(matrix, RngStream(1, 0))
        assert table.counts == [2, 1, 0]
        assert table.argmax() == 0
        assert matrix.delta_between(0, 1) == -ms(5)
        assert matrix.delta_between(1, 2) == -ms(4)

    def test_argmax_tie_takes_lowest_index(self) -> None:
        """Equal counts resolve to the lowest path id."""
        assert NegCountTable([1, 2, 2]).argmax() == 1

    def test_no_estimates_returns_path_zero(self) -> None:
        """Cold start falls back to path 0."""
        assert find_shortest_fd_path(DelayDiffMatrix(4), RngStream(1, 0)) == 0

    def test_matches_brute_force_argmin(self) -> None:
        """Random strict delay orders always yield the true fastest path, at any scale."""
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            n_paths = int(rng.integers(2, 7))
            delays = rng.permutation(n_paths).astype(float) * ms(3) + float(rng.integers(0, ms(1)))
            matrix = FixedMatrix(delays.tolist())
            stream = RngStream(trial, 0)
            table = count_negatives(matrix, stream)
            assert sum(table.counts) == n_paths * (n_paths - 1) // 2
            assert table.argmax() == int(np.argmin(delays))
            assert find_shortest_fd_path(FixedMatrix(delays.tolist(), scale=7.5), stream) == int(np.argmin(delays))

    def test_positive_scaling_changes_nothing(self) -> None:
        """Multiplying every difference by c > 0 keeps the counts and the chosen path, ties included."""
        rng = np.random.default_rng(7)
        for trial in range(200):
            n_paths = int(rng.integers(2, 6))
            delays = (rng.integers(0, 4, size=n_paths) * ms(2)).astype(float).tolist()
            baseline = count_negatives(FixedMatrix(delays), RngStream(trial, 0)).counts
            for scale in (1e-6, 0.25, 3.0, 1e6):
                stream = RngStream(trial, 0)
                assert count_negatives(FixedMatrix(delays, scale), stream).counts == baseline
                assert find_shortest_fd_path(FixedMatrix(delays, scale), RngStream(trial, 0)) == NegCountTable(baseline).argmax()

    def test_zero_difference_is_a_fair_coin(self) -> None:
        """Tied paths each win about half the time over 10000 seeds."""
        matrix = FixedMatrix([ms(10), ms(10)])
        wins = sum(find_shortest_fd_path(matrix, RngStream(seed, 0)) == 0 for seed in range(10_000))
        assert 0.48 <= wins / 10_000 <= 0.52

    def test_tie_follows_seeded_draw(self) -> None:
        """The winner of a tie is the seeded Bernoulli draw."""
        matrix = FixedMatrix([ms(10), ms(10)])
        for seed in range(20):
            expected = 0 if RngStream(seed, 0).bernoulli(0.5) else 1
            assert find_shortest_fd_path(matrix, RngStream(seed, 0)) == expected


class TestPickIndex(unittest.TestCase):
    """Test the send-buffer index rule."""

    def setUp(self) -> None:
        """Path 0 is 20 ms faster than path 1."""
        self.matrix = FixedMatrix([ms(12), ms(32)])

    def test_fastest_path_takes_head(self) -> None:
        """The shortest path always sends index 0."""
        assert fdps_pick_index(SchedulerQuery(0, 256, 0), self.matrix, 0, 500_000, DEFAULT_MSS) == 0

    def test_slow_path_skips_ahead(self) -> None:
        """20 ms at 500000 B/s with 934-byte segments skips 10 segments."""
        assert fdps_pick_index(SchedulerQuery(1, 256, 0), self.matrix, 0, 500_000, DEFAULT_MSS) == 10

    def test_index_is_clamped(self) -> None:
        """A short buffer caps the index at its end."""
        assert fdps_pick_index(SchedulerQuery(1, 5, 0), self.matrix, 0, 500_000, DEFAULT_MSS) == 4
        assert fdps_pick_index(SchedulerQuery(1, 1, 0), self.matrix, 0, 500_000, DEFAULT_MSS) == 0

    def test_degenerate_inputs_give_head(self) -> None:
        """Negative differences, missing estimates and zero throughput all fall back to 0."""
        assert fdps_pick_index(SchedulerQuery(0, 256, 0), self.matrix, 1, 500_000, DEFAULT_MSS) == 0
        assert fdps_pick_index(SchedulerQuery(1, 256, 0), DelayDiffMatrix(2), 0, 500_000, DEFAULT_MSS) == 0
        assert fdps_pick_index(SchedulerQuery(1, 256, 0), self.matrix, 0, 0.0, DEFAULT_MSS) == 0

    def test_index_always_in_bounds(self) -> None:
        """Whatever the inputs, the index lies inside the buffer."""
        rng = np.random.default_rng(5)
        for _ in range(500):
            delays = rng.uniform(0, ms(200), size=3).tolist()
            buffer_len = int(rng.integers(1, 300))
            query = SchedulerQuery(int(rng.integers(0, 3)), buffer_len, 0)
            index = fdps_pick_index(query, FixedMatrix(delays), int(rng.integers(0, 3)), rng.uniform(0, 2e6), DEFAULT_MSS)
            assert 0 <= index < buffer_len


class TestSchedulers(unittest.TestCase):
    """Test the scheduler classes."""

    def test_fifo_always_head(self) -> None:
        """FIFO returns 0 for every query."""
        scheduler = FifoScheduler()
        scheduler.bind(FakeView(2))
        assert [scheduler.schedule(SchedulerQuery(k % 2, 10 - k, k)) for k in range(5)] == [0] * 5
        assert scheduler.schedule(SchedulerQuery(0, 1, 9)) == 0
        assert scheduler.queries == 6

    def test_empty_buffer_query_is_rejected(self) -> None:
        """Queries need something to pick."""
        scheduler = FifoScheduler()
        with pytest.raises(ValueError):
            scheduler.schedule(SchedulerQuery(0, 0, 0))

    def test_unbound_scheduler(self) -> None:
        """A scheduler must be bound before it can look at sender state."""
        with pytest.raises(RuntimeError):
            _ = FdpsScheduler(DEFAULT_MSS, RngStream(1, 0)).view

    def test_fdps_cold_start_behaves_like_fifo(self) -> None:
        """Without estimates every path sends the head."""
        scheduler = FdpsScheduler(DEFAULT_MSS, RngStream(1, 0))
        scheduler.bind(FakeView(2, rates=[500_000.0, 500_000.0]))
        assert [scheduler.schedule(SchedulerQuery(k % 2, 256, k)) for k in range(6)] == [0] * 6

    def test_fdps_uses_estimator_and_fast_path_rate(self) -> None:
        """The slow path skips what the fast path delivers during the delay gap."""
        view = FakeView(2, srtts=[ms(24), ms(64)], rates=[500_000.0, 1.0])
        view.estimator.update_pair(0, 1, -ms(20))
        scheduler = FdpsScheduler(DEFAULT_MSS, RngStream(1, 0))
        scheduler.bind(view)
        assert scheduler.schedule(SchedulerQuery(0, 256, 0)) == 0
        assert scheduler.schedule(SchedulerQuery(1, 256, 0)) == 10

    def test_fdps_refreshes_once_per_min_rtt(self) -> None:
        """The cached shortest path only changes after the smallest RTT has passed."""
        view = FakeView(2, srtts=[ms(24), ms(64)], rates=[500_000.0, 500_000.0])
        view.estimator.update_pair(0, 1, ms(20))
        scheduler = FdpsScheduler(DEFAULT_MSS, RngStream(1, 0))
        scheduler.bind(view)
        assert scheduler.best_path(0) == 1
        view.estimator.update_pair(0, 1, -ms(200))
        assert view.estimator.delta_between(0, 1) < 0
        assert scheduler.best_path(ms(10)) == 1
        assert scheduler.best_path(ms(24)) == 0
        assert scheduler.refreshes == 2

    def test_rtt_half_matrix(self) -> None:
        """Half the smoothed RTT difference stands in for the forward difference."""
        view = FakeView(2, srtts=[ms(24), ms(64)])
        matrix = RttHalfMatrix(view)
        assert matrix.delta_between(0, 1) == -ms(20)
        assert matrix.delta_between(1, 1) == 0.0
        assert RttHalfMatrix(FakeView(2)).delta_between(0, 1) is None

    def test_rtt_half_scheduler(self) -> None:
        """24 ms and 64 ms RTTs at 500000 B/s put the slow path at index 10."""
        view = FakeView(2, srtts=[ms(24), ms(64)], rates=[500_000.0, 500_000.0])
        scheduler = RttHalfScheduler(DEFAULT_MSS, RngStream(1, 0))
        scheduler.bind(view)
        assert scheduler.schedule(SchedulerQuery(1, 256, 0)) == 10
        assert scheduler.schedule(SchedulerQuery(0, 256, 0)) == 0

    def test_rtt_half_symmetric_paths(self) -> None:
        """Equal RTTs keep every path at the head."""
        view = FakeView(2, srtts=[ms(24), ms(24)], rates=[500_000.0, 500_000.0])
        scheduler = RttHalfScheduler(DEFAULT_MSS, RngStream(1, 0))
        scheduler.bind(view)
        assert [scheduler.schedule(SchedulerQuery(k % 2, 256, k)) for k in range(4)] == [0] * 4

    def test_make_scheduler(self) -> None:
        """Schedulers are built by name."""
        rng = RngStream(1, 0)
        assert isinstance(make_scheduler("fifo", DEFAULT_MSS, rng), FifoScheduler)
        assert isinstance(make_scheduler("rtt-half", DEFAULT_MSS, rng), RttHalfScheduler)
        assert type(make_scheduler("fdps", DEFAULT_MSS, rng)) is FdpsScheduler
        with pytest.raises(ValueError):
            make_scheduler("mtcs", DEFAULT_MSS, rng)
