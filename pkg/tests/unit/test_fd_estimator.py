"""Test forward-delay difference estimation."""

import unittest

import numpy as np
import pytest

from mpsched.fd_estimator import DelayDiffMatrix, PathSample, raw_delta
from mpsched.units import ms, seconds


def sample_stream(offset: int, count: int = 400, n_paths: int = 3) -> list[PathSample]:
    """Samples with jittery forward delays, receiver clock shifted by ``offset``."""
    rng = np.random.default_rng(11)
    base = [ms(12), ms(32), ms(52)][:n_paths]
    samples = []
    for k in range(count):
        path_id = int(rng.integers(0, n_paths))
        ts_sent = k * ms(1)
        delay = base[path_id] + int(rng.integers(0, ms(5)))
        samples.append(PathSample(path_id, ts_sent, ts_sent + delay + offset))
    return samples


class TestRawDelta(unittest.TestCase):
    """Test the pairwise difference."""

    def test_faster_path_is_negative(self) -> None:
        """Equal send times, arrivals 12 ms and 32 ms: path 0 is 20 ms faster."""
        a = PathSample(0, 0, ms(12))
        b = PathSample(1, 0, ms(32))
        assert raw_delta(a, b) == -ms(20)
        assert raw_delta(b, a) == ms(20)

    def test_identical_timestamps(self) -> None:
        """Same stamps on both paths mean equal delays."""
        assert raw_delta(PathSample(0, 5, 9), PathSample(1, 5, 9)) == 0

    def test_receiver_offset_cancels(self) -> None:
        """Shifting every receive stamp leaves the difference unchanged."""
        a = PathSample(0, ms(3), ms(15))
        b = PathSample(1, ms(4), ms(36))
        shift = seconds(7)
        shifted = raw_delta(PathSample(0, a.ts_sent, a.ts_received + shift), PathSample(1, b.ts_sent, b.ts_received + shift))
        assert shifted == raw_delta(a, b) == -ms(20)

    def test_same_path_is_rejected(self) -> None:
        """Both samples on one path carry no difference."""
        with pytest.raises(ValueError):
            raw_delta(PathSample(1, 0, 1), PathSample(1, 2, 3))


class TestDelayDiffMatrix(unittest.TestCase):
    """Test the smoothed matrix."""

    def test_cold_start(self) -> None:
        """No estimate until both paths have samples; the diagonal is zero."""
        matrix = DelayDiffMatrix(2)
        assert matrix.delta_between(0, 1) is None
        assert matrix.delta_between(1, 1) == 0.0
        matrix.ingest_sample(PathSample(0, 0, ms(12)))
        assert matrix.delta_between(0, 1) is None
        assert matrix.updates == 0

    def test_first_sample_then_ewma(self) -> None:
        """The first value is taken as is, then smoothed with gain 1/4."""
        matrix = DelayDiffMatrix(2)
        matrix.update_pair(0, 1, -ms(20))
        assert matrix.delta_between(0, 1) == -ms(20)
        matrix.update_pair(0, 1, -ms(28))
        assert matrix.delta_between(0, 1) == -ms(22)
        assert matrix.delta_between(1, 0) == ms(22)

    def test_update_from_either_side(self) -> None:
        """Updating (j, i) folds the negated value into (i, j)."""
        matrix = DelayDiffMatrix(2)
        matrix.update_pair(1, 0, ms(20))
        assert matrix.delta_between(0, 1) == -ms(20)

    def test_alternating_uncongested_paths(self) -> None:
        """Constant 12 ms and 32 ms paths converge to exactly -20 ms."""
        matrix = DelayDiffMatrix(2)
        for k in range(100):
            path_id = k % 2
            delay = ms(12) if path_id == 0 else ms(32)
            matrix.ingest_sample(PathSample(path_id, k * ms(1), k * ms(1) + delay))
        assert matrix.delta_between(0, 1) == -ms(20)
        assert len(matrix.recent_samples(0)) == 8

    def test_antisymmetry_and_bounds(self) -> None:
        """Every pair stays antisymmetric and within the raw values seen."""
        matrix = DelayDiffMatrix(3)
        raws: dict[tuple[int, int], list[float]] = {}
        for sample in sample_stream(0):
            for other, latest in enumerate(matrix._latest):  # noqa: SLF001
                if latest is not None and other != sample.path_id:
                    i, j = sorted((sample.path_id, other))
                    value = raw_delta(sample, latest)
                    raws.setdefault((i, j), []).append(value if i == sample.path_id else -value)
            matrix.ingest_sample(sample)
        for (i, j), values in raws.items():
            delta = matrix.delta_between(i, j)
            assert delta == -matrix.delta_between(j, i)
            assert min(values) <= delta <= max(values)

    def test_clock_offset_invariance(self) -> None:
        """Every published estimate is bit-identical for any receiver clock offset."""
        digests = set()
        finals = set()
        for offset in (-seconds(10), 0, seconds(3.7)):
            matrix = DelayDiffMatrix(3)
            for sample in sample_stream(offset):
                matrix.ingest_sample(sample)
            digests.add(matrix.estimate_digest)
            finals.add(tuple(matrix.delta_between(i, j) for i in range(3) for j in range(3)))
        assert len(digests) == 1
        assert len(finals) == 1

    def test_stale_path_reports_no_estimate(self) -> None:
        """A path silent for longer than ``stale_after`` drops out."""
        matrix = DelayDiffMatrix(2)
        matrix.ingest_sample(PathSample(0, 0, ms(12)), now=ms(20))
        matrix.ingest_sample(PathSample(1, 0, ms(32)), now=ms(40))
        matrix.stale_after = ms(100)
        assert matrix.delta_between(0, 1, now=ms(100)) == -ms(20)
        assert matrix.delta_between(0, 1, now=ms(200)) is None
        assert matrix.delta_between(0, 1) == -ms(20)

    def test_unknown_path_is_rejected(self) -> None:
        """Samples must name a configured path."""
        with pytest.raises(ValueError):
            DelayDiffMatrix(2).ingest_sample(PathSample(2, 0, 0))
