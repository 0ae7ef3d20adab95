"""Test result files."""

import csv
import tempfile
import unittest
from pathlib import Path

import pytest

from mpsched.commons import OutputError
from mpsched.harness import BatchResult, RunResult
from mpsched.outputs import RUNS_FILE, SUMMARY_FILE, TABLE_FILE, emit_outputs, format_table, run_rows, summary_rows
from mpsched.presets import preset
from mpsched.reorder_metrics import ArrivalRecord, compute_rbd, compute_rd, mean_occupancy


def make_batch(scenario: str, scheduler: str, arrivals: list[list[int]]) -> BatchResult:
    """Batch built from synthetic arrival orders, one run each."""
    cfg = preset(scenario, scheduler).with_overrides(runs=len(arrivals))
    runs = []
    for run_index, order in enumerate(arrivals):
        record = ArrivalRecord.from_sequence(order)
        runs.append(
            RunResult(
                scenario=scenario,
                scheduler=scheduler,
                run_index=run_index,
                seed=cfg.seed_for(run_index),
                record=record,
                rbd=compute_rbd(record),
                rd=compute_rd(record),
                mean_occupancy=mean_occupancy(record),
                delivered=len(record),
                duplicates=0,
                retransmissions=0,
                events=0,
                trace_digest="",
                estimate_digest="",
            )
        )
    return BatchResult(cfg, runs)


class TestEmitOutputs(unittest.TestCase):
    """Test the files written for a batch."""

    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.out = Path(self._tmp.name) / "results"

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def test_in_order_histograms(self) -> None:
        """In-order arrivals give a single bin at zero."""
        emit_outputs(make_batch("a1", "fifo", [[0, 1, 2, 3]]), self.out)
        assert (self.out / "rbd_a1_fifo.csv").read_bytes() == b"index,density\n0,1.0\n"
        assert (self.out / "rd_a1_fifo.csv").read_bytes() == b"index,density\n0,1.0\n"

    def test_files_written(self) -> None:
        """Two histograms per batch, then the summary and the table."""
        written = emit_outputs(make_batch("a2", "fdps", [[0, 2, 1]]), self.out)
        assert [path.name for path in written] == ["rbd_a2_fdps.csv", "rd_a2_fdps.csv", SUMMARY_FILE, TABLE_FILE]
        assert sorted(path.name for path in self.out.glob("*.csv")) == ["rbd_a2_fdps.csv", "rd_a2_fdps.csv", SUMMARY_FILE]

    def test_signed_rd_indices(self) -> None:
        """RD rows are sorted by signed index."""
        emit_outputs(make_batch("a2", "fifo", [[1, 0, 2, 3]]), self.out)
        lines = (self.out / "rd_a2_fifo.csv").read_text(encoding="utf-8").splitlines()
        assert lines == ["index,density", "-1,0.25", "0,0.5", "1,0.25"]

    def test_summary_has_one_row_per_batch(self) -> None:
        """|scenarios| x |schedulers| rows after the header."""
        batches = [
            make_batch(scenario, scheduler, [[0, 1], [1, 0]])
            for scenario in ("a1", "a2")
            for scheduler in ("fifo", "rtt-half", "fdps")
        ]
        emit_outputs(batches, self.out)
        with (self.out / SUMMARY_FILE).open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["scenario", "scheduler", "runs", "mean_occupancy", "std_occupancy"]
        assert len(rows) == 1 + 2 * 3
        assert rows[1][:3] == ["a1", "fifo", "2"]

    def test_per_run_means(self) -> None:
        """On request every run gets its own row after the summary."""
        batches = [make_batch("a2", "fifo", [[1, 0], [0, 1]]), make_batch("a2", "fdps", [[0, 1]])]
        written = emit_outputs(batches, self.out, per_run=True)
        assert [path.name for path in written][-3:] == [SUMMARY_FILE, RUNS_FILE, TABLE_FILE]
        with (self.out / RUNS_FILE).open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        assert rows == [
            ["scenario", "scheduler", "run", "mean_occupancy"],
            ["a2", "fifo", "0", "0.5"],
            ["a2", "fifo", "1", "0.0"],
            ["a2", "fdps", "0", "0.0"],
        ]

    def test_unwritable_directory(self) -> None:
        """A file standing where the directory should be is an output error."""
        self.out.write_text("", encoding="utf-8")
        with pytest.raises(OutputError):
            emit_outputs(make_batch("a1", "fifo", [[0]]), self.out)


class TestTable(unittest.TestCase):
    """Test the occupancy table."""

    def test_columns_follow_scheduler_order(self) -> None:
        """Columns are fifo, rtt-half, fdps; missing cells show a dash."""
        batches = [make_batch("a2", "fdps", [[0, 2, 1]]), make_batch("a2", "fifo", [[0, 1, 2]])]
        lines = format_table(batches).splitlines()
        assert lines[0] == "Mean of buffer occupancy (in MSS)"
        assert lines[1].split() == ["scenario", "fifo", "rtt-half", "fdps"]
        assert lines[2].split() == ["a2", "0.00±0.00", "-", "0.33±0.00"]

    def test_summary_values(self) -> None:
        """Means and deviations keep full precision in the summary."""
        batch = make_batch("a1", "fifo", [[1, 0], [0, 1]])
        assert summary_rows([batch]) == [("a1", "fifo", 2, repr(0.25), repr(0.3535533905932738))]

    def test_run_rows(self) -> None:
        """Per-run rows keep the run index and full precision."""
        batch = make_batch("a1", "fdps", [[0, 2, 1]])
        assert run_rows([batch]) == [("a1", "fdps", 0, repr(1 / 3))]
