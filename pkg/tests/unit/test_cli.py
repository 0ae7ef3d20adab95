"""Test the mpsched command."""

import contextlib
import io
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import pytest

from mpsched.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from mpsched.const import ENV_OUT_DIR
from mpsched.presets import PRESETS


class TestCli(unittest.TestCase):
    """Test command line parsing and exit codes."""

    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def test_presets(self) -> None:
        """Every built-in scenario is listed."""
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            assert main(["presets"]) == EXIT_OK
        listing = out.getvalue()
        for name in PRESETS:
            assert f"{name}: " in listing

    def test_run_writes_three_csv_files(self) -> None:
        """A run writes RBD, RD and the summary plus the table."""
        out = self.tmp / "out"
        argv = ["-q", "run", "--scenario", "a1", "--scheduler", "fdps", "--runs", "2", "--seed", "7"]
        assert main([*argv, "--sim-seconds", "1", "--out", str(out)]) == EXIT_OK
        assert sorted(path.name for path in out.glob("*.csv")) == ["rbd_a1_fdps.csv", "rd_a1_fdps.csv", "summary.csv"]
        assert (out / "table.txt").is_file()

    def test_per_run_file(self) -> None:
        """--per-run adds runs.csv with one row per run."""
        out = self.tmp / "out"
        argv = ["-q", "run", "--scenario", "a1", "--runs", "2", "--sim-seconds", "1", "--per-run", "--out", str(out)]
        assert main(argv) == EXIT_OK
        lines = (out / "runs.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "scenario,scheduler,run,mean_occupancy"
        assert [line.split(",")[2] for line in lines[1:]] == ["0", "1"]

    def test_compare_is_deterministic(self) -> None:
        """Same arguments, byte-identical files."""
        contents = []
        for name in ("first", "second"):
            out = self.tmp / name
            argv = ["-q", "compare", "--scenario", "a2", "--runs", "1", "--sim-seconds", "1", "--out", str(out)]
            assert main(argv) == EXIT_OK
            contents.append({path.name: path.read_bytes() for path in sorted(out.iterdir())})
        assert contents[0] == contents[1]
        assert len(contents[0]) == 3 * 2 + 2

    def test_output_directory_from_environment(self) -> None:
        """Without --out the environment picks the directory."""
        out = self.tmp / "env"
        with mock.patch.dict(os.environ, {ENV_OUT_DIR: str(out)}):
            assert main(["-q", "run", "--scenario", "a1", "--runs", "1", "--sim-seconds", "1"]) == EXIT_OK
        assert (out / "summary.csv").is_file()

    def test_scenario_file(self) -> None:
        """Scenario files work like presets and keep their name."""
        scenario = self.tmp / "lab.ini"
        scenario.write_text(
            "[scenario]\nscheduler = rtt-half\nruns = 1\nsim_seconds = 1\n\n"
            "[path.0]\nforward_bandwidth = 4Mbps\nforward_delay = 10ms\n",
            encoding="utf-8",
        )
        out = self.tmp / "out"
        assert main(["-q", "run", "--scenario", str(scenario), "--out", str(out)]) == EXIT_OK
        assert (out / "rbd_lab_rtt-half.csv").is_file()

    def test_unknown_scenario(self) -> None:
        """An unknown scenario is invalid input."""
        assert main(["-q", "run", "--scenario", "nosuch", "--out", str(self.tmp)]) == EXIT_INVALID

    def test_invalid_override(self) -> None:
        """Overrides are validated like scenario fields."""
        assert main(["-q", "run", "--scenario", "a1", "--runs", "0", "--out", str(self.tmp)]) == EXIT_INVALID

    def test_workers(self) -> None:
        """At least one worker."""
        assert main(["-q", "run", "--scenario", "a1", "--workers", "0"]) == EXIT_INVALID

    def test_unwritable_output(self) -> None:
        """Output failures are run failures."""
        blocker = self.tmp / "file"
        blocker.write_text("", encoding="utf-8")
        argv = ["-q", "run", "--scenario", "a1", "--runs", "1", "--sim-seconds", "1", "--out", str(blocker)]
        assert main(argv) == EXIT_FAILED

    def test_usage_errors(self) -> None:
        """Unknown flags and bad values exit with status 1."""
        for argv in (
            ["--bogus"],
            ["run", "--scenario", "a1", "--scheduler", "mtcs"],
            ["run", "--scenario", "a1", "--clock-offset", "soon"],
            ["run"],
        ):
            with contextlib.redirect_stderr(io.StringIO()), pytest.raises(SystemExit) as err:
                main(argv)
            assert err.value.code == EXIT_INVALID, argv

    def test_no_command(self) -> None:
        """A bare invocation prints help and fails."""
        with contextlib.redirect_stderr(io.StringIO()):
            assert main([]) == EXIT_INVALID
