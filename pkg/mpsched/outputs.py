"""CSV and text outputs of a batch."""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import TYPE_CHECKING

from .commons import OutputError
from .const import SCHEDULER_NAMES

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .harness import BatchResult
    from .reorder_metrics import ReorderHistogram

_LOGGER = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"
RUNS_FILE = "runs.csv"
TABLE_FILE = "table.txt"
SUMMARY_HEADER = ("scenario", "scheduler", "runs", "mean_occupancy", "std_occupancy")
RUNS_HEADER = ("scenario", "scheduler", "run", "mean_occupancy")
HISTOGRAM_HEADER = ("index", "density")


def histogram_file(histogram: ReorderHistogram, scenario: str, scheduler: str) -> str:
    """File name of a pooled histogram, e.g. ``rbd_a2_fdps.csv``."""
    return f"{histogram.kind.value}_{scenario}_{scheduler}.csv"


def _write_rows(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    try:
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exception:
        msg = f"Failed writing {exception.strerror or exception}"
        raise OutputError(msg, path) from exception
    return path


def write_histogram(path: Path, histogram: ReorderHistogram) -> Path:
    """``index,density`` rows sorted by index; densities keep full float precision."""
    return _write_rows(path, HISTOGRAM_HEADER, [(index, repr(density)) for index, density in histogram.items()])


def summary_rows(batches: Sequence[BatchResult]) -> list[tuple[str, str, int, str, str]]:
    """One row per (scenario, scheduler)."""
    rows = []
    for batch in batches:
        mean, std = batch.occupancy
        rows.append((batch.scenario, batch.scheduler, len(batch.runs), repr(mean), repr(std)))
    return rows


def run_rows(batches: Sequence[BatchResult]) -> list[tuple[str, str, int, str]]:
    """One row per run, for spread and significance checks outside the tool."""
    return [
        (batch.scenario, batch.scheduler, run.run_index, repr(run.mean_occupancy)) for batch in batches for run in batch.runs
    ]


def format_table(batches: Sequence[BatchResult]) -> str:
    """
    Mean buffer occupancy table: one row per scenario, one ``mean±std`` column per scheduler.

    Args:
    ----
        batches (Sequence[BatchResult]): any mix of scenarios and schedulers

    Returns:
    -------
        table: plain text, cells without a batch show ``-``

    """
    cells: dict[str, dict[str, str]] = {}
    for batch in batches:
        mean, std = batch.occupancy
        cells.setdefault(batch.scenario, {})[batch.scheduler] = f"{mean:.2f}±{std:.2f}"
    columns = list(SCHEDULER_NAMES) + sorted({b.scheduler for b in batches} - set(SCHEDULER_NAMES))
    header = ["scenario", *columns]
    body = [[scenario, *(row.get(name, "-") for name in columns)] for scenario, row in cells.items()]
    widths = [max(len(line[k]) for line in (header, *body)) for k in range(len(header))]
    lines = ["Mean of buffer occupancy (in MSS)"]
    lines.extend("  ".join(value.ljust(width) for value, width in zip(line, widths)).rstrip() for line in (header, *body))
    return "\n".join(lines) + "\n"


def emit_outputs(
    results: BatchResult | Sequence[BatchResult],
    out_dir: str | Path,
    *,
    per_run: bool = False,
) -> list[Path]:
    """
    Write pooled RBD and RD per batch, the summary CSV and the occupancy table.

    Args:
    ----
        results (BatchResult | Sequence[BatchResult]): batches to report
        out_dir (str | Path): created when missing
        per_run (bool): [Optional] also write every run's mean occupancy to ``runs.csv``

    Returns:
    -------
        files: paths written, histograms first

    """
    batches = [results] if not isinstance(results, (list, tuple)) else list(results)
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exception:
        msg = f"Cannot create output directory: {exception.strerror or exception}"
        raise OutputError(msg, out) from exception

    written = []
    for batch in batches:
        for histogram in (batch.rbd, batch.rd):
            written.append(write_histogram(out / histogram_file(histogram, batch.scenario, batch.scheduler), histogram))
    written.append(_write_rows(out / SUMMARY_FILE, SUMMARY_HEADER, summary_rows(batches)))
    if per_run:
        written.append(_write_rows(out / RUNS_FILE, RUNS_HEADER, run_rows(batches)))
    table = out / TABLE_FILE
    try:
        table.write_text(format_table(batches), encoding="utf-8")
    except OSError as exception:
        msg = f"Failed writing {exception.strerror or exception}"
        raise OutputError(msg, table) from exception
    written.append(table)
    _LOGGER.info("Wrote %d files to %s", len(written), out)
    return written
