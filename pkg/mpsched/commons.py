"""mpsched Commons."""

from __future__ import annotations

from pathlib import Path


class MpschedError(Exception):
    """Exception to indicate a general mpsched error."""


class SimulationContractError(
    MpschedError,
):
    """Exception to indicate a simulator invariant was violated (a simulator bug)."""


class ScenarioError(
    MpschedError,
):
    """Exception to indicate an unusable scenario configuration."""


class ScenarioParseError(
    ScenarioError,
):
    """Exception to indicate a scenario file could not be parsed."""

    def __init__(self, msg: str, lineno: int | None = None, path: str | Path | None = None) -> None:
        location = ""
        if path is not None:
            location = f"{path}"
        if lineno is not None:
            location = f"{location}:{lineno}" if location else f"line {lineno}"
        super().__init__(f"{location}: {msg}" if location else msg)
        self.lineno = lineno
        self.path = path


class ScenarioValidationError(
    ScenarioError,
):
    """Exception to indicate a scenario field holds an invalid value."""

    def __init__(self, field: str, msg: str) -> None:
        super().__init__(f"Invalid '{field}': {msg}")
        self.field = field


class UnknownScenarioError(
    ScenarioError,
):
    """Exception to indicate a scenario is neither a preset nor a readable file."""


class SimulationRunError(
    MpschedError,
):
    """Exception to indicate a simulation run failed; carries what is needed to replay it."""

    def __init__(self, msg: str, run_index: int, seed: int) -> None:
        super().__init__(f"{msg} (run {run_index}, seed {seed})")
        self.run_index = run_index
        self.seed = seed


class OutputError(
    MpschedError,
):
    """Exception to indicate results could not be written."""

    def __init__(self, msg: str, path: str | Path) -> None:
        super().__init__(f"{msg}: {path}")
        self.path = path
