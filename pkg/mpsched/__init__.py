"""Module providing a discrete-event simulator for multipath TCP packet schedulers."""
from .commons import (
    MpschedError,
    OutputError,
    ScenarioError,
    ScenarioParseError,
    ScenarioValidationError,
    SimulationContractError,
    SimulationRunError,
    UnknownScenarioError,
)
from .harness import BatchResult, RunResult, run_batch, run_batch_async, run_simulation
from .outputs import emit_outputs
from .presets import PRESETS, preset
from .scenario import LinkSpec, PathSpec, QueueSpec, ScenarioConfig, load_scenario

__all__ = [
    "PRESETS",
    "BatchResult",
    "LinkSpec",
    "MpschedError",
    "OutputError",
    "PathSpec",
    "QueueSpec",
    "RunResult",
    "ScenarioConfig",
    "ScenarioError",
    "ScenarioParseError",
    "ScenarioValidationError",
    "SimulationContractError",
    "SimulationRunError",
    "UnknownScenarioError",
    "emit_outputs",
    "load_scenario",
    "preset",
    "run_batch",
    "run_batch_async",
    "run_simulation",
]
