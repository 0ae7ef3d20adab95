"""Built-in experiment scenarios."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .commons import UnknownScenarioError
from .const import SCHEDULER_FDPS
from .scenario import LinkSpec, PathSpec, ScenarioConfig
from .units import mbps, ms

if TYPE_CHECKING:
    from collections.abc import Callable


def _link(bandwidth_mbps: float, delay_ms: float) -> LinkSpec:
    return LinkSpec(mbps(bandwidth_mbps), ms(delay_ms))


def _a1() -> tuple[PathSpec, ...]:
    """Two identical paths."""
    return (PathSpec(_link(4, 10)), PathSpec(_link(4, 10)))


def _a2() -> tuple[PathSpec, ...]:
    """Equal bandwidth, different delay."""
    return (PathSpec(_link(4, 10)), PathSpec(_link(4, 30)))


def _a3() -> tuple[PathSpec, ...]:
    """Slow short path next to a fast long one."""
    return (PathSpec(_link(2, 10)), PathSpec(_link(8, 30)))


def _a4() -> tuple[PathSpec, ...]:
    """A2 with one competing forward flow per path."""
    return (
        PathSpec(_link(4, 10), background_flows_fwd=1),
        PathSpec(_link(4, 30), background_flows_fwd=1),
    )


def _a5() -> tuple[PathSpec, ...]:
    """Asymmetric backward links, competing flows in both directions."""
    return (
        PathSpec(_link(4, 10), backward=_link(0.5, 15), background_flows_fwd=1, background_flows_bwd=1),
        PathSpec(_link(8, 30), backward=_link(1, 35), background_flows_fwd=1, background_flows_bwd=1),
    )


def _three_path() -> tuple[PathSpec, ...]:
    """Three diverse paths, one competing forward flow each."""
    return (
        PathSpec(_link(2, 10), background_flows_fwd=1),
        PathSpec(_link(4, 30), background_flows_fwd=1),
        PathSpec(_link(8, 50), background_flows_fwd=1),
    )


PRESETS: dict[str, Callable[[], tuple[PathSpec, ...]]] = {
    "a1": _a1,
    "a2": _a2,
    "a3": _a3,
    "a4": _a4,
    "a5": _a5,
    "three-path": _three_path,
}


def preset(name: str, scheduler: str = SCHEDULER_FDPS) -> ScenarioConfig:
    """Build a preset with every other field at its default."""
    try:
        paths = PRESETS[name]()
    except KeyError:
        msg = f"unknown preset {name!r}, expected one of {', '.join(PRESETS)}"
        raise UnknownScenarioError(msg) from None
    return ScenarioConfig(name=name, paths=paths, scheduler=scheduler)
