"""Data Classes for experiment scenarios and the scenario file reader."""

from __future__ import annotations

import configparser
import re
import textwrap
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING

from .commons import ScenarioParseError, ScenarioValidationError, UnknownScenarioError
from .const import (
    DEFAULT_BASE_SEED,
    DEFAULT_MSS,
    DEFAULT_PACKET_SIZE,
    DEFAULT_RUNS,
    DEFAULT_SEND_BUFFER_SEGMENTS,
    DEFAULT_SIDE_BANDWIDTH_FACTOR,
    DEFAULT_SIDE_DELAY_NS,
    DEFAULT_SIM_SECONDS,
    INITIAL_CWND_SEGMENTS,
    MAX_PATHS,
    MAX_SIM_SECONDS,
    QUEUE_POLICIES,
    QUEUE_RED,
    RED_MAX_DROP_PROB,
    RED_MAX_FRAC,
    RED_MIN_FRAC,
    SCHEDULER_NAMES,
)
from .units import SimTime, parse_bandwidth, parse_duration, to_seconds

if TYPE_CHECKING:
    from collections.abc import Callable, Mapping

SCENARIO_SECTION = "scenario"
_PATH_SECTION = re.compile(r"^path\.(\d+)$")
_PATH_KEYS = frozenset(
    {
        "forward_bandwidth",
        "forward_delay",
        "backward_bandwidth",
        "backward_delay",
        "side_delay",
        "side_bandwidth_factor",
        "queue",
        "queue_capacity",
        "red_min_frac",
        "red_max_frac",
        "red_max_drop_prob",
        "background_flows_fwd",
        "background_flows_bwd",
    }
)
_SCENARIO_KEYS = frozenset(
    {
        "name",
        "scheduler",
        "sim_seconds",
        "runs",
        "base_seed",
        "clock_offset",
        "packet_size",
        "mss",
        "send_buffer_segments",
        "initial_cwnd_segments",
    }
)


@dataclass(frozen=True)
class LinkSpec:
    """One direction of a bottleneck link."""

    bandwidth: int
    """Bytes per second"""
    delay: SimTime
    """One-way propagation delay"""

    def __repr__(self) -> str:
        return textwrap.dedent("""{}Mbps/{}ms""").format(self.bandwidth * 8 / 1e6, self.delay / 1e6)


@dataclass(frozen=True)
class QueueSpec:
    """Bottleneck queue configuration."""

    policy: str = QUEUE_RED
    """``red`` or ``droptail``"""
    capacity_bytes: int | None = None
    """Explicit capacity, otherwise sized to the path's bandwidth-delay product"""
    red_min_frac: float = RED_MIN_FRAC
    """RED lower threshold as a share of capacity"""
    red_max_frac: float = RED_MAX_FRAC
    """RED upper threshold as a share of capacity"""
    red_max_drop_prob: float = RED_MAX_DROP_PROB
    """RED drop probability at the upper threshold"""


@dataclass(frozen=True)
class PathSpec:
    """One path of the multipath connection."""

    forward: LinkSpec
    """Sender to receiver bottleneck"""
    backward: LinkSpec | None = None
    """Receiver to sender bottleneck, mirrors ``forward`` when omitted"""
    side_delay: SimTime = DEFAULT_SIDE_DELAY_NS
    """Delay of the access and egress side links"""
    side_bandwidth_factor: float = DEFAULT_SIDE_BANDWIDTH_FACTOR
    """Side link bandwidth as a multiple of the bottleneck"""
    queue: QueueSpec = field(default_factory=QueueSpec)
    """Bottleneck queue"""
    background_flows_fwd: int = 0
    """Competing single-path flows sending forward"""
    background_flows_bwd: int = 0
    """Competing single-path flows sending backward"""

    def __repr__(self) -> str:
        return textwrap.dedent("""Path(fwd={} bwd={} bg={}/{})""").format(
            self.forward, self.reverse, self.background_flows_fwd, self.background_flows_bwd
        )

    @property
    def reverse(self) -> LinkSpec:
        """Backward link, defaulted."""
        return self.forward if self.backward is None else self.backward


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated experiment."""

    name: str
    """Scenario name, used in output file names"""
    paths: tuple[PathSpec, ...]
    """Paths in path id order"""
    scheduler: str
    """Scheduler name"""
    sim_seconds: float = DEFAULT_SIM_SECONDS
    """Simulated duration of each run"""
    runs: int = DEFAULT_RUNS
    """Independent runs"""
    base_seed: int = DEFAULT_BASE_SEED
    """Run ``k`` uses seed ``base_seed + k``"""
    clock_offset_dT: SimTime = 0  # noqa: N815
    """Receiver clock minus sender clock"""
    packet_size: int = DEFAULT_PACKET_SIZE
    """Data packet size on the wire"""
    mss: int = DEFAULT_MSS
    """Payload bytes per segment"""
    send_buffer_segments: int = DEFAULT_SEND_BUFFER_SEGMENTS
    """Shared send buffer capacity"""
    initial_cwnd_segments: int = INITIAL_CWND_SEGMENTS
    """Initial congestion window per subflow"""

    def __post_init__(self) -> None:
        validate_scenario(self)

    def __repr__(self) -> str:
        return textwrap.dedent("""{}[{}]({} paths, {} runs x {}s, seed {})""").format(
            self.name, self.scheduler, len(self.paths), self.runs, self.sim_seconds, self.base_seed
        )

    def with_overrides(self, **changes: object) -> ScenarioConfig:
        """Copy with some fields replaced; None values are ignored."""
        return replace(self, **{key: value for key, value in changes.items() if value is not None})

    def seed_for(self, run_index: int) -> int:
        return self.base_seed + run_index


def _validate_link(prefix: str, link: LinkSpec) -> None:
    if link.bandwidth <= 0:
        raise ScenarioValidationError(f"{prefix}_bandwidth", f"must be positive, got {link.bandwidth}")
    if link.delay < 0:
        raise ScenarioValidationError(f"{prefix}_delay", f"must be non-negative, got {link.delay}")


def _validate_path(index: int, path: PathSpec) -> None:
    prefix = f"path.{index}"
    _validate_link(f"{prefix}.forward", path.forward)
    _validate_link(f"{prefix}.backward", path.reverse)
    if path.side_delay < 0:
        raise ScenarioValidationError(f"{prefix}.side_delay", f"must be non-negative, got {path.side_delay}")
    if path.side_bandwidth_factor <= 0:
        msg = f"must be positive, got {path.side_bandwidth_factor}"
        raise ScenarioValidationError(f"{prefix}.side_bandwidth_factor", msg)
    for direction in ("fwd", "bwd"):
        count = getattr(path, f"background_flows_{direction}")
        if count < 0:
            raise ScenarioValidationError(f"{prefix}.background_flows_{direction}", f"must be non-negative, got {count}")
    queue = path.queue
    if queue.policy not in QUEUE_POLICIES:
        msg = f"unknown policy {queue.policy!r}, expected one of {', '.join(QUEUE_POLICIES)}"
        raise ScenarioValidationError(f"{prefix}.queue", msg)
    if queue.capacity_bytes is not None and queue.capacity_bytes <= 0:
        raise ScenarioValidationError(f"{prefix}.queue_capacity", f"must be positive, got {queue.capacity_bytes}")
    if not 0 <= queue.red_min_frac < queue.red_max_frac <= 1:
        msg = f"need 0 <= red_min_frac < red_max_frac <= 1, got {queue.red_min_frac}, {queue.red_max_frac}"
        raise ScenarioValidationError(f"{prefix}.red_min_frac", msg)
    if not 0 <= queue.red_max_drop_prob <= 1:
        raise ScenarioValidationError(f"{prefix}.red_max_drop_prob", f"must be in [0, 1], got {queue.red_max_drop_prob}")


def validate_scenario(cfg: ScenarioConfig) -> None:
    """Raise ScenarioValidationError naming the first offending field."""
    if not cfg.name:
        raise ScenarioValidationError("name", "must not be empty")
    if not 1 <= len(cfg.paths) <= MAX_PATHS:
        raise ScenarioValidationError("paths", f"need between 1 and {MAX_PATHS} paths, got {len(cfg.paths)}")
    if cfg.scheduler not in SCHEDULER_NAMES:
        msg = f"unknown scheduler {cfg.scheduler!r}, expected one of {', '.join(SCHEDULER_NAMES)}"
        raise ScenarioValidationError("scheduler", msg)
    if not 0 < cfg.sim_seconds <= MAX_SIM_SECONDS:
        raise ScenarioValidationError("sim_seconds", f"must be in (0, {MAX_SIM_SECONDS}], got {cfg.sim_seconds}")
    if cfg.runs < 1:
        raise ScenarioValidationError("runs", f"must be at least 1, got {cfg.runs}")
    if cfg.base_seed < 0 or cfg.base_seed + cfg.runs > 1 << 64:
        raise ScenarioValidationError("base_seed", f"seeds must stay within 64 bits, got {cfg.base_seed}")
    if cfg.mss <= 0:
        raise ScenarioValidationError("mss", f"must be positive, got {cfg.mss}")
    if cfg.packet_size < cfg.mss:
        raise ScenarioValidationError("packet_size", f"must be at least mss ({cfg.mss}), got {cfg.packet_size}")
    if cfg.send_buffer_segments < 1:
        raise ScenarioValidationError("send_buffer_segments", f"must be at least 1, got {cfg.send_buffer_segments}")
    if cfg.initial_cwnd_segments < 1:
        raise ScenarioValidationError("initial_cwnd_segments", f"must be at least 1, got {cfg.initial_cwnd_segments}")
    for index, path in enumerate(cfg.paths):
        _validate_path(index, path)


def _convert(section: str, key: str, raw: str, convert: Callable[[str], object]) -> object:
    try:
        return convert(raw)
    except ValueError as err:
        field_name = key if section == SCENARIO_SECTION else f"{section}.{key}"
        raise ScenarioValidationError(field_name, str(err)) from err


def _flag_unknown(section: str, keys: Mapping[str, str], known: frozenset[str]) -> None:
    unknown = sorted(set(keys) - known)
    if unknown:
        field_name = unknown[0] if section == SCENARIO_SECTION else f"{section}.{unknown[0]}"
        raise ScenarioValidationError(field_name, "unknown key")


def path_from_section(name: str, section: Mapping[str, str]) -> PathSpec:
    """Convert a ``[path.<n>]`` section to a PathSpec."""
    _flag_unknown(name, section, _PATH_KEYS)

    def get(key: str, convert: Callable[[str], object], default: object = None) -> object:
        if key not in section:
            return default
        return _convert(name, key, section[key], convert)

    for required in ("forward_bandwidth", "forward_delay"):
        if required not in section:
            raise ScenarioValidationError(f"{name}.{required}", "missing")
    forward = LinkSpec(get("forward_bandwidth", parse_bandwidth), get("forward_delay", parse_duration))
    backward = None
    if "backward_bandwidth" in section or "backward_delay" in section:
        backward = LinkSpec(
            get("backward_bandwidth", parse_bandwidth, forward.bandwidth),
            get("backward_delay", parse_duration, forward.delay),
        )
    queue = QueueSpec(
        policy=get("queue", str.strip, QUEUE_RED).lower(),
        capacity_bytes=get("queue_capacity", int),
        red_min_frac=get("red_min_frac", float, RED_MIN_FRAC),
        red_max_frac=get("red_max_frac", float, RED_MAX_FRAC),
        red_max_drop_prob=get("red_max_drop_prob", float, RED_MAX_DROP_PROB),
    )
    return PathSpec(
        forward=forward,
        backward=backward,
        side_delay=get("side_delay", parse_duration, DEFAULT_SIDE_DELAY_NS),
        side_bandwidth_factor=get("side_bandwidth_factor", float, DEFAULT_SIDE_BANDWIDTH_FACTOR),
        queue=queue,
        background_flows_fwd=get("background_flows_fwd", int, 0),
        background_flows_bwd=get("background_flows_bwd", int, 0),
    )


def scenario_from_parser(parser: configparser.ConfigParser, default_name: str) -> ScenarioConfig:
    """Convert a parsed scenario file to a validated ScenarioConfig."""
    if not parser.has_section(SCENARIO_SECTION):
        raise ScenarioValidationError(SCENARIO_SECTION, "missing [scenario] section")
    main = parser[SCENARIO_SECTION]
    _flag_unknown(SCENARIO_SECTION, main, _SCENARIO_KEYS)
    if "scheduler" not in main:
        raise ScenarioValidationError("scheduler", "missing")

    numbered = []
    for section in parser.sections():
        if section == SCENARIO_SECTION:
            continue
        match = _PATH_SECTION.match(section)
        if match is None:
            raise ScenarioValidationError(section, "unknown section")
        numbered.append((int(match.group(1)), section))
    paths = tuple(path_from_section(section, parser[section]) for _, section in sorted(numbered))

    def get(key: str, convert: Callable[[str], object], default: object) -> object:
        if key not in main:
            return default
        return _convert(SCENARIO_SECTION, key, main[key], convert)

    return ScenarioConfig(
        name=main.get("name", default_name).strip(),
        paths=paths,
        scheduler=main["scheduler"].strip().lower(),
        sim_seconds=get("sim_seconds", float, DEFAULT_SIM_SECONDS),
        runs=get("runs", int, DEFAULT_RUNS),
        base_seed=get("base_seed", int, DEFAULT_BASE_SEED),
        clock_offset_dT=get("clock_offset", parse_duration, 0),
        packet_size=get("packet_size", int, DEFAULT_PACKET_SIZE),
        mss=get("mss", int, DEFAULT_MSS),
        send_buffer_segments=get("send_buffer_segments", int, DEFAULT_SEND_BUFFER_SEGMENTS),
        initial_cwnd_segments=get("initial_cwnd_segments", int, INITIAL_CWND_SEGMENTS),
    )


def parse_scenario_text(text: str, source: str | Path = "<string>", default_name: str = "custom") -> ScenarioConfig:
    """
    Parse scenario file contents.

    Args:
    ----
        text (str): INI text with one ``[scenario]`` and one or more ``[path.<n>]`` sections
        source (str | Path): [Optional] file name used in error messages
        default_name (str): [Optional] scenario name when the file sets none

    Returns:
    -------
        cfg: validated scenario

    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(source))
    except configparser.ParsingError as err:
        lineno = err.errors[0][0] if err.errors else None
        msg = f"malformed line {err.errors[0][1]}" if err.errors else str(err)
        raise ScenarioParseError(msg, lineno, source) from err
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as err:
        raise ScenarioParseError(err.message, err.lineno, source) from err
    except configparser.Error as err:
        raise ScenarioParseError(err.message, getattr(err, "lineno", None), source) from err
    return scenario_from_parser(parser, default_name)


def load_scenario(name_or_path: str | Path) -> ScenarioConfig:
    """
    Resolve a built-in preset by name or read a scenario file.

    Args:
    ----
        name_or_path (str | Path): preset name (``a1``..``a5``, ``three-path``) or file path

    Returns:
    -------
        cfg: validated scenario

    """
    from .presets import PRESETS, preset

    if str(name_or_path) in PRESETS:
        return preset(str(name_or_path))
    path = Path(name_or_path)
    if not path.is_file():
        msg = f"{name_or_path!s} is neither a preset ({', '.join(PRESETS)}) nor a readable file"
        raise UnknownScenarioError(msg)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        msg = f"cannot read {path}: {err}"
        raise UnknownScenarioError(msg) from err
    return parse_scenario_text(text, path, default_name=path.stem)


def describe(cfg: ScenarioConfig) -> str:
    """One line per path, for the ``presets`` listing."""
    lines = [f"{cfg.name}: {len(cfg.paths)} paths, {to_seconds(cfg.clock_offset_dT):g}s clock offset"]
    lines.extend(f"  path {index}: {path!r}" for index, path in enumerate(cfg.paths))
    return "\n".join(lines)
