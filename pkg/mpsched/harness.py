"""Seeded simulation runs and batches."""

from __future__ import annotations

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import async_timeout

from .commons import MpschedError, SimulationContractError, SimulationRunError
from .const import CATEGORY_BACKGROUND, STREAM_SCHEDULER
from .endpoint import MptcpConnection
from .reorder_metrics import (
    ArrivalRecord,
    ReorderHistogram,
    compute_rbd,
    compute_rd,
    mean_occupancy,
    pool_histograms,
    summarize_means,
)
from .rng import RngStream
from .scenario import ScenarioConfig
from .schedulers import FifoScheduler, make_scheduler
from .sim_core import LedgerCounts, Network, Simulator
from .topology import FlowRoutes, Topology, build_topology
from .units import seconds

_LOGGER = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Everything one run produced."""

    scenario: str
    """Scenario name"""
    scheduler: str
    """Scheduler name"""
    run_index: int
    """Position in the batch"""
    seed: int
    """Seed the run used"""
    record: ArrivalRecord
    """Unique MPTCP data arrivals"""
    rbd: ReorderHistogram
    """Buffer occupancy density"""
    rd: ReorderHistogram
    """Reorder density"""
    mean_occupancy: float
    """Average buffer occupancy in segments"""
    delivered: int
    """Segments delivered in order to the application"""
    duplicates: int
    """Duplicate data arrivals at the receiver"""
    retransmissions: int
    """MPTCP retransmissions, all subflows"""
    events: int
    """Events dispatched"""
    trace_digest: str
    """Digest of the dispatched event trace"""
    estimate_digest: str
    """Digest of every forward-delay difference estimate"""
    ledger: dict[str, LedgerCounts] = field(default_factory=dict)
    """Packet counters per category"""

    def __repr__(self) -> str:
        return (
            f"Run({self.scenario}/{self.scheduler} #{self.run_index} seed={self.seed}: "
            f"{len(self.record)} arrivals, mean occupancy {self.mean_occupancy:.3f})"
        )


@dataclass
class BatchResult:
    """All runs of one scenario with one scheduler, ordered by run index."""

    config: ScenarioConfig
    """Scenario the batch ran"""
    runs: list[RunResult]
    """Per-run results"""

    @property
    def scenario(self) -> str:
        return self.config.name

    @property
    def scheduler(self) -> str:
        return self.config.scheduler

    @property
    def run_means(self) -> list[float]:
        return [run.mean_occupancy for run in self.runs]

    @cached_property
    def occupancy(self) -> tuple[float, float]:
        """Mean and sample standard deviation of per-run mean occupancy."""
        return summarize_means(self.run_means)

    @cached_property
    def rbd(self) -> ReorderHistogram:
        """RBD pooled over runs, weighted by arrivals."""
        return pool_histograms([(run.rbd, len(run.record)) for run in self.runs])

    @cached_property
    def rd(self) -> ReorderHistogram:
        """RD pooled over runs, weighted by arrivals."""
        return pool_histograms([(run.rd, len(run.record)) for run in self.runs])


def _background_flow(sim: Simulator, network: Network, cfg: ScenarioConfig, routes: FlowRoutes) -> MptcpConnection:
    return MptcpConnection(
        sim,
        network,
        [routes.data],
        [routes.ack],
        FifoScheduler(),
        mss=cfg.mss,
        packet_size=cfg.packet_size,
        send_buffer_segments=cfg.send_buffer_segments,
        initial_cwnd_segments=cfg.initial_cwnd_segments,
        category=CATEGORY_BACKGROUND,
        ack_category=CATEGORY_BACKGROUND,
        record_arrivals=False,
    )


def _check_run(network: Network, topology: Topology) -> None:
    if not network.ledger.reconciles():
        msg = f"packet ledger does not reconcile: {network.ledger.counts}"
        raise SimulationContractError(msg)
    if not topology.queue_bounds_hold():
        msg = "a queue exceeded its capacity"
        raise SimulationContractError(msg)


def _simulate(cfg: ScenarioConfig, run_index: int, seed: int) -> RunResult:
    sim = Simulator()
    network = Network(sim)
    topology = build_topology(cfg, seed)
    scheduler = make_scheduler(cfg.scheduler, cfg.mss, RngStream(seed, STREAM_SCHEDULER))
    connection = MptcpConnection(
        sim,
        network,
        topology.forward_routes,
        topology.backward_routes,
        scheduler,
        mss=cfg.mss,
        packet_size=cfg.packet_size,
        send_buffer_segments=cfg.send_buffer_segments,
        initial_cwnd_segments=cfg.initial_cwnd_segments,
        clock_offset=cfg.clock_offset_dT,
    )
    background = [
        _background_flow(sim, network, cfg, routes)
        for path in topology.paths
        for routes in (*path.background_fwd, *path.background_bwd)
    ]
    connection.start()
    for flow in background:
        flow.start()
    sim.run_until(seconds(cfg.sim_seconds))
    _check_run(network, topology)

    record = connection.receiver.record()
    sender = connection.sender
    return RunResult(
        scenario=cfg.name,
        scheduler=cfg.scheduler,
        run_index=run_index,
        seed=seed,
        record=record,
        rbd=compute_rbd(record),
        rd=compute_rd(record),
        mean_occupancy=mean_occupancy(record),
        delivered=connection.receiver.delivered_count,
        duplicates=connection.receiver.duplicates,
        retransmissions=sender.retransmissions,
        events=sim.dispatched,
        trace_digest=sim.trace_digest,
        estimate_digest=sender.estimator.estimate_digest,
        ledger=dict(network.ledger.counts),
    )


def run_simulation(cfg: ScenarioConfig, run_index: int) -> RunResult:
    """
    Run one seeded simulation.

    Args:
    ----
        cfg (ScenarioConfig): scenario
        run_index (int): position in the batch, the seed is ``base_seed + run_index``

    Returns:
    -------
        result: arrival record, metrics and digests

    """
    seed = cfg.seed_for(run_index)
    _LOGGER.debug("Starting %s/%s run %d with seed %d", cfg.name, cfg.scheduler, run_index, seed)
    try:
        result = _simulate(cfg, run_index, seed)
    except MpschedError as exception:
        raise SimulationRunError(str(exception), run_index, seed) from exception
    except Exception as exception:  # pylint: disable=broad-except
        msg = f"Something really wrong happened! {type(exception).__name__}: {exception}"
        raise SimulationRunError(msg, run_index, seed) from exception
    _LOGGER.debug(
        "Finished %s/%s run %d: %d events, %d arrivals, mean occupancy %.3f",
        cfg.name,
        cfg.scheduler,
        run_index,
        result.events,
        len(result.record),
        result.mean_occupancy,
    )
    return result


def run_batch(cfg: ScenarioConfig, workers: int = 1) -> BatchResult:
    """Run every seed of ``cfg``; more than one worker fans the runs out to processes."""
    if workers > 1:
        return asyncio.run(run_batch_async(cfg, workers))
    _LOGGER.info("Running %s with %s: %d runs", cfg.name, cfg.scheduler, cfg.runs)
    return BatchResult(cfg, [run_simulation(cfg, run_index) for run_index in range(cfg.runs)])


async def _guarded(future: asyncio.Future[RunResult], cfg: ScenarioConfig, run_index: int, run_timeout: float | None) -> RunResult:
    try:
        async with async_timeout.timeout(run_timeout):
            return await future
    except (TimeoutError, asyncio.exceptions.TimeoutError) as exception:
        msg = f"Timed out after {run_timeout}s"
        raise SimulationRunError(msg, run_index, cfg.seed_for(run_index)) from exception


def _abandon(pool: ProcessPoolExecutor) -> None:
    """Shut a pool down without waiting for the runs its workers are still busy with."""
    processes = list((pool._processes or {}).values())  # noqa: SLF001
    pool.shutdown(wait=False, cancel_futures=True)
    for process in processes:
        process.terminate()


async def run_batch_async(cfg: ScenarioConfig, workers: int, run_timeout: float | None = None) -> BatchResult:
    """
    Run every seed of ``cfg`` in a process pool.

    The first failing or timed-out run cancels the rest and terminates the workers.

    Args:
    ----
        cfg (ScenarioConfig): scenario
        workers (int): pool size
        run_timeout (float | None): [Optional] seconds allowed per run

    Returns:
    -------
        batch: results ordered by run index

    """
    _LOGGER.info("Running %s with %s: %d runs on %d workers", cfg.name, cfg.scheduler, cfg.runs, workers)
    loop = asyncio.get_running_loop()
    pool = ProcessPoolExecutor(max_workers=max(1, workers))
    tasks = [
        asyncio.ensure_future(
            _guarded(loop.run_in_executor(pool, run_simulation, cfg, run_index), cfg, run_index, run_timeout)
        )
        for run_index in range(cfg.runs)
    ]
    try:
        runs = await asyncio.gather(*tasks)
    except BaseException:
        for task in tasks:
            task.cancel()
        _abandon(pool)
        raise
    pool.shutdown(wait=True)
    return BatchResult(cfg, list(runs))


def compare(cfg: ScenarioConfig, schedulers: list[str] | tuple[str, ...], workers: int = 1) -> list[BatchResult]:
    """Run the same scenario and seeds once per scheduler."""
    return [run_batch(cfg.with_overrides(scheduler=name), workers) for name in schedulers]
