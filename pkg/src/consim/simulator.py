"""Monte Carlo round loop: sample leaders and committees on a fixed graph, then
turn the expected block interval and committee rate into throughput and latency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import netmodel
from .protocol import (
    ConfigError,
    ProtocolConfig,
    RateBundle,
    block_broadcast_time,
    block_interval,
    committee_rate,
    latency,
    rate_bundle,
    throughput,
)

__all__ = [
    "DEFAULT_ROUNDS",
    "SimulationConfig",
    "RoundSample",
    "PerformancePoint",
    "network_for",
    "derive_round_seed",
    "run_round",
    "round_samples",
    "simulate",
    "clear_caches",
]

DEFAULT_ROUNDS = 200


@dataclass(frozen=True)
class SimulationConfig:
    protocol: ProtocolConfig
    n: int = 101
    p: float = 0.06
    d_factor: float = 0.1
    bandwidth: float = 1e6
    simulation_rounds: int = DEFAULT_ROUNDS
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.p <= 1.0:
            raise ConfigError(f"p must lie in (0, 1], got {self.p}")
        if self.d_factor <= 0:
            raise ConfigError(f"d_factor must be > 0, got {self.d_factor}")
        if self.bandwidth <= 0:
            raise ConfigError(f"bandwidth must be > 0, got {self.bandwidth}")
        if self.simulation_rounds < 1:
            raise ConfigError(f"simulation_rounds must be >= 1, got {self.simulation_rounds}")
        if self.protocol.committee_size > self.n - 1:
            raise ConfigError(
                f"committee_size {self.protocol.committee_size} exceeds n-1 = {self.n - 1}"
            )

    @property
    def network_key(self) -> tuple:
        return (self.n, self.p, self.d_factor, self.bandwidth, self.seed)

    def with_protocol(self, **changes) -> "SimulationConfig":
        return replace(self, protocol=replace(self.protocol, **changes))


@dataclass(frozen=True)
class RoundSample:
    leader: int
    committee: tuple[int, ...]
    bbt: float
    cct: float
    bbl: float
    cc_edges: int
    bc_edges: int

    @property
    def interval(self) -> float:
        return block_interval(self.bbt, self.cct, self.bbl)


@dataclass(frozen=True)
class PerformancePoint:
    throughput: float
    latency: float
    rates: RateBundle
    mean_interval: float
    mean_committee_rate: float
    config_echo: tuple[int, int, int]
    config: SimulationConfig = field(repr=False)

    @property
    def protocol_name(self) -> str:
        return self.config.protocol.name


@lru_cache(maxsize=64)
def _cached_network(n, p, d_factor, bandwidth, seed):
    return netmodel.generate_network(n, p, d_factor, bandwidth, seed)


def network_for(config: SimulationConfig) -> netmodel.NetworkGraph:
    """The graph a config simulates on; identical network parameters share one graph."""
    return _cached_network(*config.network_key)


def derive_round_seed(master_seed: int, round_index: int) -> int:
    """Independent per-round seed: the master seed spawned at ``round_index``."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(round_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _sample_members(n: int, c: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    # leader drawn first so presets with different C share leaders under one seed
    leader = int(rng.integers(n))
    picks = rng.choice(n - 1, size=c, replace=False) if c else np.empty(0, dtype=np.int64)
    committee = np.where(picks >= leader, picks + 1, picks).astype(np.int64)
    return leader, committee


def _geometry(graph, n, c, d, round_seed, profiles=None):
    rng = np.random.default_rng(round_seed)
    leader, committee = _sample_members(n, c, rng)
    profile = profiles.get(leader) if profiles is not None else None
    if profile is None:
        profile = netmodel.shortest_delays(graph, leader)
        if profiles is not None:
            profiles[leader] = profile
    cct = netmodel.committee_comm_time(profile, committee, d)
    bbl = netmodel.blockhead_broadcast_latency(profile)
    cc = netmodel.committee_edge_count(graph, leader, committee, profile=profile)
    return leader, committee, cct, bbl, cc


def run_round(graph: netmodel.NetworkGraph, config: SimulationConfig, round_seed: int) -> RoundSample:
    """One round: leader plus C distinct committee members, and their timings."""
    if graph.node_count != config.n:
        raise ConfigError(f"graph has {graph.node_count} nodes, config expects {config.n}")
    proto = config.protocol
    leader, committee, cct, bbl, cc = _geometry(
        graph, config.n, proto.committee_size, proto.endorsement_size, round_seed
    )
    bbt = block_broadcast_time(proto.block_size_tx, proto.tx_size_bytes, config.bandwidth)
    return RoundSample(leader, tuple(committee.tolist()), bbt, cct, bbl, cc,
                       netmodel.broadcast_edge_count(graph))


@lru_cache(maxsize=512)
def _round_geometry(network_key, c, d, rounds, seed):
    graph = _cached_network(*network_key)
    n = graph.node_count
    profiles = {}
    leaders = np.empty(rounds, dtype=np.int64)
    cct = np.empty(rounds)
    bbl = np.empty(rounds)
    cc = np.empty(rounds, dtype=np.int64)
    committees = []
    for i in range(rounds):
        leader, committee, cct[i], bbl[i], cc[i] = _geometry(
            graph, n, c, d, derive_round_seed(seed, i), profiles
        )
        leaders[i] = leader
        committees.append(tuple(committee.tolist()))
    for arr in (leaders, cct, bbl, cc):
        arr.setflags(write=False)
    return leaders, tuple(committees), cct, bbl, cc


def round_samples(config: SimulationConfig) -> list[RoundSample]:
    """Every round of ``config``; the block-size-independent part is cached."""
    proto = config.protocol
    leaders, committees, cct, bbl, cc = _round_geometry(
        config.network_key, proto.committee_size, proto.endorsement_size,
        config.simulation_rounds, config.seed,
    )
    graph = network_for(config)
    bbt = block_broadcast_time(proto.block_size_tx, proto.tx_size_bytes, config.bandwidth)
    bc = netmodel.broadcast_edge_count(graph)
    return [
        RoundSample(int(leaders[i]), committees[i], bbt, float(cct[i]), float(bbl[i]), int(cc[i]), bc)
        for i in range(config.simulation_rounds)
    ]


def simulate(config: SimulationConfig) -> PerformancePoint:
    """Expected interval and committee rate over SR rounds, then T and L."""
    proto = config.protocol
    _, _, cct, bbl, cc = _round_geometry(
        config.network_key, proto.committee_size, proto.endorsement_size,
        config.simulation_rounds, config.seed,
    )
    graph = network_for(config)
    rounds = config.simulation_rounds
    bbt = block_broadcast_time(proto.block_size_tx, proto.tx_size_bytes, config.bandwidth)
    intervals = np.maximum(np.maximum(cct, bbl), bbt)
    mean_interval = math.fsum(intervals.tolist()) / rounds
    mean_cc = math.fsum(cc.tolist()) / rounds
    mean_bc = float(netmodel.broadcast_edge_count(graph))
    c_rate = committee_rate(mean_cc, mean_bc, proto.message_size_bytes, proto.block_bytes)

    rates = rate_bundle(proto, config.n, c_rate)
    lat = latency(rates.confirmation_number, rates.block_rate, mean_interval)
    thr = throughput(proto.block_size_tx, mean_interval, rates.block_rate, rates.bandwidth_efficiency)
    return PerformancePoint(
        throughput=thr,
        latency=lat,
        rates=rates,
        mean_interval=mean_interval,
        mean_committee_rate=c_rate,
        config_echo=(proto.committee_size, proto.endorsement_size, proto.block_size_tx),
        config=config,
    )


def clear_caches() -> None:
    """Drop cached graphs and round geometry."""
    _cached_network.cache_clear()
    _round_geometry.cache_clear()
