"""Parameter sweeps, turning points, the large-block throughput ratio and
design-space frontier scans, plus the CSV these studies are written to."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

from . import protocol as proto_mod
from .pareto import ObjectivePoint, all_pairs_frontier, pareto_frontier
from .protocol import PROBABILISTIC, ConfigError, ProtocolConfig
from .simulator import PerformancePoint, SimulationConfig, round_samples, simulate

__all__ = [
    "SWEEP_VARIABLES",
    "CSV_COLUMNS",
    "NoKneeError",
    "RegimeNotReachedError",
    "SweepSpec",
    "CurvePoint",
    "ScanResult",
    "worker_count",
    "protocol_for",
    "run_sweep",
    "turning_point",
    "throughput_knee",
    "bbt_dominated_fraction",
    "regime_block_size",
    "theorem1_ratio",
    "default_d_rule",
    "design_space_scan",
    "hbft_dominates",
    "csv_rows",
    "write_csv",
]

SWEEP_VARIABLES = ("block_size", "delay_factor", "alpha", "fork_rate_override", "n")
CSV_COLUMNS = (
    "protocol", "C", "d", "B_size_tx", "alpha", "D", "N", "p", "seed", "SR",
    "fork_rate", "block_rate", "committee_rate", "bandwidth_eff", "K",
    "mean_interval_s", "throughput_tps", "latency_s", "on_frontier",
)
THREADS_ENV = "ALPHABLOCK_THREADS"


class NoKneeError(ValueError):
    """Latency never leaves its initial flat level."""


class RegimeNotReachedError(RuntimeError):
    """Block broadcast time does not dominate the sampled delays by the required factor."""


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def protocol_for(preset, base: ProtocolConfig, n: int) -> ProtocolConfig:
    """Materialise a preset name against the shared protocol parameters of ``base``."""
    shared = dict(
        security_level=base.security_level,
        block_size_tx=base.block_size_tx,
        message_size_bytes=base.message_size_bytes,
        tx_size_bytes=base.tx_size_bytes,
    )
    if isinstance(preset, ProtocolConfig):
        return preset
    if preset == "hbft":
        return proto_mod.hbft(n, base.byzantine_ratio, **shared)
    if preset == "poa":
        return proto_mod.poa(n, base.byzantine_ratio,
                             fork_rate_override=base.fork_rate_override, **shared)
    raise ConfigError(f"unknown protocol preset {preset!r}")


@dataclass(frozen=True)
class SweepSpec:
    base: SimulationConfig
    swept_variable: str
    values: tuple
    protocols: tuple = ("hbft", "poa")

    def __post_init__(self):
        if self.swept_variable not in SWEEP_VARIABLES:
            raise ConfigError(f"swept_variable must be one of {SWEEP_VARIABLES}, got {self.swept_variable!r}")
        if len(self.values) == 0:
            raise ConfigError("sweep needs at least one value")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ConfigError("sweep values must be strictly increasing")
        if len(self.protocols) == 0:
            raise ConfigError("sweep needs at least one protocol")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "protocols", tuple(self.protocols))

    def config_at(self, value, preset) -> SimulationConfig:
        """The simulation for one (value, protocol) cell; the network seed never changes."""
        base = self.base
        shared = base.protocol
        n = base.n
        net = {}
        var = self.swept_variable
        if var == "block_size":
            shared = replace(shared, block_size_tx=int(value))
        elif var == "alpha":
            shared = replace(shared, byzantine_ratio=float(value))
        elif var == "fork_rate_override":
            shared = replace(shared, fork_rate_override=float(value))
        elif var == "delay_factor":
            net["d_factor"] = float(value)
        elif var == "n":
            n = int(value)
            net["n"] = n
        if isinstance(preset, ProtocolConfig):
            updates = {}
            if var == "block_size":
                updates["block_size_tx"] = int(value)
            elif var == "alpha":
                updates["byzantine_ratio"] = float(value)
            elif var == "fork_rate_override" and preset.confirmation_rule == PROBABILISTIC:
                updates["fork_rate_override"] = float(value)
            protocol = replace(preset, **updates)
        else:
            protocol = protocol_for(preset, shared, n)
        return replace(base, protocol=protocol, **net)


@dataclass(frozen=True)
class CurvePoint:
    swept_value: float
    points: tuple[PerformancePoint, ...]

    def by_name(self, name: str) -> PerformancePoint:
        for p in self.points:
            if p.protocol_name == name:
                return p
        raise KeyError(name)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[CurvePoint]:
    cells = [spec.config_at(v, preset) for v in spec.values for preset in spec.protocols]
    results = _map(simulate, cells, workers)
    k = len(spec.protocols)
    return [
        CurvePoint(v, tuple(results[i * k:(i + 1) * k]))
        for i, v in enumerate(spec.values)
    ]


def turning_point(curve: Sequence[tuple[float, float]], tolerance: float = 0.05) -> int:
    """Index of the last point still within ``tolerance`` of the initial latency.

    ``curve`` is a list of (throughput, latency) ordered by block size.
    """
    if len(curve) < 3:
        raise ValueError("turning_point needs at least 3 points")
    flat = curve[0][1]
    limit = flat * (1.0 + tolerance)
    for i, (_, lat) in enumerate(curve):
        if lat > limit:
            return i - 1
    raise NoKneeError(f"latency never exceeds {limit:.6g} (flat level {flat:.6g})")


def throughput_knee(throughputs: Sequence[float], tolerance: float = 0.05) -> int:
    """First index from which throughput stays within ``tolerance`` of its maximum."""
    top = max(throughputs)
    floor = (1.0 - tolerance) * top
    knee = len(throughputs) - 1
    for i in range(len(throughputs) - 1, -1, -1):
        if throughputs[i] < floor:
            break
        knee = i
    return knee


def bbt_dominated_fraction(config: SimulationConfig) -> float:
    """Share of rounds whose interval is set by block broadcast time."""
    samples = round_samples(config)
    return sum(s.bbt > max(s.cct, s.bbl) for s in samples) / len(samples)


def _max_delay_term(config: SimulationConfig) -> float:
    return max(max(s.cct, s.bbl) for s in round_samples(config))


def regime_block_size(base: SimulationConfig, factor: float = 10.0) -> int:
    """Smallest block (tx) whose broadcast time is ``factor`` times every sampled
    CCT and BBL, for both the hbft and poa presets on ``base``'s network."""
    worst = max(_max_delay_term(replace(base, protocol=protocol_for(p, base.protocol, base.n)))
                for p in ("hbft", "poa"))
    per_tx = base.protocol.tx_size_bytes / base.bandwidth
    return max(1, math.ceil(factor * worst / per_tx * (1 + 1e-12)))


def theorem1_ratio(base: SimulationConfig, large_block_tx: int, factor: float = 10.0) -> float:
    """T(poa) / T(hbft) at ``large_block_tx``, which should approach 1 - alpha."""
    shared = replace(base.protocol, block_size_tx=int(large_block_tx))
    configs = {name: replace(base, protocol=protocol_for(name, shared, base.n)) for name in ("hbft", "poa")}
    bbt = proto_mod.block_broadcast_time(large_block_tx, shared.tx_size_bytes, base.bandwidth)
    for name, cfg in configs.items():
        worst = _max_delay_term(cfg)
        if bbt < factor * worst:
            raise RegimeNotReachedError(
                f"{name}: BBT {bbt:.6g}s < {factor} x max sampled delay term {worst:.6g}s"
            )
    return simulate(configs["poa"]).throughput / simulate(configs["hbft"]).throughput


def default_d_rule(c: int, n: int, alpha: float) -> list[int]:
    """Endorsement sizes scanned for committee size ``c``: 0, C/3, C/2 and 2f, capped at C."""
    f = proto_mod.byzantine_number(n, alpha)
    ds = [0, math.ceil(c / 3), math.ceil(c / 2), min(2 * f, c)]
    return sorted(set(ds))


@dataclass(frozen=True)
class ScanResult:
    points: tuple[PerformancePoint, ...]
    frontier: tuple[int, ...]
    flags: tuple[str, ...]

    def objective_points(self) -> list[ObjectivePoint]:
        return [ObjectivePoint.from_performance(p.throughput, p.latency, i)
                for i, p in enumerate(self.points)]


def design_space_scan(
    base: SimulationConfig,
    c_values: Iterable[int],
    b_sizes: Iterable[int],
    d_rule: Callable[[int], Sequence[int]] | Mapping[int, Sequence[int]] | None = None,
    include_presets: bool = True,
    workers: int | None = None,
) -> ScanResult:
    """Evaluate a (C, d, B_size) grid and mark its Pareto frontier.

    Grid designs use the probabilistic confirmation rule. The hbft and poa
    presets are added at every block size and flagged by name.
    """
    n, alpha = base.n, base.protocol.byzantine_ratio
    if d_rule is None:
        rule = lambda c: default_d_rule(c, n, alpha)
    elif isinstance(d_rule, Mapping):
        rule = lambda c: d_rule[c]
    else:
        rule = d_rule
    cells, flags = [], []
    c_values = list(c_values)
    for b in b_sizes:
        shared = replace(base.protocol, block_size_tx=int(b))
        if include_presets:
            for name in ("hbft", "poa"):
                cells.append(replace(base, protocol=protocol_for(name, shared, n)))
                flags.append(name)
        for c in c_values:
            for d in rule(c):
                if not 0 <= d <= c <= n - 1:
                    raise ConfigError(f"grid cell C={c}, d={d} violates d <= C <= n-1")
                p = replace(shared, committee_size=int(c), endorsement_size=int(d),
                            confirmation_rule=PROBABILISTIC, fixed_confirmations=None,
                            name=f"C{c}d{d}")
                cells.append(replace(base, protocol=p))
                flags.append("custom")
    if not cells:
        raise ConfigError("design space scan has no cells")
    points = tuple(_map(simulate, cells, workers))
    objectives = [ObjectivePoint.from_performance(p.throughput, p.latency, i) for i, p in enumerate(points)]
    frontier = pareto_frontier(objectives)
    return ScanResult(points, tuple(frontier), tuple(flags))


def hbft_dominates(hbft_point: PerformancePoint, poa_point: PerformancePoint) -> bool:
    """Strictly higher throughput and strictly lower latency."""
    return hbft_point.throughput > poa_point.throughput and hbft_point.latency < poa_point.latency


def _fmt(x: float) -> str:
    return format(x, ".9g")


def csv_rows(points: Sequence[PerformancePoint], on_frontier: Iterable[int] = ()) -> list[list[str]]:
    marks = set(on_frontier)
    rows = []
    for i, pt in enumerate(points):
        cfg, pc, r = pt.config, pt.config.protocol, pt.rates
        rows.append([
            pc.name, str(pc.committee_size), str(pc.endorsement_size), str(pc.block_size_tx),
            _fmt(pc.byzantine_ratio), _fmt(cfg.d_factor), str(cfg.n), _fmt(cfg.p), str(cfg.seed),
            str(cfg.simulation_rounds), _fmt(r.fork_rate), _fmt(r.block_rate), _fmt(r.committee_rate),
            _fmt(r.bandwidth_efficiency), str(r.confirmation_number), _fmt(pt.mean_interval),
            _fmt(pt.throughput), _fmt(pt.latency), "1" if i in marks else "0",
        ])
    return rows


def write_csv(stream: io.TextIOBase, points: Sequence[PerformancePoint],
              on_frontier: Iterable[int] = (), header_lines: Sequence[str] = ()) -> None:
    """Write ``#``-prefixed header lines, the column row, then one row per point."""
    for line in header_lines:
        stream.write(f"# {line}\n" if line else "#\n")
    stream.write(",".join(CSV_COLUMNS) + "\n")
    for row in csv_rows(points, on_frontier):
        stream.write(",".join(row) + "\n")


def frontier_oracle_agrees(result: ScanResult) -> bool:
    objectives = result.objective_points()
    return list(result.frontier) == all_pairs_frontier(objectives)
