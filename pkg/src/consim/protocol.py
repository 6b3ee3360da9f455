"""Closed-form protocol quantities: rates, confirmation depth, throughput, latency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .stats import HypergeomParams, hypergeom_tail_ge

__all__ = [
    "ConfigError",
    "DegenerateSecurityError",
    "LivenessError",
    "ZeroIntervalError",
    "FIXED",
    "PROBABILISTIC",
    "DEFAULT_TX_SIZE_BYTES",
    "ProtocolConfig",
    "RateBundle",
    "byzantine_number",
    "fork_rate",
    "block_rate",
    "confirmation_number",
    "committee_rate",
    "block_interval",
    "block_broadcast_time",
    "throughput",
    "latency",
    "rate_bundle",
    "hbft",
    "poa",
    "custom",
]

FIXED = "fixed"
PROBABILISTIC = "probabilistic"
DEFAULT_TX_SIZE_BYTES = 4000
HBFT_CONFIRMATIONS = 3


class ConfigError(ValueError):
    """A protocol or simulation configuration violates its invariants."""


class DegenerateSecurityError(ValueError):
    """Probabilistic confirmation is impossible because every round forks."""


class LivenessError(ValueError):
    """Block rate is zero, so no block is ever confirmed."""


class ZeroIntervalError(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolConfig:
    """A point in the committee design space.

    ``confirmation_rule`` is ``"fixed"`` (with ``fixed_confirmations``) or
    ``"probabilistic"``. ``name`` is only a label for output.
    """

    committee_size: int
    endorsement_size: int
    confirmation_rule: str = PROBABILISTIC
    fixed_confirmations: int | None = None
    byzantine_ratio: float = 0.1
    security_level: float = 1e-5
    block_size_tx: int = 2000
    message_size_bytes: float = 100.0
    tx_size_bytes: float = DEFAULT_TX_SIZE_BYTES
    fork_rate_override: float | None = None
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if not 0.0 <= self.byzantine_ratio < 1.0:
            raise ConfigError(f"byzantine_ratio must lie in [0, 1), got {self.byzantine_ratio}")
        if not 0.0 < self.security_level < 1.0:
            raise ConfigError(f"security_level must lie in (0, 1), got {self.security_level}")
        if self.block_size_tx < 1:
            raise ConfigError(f"block_size_tx must be >= 1, got {self.block_size_tx}")
        if self.tx_size_bytes <= 0:
            raise ConfigError(f"tx_size_bytes must be > 0, got {self.tx_size_bytes}")
        if self.message_size_bytes < 0:
            raise ConfigError(f"message_size_bytes must be >= 0, got {self.message_size_bytes}")
        if self.committee_size < 0 or self.endorsement_size < 0:
            raise ConfigError("committee_size and endorsement_size must be >= 0")
        if self.endorsement_size > self.committee_size:
            raise ConfigError(
                f"endorsement_size {self.endorsement_size} exceeds committee_size {self.committee_size}"
            )
        if self.confirmation_rule == FIXED:
            if self.fixed_confirmations is None or self.fixed_confirmations < 1:
                raise ConfigError("fixed confirmation rule needs fixed_confirmations >= 1")
        elif self.confirmation_rule != PROBABILISTIC:
            raise ConfigError(f"unknown confirmation_rule {self.confirmation_rule!r}")
        if self.fork_rate_override is not None and not 0.0 <= self.fork_rate_override <= 1.0:
            raise ConfigError(f"fork_rate_override must lie in [0, 1], got {self.fork_rate_override}")

    @property
    def block_bytes(self) -> float:
        return self.block_size_tx * self.tx_size_bytes

    def with_(self, **changes) -> "ProtocolConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class RateBundle:
    fork_rate: float
    block_rate: float
    committee_rate: float
    bandwidth_efficiency: float
    confirmation_number: int
    byzantine_number: int


def byzantine_number(n: int, alpha: float) -> int:
    """``ceil((n - 1) * alpha)``, rounded first so 100 * 0.7 does not become 71."""
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    return math.ceil(round((n - 1) * alpha, 9))


def _check_committee(n: int, c: int, d: int) -> None:
    if not 0 <= c <= n - 1:
        raise ConfigError(f"committee size {c} must lie in [0, {n - 1}]")
    if not 0 <= d <= c:
        raise ConfigError(f"endorsement size {d} must lie in [0, {c}]")


def fork_rate(n: int, alpha: float, c: int, d: int, override: float | None = None) -> float:
    """alpha * P(at least d of the committee are malicious | malicious leader).

    Given a malicious leader, the other ``f - 1`` malicious nodes sit among the
    ``n - 1`` candidates the committee is drawn from.
    """
    if override is not None:
        return override
    _check_committee(n, c, d)
    f = byzantine_number(n, alpha)
    others = max(f - 1, 0)
    return alpha * hypergeom_tail_ge(d, HypergeomParams(n - 1, others, c))


def block_rate(n: int, alpha: float, c: int, d: int) -> float:
    """(1 - alpha) * P(at least d honest committee members | honest leader)."""
    _check_committee(n, c, d)
    f = byzantine_number(n, alpha)
    honest = max(n - 1 - f, 0)
    return (1.0 - alpha) * hypergeom_tail_ge(d, HypergeomParams(n - 1, honest, c))


def confirmation_number(config: ProtocolConfig, f_rate: float) -> int:
    """Blocks needed before a transaction counts as confirmed.

    For the probabilistic rule this is the least K with ``f_rate ** K <= eps``;
    the ceiling is taken with a 1e-9 slack so that ``log(1e-5) / log(0.1)``
    lands on 5 rather than 6.
    """
    if config.confirmation_rule == FIXED:
        return int(config.fixed_confirmations)
    if f_rate >= 1.0:
        raise DegenerateSecurityError(f"fork rate {f_rate} leaves no finite confirmation depth")
    if f_rate <= 0.0:
        return 1
    ratio = math.log(config.security_level) / math.log(f_rate)
    return max(1, math.ceil(ratio - 1e-9))


def committee_rate(cc_edges: float, bc_edges: float, message_size: float, block_bytes: float) -> float:
    if bc_edges <= 0 or block_bytes <= 0:
        raise ValueError("committee_rate needs bc_edges >= 1 and block_bytes > 0")
    committee_bytes = cc_edges * message_size
    return committee_bytes / (committee_bytes + bc_edges * block_bytes)


def block_interval(bbt: float, cct: float, bbl: float) -> float:
    return max(bbt, cct, bbl)


def block_broadcast_time(block_size_tx: int, tx_size_bytes: float, bandwidth: float) -> float:
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    return block_size_tx * tx_size_bytes / bandwidth


def throughput(block_size_tx: int, interval: float, b_rate: float, b_eff: float) -> float:
    """Confirmed transactions per second."""
    if interval <= 0:
        raise ZeroIntervalError(f"block interval must be > 0, got {interval}")
    return block_size_tx / interval * b_rate * b_eff


def latency(k: int, b_rate: float, interval: float) -> float:
    """Seconds until a transaction is confirmed."""
    if b_rate <= 0:
        raise LivenessError("block rate is 0; latency is unbounded")
    if interval < 0:
        raise ValueError(f"interval must be >= 0, got {interval}")
    return k / b_rate * interval


def rate_bundle(config: ProtocolConfig, n: int, c_rate: float = 0.0) -> RateBundle:
    """All analytic rates for ``config`` on ``n`` nodes, given a committee rate."""
    c, d, alpha = config.committee_size, config.endorsement_size, config.byzantine_ratio
    f_rate = fork_rate(n, alpha, c, d, override=config.fork_rate_override)
    b_rate = block_rate(n, alpha, c, d)
    k = confirmation_number(config, f_rate)
    return RateBundle(
        fork_rate=f_rate,
        block_rate=b_rate,
        committee_rate=c_rate,
        bandwidth_efficiency=(1.0 - f_rate) * (1.0 - c_rate),
        confirmation_number=k,
        byzantine_number=byzantine_number(n, alpha),
    )


def hbft(n: int, alpha: float = 0.1, **kwargs) -> ProtocolConfig:
    """Chained Hotstuff: whole network as committee, 2f endorsements, K = 3."""
    f = byzantine_number(n, alpha)
    if 3 * f + 1 > n:
        raise ConfigError(f"hbft needs 3f+1 <= N; alpha={alpha} gives f={f} on N={n}")
    return ProtocolConfig(
        committee_size=n - 1,
        endorsement_size=2 * f,
        confirmation_rule=FIXED,
        fixed_confirmations=HBFT_CONFIRMATIONS,
        byzantine_ratio=alpha,
        name="hbft",
        **kwargs,
    )


def poa(n: int, alpha: float = 0.1, **kwargs) -> ProtocolConfig:
    """Proof-of-authority: no committee, probabilistic confirmation."""
    return ProtocolConfig(
        committee_size=0,
        endorsement_size=0,
        confirmation_rule=PROBABILISTIC,
        byzantine_ratio=alpha,
        name="poa",
        **kwargs,
    )


def custom(n: int, c: int, d: int, alpha: float = 0.1, **kwargs) -> ProtocolConfig:
    _check_committee(n, c, d)
    kwargs.setdefault("confirmation_rule", PROBABILISTIC)
    return ProtocolConfig(committee_size=c, endorsement_size=d, byzantine_ratio=alpha,
                          name=kwargs.pop("name", f"C{c}d{d}"), **kwargs)
