"""Flat ``key = value`` config files (JSON also accepted) for simulation runs.

Every omitted key takes its baseline default. Units live in key names.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

from . import protocol as proto_mod
from .protocol import FIXED, PROBABILISTIC, ConfigError, ProtocolConfig
from .simulator import DEFAULT_ROUNDS, SimulationConfig

__all__ = ["ConfigFileError", "DEFAULTS", "load_config", "parse_config", "build_config", "dump_config"]


class ConfigFileError(ConfigError):
    """A config file could not be parsed or names an unknown field."""


DEFAULTS = {
    "preset": "poa",
    "n": 101,
    "p": 0.06,
    "delay_factor": 0.1,
    "bandwidth_bytes_per_s": 1e6,
    "alpha": 0.1,
    "security_level": 1e-5,
    "message_size_bytes": 100.0,
    "block_size_tx": 2000,
    "tx_size_bytes": float(proto_mod.DEFAULT_TX_SIZE_BYTES),
    "simulation_rounds": DEFAULT_ROUNDS,
    "seed": 0,
}
# protocol fields that override whatever the preset would choose
OPTIONAL = {
    "committee_size": int,
    "endorsement_size": int,
    "confirmation_rule": str,
    "fixed_confirmations": int,
    "fork_rate_override": float,
}
TYPES = {
    "preset": str, "n": int, "p": float, "delay_factor": float, "bandwidth_bytes_per_s": float,
    "alpha": float, "security_level": float, "message_size_bytes": float, "block_size_tx": int,
    "tx_size_bytes": float, "simulation_rounds": int, "seed": int, **OPTIONAL,
}


def _coerce(key, raw, where):
    kind = TYPES[key]
    if raw is None and key in OPTIONAL:
        return None
    try:
        if kind is int:
            if isinstance(raw, str):
                value = float(raw) if any(ch in raw for ch in ".eE") else int(raw)
            else:
                value = raw
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if kind is float:
            if isinstance(raw, bool):
                raise ValueError
            return float(raw)
        return str(raw).strip()
    except (TypeError, ValueError):
        raise ConfigFileError(f"{where}: field '{key}' expects {kind.__name__}, got {raw!r}") from None


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse config text into a dict of typed fields (unspecified keys absent)."""
    values = {}
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigFileError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigFileError(f"{source}: JSON config must be an object")
        for key, raw in data.items():
            if key not in TYPES:
                raise ConfigFileError(f"{source}: unknown field '{key}'")
            values[key] = _coerce(key, raw, source)
        return values
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigFileError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in TYPES:
            raise ConfigFileError(f"{source}:{lineno}: unknown field '{key}'")
        if key in values:
            raise ConfigFileError(f"{source}:{lineno}: field '{key}' given twice")
        values[key] = None if raw.lower() == "none" else _coerce(key, raw, f"{source}:{lineno}")
    return values


def build_config(values: dict, source: str = "<config>") -> SimulationConfig:
    """Resolve parsed fields on top of the defaults into a validated config."""
    merged = {**DEFAULTS, **{k: v for k, v in values.items() if k in DEFAULTS}}
    try:
        if not 0.0 <= merged["alpha"] < 1.0:
            raise ConfigFileError(f"{source}: field 'alpha' must lie in [0, 1), got {merged['alpha']}")
        n = merged["n"]
        shared = dict(
            security_level=merged["security_level"],
            block_size_tx=merged["block_size_tx"],
            message_size_bytes=merged["message_size_bytes"],
            tx_size_bytes=merged["tx_size_bytes"],
        )
        preset = merged["preset"]
        if preset == "hbft":
            protocol = proto_mod.hbft(n, merged["alpha"], **shared)
        elif preset == "poa":
            protocol = proto_mod.poa(n, merged["alpha"], **shared)
        elif preset == "custom":
            c = values.get("committee_size")
            d = values.get("endorsement_size")
            if c is None or d is None:
                raise ConfigFileError(f"{source}: preset 'custom' needs committee_size and endorsement_size")
            protocol = ProtocolConfig(c, d, byzantine_ratio=merged["alpha"], name="custom", **shared)
        else:
            raise ConfigFileError(f"{source}: field 'preset' must be hbft, poa or custom, got {preset!r}")
        overrides = {k: values[k] for k in OPTIONAL if k in values}
        if overrides.get("confirmation_rule") == PROBABILISTIC and "fixed_confirmations" not in overrides:
            overrides["fixed_confirmations"] = None
        if overrides:
            protocol = replace(protocol, **overrides)
        return SimulationConfig(
            protocol=protocol,
            n=n,
            p=merged["p"],
            d_factor=merged["delay_factor"],
            bandwidth=merged["bandwidth_bytes_per_s"],
            simulation_rounds=merged["simulation_rounds"],
            seed=merged["seed"],
        )
    except ConfigFileError:
        raise
    except ConfigError as exc:
        raise ConfigFileError(f"{source}: {exc}") from None


def load_config(path) -> SimulationConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigFileError(f"config file not found: {path}")
    return build_config(parse_config(path.read_text(), str(path)), str(path))


def dump_config(config: SimulationConfig) -> str:
    """Key-value text that :func:`load_config` turns back into ``config``."""
    pc = config.protocol
    preset = pc.name if pc.name in ("hbft", "poa") else "custom"
    lines = [
        f"preset = {preset}",
        f"n = {config.n}",
        f"p = {config.p!r}",
        f"delay_factor = {config.d_factor!r}",
        f"bandwidth_bytes_per_s = {config.bandwidth!r}",
        f"alpha = {pc.byzantine_ratio!r}",
        f"security_level = {pc.security_level!r}",
        f"message_size_bytes = {float(pc.message_size_bytes)!r}",
        f"block_size_tx = {pc.block_size_tx}",
        f"tx_size_bytes = {float(pc.tx_size_bytes)!r}",
        f"simulation_rounds = {config.simulation_rounds}",
        f"seed = {config.seed}",
        f"committee_size = {pc.committee_size}",
        f"endorsement_size = {pc.endorsement_size}",
        f"confirmation_rule = {pc.confirmation_rule}",
        f"fixed_confirmations = {pc.fixed_confirmations}",
        f"fork_rate_override = {pc.fork_rate_override!r}",
    ]
    return "\n".join(lines) + "\n"
