"""Committee-based consensus evaluation: random networks, analytic rates,
Monte Carlo block intervals and throughput/latency frontiers."""

from ._kernels import BACKEND
from .protocol import ProtocolConfig, RateBundle, hbft, poa, custom
from .simulator import PerformancePoint, RoundSample, SimulationConfig, simulate

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ProtocolConfig",
    "RateBundle",
    "hbft",
    "poa",
    "custom",
    "PerformancePoint",
    "RoundSample",
    "SimulationConfig",
    "simulate",
]
