"""Exact hypergeometric arithmetic.

Coefficients are accumulated in log space with :func:`math.lgamma`, which keeps
relative error around 1e-14 for populations in the low thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "HypergeomParams",
    "InvalidParameterError",
    "log_binom",
    "hypergeom_pmf",
    "hypergeom_cdf_lt",
    "hypergeom_tail_ge",
]


class InvalidParameterError(ValueError):
    """Raised for hypergeometric parameters outside their support."""


@dataclass(frozen=True)
class HypergeomParams:
    population: int
    successes: int
    draws: int

    def __post_init__(self):
        for name in ("population", "successes", "draws"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
        if self.population < 0:
            raise InvalidParameterError(f"population must be >= 0, got {self.population}")
        if not 0 <= self.successes <= self.population:
            raise InvalidParameterError(
                f"successes must lie in [0, {self.population}], got {self.successes}"
            )
        if not 0 <= self.draws <= self.population:
            raise InvalidParameterError(
                f"draws must lie in [0, {self.population}], got {self.draws}"
            )


def log_binom(a: int, b: int) -> float:
    """log C(a, b), or ``-inf`` when ``b < 0`` or ``b > a``."""
    if b < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def _pmf(x: int, p: HypergeomParams) -> float:
    M, K, Y = p.population, p.successes, p.draws
    log_num = log_binom(K, x) + log_binom(M - K, Y - x)
    if log_num == -math.inf:
        return 0.0
    return min(1.0, math.exp(log_num - log_binom(M, Y)))


def hypergeom_pmf(x: int, params: HypergeomParams) -> float:
    """P(X = x) for X ~ Hypergeometric(population, successes, draws)."""
    if x < 0 or x > params.draws:
        raise InvalidParameterError(f"x must lie in [0, {params.draws}], got {x}")
    return _pmf(x, params)


def hypergeom_cdf_lt(x_exclusive: int, params: HypergeomParams) -> float:
    """P(X < x_exclusive); the sum runs over ``0 <= x < x_exclusive``."""
    if x_exclusive < 0:
        raise InvalidParameterError(f"x_exclusive must be >= 0, got {x_exclusive}")
    if x_exclusive > params.draws:
        return 1.0
    return min(1.0, math.fsum(_pmf(x, params) for x in range(x_exclusive)))


def hypergeom_tail_ge(threshold: int, params: HypergeomParams) -> float:
    """P(X >= threshold), the complement of :func:`hypergeom_cdf_lt`.

    The upper tail is summed directly rather than as ``1 - cdf`` so that an
    empty support yields exactly 0 and a full support exactly 1.
    """
    if threshold < 0:
        raise InvalidParameterError(f"threshold must be >= 0, got {threshold}")
    if threshold == 0:
        return 1.0
    if threshold > params.draws:
        return 0.0
    return min(1.0, math.fsum(_pmf(x, params) for x in range(threshold, params.draws + 1)))
