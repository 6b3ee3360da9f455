"""Two-objective Pareto dominance over (-throughput, latency), both minimised."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Hashable, Sequence

__all__ = [
    "ObjectivePoint",
    "EmptyInputError",
    "pareto_dominates",
    "pareto_frontier",
    "all_pairs_frontier",
]


class EmptyInputError(ValueError):
    pass


@dataclass(frozen=True)
class ObjectivePoint:
    neg_throughput: float
    latency: float
    tag: Any = None

    def __post_init__(self):
        if not (math.isfinite(self.neg_throughput) and math.isfinite(self.latency)):
            raise ValueError(f"objective coordinates must be finite: {self}")

    @classmethod
    def from_performance(cls, throughput: float, latency: float, tag: Hashable = None) -> "ObjectivePoint":
        return cls(-throughput, latency, tag)


def pareto_dominates(a: ObjectivePoint, b: ObjectivePoint) -> bool:
    """True iff ``a`` is no worse than ``b`` in both objectives and better in one."""
    no_worse = a.neg_throughput <= b.neg_throughput and a.latency <= b.latency
    better = a.neg_throughput < b.neg_throughput or a.latency < b.latency
    return no_worse and better


def pareto_frontier(points: Sequence[ObjectivePoint]) -> list[int]:
    """Ascending indices of the points no other point dominates.

    Sort by the first objective, then sweep groups of equal first coordinate
    while tracking the best latency seen in strictly better groups. Coincident
    points never dominate each other, so all copies of a frontier point stay.
    """
    if len(points) == 0:
        raise EmptyInputError("pareto_frontier needs at least one point")
    order = sorted(range(len(points)), key=lambda i: (points[i].neg_throughput, points[i].latency))
    keep = []
    best_latency = math.inf
    pos = 0
    while pos < len(order):
        x = points[order[pos]].neg_throughput
        end = pos
        while end < len(order) and points[order[end]].neg_throughput == x:
            end += 1
        group_min = points[order[pos]].latency
        if group_min < best_latency:
            keep.extend(i for i in order[pos:end] if points[i].latency == group_min)
            best_latency = group_min
        pos = end
    return sorted(keep)


def all_pairs_frontier(points: Sequence[ObjectivePoint]) -> list[int]:
    """Quadratic reference: keep every point that no other point dominates."""
    if len(points) == 0:
        raise EmptyInputError("all_pairs_frontier needs at least one point")
    return [
        i for i, p in enumerate(points)
        if not any(pareto_dominates(q, p) for j, q in enumerate(points) if j != i)
    ]
