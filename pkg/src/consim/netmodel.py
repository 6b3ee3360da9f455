"""Random communication graphs and the delay observables derived from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _kernels

__all__ = [
    "GenerationError",
    "EndorsementError",
    "NetworkGraph",
    "DelayProfile",
    "MAX_GENERATION_ATTEMPTS",
    "generate_network",
    "graph_from_edges",
    "shortest_delays",
    "blockhead_broadcast_latency",
    "committee_comm_time",
    "broadcast_edge_count",
    "committee_edge_count",
    "write_edge_list",
    "read_edge_list",
]

MAX_GENERATION_ATTEMPTS = 1000


class GenerationError(RuntimeError):
    """No connected graph was drawn within the retry budget."""


class EndorsementError(ValueError):
    """Endorsement size exceeds the committee it is drawn from."""


@dataclass(eq=False)
class NetworkGraph:
    """Undirected, simple, connected graph with per-edge delays in seconds.

    ``edges`` is an ``(E, 2)`` int array with ``u < v`` in lexicographic order and
    ``delays`` the matching ``(E,)`` float array. Treat instances as immutable:
    the arrays are flagged read-only and the CSR view is cached.
    """

    node_count: int
    edges: np.ndarray
    delays: np.ndarray
    delay_factor: float = float("nan")
    link_probability: float = float("nan")
    effective_bandwidth: float = float("nan")
    seed: int | None = None

    def __post_init__(self):
        self.edges = np.ascontiguousarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.delays = np.ascontiguousarray(self.delays, dtype=np.float64).reshape(-1)
        self.edges.setflags(write=False)
        self.delays.setflags(write=False)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, weights) with each undirected edge stored both ways."""
        n = self.node_count
        u, v = self.edges[:, 0], self.edges[:, 1]
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        w = np.concatenate([self.delays, self.delays])
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return indptr, np.ascontiguousarray(dst), np.ascontiguousarray(w)

    def is_connected(self) -> bool:
        return _is_connected(self.node_count, self.edges)


@dataclass
class DelayProfile:
    source: int
    delays: np.ndarray
    hops: np.ndarray = field(default=None, repr=False)


def _is_connected(n: int, edges: np.ndarray) -> bool:
    if n <= 1:
        return True
    if len(edges) < n - 1:
        return False
    adj = coo_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(n, n))
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp == 1


def generate_network(n: int, p: float, d_factor: float, bandwidth: float, seed: int) -> NetworkGraph:
    """Draw a connected G(n, p) graph with lognormal link delays.

    Every unordered pair is linked independently with probability ``p``; each
    link's delay is ``exp(Normal(0, d_factor))`` seconds. Disconnected draws
    are discarded and the whole graph is redrawn from the same generator, up
    to :data:`MAX_GENERATION_ATTEMPTS` times.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if d_factor <= 0:
        raise ValueError(f"d_factor must be > 0, got {d_factor}")
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    if p == 0.0:
        raise GenerationError(f"cannot connect {n} nodes with link probability 0")

    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(MAX_GENERATION_ATTEMPTS):
        mask = rng.random(iu.shape[0]) < p
        edges = np.column_stack([iu[mask], ju[mask]])
        delays = rng.lognormal(mean=0.0, sigma=d_factor, size=edges.shape[0])
        if _is_connected(n, edges):
            return NetworkGraph(n, edges, delays, float(d_factor), float(p), float(bandwidth), seed)
    raise GenerationError(
        f"no connected graph for n={n}, p={p} after {MAX_GENERATION_ATTEMPTS} attempts"
    )


def graph_from_edges(n: int, edges: Sequence[tuple[int, int, float]], **meta) -> NetworkGraph:
    """Build a graph from explicit ``(u, v, delay)`` triples, validating it."""
    seen = {}
    for u, v, w in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if w <= 0 or not math.isfinite(w):
            raise ValueError(f"edge ({u}, {v}) has non-positive delay {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen[key] = float(w)
    keys = sorted(seen)
    arr = np.array(keys, dtype=np.int64).reshape(-1, 2)
    graph = NetworkGraph(n, arr, np.array([seen[k] for k in keys]), **meta)
    if not graph.is_connected():
        raise ValueError("graph is not connected")
    return graph


def shortest_delays(graph: NetworkGraph, source: int) -> DelayProfile:
    """Exact single-source shortest delays, with the hop count of each chosen path."""
    if not 0 <= source < graph.node_count:
        raise IndexError(f"source {source} out of range for {graph.node_count} nodes")
    indptr, indices, weights = graph.csr
    dist, hops = _kernels.dijkstra(indptr, indices, weights, int(source))
    return DelayProfile(int(source), dist, hops)


def blockhead_broadcast_latency(profile: DelayProfile) -> float:
    return float(np.max(profile.delays))


def committee_comm_time(profile: DelayProfile, committee: Sequence[int], d: int) -> float:
    """Round trip to the d-th closest committee member: ``2 * delay_(d)``."""
    committee = np.asarray(committee, dtype=np.int64)
    if d > committee.size:
        raise EndorsementError(f"endorsement size {d} exceeds committee size {committee.size}")
    if committee.size == 0 or d <= 0:
        return 0.0
    member_delays = profile.delays[committee]
    return 2.0 * float(np.partition(member_delays, d - 1)[d - 1])


def broadcast_edge_count(graph: NetworkGraph) -> int:
    # flooding: every link carries the block once
    return graph.edge_count


def committee_edge_count(graph: NetworkGraph, leader: int, committee: Sequence[int],
                         profile: DelayProfile | None = None) -> int:
    """Links used by votes in and the aggregate out: ``2 * sum(hops)``."""
    committee = np.asarray(committee, dtype=np.int64)
    if committee.size == 0:
        return 0
    if profile is None or profile.source != leader or profile.hops is None:
        profile = shortest_delays(graph, leader)
    return 2 * int(np.sum(profile.hops[committee]))


def write_edge_list(graph: NetworkGraph, path) -> None:
    lines = [f"# {graph.node_count} {graph.link_probability!r} {graph.delay_factor!r} {graph.seed}"]
    for (u, v), w in zip(graph.edges.tolist(), graph.delays.tolist()):
        lines.append(f"{u} {v} {w!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> NetworkGraph:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing '# n p D seed' header")
    n_s, p_s, d_s, seed_s = text[0][1:].split()
    triples = []
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'u v delay'")
        triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
    seed = None if seed_s == "None" else int(seed_s)
    return graph_from_edges(int(n_s), triples, delay_factor=float(d_s),
                            link_probability=float(p_s), seed=seed)
