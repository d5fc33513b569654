"""Independent Cascade spread: live-edge samples, Monte Carlo estimates and
an exact enumeration oracle for tiny graphs.

Spread is computed as reachability over surviving edges, which has the same
distribution as step-by-step IC activation with a single activation attempt
per edge.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from evolvim import rng as rngs
from evolvim._backend import kernels
from evolvim.graph import Graph

log = logging.getLogger(__name__)

EXACT_MAX_EDGES = 20


@dataclass(frozen=True)
class CascadeConfig:
    p: float
    rounds: int = 10_000

    def __post_init__(self):
        check_probability(self.p)
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


def check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")


@dataclass(frozen=True, eq=False)
class LiveEdgeSample:
    """Survival flag per edge of the graph it was drawn from (edge-id order)."""

    live: np.ndarray

    def __len__(self) -> int:
        return len(self.live)

    @property
    def survivors(self) -> int:
        return int(self.live.sum())


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    std: float
    rounds: int
    missing: tuple = ()

    @property
    def stderr(self) -> float:
        return self.std / math.sqrt(self.rounds)

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        half = z * self.stderr
        return self.mean - half, self.mean + half

    def __float__(self) -> float:
        return self.mean


def resolve_seeds(g: Graph, seeds: Iterable) -> tuple[np.ndarray, tuple]:
    """Split ``seeds`` into valid distinct ids (input order) and absent entries.

    Absent seeds (``None`` or out of range) contribute nothing to spread; they
    are returned so callers can report them.
    """
    valid: list[int] = []
    missing = []
    seen = set()
    for s in seeds:
        if s is None or not 0 <= int(s) < g.n:
            missing.append(s)
            continue
        s = int(s)
        if s not in seen:
            seen.add(s)
            valid.append(s)
    if missing:
        log.warning("%d seed(s) absent from the evaluation graph: %s", len(missing), missing)
    return np.array(valid, dtype=np.int32), tuple(missing)


def sample_live_edges(g: Graph, p: float, rng) -> LiveEdgeSample:
    """Keep each edge independently with probability ``p``."""
    check_probability(p)
    u = np.random.Generator(rngs.as_bitgen(rng)).random(g.m)
    return LiveEdgeSample((u < p).view(np.uint8))


def spread_on_sample(g: Graph, sample: LiveEdgeSample, seeds: Iterable[int]) -> int:
    """Nodes reachable from ``seeds`` over live edges, seeds included."""
    if len(sample) != g.m:
        raise ValueError(f"sample has {len(sample)} flags for a graph with {g.m} edges")
    ids, _ = resolve_seeds(g, seeds)
    if len(ids) == 0:
        return 0
    live = np.ascontiguousarray(sample.live, dtype=np.uint8)
    return int(kernels.reach_count(g.out_ptr, g.out_idx, g.n, live, ids))


def estimate_spread(
    g: Graph,
    seeds: Iterable,
    cfg: CascadeConfig,
    seed: rngs.SeedLike = 0,
    *,
    workers: int | None = None,
) -> SpreadEstimate:
    """Monte Carlo mean and sample standard deviation of the spread.

    Rounds are split into fixed blocks, each drawing from its own derived
    stream, so the result does not depend on ``workers``.
    """
    ids, missing = resolve_seeds(g, seeds)
    if len(ids) == 0:
        return SpreadEstimate(0.0, 0.0, cfg.rounds, missing)

    def run(block):
        b, count = block
        bg = rngs.derive(seed, rngs.CASCADE, b)
        return kernels.mc_spread(g.out_ptr, g.out_idx, g.n, ids, cfg.p, bg, count)

    parts = rngs.pmap(run, rngs.blocks(cfg.rounds, rngs.MC_BLOCK), workers)
    total = sum(t for t, _ in parts)
    total_sq = sum(s for _, s in parts)
    r = cfg.rounds
    mean = total / r
    var = (total_sq - total * total / r) / (r - 1) if r > 1 else 0.0
    return SpreadEstimate(mean, math.sqrt(max(var, 0.0)), r, missing)


def exact_spread(g: Graph, seeds: Iterable, p: float) -> float:
    """Expected spread by enumerating every live-edge outcome.

    Only edges leaving nodes reachable from the seeds can matter, so the
    enumeration runs over those; the size limit applies to the whole graph.
    """
    check_probability(p)
    if g.m > EXACT_MAX_EDGES:
        raise ValueError(f"exact enumeration limited to {EXACT_MAX_EDGES} edges, graph has {g.m}")
    ids, _ = resolve_seeds(g, seeds)
    if len(ids) == 0:
        return 0.0

    adj = [g.out_neighbors(u) for u in range(g.n)]
    reach = set(ids.tolist())
    queue = deque(reach)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in reach:
                reach.add(w)
                queue.append(w)
    relevant = [(u, w) for u in sorted(reach) for w in adj[u]]
    m = len(relevant)

    expected = 0.0
    for mask in range(1 << m):
        k = bin(mask).count("1")
        prob = p**k * (1 - p) ** (m - k)
        if prob == 0.0:
            continue
        live_adj: dict[int, list[int]] = {}
        for i, (u, w) in enumerate(relevant):
            if mask >> i & 1:
                live_adj.setdefault(u, []).append(w)
        seen = set(ids.tolist())
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for w in live_adj.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        expected += prob * len(seen)
    return expected
