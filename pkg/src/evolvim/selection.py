"""Seed selection: simulation greedy and RR-set selection over predicted
future networks, their static counterparts, and a degree baseline.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from evolvim import rng as rngs
from evolvim._backend import kernels
from evolvim.cascade import check_probability
from evolvim.evolution import FfmParams, evolve
from evolvim.graph import Graph
from evolvim.rrset import (
    ThetaConfig,
    compute_theta,
    max_coverage_select,
    rr_collection,
    rr_collection_static,
)
from evolvim.seeds import RankedSeedSet

__all__ = [
    "GenieConfig",
    "SeerConfig",
    "aggregate_ranks",
    "greedy_on_graph",
    "select_degree",
    "select_genie",
    "select_greedy_static",
    "select_rr_static",
    "select_seer",
]

AGGREGATIONS = ("borda", "rank-sum")
CANDIDATE_FILTERS = ("v0", "all")


@dataclass(frozen=True)
class GenieConfig:
    """Greedy selection over ``instances`` predicted networks.

    ``rounds`` live-edge samples are drawn per seed pick and instance.
    ``reverse`` propagates influence against edge direction.
    """

    k: int
    p: float
    instances: int = 500
    rounds: int = 5000
    ffm: FfmParams = field(default_factory=FfmParams)
    aggregation: str = "borda"
    reverse: bool = False

    def __post_init__(self):
        check_probability(self.p)
        if self.k < 1 or self.instances < 1 or self.rounds < 1:
            raise ValueError("k, instances and rounds must be positive")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")


@dataclass(frozen=True)
class SeerConfig:
    """RR-set selection over predicted networks.

    ``per_instance`` RR sets are drawn from every predicted network (1 matches
    the one-target-per-instance scheme). ``candidate_filter`` is ``v0`` to
    restrict seeds to the current network's nodes or ``all``.
    """

    k: int
    p: float
    theta: ThetaConfig = field(default_factory=ThetaConfig)
    ffm: FfmParams = field(default_factory=FfmParams)
    per_instance: int = 1
    candidate_filter: str = "v0"
    reverse: bool = False

    def __post_init__(self):
        check_probability(self.p)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.per_instance < 1:
            raise ValueError("per_instance must be >= 1")
        if self.candidate_filter not in CANDIDATE_FILTERS:
            raise ValueError(f"candidate_filter must be one of {CANDIDATE_FILTERS}")


def _check_k(g: Graph, k: int) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > g.n:
        raise ValueError(f"k={k} exceeds the {g.n} available nodes")


def greedy_on_graph(
    g: Graph,
    k: int,
    p: float,
    rounds: int,
    seed: rngs.SeedLike,
    instance: int = 0,
    candidates: Sequence[int] | None = None,
    workers: int | None = None,
) -> RankedSeedSet:
    """Greedy hill climbing with Monte Carlo marginal gains.

    For each pick ``j``, fresh live-edge samples are drawn and every remaining
    candidate's marginal gain is summed over them; the largest sum wins,
    smallest id on ties. Gain sums restart at every pick.
    """
    check_probability(p)
    remaining = np.arange(g.n, dtype=np.int32) if candidates is None else np.unique(
        np.asarray(candidates, dtype=np.int32)
    )
    if k > len(remaining):
        raise ValueError(f"k={k} exceeds the {len(remaining)} candidates")
    selected: list[int] = []
    scores: list[int] = []
    for j in range(k):
        sel = np.array(selected, dtype=np.int32)

        def run(chunk, sel=sel, remaining=remaining, j=j):
            b, cnt = chunk
            bg = rngs.derive(seed, rngs.GAINS, instance, j, b)
            return kernels.greedy_gains(g.out_ptr, g.out_idx, g.n, sel, remaining, p, bg, cnt)

        gains = sum(rngs.pmap(run, rngs.blocks(rounds, rngs.GAIN_BLOCK), workers))
        best = int(np.argmax(gains))
        selected.append(int(remaining[best]))
        scores.append(int(gains[best]))
        remaining = np.delete(remaining, best)
    return RankedSeedSet(tuple(selected), tuple(scores))


def select_greedy_static(
    g: Graph, k: int, p: float, rounds: int, seed: rngs.SeedLike = 0, *, workers: int | None = None
) -> RankedSeedSet:
    """Classical greedy on a fixed graph; candidates are all of its nodes."""
    _check_k(g, k)
    return greedy_on_graph(g, k, p, rounds, seed, 0, None, workers)


def aggregate_ranks(sets: Sequence[RankedSeedSet], k: int, method: str = "borda") -> RankedSeedSet:
    """Combine per-instance rankings into one top-``k`` ranking.

    ``borda`` scores each appearance as ``k + 1 - rank`` (absent scores 0);
    ``rank-sum`` adds raw ranks. Higher totals first, smaller id on ties. A
    single input is returned as is, truncated to ``k``.
    """
    if not sets:
        raise ValueError("no seed sets to aggregate")
    if method not in AGGREGATIONS:
        raise ValueError(f"method must be one of {AGGREGATIONS}")
    if len(sets) == 1:
        return sets[0].top(k)
    total: dict[int, int] = {}
    for s in sets:
        if len(s) > k:
            raise ValueError(f"input set has {len(s)} entries, more than k={k}")
        for v, rank in s.entries:
            total[v] = total.get(v, 0) + (k + 1 - rank if method == "borda" else rank)
    ranked = sorted(total.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    return RankedSeedSet(tuple(v for v, _ in ranked), tuple(sc for _, sc in ranked))


def select_genie(
    g0: Graph, cfg: GenieConfig, seed: rngs.SeedLike = 0, *, workers: int | None = None
) -> RankedSeedSet:
    """Greedy seeds from ``g0`` for spread on predicted future networks.

    Instance ``i`` grows ``g0`` with the Forest Fire model, runs the greedy
    over it with candidates restricted to ``g0``'s nodes, and the ``I``
    rankings are merged by :func:`aggregate_ranks`.
    """
    _check_k(g0, cfg.k)
    v0 = np.arange(g0.n, dtype=np.int32)
    outer = cfg.instances > 1

    def instance(i: int) -> RankedSeedSet:
        ev = evolve(g0, cfg.ffm, rngs.derive(seed, rngs.EVOLVE, i))
        g = ev.graph.reversed() if cfg.reverse else ev.graph
        return greedy_on_graph(
            g, cfg.k, cfg.p, cfg.rounds, seed, i, v0, workers=1 if outer else workers
        )

    per_instance = rngs.pmap(instance, range(cfg.instances), workers)
    return aggregate_ranks(per_instance, cfg.k, cfg.aggregation)


def select_seer(
    g0: Graph, cfg: SeerConfig, seed: rngs.SeedLike = 0, *, workers: int | None = None
) -> RankedSeedSet:
    """Max-coverage seeds over RR sets drawn from predicted future networks."""
    _check_k(g0, cfg.k)
    theta = compute_theta(g0.n + cfg.ffm.arrivals, cfg.k, cfg.theta)
    coll = rr_collection(
        g0, cfg.ffm, cfg.p, theta, seed,
        per_instance=cfg.per_instance, reverse=cfg.reverse, workers=workers,
    )
    candidates = np.arange(g0.n) if cfg.candidate_filter == "v0" else None
    return max_coverage_select(coll, cfg.k, candidates)


def select_rr_static(
    g: Graph, k: int, p: float, theta: int, seed: rngs.SeedLike = 0, *, workers: int | None = None
) -> RankedSeedSet:
    """Max-coverage seeds over ``theta`` RR sets on the fixed graph ``g``."""
    _check_k(g, k)
    coll = rr_collection_static(g, p, theta, seed, workers=workers)
    return max_coverage_select(coll, k, np.arange(g.n))


def select_degree(g: Graph, k: int) -> RankedSeedSet:
    """Top-``k`` nodes by out-degree, smaller id on ties."""
    _check_k(g, k)
    deg = g.out_degree()
    order = np.lexsort((np.arange(g.n), -deg))[:k]
    return RankedSeedSet(tuple(order.tolist()), tuple(deg[order].tolist()))
