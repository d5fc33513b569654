"""Reverse reachable sets over predicted networks and greedy max coverage.

A random RR set is drawn by picking a uniform target in one predicted
instance of the future network and walking incoming edges backwards, each
edge admitting its source with probability ``p``. For any seed set ``S``,
``n * P(S hits a random RR set)`` equals the expected spread of ``S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from evolvim import rng as rngs
from evolvim._backend import kernels
from evolvim.cascade import check_probability
from evolvim.evolution import FfmParams
from evolvim.graph import Graph
from evolvim.seeds import RankedSeedSet

__all__ = [
    "RRCollection",
    "RRSet",
    "ThetaConfig",
    "compute_theta",
    "generate_rr_set",
    "max_coverage_select",
    "rr_collection",
    "rr_collection_static",
]


@dataclass(frozen=True)
class RRSet:
    target: int
    members: frozenset
    source_instance: int = 0

    def __contains__(self, v: int) -> bool:
        return v in self.members


@dataclass(frozen=True)
class ThetaConfig:
    """How many predicted instances to sample.

    Without ``theta_override`` the count comes from the closed-form sample
    bound in :func:`compute_theta`, which is very large at small scale.
    """

    theta_override: int | None = None
    epsilon: float = 0.1
    ell: float = 1.0

    def __post_init__(self):
        if self.theta_override is not None and self.theta_override < 1:
            raise ValueError("theta_override must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")


def compute_theta(n_hat: int, k: int, cfg: ThetaConfig = ThetaConfig()) -> int:
    """Number of RR samples.

    ``ceil((8 + 2 eps) n (ell ln n + ln C(n, k) + ln 2) / (eps^2 k))``; the
    optimal spread in the usual bound is replaced by its lower bound ``k``, so
    this over-samples.
    """
    if cfg.theta_override is not None:
        return int(cfg.theta_override)
    if not n_hat >= k >= 1:
        raise ValueError(f"need n_hat >= k >= 1, got n_hat={n_hat}, k={k}")
    eps = cfg.epsilon
    log_comb = math.lgamma(n_hat + 1) - math.lgamma(k + 1) - math.lgamma(n_hat - k + 1)
    value = (8 + 2 * eps) * n_hat * (cfg.ell * math.log(n_hat) + log_comb + math.log(2)) / (eps**2 * k)
    return int(math.ceil(value))


@dataclass(frozen=True, eq=False)
class RRCollection:
    """Flat storage for many RR sets.

    Set ``i`` is ``members[offsets[i]:offsets[i + 1]]`` with its target first.
    ``n_nodes`` is the order of the graph the targets were drawn from.
    """

    offsets: np.ndarray
    members: np.ndarray
    instance: np.ndarray
    n_nodes: int

    def __len__(self) -> int:
        return len(self.offsets) - 1

    def sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def set_ids(self) -> np.ndarray:
        return np.repeat(np.arange(len(self)), self.sizes())

    def __getitem__(self, i: int) -> RRSet:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        mem = self.members[lo:hi]
        return RRSet(int(mem[0]), frozenset(mem.tolist()), int(self.instance[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def hits(self, seeds: Iterable[int]) -> int:
        """Number of sets containing at least one seed."""
        mark = np.zeros(self.n_nodes, dtype=bool)
        ids = np.fromiter((int(s) for s in seeds), dtype=np.int64)
        ids = ids[(ids >= 0) & (ids < self.n_nodes)]
        if len(ids) == 0:
            return 0
        mark[ids] = True
        hit = np.zeros(len(self), dtype=bool)
        np.logical_or.at(hit, self.set_ids(), mark[self.members])
        return int(hit.sum())

    def estimate(self, seeds: Iterable[int]) -> float:
        """Spread estimate ``n * fraction of sets hit``."""
        return self.n_nodes * self.hits(seeds) / len(self)

    @classmethod
    def from_sets(cls, sets: Sequence[RRSet], n_nodes: int | None = None) -> "RRCollection":
        members = []
        offsets = [0]
        for s in sets:
            rest = sorted(s.members - {s.target})
            members.extend([s.target, *rest])
            offsets.append(len(members))
        mem = np.array(members, dtype=np.int32)
        if n_nodes is None:
            n_nodes = int(mem.max()) + 1 if len(mem) else 0
        inst = np.array([s.source_instance for s in sets], dtype=np.int64)
        return cls(np.array(offsets, dtype=np.int64), mem, inst, n_nodes)

    @classmethod
    def concat(cls, parts: Sequence["RRCollection"]) -> "RRCollection":
        offsets = [np.zeros(1, dtype=np.int64)]
        base = 0
        for part in parts:
            offsets.append(part.offsets[1:] + base)
            base += part.offsets[-1]
        return cls(
            np.concatenate(offsets),
            np.concatenate([p.members for p in parts]) if parts else np.empty(0, np.int32),
            np.concatenate([p.instance for p in parts]) if parts else np.empty(0, np.int64),
            max((p.n_nodes for p in parts), default=0),
        )


def generate_rr_set(g: Graph, v: int, p: float, rng, source_instance: int = 0) -> RRSet:
    """RR set of ``v``: randomized breadth-first search over incoming edges."""
    check_probability(p)
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range")
    mem = kernels.rr_set_from(g.in_ptr, g.in_idx, g.n, v, p, rngs.as_bitgen(rng))
    return RRSet(int(v), frozenset(mem.tolist()), source_instance)


def rr_collection_static(
    g: Graph,
    p: float,
    count: int,
    seed: rngs.SeedLike = 0,
    *,
    block: int = rngs.RR_BLOCK,
    workers: int | None = None,
) -> RRCollection:
    """``count`` random RR sets on the fixed graph ``g``.

    Blocks of ``block`` sets each use their own stream, laid out exactly like
    :func:`rr_collection` with one set per instance, so the two agree when
    no nodes arrive.
    """
    check_probability(p)
    if g.n == 0:
        raise ValueError("graph has no nodes")

    def run(chunk):
        b, cnt = chunk
        off, mem = kernels.rr_sets_static(
            g.in_ptr, g.in_idx, g.n, p, rngs.derive(seed, rngs.RRSETS, b), cnt
        )
        inst = b * block + np.arange(cnt, dtype=np.int64)
        return RRCollection(off, mem, inst, g.n)

    return RRCollection.concat(rngs.pmap(run, rngs.blocks(count, block), workers))


def rr_collection(
    g0: Graph,
    ffm: FfmParams,
    p: float,
    instances: int,
    seed: rngs.SeedLike = 0,
    *,
    per_instance: int = 1,
    reverse: bool = False,
    block: int = rngs.RR_BLOCK,
    workers: int | None = None,
) -> RRCollection:
    """RR sets over ``instances`` independently evolved copies of ``g0``.

    Each instance grows ``g0`` by ``ffm.arrivals`` nodes and then yields
    ``per_instance`` RR sets with uniform targets over the grown node set.
    ``reverse`` walks outgoing instead of incoming edges, i.e. influence
    travels against edge direction.
    """
    check_probability(p)
    if g0.n == 0:
        raise ValueError("graph has no nodes")
    if per_instance < 1:
        raise ValueError("per_instance must be >= 1")
    nr = g0.n + ffm.arrivals

    def run(chunk):
        b, cnt = chunk
        off, mem = kernels.rr_sets_evolved(
            g0.out_ptr, g0.out_idx, g0.in_ptr, g0.in_idx,
            g0.n, ffm.arrivals, *ffm.kernel_args(), p,
            rngs.derive(seed, rngs.RRSETS, b), cnt, per_instance, reverse,
        )
        inst = np.repeat(b * block + np.arange(cnt, dtype=np.int64), per_instance)
        return RRCollection(off, mem, inst, nr)

    return RRCollection.concat(rngs.pmap(run, rngs.blocks(instances, block), workers))


def max_coverage_select(
    sets: RRCollection | Sequence[RRSet],
    k: int,
    candidates: Iterable[int] | None = None,
) -> RankedSeedSet:
    """Greedy maximum coverage over RR sets.

    Each round takes the candidate contained in the most remaining sets
    (smallest id on ties) and discards the sets it covers. Scores are the
    per-round coverage counts. When no candidate covers anything the round
    falls back to the smallest unchosen candidate id and the result is marked
    ``padded``. ``candidates=None`` allows every node of the collection.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    coll = sets if isinstance(sets, RRCollection) else RRCollection.from_sets(sets)
    members = coll.members.astype(np.int64)

    if candidates is None:
        universe = coll.n_nodes
        allowed = np.ones(universe, dtype=bool)
    else:
        cand = np.fromiter((int(c) for c in candidates), dtype=np.int64)
        if len(cand) and cand.min() < 0:
            raise ValueError("candidate ids must be non-negative")
        universe = max(coll.n_nodes, int(cand.max()) + 1 if len(cand) else 0)
        allowed = np.zeros(universe, dtype=bool)
        allowed[cand] = True
    if int(allowed.sum()) < k:
        raise ValueError(f"only {int(allowed.sum())} candidates for k={k}")

    counts = np.bincount(members, minlength=universe).astype(np.int64)
    set_of = coll.set_ids()
    order = np.argsort(members, kind="stable")
    node_ptr = np.zeros(universe + 1, dtype=np.int64)
    np.cumsum(np.bincount(members, minlength=universe), out=node_ptr[1:])
    sets_by_node = set_of[order]
    alive = np.ones(len(coll), dtype=bool)

    chosen: list[int] = []
    scores: list[int] = []
    padded = False
    for _ in range(k):
        score = np.where(allowed, counts, -1)
        u = int(np.argmax(score))
        if score[u] <= 0:
            padded = True
        chosen.append(u)
        scores.append(int(max(score[u], 0)))
        allowed[u] = False
        hit = sets_by_node[node_ptr[u] : node_ptr[u + 1]]
        hit = hit[alive[hit]]
        if len(hit):
            newly = np.zeros(len(coll), dtype=bool)
            newly[hit] = True
            alive[hit] = False
            counts -= np.bincount(members[newly[set_of]], minlength=universe)
    return RankedSeedSet(tuple(chosen), tuple(scores), padded)
