"""Forest Fire network growth and parameter fitting.

Each arriving node ``v`` links to a uniformly chosen ambassador ``w``, then
burns outward from it: at every burned node it draws a forward count ``x``
(mean ``alpha/(1-alpha)``) and a backward count ``y`` (mean
``gamma*alpha/(1-gamma*alpha)``), links ``v`` to ``x`` unvisited in-link
endpoints and links ``y`` unvisited out-link endpoints to ``v``. Burning then
continues from the forward-linked nodes. A node is visited at most once per
arrival.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import IO, Iterable, Sequence

import numpy as np

from evolvim import rng as rngs
from evolvim._backend import kernels
from evolvim._pykernels import BINOMIAL, GEOMETRIC
from evolvim.graph import Graph, LabelTable

__all__ = [
    "EvolvedGraph",
    "FfmParams",
    "FitError",
    "PRESETS",
    "default_grid",
    "densification_exponent",
    "edge_trajectory",
    "evolve",
    "fit_parameters",
    "grow",
    "read_params",
    "write_params",
]

DISTRIBUTIONS = {"geometric": GEOMETRIC, "binomial": BINOMIAL}

# (alpha, gamma)
PRESETS = {
    "synthetic": (0.35, 0.32),
    "hep": (0.19, 0.75),
    "patents": (0.15, 0.76),
}


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class FfmParams:
    """Forest Fire parameters.

    ``arrivals`` is the number of nodes to add, one per evolution step.
    ``distribution`` picks how burn counts are drawn: ``geometric`` (successes
    before the first failure) or ``binomial`` over ``cap`` trials with the
    same mean. ``recurse_backward`` also continues burning from backward-linked
    nodes.
    """

    alpha: float = 0.35
    gamma: float = 0.32
    arrivals: int = 0
    distribution: str = "geometric"
    cap: int = 10
    recurse_backward: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.gamma < 0 or self.gamma * self.alpha >= 1.0:
            raise ValueError(f"need gamma >= 0 and gamma*alpha < 1, got gamma={self.gamma}")
        if self.arrivals < 0:
            raise ValueError(f"arrivals must be >= 0, got {self.arrivals}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "binomial":
            if self.cap < 1:
                raise ValueError("binomial cap must be >= 1")
            if max(self.forward_mean, self.backward_mean) > self.cap:
                raise ValueError("burn mean exceeds the binomial cap")

    @property
    def forward_mean(self) -> float:
        return self.alpha / (1 - self.alpha)

    @property
    def backward_mean(self) -> float:
        ga = self.gamma * self.alpha
        return ga / (1 - ga)

    @classmethod
    def preset(cls, name: str, **kw) -> "FfmParams":
        alpha, gamma = PRESETS[name]
        return cls(alpha=alpha, gamma=gamma, **kw)

    def kernel_args(self) -> tuple:
        return (
            self.alpha,
            self.gamma,
            DISTRIBUTIONS[self.distribution],
            self.cap,
            self.recurse_backward,
        )


@dataclass(frozen=True, eq=False)
class EvolvedGraph:
    """Grown graph; nodes ``< original_n`` are the nodes of the input graph."""

    graph: Graph
    original_n: int
    new_src: np.ndarray
    new_dst: np.ndarray

    @property
    def arrivals(self) -> int:
        return self.graph.n - self.original_n


def _extend_labels(labels: LabelTable | None, n: int) -> LabelTable | None:
    # arrivals are labelled "new<id>", prefixed with "_" until unique
    if labels is None:
        return None
    out = LabelTable(labels.labels)
    for v in range(len(labels), n):
        label = f"new{v}"
        while label in out:
            label = "_" + label
        out.add(label)
    return out


def evolve(g0: Graph, params: FfmParams, rng) -> EvolvedGraph:
    """Grow ``g0`` by ``params.arrivals`` nodes. Never removes nodes or edges."""
    if g0.n < 1:
        raise ValueError("cannot evolve an empty graph")
    if params.arrivals == 0:
        empty = np.empty(0, dtype=np.int32)
        return EvolvedGraph(g0, g0.n, empty, empty)
    new_src, new_dst = kernels.evolve_edges(
        g0.out_ptr, g0.out_idx, g0.in_ptr, g0.in_idx,
        g0.n, params.arrivals, *params.kernel_args(), rngs.as_bitgen(rng),
    )
    n = g0.n + params.arrivals
    g = Graph.from_edges(
        n,
        np.concatenate([g0.src, new_src]),
        np.concatenate([g0.dst, new_dst]),
        _extend_labels(g0.labels, n),
    )
    return EvolvedGraph(g, g0.n, new_src, new_dst)


def grow(n: int, params: FfmParams, rng) -> Graph:
    """Forest Fire graph of ``n`` nodes grown from a single node."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return evolve(Graph.empty(1), replace(params, arrivals=n - 1), rng).graph


def edge_trajectory(ev: EvolvedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Node and edge counts after each arrival, starting from the input graph.

    Every added edge touches its arrival node, the newest node at that time,
    so the larger endpoint identifies the step that created it.
    """
    arrival = np.maximum(ev.new_src, ev.new_dst) - ev.original_n
    per_step = np.bincount(arrival, minlength=ev.arrivals)
    m0 = ev.graph.m - len(ev.new_src)
    nodes = ev.original_n + np.arange(ev.arrivals + 1)
    edges = m0 + np.concatenate([[0], np.cumsum(per_step)])
    return nodes, edges


def densification_exponent(nodes: Sequence[float], edges: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``(a, b)`` for ``log E = a log V + b``."""
    x = np.log(np.asarray(nodes, dtype=float))
    y = np.log(np.asarray(edges, dtype=float))
    a, b = np.polyfit(x, y, 1)
    return float(a), float(b)


def default_grid(step: float = 0.05, alpha_max: float = 0.6, gamma_max: float = 1.0) -> list[tuple[float, float]]:
    alphas = np.round(np.arange(step, alpha_max + 1e-9, step), 10)
    gammas = np.round(np.arange(step, gamma_max + 1e-9, step), 10)
    return [(float(a), float(g)) for a in alphas for g in gammas]


def fit_parameters(
    snapshots: Sequence[Graph],
    grid: Iterable[tuple[float, float]] | None = None,
    seed: rngs.SeedLike = 0,
    *,
    repeats: int = 5,
    workers: int | None = None,
) -> FfmParams:
    """Grid search for the ``(alpha, gamma)`` that best reproduces growth.

    For each successive snapshot pair the earlier one is evolved to the later
    one's node count ``repeats`` times. The objective is the mean squared
    relative error of edge growth and of mean out-degree, using the median
    over repeats. Every grid point sees the same random streams. The returned
    ``arrivals`` is the node-count delta of the last pair.
    """
    if len(snapshots) < 2:
        raise FitError("need at least two snapshots")
    pairs = list(zip(snapshots[:-1], snapshots[1:]))
    for a, b in pairs:
        if b.n <= a.n:
            raise FitError(f"snapshots must strictly grow in node count ({a.n} -> {b.n})")
        if a.n < 1:
            raise FitError("cannot fit from an empty snapshot")
    points = list(grid) if grid is not None else default_grid()
    if not points:
        raise FitError("empty parameter grid")

    def objective(point: tuple[float, float]) -> float:
        alpha, gamma = point
        errs = []
        for i, (g_a, g_b) in enumerate(pairs):
            params = FfmParams(alpha, gamma, arrivals=g_b.n - g_a.n)
            sims = []
            for rep in range(repeats):
                ev = evolve(g_a, params, rngs.derive(seed, rngs.FIT, i, rep))
                sims.append(ev.graph.m)
            m_sim = float(np.median(sims))
            growth_obs = g_b.m - g_a.m
            growth_sim = m_sim - g_a.m
            errs.append(((growth_sim - growth_obs) / max(abs(growth_obs), 1)) ** 2)
            deg_obs = g_b.m / g_b.n
            deg_sim = m_sim / g_b.n
            errs.append(((deg_sim - deg_obs) / max(deg_obs, 1e-12)) ** 2)
        return float(np.mean(errs))

    if len(points) == 1:
        best = points[0]
    else:
        scores = rngs.pmap(objective, points, workers)
        best = points[int(np.argmin(scores))]
    return FfmParams(alpha=best[0], gamma=best[1], arrivals=pairs[-1][1].n - pairs[-1][0].n)


def write_params(params: FfmParams, stream: IO[str]) -> None:
    stream.write(f"alpha = {params.alpha}\n")
    stream.write(f"gamma = {params.gamma}\n")
    stream.write(f"arrivals = {params.arrivals}\n")
    stream.write(f"distribution = {params.distribution}\n")


def read_params(stream: IO[str]) -> FfmParams:
    values = {}
    for line in stream:
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return FfmParams(
        alpha=float(values.get("alpha", 0.35)),
        gamma=float(values.get("gamma", 0.32)),
        arrivals=int(values.get("arrivals", 0)),
        distribution=values.get("distribution", "geometric"),
    )

