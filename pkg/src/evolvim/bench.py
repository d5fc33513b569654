"""Experiment harness: snapshot workflows, ground truth, metrics and reports.

A comparison runs every configured algorithm on the current graph ``G_0``,
evaluates the chosen seeds on the target graph ``G_r`` by Monte Carlo, and
divides by the spread of greedy seeds picked directly on ``G_r``.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from evolvim import rng as rngs
from evolvim._backend import kernels
from evolvim.cascade import CascadeConfig, estimate_spread
from evolvim.evolution import PRESETS, FfmParams, evolve, grow
from evolvim.graph import Graph, load_edge_list, snapshot_at, write_edge_list
from evolvim.rrset import ThetaConfig
from evolvim.seeds import RankedSeedSet
from evolvim.selection import (
    GenieConfig,
    SeerConfig,
    select_degree,
    select_genie,
    select_greedy_static,
    select_seer,
)

log = logging.getLogger(__name__)

ALGORITHMS = ("genie", "seer", "greedy", "degree")
TRUTH = "truth"


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One comparison run.

    Data comes from exactly one source: a synthetic Forest Fire workload
    (``synthetic_nodes`` > 0), a pair of edge-list files (``graph0`` and
    ``graphr``), or a timestamped edge list cut at ``t0`` and ``tr``.
    ``arrivals`` is the number of nodes the selectors predict; for synthetic
    data it is also the held-out growth, and for real data 0 means
    ``|V_r| - |V_0|``.
    """

    algorithms: tuple[str, ...] = ALGORITHMS
    k: int = 10
    p: float = 0.01
    instances: int = 500
    rounds: int = 5000
    truth_rounds: int = 0
    theta: int = 0
    epsilon: float = 0.1
    ell: float = 1.0
    per_instance: int = 1
    eval_rounds: int = 10000
    seed: int = 0
    trials: int = 1
    synthetic_nodes: int = 0
    arrivals: int = 0
    growth: float = 0.0
    preset: str = ""
    alpha: float = 0.35
    gamma: float = 0.32
    distribution: str = "geometric"
    recurse_backward: bool = False
    graph0: str = ""
    graphr: str = ""
    temporal: str = ""
    t0: int = -1
    tr: int = -1
    reverse_edges: bool = False
    candidate_filter: str = "v0"
    aggregation: str = "borda"
    rank_top: int = 10
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithms: {', '.join(bad)}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("p must lie in [0, 1]")
        for name in ("instances", "rounds", "eval_rounds", "per_instance", "rank_top"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.candidate_filter not in ("v0", "all"):
            raise ConfigError(f"candidate_filter must be v0 or all, got {self.candidate_filter!r}")
        if self.aggregation not in ("borda", "rank-sum"):
            raise ConfigError(f"aggregation must be borda or rank-sum, got {self.aggregation!r}")
        if self.preset and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        sources = [
            self.synthetic_nodes > 0,
            bool(self.graph0 or self.graphr),
            bool(self.temporal),
        ]
        if sum(sources) != 1:
            raise ConfigError("configure exactly one of synthetic_nodes, graph0/graphr, temporal")
        if (self.graph0 or self.graphr) and not (self.graph0 and self.graphr):
            raise ConfigError("graph0 and graphr must both be given")
        if self.temporal and (self.t0 < 0 or self.tr < self.t0):
            raise ConfigError("temporal data needs 0 <= t0 <= tr")
        try:
            self.ffm()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def synthetic(self) -> bool:
        return self.synthetic_nodes > 0

    def target_arrivals(self) -> int:
        if self.growth and not self.arrivals:
            return int(round(self.growth * self.synthetic_nodes))
        return self.arrivals

    def ffm(self, arrivals: int | None = None) -> FfmParams:
        alpha, gamma = PRESETS[self.preset] if self.preset else (self.alpha, self.gamma)
        return FfmParams(
            alpha=alpha,
            gamma=gamma,
            arrivals=self.target_arrivals() if arrivals is None else arrivals,
            distribution=self.distribution,
            recurse_backward=self.recurse_backward,
        )

    def echo(self) -> dict[str, object]:
        out = asdict(self)
        out.pop("base_dir")
        out["algorithms"] = ",".join(self.algorithms)
        return out

    @classmethod
    def from_text(cls, text: str, base_dir: str | Path = ".") -> "ExperimentConfig":
        """Parse flat ``key = value`` lines; ``#`` starts a comment."""
        parser = configparser.ConfigParser(
            inline_comment_prefixes=("#",), comment_prefixes=("#",), interpolation=None
        )
        try:
            parser.read_string("[experiment]\n" + text)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config: {exc}") from None
        types = {f.name: f.type for f in fields(cls)}
        kw: dict[str, object] = {"base_dir": str(base_dir)}
        for key, raw in parser["experiment"].items():
            name = key.replace("-", "_")
            if name not in types or name == "base_dir":
                raise ConfigError(f"unknown config key {key!r}")
            kw[name] = _convert(name, types[name], raw)
        return cls(**kw)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.from_text(text, path.parent)

    def resolve(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else Path(self.base_dir) / path


def _convert(name: str, kind: str, raw: str):
    raw = raw.strip()
    try:
        if kind.startswith("tuple"):
            return tuple(a.strip() for a in raw.split(",") if a.strip())
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return raw


@dataclass(frozen=True)
class TrialResult:
    trial: int
    algorithm: str
    seeds: RankedSeedSet
    labels: tuple[str, ...]
    unmatched: tuple[str, ...]
    mean: float
    std: float
    ratio: float
    deviation: float
    scatter: tuple[tuple[int, int], ...]


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    results: list[TrialResult]
    timings: list[tuple[int, str, float]]

    def algorithms(self) -> list[str]:
        return [TRUTH, *self.config.algorithms]

    def summary(self) -> list[dict[str, object]]:
        rows = []
        for algo in self.algorithms():
            rs = [r for r in self.results if r.algorithm == algo]
            ratios = np.array([r.ratio for r in rs])
            rows.append({
                "algorithm": algo,
                "trials": len(rs),
                "ratio_mean": float(ratios.mean()),
                "ratio_sd": float(ratios.std(ddof=1)) if len(rs) > 1 else 0.0,
                "spread_mean": float(np.mean([r.mean for r in rs])),
                "deviation_mean": float(np.mean([r.deviation for r in rs])),
                "unmatched": sum(len(r.unmatched) for r in rs),
            })
        return rows

    def ratios(self, algorithm: str) -> np.ndarray:
        return np.array([r.ratio for r in self.results if r.algorithm == algorithm])

    def metrics_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "algorithm", "spread_mean", "spread_sd", "ratio", "deviation", "unmatched", "seeds"])
        for r in self.results:
            w.writerow([
                r.trial, r.algorithm, f"{r.mean:.6f}", f"{r.std:.6f}", f"{r.ratio:.6f}",
                f"{r.deviation:.4f}", len(r.unmatched), " ".join(r.labels),
            ])
        return buf.getvalue()

    def scatter_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "algorithm", "rank_t0", "rank_tr"])
        for r in self.results:
            for a, b in r.scatter:
                w.writerow([r.trial, r.algorithm, a, b])
        return buf.getvalue()

    def timings_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "algorithm", "seconds"])
        for t, algo, sec in self.timings:
            w.writerow([t, algo, f"{sec:.4f}"])
        return buf.getvalue()

    def table(self) -> str:
        head = ("algorithm", "trials", "ratio", "sd", "spread", "rank dev", "unmatched")
        body = [
            (
                s["algorithm"], str(s["trials"]), f"{s['ratio_mean']:.4f}", f"{s['ratio_sd']:.4f}",
                f"{s['spread_mean']:.3f}", f"{s['deviation_mean']:.2f}", str(s["unmatched"]),
            )
            for s in self.summary()
        ]
        widths = [max(len(row[i]) for row in (head, *body)) for i in range(len(head))]
        lines = []
        for row in (head, *body):
            cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"

    def text(self) -> str:
        echo = self.config.echo()
        lines = ["# configuration"]
        lines += [f"{key} = {echo[key]}" for key in sorted(echo)]
        lines += ["", "# summary", self.table()]
        return "\n".join(lines)

    def seed_records(self, algorithm: str) -> str:
        out = []
        for r in self.results:
            if r.algorithm != algorithm:
                continue
            scores = r.seeds.scores or (None,) * len(r.seeds)
            out.append({
                "trial": r.trial,
                "padded": r.seeds.padded,
                "unmatched": list(r.unmatched),
                "seeds": [
                    {"label": lab, "rank": rank, "score": _plain(score)}
                    for lab, rank, score in zip(r.labels, range(1, len(r.labels) + 1), scores)
                ],
            })
        doc = {"algorithm": algorithm, "master_seed": self.config.seed, "trials": out}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write report files. Everything except ``timings.csv`` is reproducible."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {
            "metrics.csv": self.metrics_csv(),
            "scatter.csv": self.scatter_csv(),
            "report.txt": self.text(),
            "timings.csv": self.timings_csv(),
        }
        for algo in self.algorithms():
            files[f"seeds_{algo}.json"] = self.seed_records(algo)
        written = []
        for name, body in files.items():
            path = out / name
            path.write_text(body)
            written.append(path)
        return written


def _plain(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def rank_scatter(
    g0: Graph, gr: Graph, algo_seeds: RankedSeedSet, truth: RankedSeedSet, top_m: int
) -> list[tuple[int, int]]:
    """``(rank at t0, rank at tr)`` for the target's top-``top_m`` seeds.

    Only target seeds whose label exists in ``g0`` are kept. A seed the
    algorithm did not rank gets rank ``len(algo_seeds) + 1``.
    """
    pairs = []
    for v, b in truth.top(top_m).entries:
        u = g0.node_of(gr.label(v))
        if u is None:
            continue
        a = algo_seeds.rank_of(u)
        pairs.append((a if a is not None else len(algo_seeds) + 1, b))
    return pairs


def rank_deviation(pairs: Sequence[tuple[int, int]]) -> float:
    """Mean ``|a - b|`` over scatter pairs; 0 for an empty scatter."""
    if not pairs:
        return 0.0
    return float(np.mean([abs(a - b) for a, b in pairs]))


def _load_static(cfg: ExperimentConfig, name: str) -> Graph:
    with open(cfg.resolve(name)) as fh:
        return load_edge_list(fh)


def trial_graphs(cfg: ExperimentConfig, trial: int) -> tuple[Graph, Graph, FfmParams]:
    """``(G_0, G_r, selector FFM params)`` for one trial.

    Synthetic trials grow a fresh ``G_0`` and a held-out ``G_r`` from streams
    the selectors never see.
    """
    if cfg.synthetic:
        ffm = cfg.ffm()
        g0 = grow(cfg.synthetic_nodes, ffm, rngs.derive(cfg.seed, rngs.SYNTH, trial))
        gr = evolve(g0, ffm, rngs.derive(cfg.seed, rngs.HOLDOUT, trial)).graph
        return g0, gr, ffm
    if cfg.temporal:
        with open(cfg.resolve(cfg.temporal)) as fh:
            tg = load_edge_list(fh, timestamped=True)
        g0, gr = snapshot_at(tg, cfg.t0), snapshot_at(tg, cfg.tr)
    else:
        g0, gr = _load_static(cfg, cfg.graph0), _load_static(cfg, cfg.graphr)
    if g0.n == 0 or gr.n == 0:
        raise ConfigError("snapshot graphs must not be empty")
    arrivals = cfg.arrivals or max(gr.n - g0.n, 0)
    return g0, gr, cfg.ffm(arrivals)


def select(
    algorithm: str,
    g0: Graph,
    *,
    k: int,
    p: float,
    ffm: FfmParams,
    seed: rngs.SeedLike = 0,
    instances: int = 500,
    rounds: int = 5000,
    theta: ThetaConfig = ThetaConfig(),
    per_instance: int = 1,
    candidate_filter: str = "v0",
    aggregation: str = "borda",
    reverse: bool = False,
    workers: int | None = None,
) -> RankedSeedSet:
    """Run one algorithm on ``g0``.

    With ``reverse`` influence travels against edge direction while predicted
    growth still follows the graph as given.
    """
    view = g0.reversed() if reverse else g0
    if algorithm == "genie":
        gc = GenieConfig(k, p, instances, rounds, ffm, aggregation, reverse)
        return select_genie(g0, gc, seed, workers=workers)
    if algorithm == "seer":
        sc = SeerConfig(k, p, theta, ffm, per_instance, candidate_filter, reverse)
        return select_seer(g0, sc, seed, workers=workers)
    if algorithm == "greedy":
        return select_greedy_static(view, k, p, rounds, seed, workers=workers)
    if algorithm == "degree":
        return select_degree(view, k)
    raise ConfigError(f"unknown algorithm {algorithm!r}")


def _select_configured(algorithm, g0, cfg: ExperimentConfig, ffm, seed, workers) -> RankedSeedSet:
    return select(
        algorithm, g0, k=cfg.k, p=cfg.p, ffm=ffm, seed=seed,
        instances=cfg.instances, rounds=cfg.rounds,
        theta=ThetaConfig(cfg.theta or None, cfg.epsilon, cfg.ell),
        per_instance=cfg.per_instance, candidate_filter=cfg.candidate_filter,
        aggregation=cfg.aggregation, reverse=cfg.reverse_edges, workers=workers,
    )


def run_comparison(cfg: ExperimentConfig, *, workers: int | None = None) -> ExperimentReport:
    """Select on ``G_0``, evaluate on ``G_r``, compare to greedy on ``G_r``.

    Trials run in index order. All seed sets of a trial are evaluated with the
    same Monte Carlo streams, so per-trial ratios are paired.
    """
    results: list[TrialResult] = []
    timings: list[tuple[int, str, float]] = []
    ecfg = CascadeConfig(cfg.p, cfg.eval_rounds)
    for t in range(cfg.trials):
        g0, gr, ffm = trial_graphs(cfg, t)
        target = gr.reversed() if cfg.reverse_edges else gr
        if cfg.k > g0.n:
            raise ConfigError(f"k={cfg.k} exceeds |V_0|={g0.n}")
        seed = rngs.seed_sequence(cfg.seed, rngs.TRIAL, t)

        start = time.perf_counter()
        truth = select_greedy_static(target, cfg.k, cfg.p, cfg.truth_rounds or cfg.rounds, seed, workers=workers)
        timings.append((t, TRUTH, time.perf_counter() - start))
        base = estimate_spread(target, list(truth.nodes), ecfg, seed, workers=workers)
        top_m = min(cfg.rank_top, cfg.k)
        results.append(_result(t, TRUTH, truth, gr, gr, truth, base.mean, base, top_m))

        for algo in cfg.algorithms:
            start = time.perf_counter()
            chosen = _select_configured(algo, g0, cfg, ffm, seed, workers)
            timings.append((t, algo, time.perf_counter() - start))
            mapped = [gr.node_of(g0.label(v)) for v in chosen.nodes]
            est = estimate_spread(target, mapped, ecfg, seed, workers=workers)
            results.append(_result(t, algo, chosen, g0, gr, truth, base.mean, est, top_m))
        log.info("trial %d done", t)
    return ExperimentReport(cfg, results, timings)


def _result(t, algo, chosen, g0, gr, truth, base, est, top_m) -> TrialResult:
    labels = tuple(g0.label(v) for v in chosen.nodes)
    unmatched = tuple(lab for lab in labels if gr.node_of(lab) is None)
    pairs = tuple(rank_scatter(g0, gr, chosen, truth, top_m))
    ratio = est.mean / base if base > 0 else float("nan")
    return TrialResult(t, algo, chosen, labels, unmatched, est.mean, est.std, ratio, rank_deviation(pairs), pairs)


@dataclass(frozen=True)
class Theorem1Result:
    sigma_classical: int
    sigma_optimal: int
    bound_holds: bool

    def __iter__(self):
        return iter((self.sigma_classical, self.sigma_optimal, self.bound_holds))


def theorem1_graphs(n: int, copies: int) -> tuple[Graph, Graph]:
    """``G_0``: ``n`` nodes with the single edge ``0 -> 1``; ``G_r``: ``copies``
    disjoint replicas of it, replica ``c`` on ids ``c*n .. c*n + n - 1``."""
    g0 = Graph.from_edges(n, [0], [1])
    starts = np.arange(copies) * n
    gr = Graph.from_edges(n * copies, starts, starts + 1)
    return g0, gr


def _reach(g: Graph, seeds: Sequence[int]) -> int:
    live = np.ones(g.m, dtype=np.uint8)
    return int(kernels.reach_count(g.out_ptr, g.out_idx, g.n, live, np.asarray(seeds, dtype=np.int32)))


def theorem1_scenario(k: int, copies: int, n: int | None = None) -> Theorem1Result:
    """Spread in ``G_r`` of greedy seeds picked on ``G_0`` versus the optimum.

    With ``p = 1`` greedy on ``G_0`` takes the edge source and then ``k - 1``
    isolated nodes, reaching ``k + 1`` nodes; in ``G_r`` one source per
    replica reaches ``2k``. ``n`` defaults to ``k + 1``, the smallest order
    that leaves ``k - 1`` isolated nodes to pick.
    """
    n = k + 1 if n is None else n
    if k < 1:
        raise ValueError("k must be >= 1")
    if copies <= k:
        raise ValueError("copies must exceed k")
    if n < max(2, k + 1):
        raise ValueError("need n >= max(2, k + 1)")
    g0, gr = theorem1_graphs(n, copies)
    classical = select_greedy_static(g0, k, 1.0, 1, 0, workers=1)
    sigma_classical = _reach(gr, classical.nodes)
    best = select_greedy_static(gr, k, 1.0, 1, 0, workers=1)
    sigma_optimal = _reach(gr, best.nodes)
    # no seed reaches more than two nodes, so greedy's 2k is optimal
    single = max(_reach(gr, [v]) for v in range(gr.n))
    if sigma_optimal != k * single:
        raise AssertionError("greedy optimum check failed")
    bound = sigma_classical < (1 - 1 / math.e) * sigma_optimal
    return Theorem1Result(sigma_classical, sigma_optimal, bound)


def evolve_snapshots(
    g0: Graph, params: FfmParams, arrivals: Sequence[int], seed: rngs.SeedLike = 0
) -> list[Graph]:
    """Nested snapshots of ``g0`` grown once by ``max(arrivals)`` nodes.

    Snapshot ``a`` keeps the first ``n0 + a`` nodes and the edges among them,
    which are exactly the edges present after ``a`` arrivals.
    """
    if not arrivals:
        raise ValueError("no snapshot arrival counts given")
    if min(arrivals) < 0:
        raise ValueError("arrival counts must be >= 0")
    full = evolve(g0, replace(params, arrivals=max(arrivals)), rngs.derive(seed, rngs.EVOLVE)).graph
    snaps = []
    for a in arrivals:
        n = g0.n + a
        keep = (full.src < n) & (full.dst < n)
        labels = full.labels.prefix(n) if full.labels is not None else None
        snaps.append(Graph.from_edges(n, full.src[keep], full.dst[keep], labels))
    return snaps


def write_snapshots(
    snaps: Sequence[Graph], arrivals: Sequence[int], out_dir: str | Path, prefix: str = "snapshot"
) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for a, g in zip(arrivals, snaps):
        path = out / f"{prefix}_{a}.txt"
        with open(path, "w") as fh:
            write_edge_list(g, fh, header=f"nodes={g.n} edges={g.m} arrivals={a}")
        paths.append(path)
    return paths


def generate_synthetic(
    n0: int,
    params: FfmParams,
    arrivals: Sequence[int],
    seed: rngs.SeedLike = 0,
    out_dir: str | Path | None = None,
    prefix: str = "snapshot",
) -> list[Graph]:
    """Nested Forest Fire snapshots of a grown ``n0``-node seed graph.

    With ``out_dir`` each snapshot is also written as ``<prefix>_<a>.txt``.
    """
    base = grow(n0, replace(params, arrivals=0), rngs.derive(seed, rngs.SYNTH))
    snaps = evolve_snapshots(base, params, arrivals, seed)
    if out_dir is not None:
        write_snapshots(snaps, arrivals, out_dir, prefix)
    return snaps
