"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""
import itertools
import subprocess
import sys
import time

import numpy as np
from scipy import stats

from evolvim import rng as rngs
from evolvim.bench import ExperimentConfig, run_comparison, theorem1_scenario
from evolvim.cascade import CascadeConfig, estimate_spread, exact_spread, sample_live_edges, spread_on_sample
from evolvim.evolution import FfmParams, densification_exponent, edge_trajectory, evolve, grow
from evolvim.rrset import ThetaConfig, rr_collection_static
from evolvim.selection import (
    GenieConfig,
    SeerConfig,
    select_genie,
    select_greedy_static,
    select_rr_static,
    select_seer,
)

from conftest import random_graph, record_criterion, small_corpus

CORPUS = small_corpus(50, seed=2024, max_n=8, max_m=12)
PROBS = (0.2, 0.5, 0.8)


def test_c1_oracle_equivalence():
    start = time.perf_counter()
    inside = 0
    for i, g in enumerate(CORPUS):
        p = PROBS[i % 3]
        seeds = [0] if i % 2 == 0 else [0, g.n - 1]
        est = estimate_spread(g, seeds, CascadeConfig(p, 200_000), rngs.seed_sequence(1, i))
        lo, hi = est.interval()
        inside += lo - 1e-12 <= exact_spread(g, seeds, p) <= hi + 1e-12
    elapsed = time.perf_counter() - start
    ok = inside >= 49 and elapsed < 120
    record_criterion(1, ok, f"{inside}/50 inside 3-sigma interval, {elapsed:.1f}s")
    assert ok


def test_c2_rr_unbiasedness():
    worst = 0.0
    for i, g in enumerate(CORPUS):
        p = PROBS[i % 3]
        coll = rr_collection_static(g, p, 200_000, rngs.seed_sequence(2, i))
        sets = [(v,) for v in range(g.n)] + list(itertools.combinations(range(g.n), 2))
        for s in sets:
            exact = exact_spread(g, s, p)
            worst = max(worst, abs(coll.estimate(s) - exact) / exact)
    ok = worst <= 0.02
    record_criterion(2, ok, f"max relative error {worst:.4f} (limit 0.02)")
    assert ok


def test_c3_submodularity():
    rng = np.random.default_rng(3)
    violations = checked = 0
    for gi in range(20):
        n = int(rng.integers(2, 7))
        g = random_graph(rng, n, int(rng.integers(1, n * (n - 1) + 1)))
        for s in range(10):
            sample = sample_live_edges(g, 0.5, rngs.derive(3, gi, s))
            f = [spread_on_sample(g, sample, [v for v in range(n) if mask >> v & 1]) for mask in range(1 << n)]
            for t in range(1 << n):
                for v in range(n):
                    if t >> v & 1:
                        continue
                    gain_t = f[t | 1 << v] - f[t]
                    sub = t
                    while True:  # every subset of t
                        checked += 1
                        violations += f[sub | 1 << v] - f[sub] < gain_t
                        if sub == 0:
                            break
                        sub = (sub - 1) & t
    ok = violations == 0
    record_criterion(3, ok, f"{violations} violations in {checked} triples")
    assert ok


def test_c4_theorem1():
    start = time.perf_counter()
    five = tuple(theorem1_scenario(5, 7))
    three = theorem1_scenario(3, 4)
    elapsed = time.perf_counter() - start
    ok = five == (6, 10, True) and not three.bound_holds and elapsed < 1.0
    record_criterion(4, ok, f"k=5 -> {five}, k=3 bound_holds={three.bound_holds}, {elapsed:.3f}s")
    assert ok


def test_c5_degeneracy():
    g = grow(300, FfmParams(), rngs.derive(5))
    genie_same = all(
        select_genie(g, GenieConfig(8, 0.05, instances=1, rounds=500, ffm=FfmParams(arrivals=0)), s)
        == select_greedy_static(g, 8, 0.05, 500, s)
        for s in (0, 1, 2)
    )
    seer_same = all(
        select_seer(g, SeerConfig(8, 0.05, ThetaConfig(20_000), FfmParams(arrivals=0)), s)
        == select_rr_static(g, 8, 0.05, 20_000, s)
        for s in (0, 1, 2)
    )
    ok = genie_same and seer_same
    record_criterion(5, ok, f"genie==greedy {genie_same}, seer==static rr {seer_same}")
    assert ok


def test_c6_trend():
    cfg = ExperimentConfig(
        algorithms=("seer", "genie", "greedy"), k=10, p=0.05, instances=20, rounds=1000, truth_rounds=2000,
        theta=1_000_000, eval_rounds=10_000, synthetic_nodes=1500, growth=0.25, trials=20, seed=0,
    )
    start = time.perf_counter()
    rep = run_comparison(cfg)
    elapsed = time.perf_counter() - start
    seer, genie, greedy = rep.ratios("seer"), rep.ratios("genie"), rep.ratios("greedy")
    # shifted one-sided paired t-tests
    p_seer = stats.ttest_rel(seer - 0.03, greedy, alternative="greater").pvalue
    p_genie = stats.ttest_rel(genie + 0.02, seer, alternative="greater").pvalue
    gap = seer.mean() - greedy.mean()
    ok_seer = gap >= 0.03 and p_seer < 0.05
    ok_genie = genie.mean() >= seer.mean() - 0.02 and p_genie < 0.05
    ok = ok_seer and ok_genie and elapsed < 1800
    record_criterion(
        6, ok,
        f"ratios seer {seer.mean():.4f} genie {genie.mean():.4f} greedy {greedy.mean():.4f}; "
        f"seer-greedy {100 * gap:+.2f} pts (p={p_seer:.3g}), genie vs seer-2 p={p_genie:.3g}; {elapsed:.0f}s",
    )
    assert ok


def test_c7_linear_in_instances():
    g = grow(1000, FfmParams(), rngs.derive(7))
    sizes = [10, 25, 50, 100, 200]
    times = []
    for inst in sizes:
        cfg = GenieConfig(5, 0.01, instances=inst, rounds=50, ffm=FfmParams(arrivals=50))
        start = time.perf_counter()
        select_genie(g, cfg, 0, workers=1)
        times.append(time.perf_counter() - start)
    r2 = stats.linregress(sizes, times).rvalue ** 2
    ok = r2 >= 0.95
    record_criterion(7, ok, f"R^2 {r2:.4f}; seconds {', '.join(f'{t:.2f}' for t in times)}")
    assert ok


def test_c8_ffm_structure():
    tree_ok = True
    for s in range(5):
        base = grow(30, FfmParams(), rngs.derive(8, s))
        ev = evolve(base, FfmParams(alpha=0.0, gamma=0.32, arrivals=200), rngs.derive(8, s, 1))
        tree_ok &= len(ev.new_src) == 200
    exps = []
    params = FfmParams(0.35, 0.32, arrivals=1900)
    for r in range(10):
        g0 = grow(100, FfmParams(0.35, 0.32), rngs.derive(0, rngs.SYNTH, r))
        nodes, edges = edge_trajectory(evolve(g0, params, rngs.derive(0, rngs.EVOLVE, r)))
        exps.append(densification_exponent(nodes, edges)[0])
    dense = sum(a > 1 for a in exps)
    ok = tree_ok and dense >= 9
    record_criterion(
        8, ok, f"tree growth exact {tree_ok}; a>1 in {dense}/10 runs (a = {', '.join(f'{a:.3f}' for a in exps)})"
    )
    assert ok


def test_c9_compare_determinism(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(
        "algorithms = genie, seer, greedy, degree\n"
        "k = 5\np = 0.05\ninstances = 4\nrounds = 200\ntheta = 5000\neval_rounds = 2000\n"
        "synthetic_nodes = 200\ngrowth = 0.25\ntrials = 3\nseed = 9\n"
    )
    outs = []
    for name in ("a", "b"):
        proc = subprocess.run(
            [sys.executable, "-m", "evolvim.cli", "compare", str(cfg), "--out", str(tmp_path / name)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(proc.stdout)
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.name != "timings.csv")
    differ = [n for n in names if (tmp_path / "a" / n).read_bytes() != (tmp_path / "b" / n).read_bytes()]
    ok = not differ and outs[0] == outs[1]
    record_criterion(9, ok, f"{len(names)} report files compared, differing: {differ or 'none'}")
    assert ok
