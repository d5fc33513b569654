"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_backends.py [--nodes 2000] [--repeat 3]

Both backends get identical inputs and bit-generator states; outputs are
checked for equality before timings are reported.
"""
import argparse
import time

import numpy as np

from evolvim import _pykernels
from evolvim import rng as rngs
from evolvim.evolution import FfmParams, grow

try:
    from evolvim import _kernels
except ImportError:  # extension not built
    _kernels = None


def cases(g, n_arrivals):
    ffm = FfmParams(arrivals=n_arrivals)
    seeds = np.arange(10, dtype=np.int32)
    cand = np.arange(g.n, dtype=np.int32)
    return {
        "mc_spread (2000 rounds)": lambda k: k.mc_spread(
            g.out_ptr, g.out_idx, g.n, seeds, 0.1, rngs.derive(1), 2000),
        "greedy_gains (20 rounds)": lambda k: tuple(k.greedy_gains(
            g.out_ptr, g.out_idx, g.n, seeds[:3], cand, 0.1, rngs.derive(2), 20)),
        f"evolve_edges (+{n_arrivals} nodes)": lambda k: tuple(map(tuple, k.evolve_edges(
            g.out_ptr, g.out_idx, g.in_ptr, g.in_idx, g.n, n_arrivals,
            *ffm.kernel_args(), rngs.derive(3)))),
        "rr_sets_evolved (200 instances)": lambda k: tuple(map(tuple, k.rr_sets_evolved(
            g.out_ptr, g.out_idx, g.in_ptr, g.in_idx, g.n, n_arrivals // 10,
            *ffm.kernel_args(), 0.1, rngs.derive(4), 200, 1, False))),
    }


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    g = grow(args.nodes, FfmParams(), rngs.derive(0))
    print(f"graph: {g.n} nodes, {g.m} edges")
    if _kernels is None:
        print("compiled extension unavailable; timing the Python backend only")
    print(f"{'kernel':34s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, run in cases(g, args.nodes // 4).items():
        t_py, out_py = best_of(lambda: run(_pykernels), args.repeat)
        if _kernels is None:
            print(f"{name:34s} {t_py:10.4f} {'-':>10s} {'-':>8s}")
            continue
        t_cy, out_cy = best_of(lambda: run(_kernels), args.repeat)
        same = out_py == out_cy
        if isinstance(same, np.ndarray):
            same = bool(same.all())
        flag = "" if same else "  OUTPUT MISMATCH"
        print(f"{name:34s} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:7.1f}x{flag}")


if __name__ == "__main__":
    main()
