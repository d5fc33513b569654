"""Pure-Python kernels.

Reference implementation of the hot loops, and the fallback when the compiled
extension is unavailable. ``_kernels.pyx`` mirrors every function here draw
for draw: same traversal orders, same number of ``next_double`` calls, so both
return identical results for identical bit-generator states.
"""
from __future__ import annotations

from collections import deque

import numpy as np

GEOMETRIC = 0
BINOMIAL = 1


def _uniform(bitgen):
    return np.random.Generator(bitgen).random


def reach_count(out_ptr, out_idx, n, live, seeds):
    seen = bytearray(n)
    queue = deque()
    for s in seeds:
        if not seen[s]:
            seen[s] = 1
            queue.append(s)
    count = len(queue)
    while queue:
        u = queue.popleft()
        for e in range(out_ptr[u], out_ptr[u + 1]):
            w = out_idx[e]
            if live[e] and not seen[w]:
                seen[w] = 1
                count += 1
                queue.append(w)
    return count


def mc_spread(out_ptr, out_idx, n, seeds, p, bitgen, rounds):
    u01 = _uniform(bitgen)
    out_ptr = out_ptr.tolist()
    out_idx = out_idx.tolist()
    seeds = [int(s) for s in seeds]
    total = 0
    total_sq = 0
    for _ in range(rounds):
        seen = bytearray(n)
        queue = deque()
        for s in seeds:
            if not seen[s]:
                seen[s] = 1
                queue.append(s)
        count = len(queue)
        while queue:
            u = queue.popleft()
            for e in range(out_ptr[u], out_ptr[u + 1]):
                w = out_idx[e]
                if not seen[w] and u01() < p:
                    seen[w] = 1
                    count += 1
                    queue.append(w)
        total += count
        total_sq += count * count
    return total, total_sq


def greedy_gains(out_ptr, out_idx, n, selected, candidates, p, bitgen, rounds):
    """Summed marginal gains of each candidate over ``rounds`` live-edge samples.

    Edge coins are drawn lazily, at most once per edge per sample.
    """
    u01 = _uniform(bitgen)
    out_ptr = out_ptr.tolist()
    out_idx = out_idx.tolist()
    selected = [int(s) for s in selected]
    candidates = [int(c) for c in candidates]
    gains = [0] * len(candidates)
    m = len(out_idx)
    for _ in range(rounds):
        state = bytearray(m)  # 0 unknown, 1 live, 2 dead

        def live(e):
            st = state[e]
            if st == 0:
                st = 1 if u01() < p else 2
                state[e] = st
            return st == 1

        covered = bytearray(n)
        queue = deque()
        for s in selected:
            if not covered[s]:
                covered[s] = 1
                queue.append(s)
        while queue:
            u = queue.popleft()
            for e in range(out_ptr[u], out_ptr[u + 1]):
                w = out_idx[e]
                if not covered[w] and live(e):
                    covered[w] = 1
                    queue.append(w)

        for i, c in enumerate(candidates):
            if covered[c]:
                continue
            seen = {c}
            queue.append(c)
            while queue:
                u = queue.popleft()
                for e in range(out_ptr[u], out_ptr[u + 1]):
                    w = out_idx[e]
                    if w not in seen and not covered[w] and live(e):
                        seen.add(w)
                        queue.append(w)
            gains[i] += len(seen)
    return np.array(gains, dtype=np.int64)


class _Overlay:
    """Base graph plus per-node lists of edges added during evolution."""

    def __init__(self, out_ptr, out_idx, in_ptr, in_idx, n0, arrivals):
        self.n0 = n0
        self.base_out = [out_idx[out_ptr[u] : out_ptr[u + 1]].tolist() for u in range(n0)]
        self.base_in = [in_idx[in_ptr[u] : in_ptr[u + 1]].tolist() for u in range(n0)]
        self.total = n0 + arrivals
        self.reset()

    def reset(self):
        self.extra_out = [[] for _ in range(self.total)]
        self.extra_in = [[] for _ in range(self.total)]
        self.new_src = []
        self.new_dst = []

    def add(self, u, v):
        self.extra_out[u].append(v)
        self.extra_in[v].append(u)
        self.new_src.append(u)
        self.new_dst.append(v)

    def outs(self, u):
        if u < self.n0:
            return self.base_out[u] + self.extra_out[u]
        return self.extra_out[u]

    def ins(self, u):
        if u < self.n0:
            return self.base_in[u] + self.extra_in[u]
        return self.extra_in[u]


def _burn_count(u01, mean_or_prob, mode, cap):
    k = 0
    if mode == GEOMETRIC:
        while u01() < mean_or_prob:
            k += 1
    else:
        q = mean_or_prob / cap
        for _ in range(cap):
            if u01() < q:
                k += 1
    return k


def _pick(u01, pool, x):
    m = min(x, len(pool))
    for i in range(m):
        j = i + int(u01() * (len(pool) - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:m]


def _evolve(ov, arrivals, alpha, gamma, mode, cap, recurse_backward, u01):
    if mode == GEOMETRIC:
        fwd, bwd = alpha, gamma * alpha
    else:
        fwd, bwd = alpha / (1 - alpha), gamma * alpha / (1 - gamma * alpha)
    stamp = [0] * ov.total
    for t in range(arrivals):
        v = ov.n0 + t
        mark = t + 1
        w = int(u01() * v)
        ov.add(v, w)
        stamp[v] = mark
        stamp[w] = mark
        queue = deque([w])
        while queue:
            c = queue.popleft()
            x = _burn_count(u01, fwd, mode, cap)
            y = _burn_count(u01, bwd, mode, cap)
            forward = _pick(u01, [s for s in ov.ins(c) if stamp[s] != mark], x)
            for s in forward:
                stamp[s] = mark
            backward = _pick(u01, [d for d in ov.outs(c) if stamp[d] != mark], y)
            for d in backward:
                stamp[d] = mark
            for s in forward:
                ov.add(v, s)
                queue.append(s)
            for d in backward:
                ov.add(d, v)
                if recurse_backward:
                    queue.append(d)


def evolve_edges(out_ptr, out_idx, in_ptr, in_idx, n0, arrivals, alpha, gamma, mode, cap,
                 recurse_backward, bitgen):
    u01 = _uniform(bitgen)
    ov = _Overlay(out_ptr, out_idx, in_ptr, in_idx, n0, arrivals)
    _evolve(ov, arrivals, alpha, gamma, mode, cap, recurse_backward, u01)
    return np.array(ov.new_src, dtype=np.int32), np.array(ov.new_dst, dtype=np.int32)


def _rr(neighbors, target, p, u01, n):
    seen = bytearray(n)
    seen[target] = 1
    members = [target]
    queue = deque([target])
    while queue:
        x = queue.popleft()
        for s in neighbors(x):
            if not seen[s] and u01() < p:
                seen[s] = 1
                members.append(s)
                queue.append(s)
    return members


def rr_sets_static(in_ptr, in_idx, n, p, bitgen, count):
    u01 = _uniform(bitgen)
    ins = [in_idx[in_ptr[u] : in_ptr[u + 1]].tolist() for u in range(n)]
    offsets = [0]
    members = []
    for _ in range(count):
        target = int(u01() * n)
        members.extend(_rr(ins.__getitem__, target, p, u01, n))
        offsets.append(len(members))
    return np.array(offsets, dtype=np.int64), np.array(members, dtype=np.int32)


def rr_sets_evolved(out_ptr, out_idx, in_ptr, in_idx, n0, arrivals, alpha, gamma, mode, cap,
                    recurse_backward, p, bitgen, instances, per_instance, reverse):
    u01 = _uniform(bitgen)
    ov = _Overlay(out_ptr, out_idx, in_ptr, in_idx, n0, arrivals)
    nr = n0 + arrivals
    offsets = [0]
    members = []
    for _ in range(instances):
        ov.reset()
        _evolve(ov, arrivals, alpha, gamma, mode, cap, recurse_backward, u01)
        walk = ov.outs if reverse else ov.ins
        for _ in range(per_instance):
            target = int(u01() * nr)
            members.extend(_rr(walk, target, p, u01, nr))
            offsets.append(len(members))
    return np.array(offsets, dtype=np.int64), np.array(members, dtype=np.int32)


def rr_set_from(in_ptr, in_idx, n, target, p, bitgen):
    u01 = _uniform(bitgen)
    ins = lambda u: in_idx[in_ptr[u] : in_ptr[u + 1]].tolist()
    return np.array(_rr(ins, target, p, u01, n), dtype=np.int32)
