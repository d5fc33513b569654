import itertools
from collections import deque

import numpy as np
import pytest

from evolvim.graph import Graph

ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])


def random_graph(rng: np.random.Generator, n: int, m: int) -> Graph:
    """Uniform simple digraph on ``n`` nodes with ``min(m, n(n-1))`` edges."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = min(m, len(pairs))
    pick = rng.choice(len(pairs), size=m, replace=False)
    src = [pairs[i][0] for i in pick]
    dst = [pairs[i][1] for i in pick]
    return Graph.from_edges(n, src, dst)


def small_corpus(count: int = 50, seed: int = 2024, max_n: int = 8, max_m: int = 12) -> list[Graph]:
    rng = np.random.default_rng(seed)
    graphs = []
    for _ in range(count):
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        graphs.append(random_graph(rng, n, m))
    return graphs


def reach(edges, n, seeds) -> int:
    """Reachable-set size by plain BFS over an explicit edge list."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen)


def brute_spread(g: Graph, seeds, p: float) -> float:
    """Expected spread by enumerating every live/dead outcome of every edge."""
    edges = g.edges()
    total = 0.0
    for mask in itertools.product((0, 1), repeat=len(edges)):
        live = [e for e, bit in zip(edges, mask) if bit]
        k = len(live)
        total += p**k * (1 - p) ** (len(edges) - k) * reach(live, g.n, list(seeds))
    return total


def star(leaves: int = 5) -> Graph:
    return Graph.from_edges(leaves + 1, [0] * leaves, list(range(1, leaves + 1)))


@pytest.fixture
def chain3() -> Graph:
    return Graph.from_edges(3, [0, 1], [1, 2])
