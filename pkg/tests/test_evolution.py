import io
from collections import defaultdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evolvim import rng as rngs
from evolvim.bench import generate_synthetic
from evolvim.evolution import (
    PRESETS,
    FfmParams,
    FitError,
    densification_exponent,
    edge_trajectory,
    evolve,
    fit_parameters,
    grow,
    read_params,
    write_params,
)
from evolvim.graph import Graph, load_edge_list

from conftest import random_graph


def test_params_validation():
    with pytest.raises(ValueError):
        FfmParams(alpha=1.0)
    with pytest.raises(ValueError):
        FfmParams(alpha=0.5, gamma=2.0)
    with pytest.raises(ValueError):
        FfmParams(arrivals=-1)
    with pytest.raises(ValueError):
        FfmParams(distribution="poisson")
    with pytest.raises(ValueError):
        FfmParams(alpha=0.95, distribution="binomial", cap=5)


def test_burn_means():
    f = FfmParams(0.35, 0.32)
    assert f.forward_mean == pytest.approx(0.35 / 0.65)
    assert f.backward_mean == pytest.approx(0.112 / 0.888)


def test_presets():
    assert FfmParams.preset("hep").alpha == 0.19
    assert FfmParams.preset("patents", arrivals=3).gamma == 0.76
    assert PRESETS["synthetic"] == (0.35, 0.32)


def test_zero_arrivals_is_identity():
    g = random_graph(np.random.default_rng(0), 10, 20)
    ev = evolve(g, FfmParams(arrivals=0), 1)
    assert ev.graph is g
    assert ev.arrivals == 0


def test_alpha_zero_is_tree():
    ev = evolve(Graph.empty(1), FfmParams(alpha=0.0, gamma=3.0, arrivals=5), 4)
    assert (ev.graph.n, ev.graph.m) == (6, 5)


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        evolve(Graph.empty(0), FfmParams(arrivals=2), 0)


def test_deterministic():
    g = grow(50, FfmParams(), 3)
    a = evolve(g, FfmParams(arrivals=40), rngs.derive(9))
    b = evolve(g, FfmParams(arrivals=40), rngs.derive(9))
    assert a.graph.edges() == b.graph.edges()
    c = evolve(g, FfmParams(arrivals=40), rngs.derive(10))
    assert a.graph.edges() != c.graph.edges()


def _per_arrival(ev):
    added = defaultdict(list)
    for u, v in zip(ev.new_src.tolist(), ev.new_dst.tolist()):
        added[max(u, v)].append((u, v))
    return added


@settings(max_examples=25, deadline=None)
@given(
    st.integers(0, 10_000),
    st.sampled_from(["geometric", "binomial"]),
    st.booleans(),
    st.floats(0.0, 0.6),
    st.floats(0.0, 1.2),
)
def test_growth_invariants(seed, dist, backward, alpha, gamma):
    g0 = random_graph(np.random.default_rng(seed), 12, 25)
    params = FfmParams(alpha, gamma, arrivals=30, distribution=dist, recurse_backward=backward)
    ev = evolve(g0, params, seed)
    g = ev.graph
    assert g.n == g0.n + 30
    assert g0.edge_set() <= g.edge_set()
    assert g.m == g0.m + len(ev.new_src)
    assert (g.out_degree()[g0.n:] >= 1).all()

    edges = set(g0.edge_set())
    for v in range(g0.n, g.n):
        adds = _per_arrival(ev)[v]
        partners = [w if u == v else u for u, w in adds]
        assert len(partners) == len(set(partners))  # each node burned once
        ambassador = adds[0][1]
        assert adds[0][0] == v and ambassador < v
        # nodes burning continues from: forward partners, plus backward ones if enabled
        burned = {w for u, w in adds if u == v} | ({u for u, w in adds if w == v} if backward else set())
        for u, w in adds[1:]:
            if u == v:
                # forward: w links into a burned node
                assert any((w, c) in edges for c in burned)
            else:
                # backward: a burned node points at u
                assert any((c, u) in edges for c in burned)
        edges |= set(adds)


def test_edge_trajectory_and_tree_exponent():
    ev = evolve(Graph.empty(1), FfmParams(alpha=0.0, arrivals=99), 0)
    nodes, edges = edge_trajectory(ev)
    assert nodes[0] == 1 and nodes[-1] == 100
    assert np.array_equal(edges, np.arange(100))
    ev2 = evolve(grow(20, FfmParams(), 1), FfmParams(arrivals=50), 2)
    nodes, edges = edge_trajectory(ev2)
    assert edges[-1] == ev2.graph.m
    assert (np.diff(edges) >= 1).all()


def test_densification_exponent_exact_power_law():
    v = np.array([10, 20, 40, 80, 160], dtype=float)
    a, b = densification_exponent(v, 3.0 * v**1.25)
    assert a == pytest.approx(1.25)
    assert b == pytest.approx(np.log(3.0))


def test_binomial_mode_burn_mean():
    # binomial trials with q = mean/cap keep the geometric mean per burned node
    g = grow(400, FfmParams(0.35, 0.32, distribution="binomial"), 1)
    h = grow(400, FfmParams(0.35, 0.32), 1)
    assert 0.7 < g.m / h.m < 1.4


def test_recurse_backward_adds_edges():
    base = dict(alpha=0.4, gamma=0.8)
    m_plain = np.mean([grow(300, FfmParams(**base), s).m for s in range(5)])
    m_back = np.mean([grow(300, FfmParams(**base, recurse_backward=True), s).m for s in range(5)])
    assert m_back > m_plain


def test_labels_extended():
    g = load_edge_list("a b\nb new2\n")
    ev = evolve(g, FfmParams(arrivals=2), 0)
    assert ev.graph.labels.labels == ["a", "b", "new2", "new3", "new4"]
    g2 = load_edge_list("a new2\n")
    ev2 = evolve(g2, FfmParams(arrivals=1), 0)
    assert ev2.graph.labels.labels[-1] == "_new2"


def test_fit_rejects_degenerate():
    g = grow(30, FfmParams(), 0)
    with pytest.raises(FitError):
        fit_parameters([g, g])
    with pytest.raises(FitError):
        fit_parameters([g])
    with pytest.raises(FitError):
        fit_parameters([g, grow(40, FfmParams(), 0)], grid=[])


def test_fit_single_point():
    snaps = generate_synthetic(50, FfmParams(), [0, 30], seed=1)
    got = fit_parameters(snaps, grid=[(0.2, 0.4)], repeats=1)
    assert (got.alpha, got.gamma, got.arrivals) == (0.2, 0.4, 30)


@pytest.mark.slow
def test_fit_recovers_alpha():
    fitted = []
    for s in range(10):
        snaps = generate_synthetic(300, FfmParams(0.3, 0.3), [0, 150, 300, 450], seed=s)
        fitted.append(fit_parameters(snaps, seed=s).alpha)
    assert abs(np.median(fitted) - 0.3) <= 0.1 + 1e-9


def test_params_round_trip():
    p = FfmParams(0.19, 0.75, arrivals=12, distribution="binomial")
    buf = io.StringIO()
    write_params(p, buf)
    buf.seek(0)
    assert read_params(buf) == FfmParams(0.19, 0.75, arrivals=12, distribution="binomial")
    assert read_params(io.StringIO("# only alpha\nalpha = 0.2\n")).alpha == 0.2
