import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evolvim.cascade import exact_spread
from evolvim.evolution import FfmParams, grow
from evolvim.graph import Graph
from evolvim.rrset import (
    RRCollection,
    RRSet,
    ThetaConfig,
    compute_theta,
    generate_rr_set,
    max_coverage_select,
    rr_collection,
    rr_collection_static,
)

# ceil((8 + 2*0.1) * 100 * (ln 100 + ln C(100, 1) + ln 2) / 0.01), evaluated independently
THETA_100_1 = 812086


def test_rr_chain_full():
    g = Graph.from_edges(3, [0, 1], [1, 2])
    s = generate_rr_set(g, 2, 1.0, 0)
    assert s.target == 2
    assert s.members == {0, 1, 2}


def test_rr_no_in_edges():
    g = Graph.from_edges(3, [0, 1], [1, 2])
    assert generate_rr_set(g, 0, 0.7, 0).members == {0}


def test_rr_bad_target():
    with pytest.raises(IndexError):
        generate_rr_set(Graph.empty(2), 2, 0.5, 0)


def test_rr_single_edge_frequency():
    # Bernoulli(0.3) over 200k draws: sd ~0.001
    g = Graph.from_edges(2, [0], [1])
    rng = np.random.default_rng(12)
    hits = sum(0 in generate_rr_set(g, 1, 0.3, rng) for _ in range(200_000))
    assert hits / 200_000 == pytest.approx(0.3, abs=0.005)


def test_theta_closed_form():
    eps = 0.1
    oracle = math.ceil((8 + 2 * eps) * 100 * (math.log(100) + math.log(math.comb(100, 1)) + math.log(2)) / eps**2)
    assert oracle == THETA_100_1
    assert compute_theta(100, 1) == THETA_100_1


def test_theta_override_and_monotone():
    assert compute_theta(100, 5, ThetaConfig(theta_override=1000)) == 1000
    assert compute_theta(200, 1) > compute_theta(100, 1)
    with pytest.raises(ValueError):
        compute_theta(3, 5)
    with pytest.raises(ValueError):
        ThetaConfig(epsilon=0)
    with pytest.raises(ValueError):
        ThetaConfig(ell=0.5)
    with pytest.raises(ValueError):
        ThetaConfig(theta_override=0)


def _sets(*groups):
    return [RRSet(min(gr), frozenset(gr)) for gr in groups]


def test_max_coverage_examples():
    a, b, c, d = 0, 1, 2, 3
    sets = _sets({a, b}, {a, c}, {d})
    assert max_coverage_select(sets, 1).nodes == (a,)
    two = max_coverage_select(sets, 2)
    assert two.nodes == (a, d)
    assert two.scores == (2, 1)
    assert not two.padded


def test_max_coverage_padding():
    sets = _sets({0, 1}, {0})
    res = max_coverage_select(sets, 3, candidates=range(5))
    assert res.nodes == (0, 1, 2)
    assert res.padded


def test_max_coverage_candidate_filter():
    sets = _sets({0, 5}, {5}, {5, 1})
    assert max_coverage_select(sets, 1).nodes == (5,)
    assert max_coverage_select(sets, 1, candidates=[0, 1, 2]).nodes == (0,)
    with pytest.raises(ValueError):
        max_coverage_select(sets, 4, candidates=[0, 1, 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_max_coverage_approximation(seed, k):
    rng = np.random.default_rng(seed)
    n = 7
    sets = [RRSet(0, frozenset(rng.choice(n, size=rng.integers(1, 4), replace=False).tolist())) for _ in range(12)]
    coll = RRCollection.from_sets(sets, n)
    greedy = coll.hits(max_coverage_select(coll, k, range(n)).nodes)
    best = max(coll.hits(c) for c in itertools.combinations(range(n), k))
    assert greedy >= (1 - 1 / math.e) * best
    # scores are the marginal coverages and add up to the total
    res = max_coverage_select(coll, k, range(n))
    assert sum(res.scores) == greedy
    assert list(res.scores) == sorted(res.scores, reverse=True)


def test_collection_roundtrip_and_hits():
    sets = _sets({0, 1}, {2}, {1, 3})
    coll = RRCollection.from_sets(sets, 4)
    assert len(coll) == 3
    assert [s.members for s in coll] == [s.members for s in sets]
    assert coll.hits([1]) == 2
    assert coll.hits([]) == 0
    assert coll.estimate([1, 2]) == pytest.approx(4.0)


def test_static_equals_evolved_without_arrivals():
    g = grow(120, FfmParams(), 2)
    a = rr_collection_static(g, 0.2, 700, 4)
    b = rr_collection(g, FfmParams(arrivals=0), 0.2, 700, 4)
    assert np.array_equal(a.offsets, b.offsets)
    assert np.array_equal(a.members, b.members)
    assert np.array_equal(a.instance, b.instance)


def test_workers_do_not_change_collection():
    g = grow(80, FfmParams(), 5)
    ffm = FfmParams(arrivals=20)
    a = rr_collection(g, ffm, 0.3, 600, 1, workers=1)
    b = rr_collection(g, ffm, 0.3, 600, 1, workers=4)
    assert np.array_equal(a.members, b.members)


def test_evolved_sets_live_in_grown_graph():
    g = grow(60, FfmParams(), 5)
    ffm = FfmParams(arrivals=25)
    coll = rr_collection(g, ffm, 0.5, 300, 2, per_instance=3)
    assert len(coll) == 900
    assert coll.n_nodes == 85
    assert coll.members.max() < 85
    assert (coll.sizes() >= 1).all()
    assert np.array_equal(coll.instance[:6], [0, 0, 0, 1, 1, 1])
    # new nodes are sampled as targets too
    targets = coll.members[coll.offsets[:-1]]
    assert (targets >= 60).any()


def test_reverse_walks_out_edges():
    g = Graph.from_edges(3, [0, 1], [1, 2])
    fwd = rr_collection(g, FfmParams(), 1.0, 300, 0)
    rev = rr_collection(g, FfmParams(), 1.0, 300, 0, reverse=True)
    for s_f, s_r in zip(fwd, rev):
        assert s_f.members == set(range(s_f.target + 1))
        assert s_r.members == set(range(s_r.target, 3))


def test_rr_estimate_close_to_exact():
    g = Graph.from_edges(5, [0, 0, 1, 2, 3], [1, 2, 3, 3, 4])
    coll = rr_collection_static(g, 0.5, 200_000, 3)
    for seeds in ([0], [1, 2], [4]):
        assert coll.estimate(seeds) == pytest.approx(exact_spread(g, seeds, 0.5), rel=0.02)


def test_coverage_shrinks_monotonically():
    g = grow(200, FfmParams(), 8)
    coll = rr_collection_static(g, 0.3, 5000, 1)
    res = max_coverage_select(coll, 8)
    covered = [coll.hits(res.nodes[: i + 1]) for i in range(len(res))]
    assert covered == sorted(covered)
    assert np.array_equal(np.diff([0] + covered), res.scores)
