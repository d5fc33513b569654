import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evolvim.graph import (
    EdgeListError,
    Graph,
    LabelTable,
    isolated_labels,
    load_edge_list,
    snapshot_at,
    write_edge_list,
)

from conftest import star

edge_lists = st.lists(
    st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=0, max_size=40
)


def test_load_simple():
    g = load_edge_list("1 2\n2 3")
    assert (g.n, g.m) == (3, 2)
    assert g.edge_set() == {(0, 1), (1, 2)}
    assert [g.label(v) for v in range(3)] == ["1", "2", "3"]


def test_load_bytes_stream():
    g = load_edge_list(io.BytesIO(b"x y\ny z\n"))
    assert (g.n, g.m) == (3, 2)


def test_duplicates_collapsed_and_counted():
    g = load_edge_list("1 2\n1 2\n2 1")
    assert g.m == 2
    assert g.duplicates == 1


def test_self_loops_dropped():
    g = load_edge_list("a a\na b\n")
    assert g.m == 1
    assert g.self_loops == 1
    assert g.n == 2


def test_comments_and_blank_lines_skipped():
    g = load_edge_list("# header\n\n1 2\n   \n# 3 4\n2 3\n")
    assert (g.n, g.m) == (3, 2)


def test_third_column_ignored_when_static():
    g = load_edge_list("a b 7\nb c 1\n")
    assert g.m == 2


def test_malformed_line_names_line():
    with pytest.raises(EdgeListError) as err:
        load_edge_list("1 2\n# c\n3\n")
    assert err.value.lineno == 3
    assert "line 3" in str(err.value)


def test_timestamped_needs_third_field():
    with pytest.raises(EdgeListError) as err:
        load_edge_list("a b 5\nb c\n", timestamped=True)
    assert err.value.lineno == 2


@pytest.mark.parametrize("bad", ["a b x", "a b -1", "a b 1.5"])
def test_bad_timestamps(bad):
    with pytest.raises(EdgeListError):
        load_edge_list(bad, timestamped=True)


def test_temporal_events():
    tg = load_edge_list("a b 5\nb c 10", timestamped=True)
    assert len(tg) == 2
    assert tg.events() == [("a", "b", 5), ("b", "c", 10)]


def test_temporal_sorted_with_stable_ties():
    tg = load_edge_list("c d 9\na b 5\nx y 5\n", timestamped=True)
    assert tg.events() == [("a", "b", 5), ("x", "y", 5), ("c", "d", 9)]


def test_snapshot_filter():
    tg = load_edge_list("a b 5\nb c 10", timestamped=True)
    s7 = snapshot_at(tg, 7)
    assert s7.n == 2
    assert {(s7.label(u), s7.label(v)) for u, v in s7.edges()} == {("a", "b")}
    s10 = snapshot_at(tg, 10)
    assert {(s10.label(u), s10.label(v)) for u, v in s10.edges()} == {("a", "b"), ("b", "c")}
    s0 = snapshot_at(tg, 0)
    assert (s0.n, s0.m) == (0, 0)


def test_snapshot_ids_are_prefix():
    tg = load_edge_list("a b 1\nc a 2\nd c 3\n", timestamped=True)
    s2, s3 = snapshot_at(tg, 2), snapshot_at(tg, 3)
    for v in range(s2.n):
        assert s2.label(v) == s3.label(v)


def test_star_adjacency():
    g = star(5)
    assert len(g.out_neighbors(0)) == 5
    assert g.in_neighbors(1) == [0]
    assert g.out_neighbors(1) == []


def test_isolated_node_lists():
    g = load_edge_list("a b\n", nodes=["z"])
    z = g.node_of("z")
    assert g.out_neighbors(z) == [] and g.in_neighbors(z) == []
    assert isolated_labels(g) == ["z"]


def test_neighbor_order_ascending():
    g = Graph.from_edges(4, [0, 0, 0, 3, 1], [3, 1, 2, 2, 2])
    assert g.out_neighbors(0) == [1, 2, 3]
    assert g.in_neighbors(2) == [0, 1, 3]


@pytest.mark.parametrize("v", [-1, 3])
def test_neighbors_out_of_range(v):
    g = Graph.from_edges(3, [0], [1])
    with pytest.raises(IndexError):
        g.out_neighbors(v)
    with pytest.raises(IndexError):
        g.in_neighbors(v)


def test_from_edges_validation():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [0], [2])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [0, 1], [1])
    with pytest.raises(ValueError):
        Graph.from_edges(2, [0], [1], LabelTable(["a"]))


def test_reverse_flag():
    g = load_edge_list("a b\nb c\n", reverse=True)
    assert {(g.label(u), g.label(v)) for u, v in g.edges()} == {("b", "a"), ("c", "b")}


def test_node_of():
    g = load_edge_list("a b\n")
    assert g.node_of("b") == 1
    assert g.node_of("q") is None
    plain = Graph.from_edges(3, [0], [1])
    assert plain.node_of("2") == 2
    assert plain.node_of("3") is None
    assert plain.node_of("x") is None


def test_label_table_bijective():
    t = LabelTable(["a", "b", "a"])
    assert len(t) == 2
    assert t.id_of("b") == 1 and t.label_of(1) == "b"
    assert "a" in t and "c" not in t
    assert t.prefix(1).labels == ["a"]


@given(edge_lists)
def test_degree_bookkeeping(edges):
    g = Graph.from_edges(10, [u for u, _ in edges], [v for _, v in edges])
    assert g.out_degree().sum() == g.in_degree().sum() == g.m
    assert g.m == len({(u, v) for u, v in edges if u != v})
    for v in range(10):
        for w in g.out_neighbors(v):
            assert v in g.in_neighbors(w)


@given(edge_lists)
def test_round_trip(edges):
    text = "".join(f"n{u} n{v}\n" for u, v in edges)
    g = load_edge_list(text)
    buf = io.StringIO()
    write_edge_list(g, buf, header="round trip")
    h = load_edge_list(buf.getvalue(), nodes=isolated_labels(g))
    as_labels = lambda gr: {(gr.label(u), gr.label(v)) for u, v in gr.edges()}
    assert as_labels(g) == as_labels(h)
    assert g.n == h.n


@settings(max_examples=50)
@given(
    st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 20)), max_size=30),
    st.integers(0, 20),
    st.integers(0, 20),
)
def test_snapshot_monotone(events, c1, c2):
    text = "".join(f"{u} {v} {t}\n" for u, v, t in events)
    tg = load_edge_list(text, timestamped=True)
    lo, hi = sorted((c1, c2))
    a, b = snapshot_at(tg, lo), snapshot_at(tg, hi)
    assert a.n <= b.n
    assert a.edge_set() <= b.edge_set()
    expected = {(u, v) for u, v, t in events if t <= hi and u != v}
    assert {(b.label(u), b.label(v)) for u, v in b.edges()} == {(str(u), str(v)) for u, v in expected}


def test_reversed_preserves_labels():
    g = load_edge_list("a b\n")
    r = g.reversed()
    assert r.edges() == [(1, 0)]
    assert r.label(0) == "a"
    assert np.array_equal(r.out_degree(), g.in_degree())
