"""Directed graph snapshots, temporal edge streams and edge-list ingestion.

Node ids are dense integers ``0..n-1``. A :class:`LabelTable` maps them back to
the labels found in the input file. Edges are stored in compressed sparse row
form twice (by source and by destination) so both forward cascades and reverse
reachability can walk adjacency without copying.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "EdgeListError",
    "Graph",
    "LabelTable",
    "TemporalGraph",
    "load_edge_list",
    "snapshot_at",
    "write_edge_list",
]

NODE_DTYPE = np.int32
PTR_DTYPE = np.int64


class EdgeListError(ValueError):
    """Raised for malformed edge-list input. ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class LabelTable:
    """Bijective map between external labels and dense node ids."""

    def __init__(self, labels: Iterable[str] = ()):
        self._labels: list[str] = []
        self._ids: dict[str, int] = {}
        for label in labels:
            self.add(label)

    def add(self, label: str) -> int:
        node = self._ids.get(label)
        if node is None:
            node = len(self._labels)
            self._ids[label] = node
            self._labels.append(label)
        return node

    def id_of(self, label: str) -> int | None:
        return self._ids.get(label)

    def label_of(self, node: int) -> str:
        return self._labels[node]

    def prefix(self, n: int) -> "LabelTable":
        return LabelTable(self._labels[:n])

    @property
    def labels(self) -> list[str]:
        return list(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelTable) and self._labels == other._labels

    def __repr__(self) -> str:
        return f"LabelTable(n={len(self)})"


def _csr(keys: np.ndarray, values: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # keys must already be sorted ascending
    ptr = np.zeros(n + 1, dtype=PTR_DTYPE)
    if len(keys):
        np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return ptr, np.ascontiguousarray(values, dtype=NODE_DTYPE)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph without self-loops or parallel edges.

    Edge ``e`` is ``(src[e], dst[e])``; edges are ordered by ``(src, dst)`` so
    the out-adjacency of ``u`` is ``dst[out_ptr[u]:out_ptr[u + 1]]`` and edge
    ids coincide with positions in that array. Use :meth:`from_edges` rather
    than the constructor.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    out_ptr: np.ndarray
    in_ptr: np.ndarray
    in_idx: np.ndarray
    labels: LabelTable | None = None
    duplicates: int = 0
    self_loops: int = 0
    _edge_set: frozenset | None = field(default=None, repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        src: Sequence[int] | np.ndarray,
        dst: Sequence[int] | np.ndarray,
        labels: LabelTable | None = None,
    ) -> "Graph":
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have equal length")
        if n < 0:
            raise ValueError("n must be non-negative")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint out of range")
        if labels is not None and len(labels) != n:
            raise ValueError(f"label table has {len(labels)} entries for {n} nodes")

        loops = src == dst
        self_loops = int(loops.sum())
        src, dst = src[~loops], dst[~loops]
        key = np.unique(src * max(n, 1) + dst)
        duplicates = len(src) - len(key)
        src = (key // max(n, 1)).astype(NODE_DTYPE)
        dst = (key % max(n, 1)).astype(NODE_DTYPE)

        out_ptr, dst = _csr(src, dst, n)
        order = np.lexsort((src, dst))
        in_ptr, in_idx = _csr(dst[order], src[order], n)
        return cls(
            n=int(n),
            src=src,
            dst=dst,
            out_ptr=out_ptr,
            in_ptr=in_ptr,
            in_idx=in_idx,
            labels=labels,
            duplicates=duplicates,
            self_loops=self_loops,
        )

    @classmethod
    def empty(cls, n: int = 0) -> "Graph":
        return cls.from_edges(n, [], [])

    @property
    def m(self) -> int:
        return len(self.src)

    @property
    def out_idx(self) -> np.ndarray:
        return self.dst

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range for graph with {self.n} nodes")

    def out_neighbors(self, v: int) -> list[int]:
        self._check(v)
        return self.dst[self.out_ptr[v] : self.out_ptr[v + 1]].tolist()

    def in_neighbors(self, v: int) -> list[int]:
        self._check(v)
        return self.in_idx[self.in_ptr[v] : self.in_ptr[v + 1]].tolist()

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def edge_set(self) -> frozenset:
        if self._edge_set is None:
            object.__setattr__(self, "_edge_set", frozenset(self.edges()))
        return self._edge_set

    def has_edge(self, u: int, v: int) -> bool:
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        i = lo + np.searchsorted(self.dst[lo:hi], v)
        return bool(i < hi and self.dst[i] == v)

    def reversed(self) -> "Graph":
        return Graph.from_edges(self.n, self.dst, self.src, self.labels)

    def label(self, v: int) -> str:
        return self.labels.label_of(v) if self.labels is not None else str(v)

    def node_of(self, label: str) -> int | None:
        """Id for an external label, or ``None`` when absent."""
        if self.labels is not None:
            return self.labels.id_of(label)
        try:
            v = int(label)
        except ValueError:
            return None
        return v if 0 <= v < self.n else None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class TemporalGraph:
    """Timestamped edge stream.

    Events are sorted by timestamp (stable, so ties keep input order) and node
    ids are assigned by first appearance in that order. Every snapshot is
    therefore a prefix ``0..n_cut-1`` of the id space, and ids agree across
    snapshots of the same stream.
    """

    src: np.ndarray
    dst: np.ndarray
    time: np.ndarray
    labels: LabelTable

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.time)

    def events(self) -> list[tuple[str, str, int]]:
        lab = self.labels.label_of
        return [
            (lab(s), lab(d), t)
            for s, d, t in zip(self.src.tolist(), self.dst.tolist(), self.time.tolist())
        ]


def _parse_lines(stream: IO, timestamped: bool) -> list[tuple[int, str, str, int | None]]:
    rows = []
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if timestamped:
            if len(parts) != 3:
                raise EdgeListError(f"expected 'src dst timestamp', got {line!r}", lineno)
            try:
                ts = int(parts[2])
            except ValueError:
                raise EdgeListError(f"timestamp is not an integer: {parts[2]!r}", lineno) from None
            if ts < 0:
                raise EdgeListError(f"negative timestamp {ts}", lineno)
            rows.append((lineno, parts[0], parts[1], ts))
        else:
            if len(parts) not in (2, 3):
                raise EdgeListError(f"expected 'src dst', got {line!r}", lineno)
            rows.append((lineno, parts[0], parts[1], None))
    return rows


def load_edge_list(
    source: IO | str | bytes,
    timestamped: bool = False,
    *,
    nodes: Iterable[str] | None = None,
    reverse: bool = False,
) -> Graph | TemporalGraph:
    """Read whitespace-separated ``src dst [timestamp]`` lines.

    ``source`` is a text or byte stream, or the literal file contents. Lines
    starting with ``#`` are skipped. Without ``timestamped`` a trailing third
    column is ignored. ``nodes`` adds labels that may have no edges (only for
    static graphs). ``reverse`` swaps every edge's direction.
    """
    if isinstance(source, (str, bytes)):
        source = io.StringIO(source.decode("utf-8") if isinstance(source, bytes) else source)
    rows = _parse_lines(source, timestamped)

    labels = LabelTable()
    if timestamped:
        if nodes is not None:
            raise ValueError("isolated nodes are not supported for temporal graphs")
        rows.sort(key=lambda r: r[3])
    src = np.empty(len(rows), dtype=np.int64)
    dst = np.empty(len(rows), dtype=np.int64)
    for i, (_, a, b, _) in enumerate(rows):
        if reverse:
            a, b = b, a
        src[i] = labels.add(a)
        dst[i] = labels.add(b)

    if timestamped:
        ts = np.array([r[3] for r in rows], dtype=np.int64)
        return TemporalGraph(src=src.astype(NODE_DTYPE), dst=dst.astype(NODE_DTYPE), time=ts, labels=labels)

    for label in nodes or ():
        labels.add(label)
    return Graph.from_edges(len(labels), src, dst, labels)


def snapshot_at(tg: TemporalGraph, cut: int) -> Graph:
    """All edges with timestamp <= ``cut`` and their endpoints."""
    k = int(np.searchsorted(tg.time, cut, side="right"))
    if k == 0:
        return Graph.from_edges(0, [], [], LabelTable())
    n = int(max(tg.src[:k].max(), tg.dst[:k].max())) + 1
    return Graph.from_edges(n, tg.src[:k], tg.dst[:k], tg.labels.prefix(n))


def write_edge_list(g: Graph, stream: IO[str], *, header: str | None = None) -> None:
    """Write ``g`` as ``src dst`` label pairs, one edge per line."""
    if header:
        for line in header.splitlines():
            stream.write(f"# {line}\n")
    label = g.label
    for u, v in zip(g.src.tolist(), g.dst.tolist()):
        stream.write(f"{label(u)} {label(v)}\n")


def isolated_labels(g: Graph) -> list[str]:
    """Labels of nodes with no incident edge; an edge list alone loses them."""
    deg = g.out_degree() + g.in_degree()
    return [g.label(v) for v in np.flatnonzero(deg == 0).tolist()]
