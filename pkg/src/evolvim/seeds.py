"""Ranked seed sets and their on-disk record."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Any, Sequence

from evolvim.graph import Graph


@dataclass(frozen=True)
class RankedSeedSet:
    """Seeds in selection order; the node at position ``j`` has rank ``j + 1``.

    ``scores`` holds whatever the producing algorithm ranked by (summed
    marginal gain, RR coverage, degree, aggregate score). ``padded`` marks
    results filled with zero-gain nodes because too few useful ones existed.
    """

    nodes: tuple[int, ...]
    scores: tuple[float, ...] = ()
    padded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(v) for v in self.nodes))
        object.__setattr__(self, "scores", tuple(self.scores))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("seed ids must be distinct")
        if self.scores and len(self.scores) != len(self.nodes):
            raise ValueError("scores must align with nodes")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    @property
    def entries(self) -> list[tuple[int, int]]:
        return [(v, j + 1) for j, v in enumerate(self.nodes)]

    def rank_of(self, v: int) -> int | None:
        try:
            return self.nodes.index(v) + 1
        except ValueError:
            return None

    def top(self, k: int) -> "RankedSeedSet":
        return RankedSeedSet(self.nodes[:k], self.scores[:k], self.padded)


@dataclass
class SeedRecord:
    """Serializable seed selection: algorithm, config echo, master seed, seeds."""

    algorithm: str
    seeds: RankedSeedSet
    master_seed: int
    config: dict[str, Any] = field(default_factory=dict)

    def to_json(self, g: Graph) -> dict[str, Any]:
        scores = self.seeds.scores or (None,) * len(self.seeds)
        return {
            "algorithm": self.algorithm,
            "master_seed": self.master_seed,
            "config": self.config,
            "padded": self.seeds.padded,
            "seeds": [
                {"label": g.label(v), "rank": rank, "score": score}
                for (v, rank), score in zip(self.seeds.entries, scores)
            ],
        }

    def dump(self, g: Graph, stream: IO[str]) -> None:
        json.dump(self.to_json(g), stream, indent=2, sort_keys=True)
        stream.write("\n")


def load_seed_labels(stream: IO[str]) -> tuple[str, list[str]]:
    """Algorithm name and seed labels in rank order from a seed record."""
    data = json.load(stream)
    entries = sorted(data["seeds"], key=lambda e: e["rank"])
    return data.get("algorithm", ""), [str(e["label"]) for e in entries]


def map_labels(g: Graph, labels: Sequence[str]) -> list[int | None]:
    """Ids of ``labels`` in ``g``; ``None`` for labels the graph lacks."""
    return [g.node_of(label) for label in labels]
