"""Treegrams: dendrograms whose leaves appear at individual birth times.

A treegram is stored as its leaves, one birth time per leaf, and a sorted
sequence of merge events; ``blocks_at`` recovers the partition of the born
points at any scale.  ``build_treegram`` converts a sorted MST edge list into
merge events (Kruskal's sweep performs exactly the merges).  ``decorate``
adds elder-rule bookkeeping to every merge and ``elder_rule_barcode`` reads
off the persistence bars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import INF, Bar


@dataclass(frozen=True)
class MergeEvent:
    """Two blocks, named by a representative member each, merge at height."""

    height: float
    left: str
    right: str


class _Replay:
    """Union-find over leaf ids; each block is named by its first-listed leaf.

    Tracks the maximal birth time per block so merge heights can be checked.
    """

    def __init__(self, leaves: Sequence[str], births: Sequence[float]):
        self.parent = {x: x for x in leaves}
        self.max_birth = {x: b for x, b in zip(leaves, births)}
        self.pos = {x: p for p, x in enumerate(leaves)}
        self.rep = {x: x for x in leaves}

    def find(self, x: str) -> str:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def name_of(self, x: str) -> str:
        return self.rep[self.find(x)]

    def union(self, a: str, b: str) -> tuple[str, str]:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            raise ValueError("merge event joins a block with itself")
        self.parent[rb] = ra
        self.max_birth[ra] = max(self.max_birth[ra], self.max_birth[rb])
        if self.pos[self.rep[rb]] < self.pos[self.rep[ra]]:
            self.rep[ra] = self.rep[rb]
        return ra, rb


@dataclass(frozen=True)
class Treegram:
    leaves: tuple[str, ...]
    births: tuple[float, ...]
    merges: tuple[MergeEvent, ...]

    def __post_init__(self):
        n = len(self.leaves)
        if n == 0:
            raise ValueError("treegram needs at least one leaf")
        if len(set(self.leaves)) != n:
            raise ValueError("duplicate leaf ids")
        if len(self.births) != n:
            raise ValueError("one birth time per leaf")
        if any(not math.isfinite(b) for b in self.births):
            raise ValueError("birth times must be finite")
        if len(self.merges) != n - 1:
            raise ValueError(f"{n} leaves need exactly {n - 1} merge events")
        heights = [m.height for m in self.merges]
        if any(heights[t] > heights[t + 1] for t in range(len(heights) - 1)):
            raise ValueError("merge events must be sorted by height")
        uf = _Replay(self.leaves, self.births)
        for m in self.merges:
            if m.left not in uf.parent or m.right not in uf.parent:
                raise ValueError(f"merge references unknown leaf {m.left!r}/{m.right!r}")
            ra, rb = uf.union(m.left, m.right)
            if uf.max_birth[ra] > m.height:
                raise ValueError("a block merges before all its members are born")

    def birth_of(self, leaf: str) -> float:
        return self.births[self.leaves.index(leaf)]

    def blocks_at(self, eps: float) -> tuple[frozenset[str], ...]:
        """Partition of the points born by ``eps``, as frozensets of ids."""
        uf = _Replay(self.leaves, self.births)
        for m in self.merges:
            if m.height > eps:
                break
            uf.union(m.left, m.right)
        groups: dict[str, set[str]] = {}
        for x, b in zip(self.leaves, self.births):
            if b <= eps:
                groups.setdefault(uf.find(x), set()).add(x)
        return tuple(sorted((frozenset(g) for g in groups.values()), key=sorted))


@dataclass(frozen=True)
class DecoratedTreegram(Treegram):
    """Adds, per merge event, (conquered leaf, surviving eldest leaf)."""

    decorations: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if len(self.decorations) != len(self.merges):
            raise ValueError("one decoration per merge event")


def build_treegram(
    vertices: Sequence[str],
    sorted_edges: Iterable[tuple[float, str, str]],
    births: Mapping[str, float] | None = None,
) -> Treegram:
    """Treegram of a spanning tree: sorted edges become the merge events.

    ``sorted_edges`` must be ascending in height (ties resolved by the given
    order); unsorted input is rejected rather than silently re-sorted.
    """
    leaves = tuple(vertices)
    if births is None:
        birth_list = tuple(0.0 for _ in leaves)
    else:
        birth_list = tuple(float(births[x]) for x in leaves)
    uf = _Replay(leaves, birth_list)
    events = []
    last = -INF
    for h, a, b in sorted_edges:
        if h < last:
            raise ValueError("edges must be sorted by height")
        last = h
        if a not in uf.parent or b not in uf.parent:
            raise ValueError(f"edge endpoint {a!r}/{b!r} is not a vertex")
        events.append(MergeEvent(float(h), uf.name_of(a), uf.name_of(b)))
        uf.union(a, b)
    return Treegram(leaves, birth_list, tuple(events))


def _positions(order: Sequence[str], leaves: Sequence[str]) -> dict[str, int]:
    pos = {x: p for p, x in enumerate(order)}
    missing = [x for x in leaves if x not in pos]
    if missing:
        raise ValueError(f"order is missing leaves: {missing}")
    return pos


def decorate(t: Treegram, order: Sequence[str]) -> DecoratedTreegram:
    """Record, at each merge, which block's eldest loses to the other's.

    ``order`` ranks the leaves from oldest to youngest; the eldest of a block
    is its minimal-position member.  The younger of the two block eldests is
    conquered at the merge height, the older one survives.
    """
    pos = _positions(order, t.leaves)
    eldest = {x: x for x in t.leaves}
    uf = _Replay(t.leaves, t.births)
    decorations = []
    for m in t.merges:
        ra, rb = uf.find(m.left), uf.find(m.right)
        ea, eb = eldest[ra], eldest[rb]
        if pos[ea] > pos[eb]:
            ea, eb = eb, ea
        decorations.append((eb, ea))  # (conquered, survivor)
        root, _ = uf.union(m.left, m.right)
        eldest[root] = ea
    return DecoratedTreegram(t.leaves, t.births, t.merges, tuple(decorations))


def elder_rule_barcode(t: Treegram, order: Sequence[str]) -> list[Bar]:
    """One bar per leaf: birth to the height where its block loses seniority.

    Requires ``order`` to be compatible with the birth times (an earlier-born
    leaf never ranks younger).  Bars of zero length are dropped; the oldest
    leaf of the final block lives forever.
    """
    pos = _positions(order, t.leaves)
    by_pos = sorted(t.leaves, key=lambda x: pos[x])
    births = dict(zip(t.leaves, t.births))
    for prev, nxt in zip(by_pos, by_pos[1:]):
        if births[prev] > births[nxt]:
            raise ValueError("order must be compatible with birth times")
    decorated = t if isinstance(t, DecoratedTreegram) else decorate(t, order)
    bars = []
    for m, (conquered, _) in zip(decorated.merges, decorated.decorations):
        if m.height > births[conquered]:
            bars.append(Bar(conquered, births[conquered], m.height))
    survivor = min(t.leaves, key=lambda x: pos[x])
    bars.append(Bar(survivor, births[survivor], INF))
    bars.sort(key=lambda b: (b.birth_t, b.owner))
    return bars
