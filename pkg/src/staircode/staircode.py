"""Main pipeline: insert points in filter order, maintain the MST of each
prefix, sweep its sorted edges as single-linkage merges, and record for every
point the scale at which it loses seniority — per prefix.  Reading those
records along each row assembles the decorated staircase of the point.

The per-prefix merge sweep *is* the treegram: accepted MST edges in sorted
order are exactly the merge events, and at each merge the younger of the two
block-eldests is conquered by the older one.  The sweep therefore fills, for
point at order-position q and prefix ending at position p:

  env_real[q, p] — conquest scale (distance value; +inf only for q = 0),
  env_rank[q, p] — conquest scale as a 1-based pair rank (0 encodes +inf),
  conq[q, p]     — order-position of the conqueror (-1 for q = 0).

Column p corresponds to sigma-rank p+1.  Real-coordinate staircases sample
columns at the last position of each distinct f value (the sublevel set only
changes there); rank-coordinate envelopes keep every column so downstream
Betti accounting stays generic under ties.
"""

from __future__ import annotations

import numpy as np

from .core import (
    INF,
    AugmentedMetricSpace,
    DecoratedStaircase,
    GenericOrdering,
    Staircase,
    Staircode,
)
from .mst import _bottleneck_update, merge_sorted
from .treegram import Treegram, build_treegram


def _resolve_mode(X: AugmentedMetricSpace, mode: str | None) -> str:
    if mode is None:
        return "euclidean" if X.coords is not None else "generic"
    if mode not in ("generic", "euclidean"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "euclidean" and X.coords is None:
        raise ValueError("euclidean mode requires coords")
    return mode


def _weights_to(X: AugmentedMetricSpace, existing: np.ndarray, z: int) -> np.ndarray:
    """Distances from point z to ``existing`` (input indices), via lookups.

    Both modes read the stored condensed distances, so envelope values are
    bit-identical to the oracle's regardless of how coords were rounded.
    """
    lo = np.minimum(existing, z)
    hi = np.maximum(existing, z)
    return X.dist[hi * (hi - 1) // 2 + lo]


def _insert_generic(edges, z, existing_ids, weights):
    """One Kruskal insertion: previous edges + sorted star edges, re-sorted."""
    lo = np.minimum(existing_ids, z)
    hi = np.maximum(existing_ids, z)
    srt = np.lexsort((hi, lo, weights))
    stars = list(zip(weights[srt].tolist(), lo[srt].tolist(), hi[srt].tolist()))
    cand = edges + stars
    cand.sort()
    parent = {int(v): int(v) for v in existing_ids}
    parent[z] = z
    accepted = []
    need = len(existing_ids)
    for e in cand:
        a = e[1]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = e[2]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            parent[b] = a
            accepted.append(e)
            if len(accepted) == need:
                break
    return accepted


def _sweep_column(edges, p, pos, env_real, env_rank, conq):
    """Replay the prefix MST edges as merges; record conquests in column p."""
    parent = list(range(p + 1))
    eldest = list(range(p + 1))
    for w, a, b in edges:
        x = pos[a]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = pos[b]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        ea, eb = eldest[x], eldest[y]
        if ea < eb:
            victor, loser = ea, eb
        else:
            victor, loser = eb, ea
        env_real[loser, p] = w
        env_rank[loser, p] = b * (b - 1) // 2 + a + 1  # 1-shifted condensed index
        conq[loser, p] = victor
        parent[y] = x
        eldest[x] = victor


class _Pipeline:
    """Shared incremental state: sorted MST edge list over a growing prefix."""

    def __init__(self, X: AugmentedMetricSpace, ordering: GenericOrdering, mode: str):
        self.X = X
        self.ordering = ordering
        self.mode = mode
        self.edges: list[tuple[float, int, int]] = []

    def insert(self, p: int) -> None:
        """Insert the point at order-position p (p >= 1) into the MST."""
        order_idx = self.ordering.point_order
        z = order_idx[p]
        existing = np.asarray(order_idx[:p], dtype=np.int64)
        weights = _weights_to(self.X, existing, z)
        if self.mode == "euclidean":
            surviving, entering = _bottleneck_update(
                tuple(order_idx[:p]), self.edges, z, weights.tolist()
            )
            self.edges = merge_sorted(surviving, entering)
        else:
            self.edges = _insert_generic(self.edges, z, existing, weights)


def _compute(X: AugmentedMetricSpace, ordering: GenericOrdering, mode: str | None) -> Staircode:
    mode = _resolve_mode(X, mode)
    n = X.n
    order_idx = ordering.point_order
    pos = list(ordering._pos)
    env_real = np.full((n, n), INF, dtype=float)
    env_rank = np.zeros((n, n), dtype=np.int64)  # 1-shifted pair index, 0 = never
    conq = np.full((n, n), -1, dtype=np.int64)

    pipeline = _Pipeline(X, ordering, mode)
    for p in range(n):
        if p:
            pipeline.insert(p)
        _sweep_column(pipeline.edges, p, pos, env_real, env_rank, conq)

    # translate 1-shifted condensed pair indices into 1-based pair ranks
    # (0 cells mean "never conquered" and stay the +inf sentinel)
    conquered = conq >= 0
    if conquered.any():
        pr = np.asarray(ordering._pair_rank, dtype=np.int64)
        env_rank[conquered] = pr[env_rank[conquered] - 1]

    ids = X.ids
    levels = ordering.f_levels
    entries = []
    rank_steps_all = []
    for q in range(n):
        row_rank = env_rank[q].tolist()
        row_real = env_real[q].tolist()
        row_conq = conq[q].tolist()

        rsteps: list[tuple[int, float]] = []
        for pp in range(q, n):
            v = row_rank[pp]
            uv = INF if v == 0 else v
            if not rsteps or rsteps[-1][1] != uv:
                rsteps.append((pp + 1, uv))
        rank_steps_all.append(tuple(rsteps))

        birth_level_idx = next(t for t, (lv, end) in enumerate(levels) if end >= q)
        owner = ids[order_idx[q]]
        real_steps: list[tuple[float, float]] = []
        runs: list[tuple[float, str]] = []
        for lv, end in levels[birth_level_idx:]:
            u = row_real[end]
            if not real_steps or real_steps[-1][1] != u:
                real_steps.append((lv, u))
            cpos = row_conq[end]
            cid = owner if cpos < 0 else ids[order_idx[cpos]]
            if not runs or runs[-1][1] != cid:
                runs.append((lv, cid))
        base = Staircase(owner, real_steps[0][0], tuple(real_steps))
        entries.append(DecoratedStaircase(base, tuple(runs)))

    order_ids = tuple(ids[i] for i in order_idx)
    meta = {
        "n": n,
        "mode": mode,
        "tie_breaks": {"f": ordering.has_f_ties, "d": ordering.has_d_ties},
    }
    return Staircode(entries, order_ids, ordering, meta, tuple(rank_steps_all))


def compute_staircode(X: AugmentedMetricSpace, mode: str | None = None) -> Staircode:
    """Decorated elder-rule staircode under the default (f, input index) order.

    ``mode`` selects the MST update strategy: "euclidean" (coords required;
    sorted edge list maintained by merging the few entering star edges) or
    "generic" (re-sort per insertion).  Defaults to euclidean iff coords are
    present.  Both modes produce the identical staircode.
    """
    return _compute(X, GenericOrdering(X), mode)


def compute_staircode_ordered(
    X: AugmentedMetricSpace, point_order, mode: str | None = None
) -> Staircode:
    """Staircode under an explicit f-compatible point order.

    ``point_order`` is a permutation of the points — input indices or ids.
    Orders that are not compatible with f are rejected.  Different compatible
    orders may change individual staircases but never the fibered barcodes.
    """
    order = [X.index_of(x) if isinstance(x, str) else int(x) for x in point_order]
    return _compute(X, GenericOrdering(X, order), mode)


def prefix_treegram(
    X: AugmentedMetricSpace, k: int, order=None, mode: str | None = None
) -> Treegram:
    """Single-linkage treegram of the first k points in filter order.

    This is the eps-column of the bipersistence treegram at the k-th filter
    level: every prefix point is present from eps=0 (so all leaves are born
    at height 0) and merge events come from the prefix MST edges in sorted
    order.  Exposed for cross-checking the pipeline against the treegram
    module and the oracle.
    """
    ordering = order if isinstance(order, GenericOrdering) else GenericOrdering(X, order)
    if not 1 <= k <= X.n:
        raise ValueError("prefix size out of range")
    mode = _resolve_mode(X, mode)
    pipeline = _Pipeline(X, ordering, mode)
    for p in range(1, k):
        pipeline.insert(p)
    prefix_ids = [X.ids[i] for i in ordering.point_order[:k]]
    edges = [(w, X.ids[a], X.ids[b]) for w, a, b in pipeline.edges]
    return build_treegram(prefix_ids, edges)
