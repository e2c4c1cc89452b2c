"""Incremental minimum spanning trees of the growing complete graph.

Edge keys are (weight, i, j) tuples with i < j on input indices, so all
comparisons are strict and the MST is unique.  ``mst_insert`` re-sorts the
candidate list each insertion (two pre-sorted runs, so the sort is a linear
merge); ``mst_insert_euclidean`` finds the few entering star edges in linear
time with a two-pass tree-bottleneck computation and merges them into the
previous sorted edge list without sorting it again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_INF_KEY = (math.inf, -1, -1)


def edge_key(w: float, a: int, b: int) -> tuple[float, int, int]:
    return (w, a, b) if a < b else (w, b, a)


def merge_sorted(a: list, b: list) -> list:
    """Merge two sorted edge lists into one sorted list (two-pointer)."""
    out: list = []
    ti = tj = 0
    while ti < len(a) and tj < len(b):
        if a[ti] < b[tj]:
            out.append(a[ti])
            ti += 1
        else:
            out.append(b[tj])
            tj += 1
    out.extend(a[ti:])
    out.extend(b[tj:])
    return out


@dataclass(frozen=True)
class Mst:
    """An MST snapshot: inserted vertices (input indices) and sorted edges."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[float, int, int], ...]

    def __post_init__(self):
        k = len(self.vertices)
        if len(set(self.vertices)) != k:
            raise ValueError("duplicate vertices")
        if len(self.edges) != max(0, k - 1):
            raise ValueError("spanning tree needs exactly |V|-1 edges")
        if any(self.edges[t] >= self.edges[t + 1] for t in range(len(self.edges) - 1)):
            raise ValueError("edges must be strictly sorted by (weight, pair)")
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for _, a, b in self.edges:
            if a not in parent or b not in parent:
                raise ValueError("edge endpoint is not a vertex")
            ra, rb = find(a), find(b)
            if ra == rb:
                raise ValueError("edges contain a cycle")
            parent[rb] = ra

    @property
    def total_weight(self) -> float:
        return sum(w for w, _, _ in self.edges)


def _star_edges(new_point: int, existing: Sequence[int], weights) -> list[tuple[float, int, int]]:
    star = [edge_key(float(w), new_point, u) for u, w in zip(existing, weights)]
    star.sort()
    return star


def mst_insert(T_prev: Mst, new_point: int, weights_to_existing) -> Mst:
    """Insert one vertex, generic metric: Kruskal over old edges + star edges.

    The candidate list is the concatenation of two sorted runs, so the sort
    below is a linear merge; the surviving edges come out sorted.
    """
    existing = T_prev.vertices
    if new_point in existing:
        raise ValueError("vertex already present")
    weights = list(weights_to_existing)
    if len(weights) != len(existing):
        raise ValueError(
            f"need {len(existing)} weights to existing vertices, got {len(weights)}"
        )
    if any(not math.isfinite(w) or w < 0 for w in weights):
        raise ValueError("weights must be finite and nonnegative")
    candidates = list(T_prev.edges) + _star_edges(new_point, existing, weights)
    candidates.sort()
    parent = {v: v for v in existing}
    parent[new_point] = new_point

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    accepted = []
    need = len(existing)  # new vertex count minus 1
    for e in candidates:
        ra, rb = find(e[1]), find(e[2])
        if ra != rb:
            parent[rb] = ra
            accepted.append(e)
            if len(accepted) == need:
                break
    return Mst(existing + (new_point,), tuple(accepted))


def _bottleneck_update(
    vertices: tuple[int, ...],
    edges: tuple[tuple[float, int, int], ...],
    new_point: int,
    weights,
) -> tuple[list[tuple[float, int, int]], list[tuple[float, int, int]]]:
    """Surviving tree edges and entering star edges, in O(|vertices|).

    Star key S(u) connects u to the new point.  With the tree rooted
    anywhere, one post-order pass computes B_sub(v) = cheapest bottleneck
    connection to the new point within v's subtree, one pre-order pass the
    complement B_up(v) (using a top-2 exclusion over children).  A tree edge
    (v, c) survives iff its key beats the cheapest connection on at least one
    of its two sides; a star edge (z, u) enters iff S(u) beats every
    alternative route from u.  Both rules are the cycle property of the
    unique max-key edge.
    """
    z = new_point
    skey = {u: edge_key(float(w), z, u) for u, w in zip(vertices, weights)}
    adj: dict[int, list[tuple[int, tuple[float, int, int]]]] = {v: [] for v in vertices}
    for e in edges:
        _, a, b = e
        adj[a].append((b, e))
        adj[b].append((a, e))

    root = vertices[0]
    parent_of: dict[int, int | None] = {root: None}
    topo = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for u, _ in adj[v]:
            if u != parent_of[v]:
                parent_of[u] = v
                topo.append(u)
                stack.append(u)

    children: dict[int, list[tuple[int, tuple[float, int, int]]]] = {v: [] for v in vertices}
    for v in topo[1:]:
        p = parent_of[v]
        key = next(e for u, e in adj[v] if u == p)
        children[p].append((v, key))

    b_sub: dict[int, tuple] = {}
    for v in reversed(topo):
        best = skey[v]
        for c, key in children[v]:
            cand = max(key, b_sub[c])
            if cand < best:
                best = cand
        b_sub[v] = best

    b_up: dict[int, tuple] = {root: _INF_KEY}
    kept: list[tuple[float, int, int]] = []
    entering: list[tuple[float, int, int]] = []
    for v in topo:
        kids = children[v]
        vals = [max(key, b_sub[c]) for c, key in kids]
        # two smallest child values, for exclusion
        m1 = m2 = _INF_KEY
        arg1 = -1
        for t, val in enumerate(vals):
            if val < m1:
                m1, m2, arg1 = val, m1, t
            elif val < m2:
                m2 = val
        base = min(skey[v], b_up[v])
        for t, (c, key) in enumerate(kids):
            excl = m2 if t == arg1 else m1
            q = min(base, excl)  # best connection on v's side of edge (v, c)
            b_up[c] = max(key, q)
            if key < b_sub[c] or key < q:
                kept.append(key)
        if skey[v] < min(b_up[v], m1):
            entering.append(skey[v])

    if len(kept) + len(entering) != len(vertices):
        raise AssertionError("bottleneck update lost the spanning property")
    kept_set = set(kept)
    surviving = [e for e in edges if e in kept_set]
    entering.sort()
    return surviving, entering


def mst_insert_euclidean(T_prev: Mst, new_point: int, coords) -> Mst:
    """Insert one vertex in Euclidean mode; output identical to mst_insert.

    ``coords`` holds the coordinates of all points, indexed by input index.
    The previous sorted edge list is updated by merging the few entering star
    edges, avoiding a sort.
    """
    if coords is None:
        raise ValueError("coords required in euclidean mode")
    coords = np.asarray(coords, dtype=float)
    existing = T_prev.vertices
    if new_point in existing:
        raise ValueError("vertex already present")
    if not existing:
        return Mst((new_point,), ())
    diff = coords[list(existing)] - coords[new_point]
    weights = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    surviving, entering = _bottleneck_update(
        existing, T_prev.edges, new_point, weights.tolist()
    )
    merged = merge_sorted(surviving, entering)
    return Mst(existing + (new_point,), tuple(merged))
