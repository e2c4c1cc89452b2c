"""Brute-force ground truth computed straight from the definitions.

Everything here works on the rank grid (sigma-rank i = points born, eps-rank
r = pair distances allowed) with partitions recomputed by union-find, and maps
back to real coordinates only for reporting.  Desk scale (n <= ~12); never
used by the pipeline itself.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .betti import GradedBetti
from .core import (
    INF,
    AugmentedMetricSpace,
    Bar,
    DecoratedStaircase,
    GenericOrdering,
    Grade,
    LineQuery,
    Staircase,
    Staircode,
)


class GradeGrid:
    """Component partitions of Rips_eps(X_sigma) at every rank grade.

    partition(i, r) is the partition of the first i points (by point_order)
    under edges of eps-rank <= r, for 0 <= i <= n, 0 <= r <= n(n-1)/2.
    Blocks are frozensets of input indices.
    """

    def __init__(self, X: AugmentedMetricSpace, ordering: GenericOrdering | None = None):
        self.space = X
        self.ordering = ordering or GenericOrdering(X)
        n = X.n
        m = n * (n - 1) // 2
        self.n, self.m = n, m
        pos = self.ordering.position
        parts: list[list[tuple[frozenset[int], ...]]] = [[()] * (m + 1)]
        for i in range(1, n + 1):
            present = self.ordering.point_order[:i]
            parent = {x: x for x in present}

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            row = []
            for r in range(m + 1):
                if r > 0:
                    a, b = self.ordering.pair_at_rank(r)
                    if pos(a) < i and pos(b) < i:
                        ra, rb = find(a), find(b)
                        if ra != rb:
                            parent[rb] = ra
                blocks: dict[int, list[int]] = {}
                for x in present:
                    blocks.setdefault(find(x), []).append(x)
                row.append(tuple(frozenset(v) for v in blocks.values()))
            parts.append(row)
        self._parts = parts
        self._sorted_f = np.sort(X.f)
        self._sorted_d = np.sort(X.dist)

    def partition(self, i: int, r: int) -> tuple[frozenset[int], ...]:
        return self._parts[i][r]

    def block_of(self, i: int, r: int, x: int) -> frozenset[int] | None:
        for blk in self._parts[i][r]:
            if x in blk:
                return blk
        return None

    def count(self, i: int, r: int) -> int:
        return len(self._parts[i][r])

    def rank_of_real(self, sigma: float, eps: float) -> tuple[int, int]:
        i = int(np.searchsorted(self._sorted_f, sigma, side="right"))
        r = int(np.searchsorted(self._sorted_d, eps, side="right"))
        return i, r

    def count_real(self, sigma: float, eps: float) -> int:
        if eps < 0:
            return 0
        return self.count(*self.rank_of_real(sigma, eps))


def grid_components(X: AugmentedMetricSpace, ordering: GenericOrdering | None = None) -> GradeGrid:
    return GradeGrid(X, ordering)


def oracle_staircode(
    X: AugmentedMetricSpace,
    order=None,
    grid: GradeGrid | None = None,
) -> Staircode:
    """Definition-level staircode: per point and grid cell, test min-of-block."""
    if isinstance(order, GenericOrdering):
        ordering = order
    else:
        ordering = GenericOrdering(X, order)
    grid = grid or GradeGrid(X, ordering)
    n, m = X.n, X.n * (X.n - 1) // 2
    order_idx = ordering.point_order
    pos = ordering.position

    # env[p][i] = minimal eps-rank at which the point at position p sits in a
    # block with an older point, within the prefix of i points (INF if never).
    env: list[dict[int, float]] = [dict() for _ in range(n)]
    for p in range(n):
        x = order_idx[p]
        for i in range(p + 1, n + 1):
            val: float = INF
            for r in range(m + 1):
                blk = grid.block_of(i, r, x)
                if any(pos(y) < p for y in blk):
                    val = float(r)
                    break
            env[p][i] = val

    entries = []
    rank_steps = []
    for p in range(n):
        x = order_idx[p]
        merged: list[tuple[int, float]] = []
        for i in range(p + 1, n + 1):
            v = env[p][i]
            if not merged or merged[-1][1] != v:
                merged.append((i, v))
        rank_steps.append(tuple((k, (int(v) if v != INF else INF)) for k, v in merged))

        real_steps: list[tuple[float, float]] = []
        birth_level_idx = next(
            t for t, (lv, end) in enumerate(ordering.f_levels) if end >= p
        )
        for lv, end in ordering.f_levels[birth_level_idx:]:
            v = env[p][end + 1]
            u = ordering.eps_of_rank(int(v)) if v != INF else INF
            if not real_steps or real_steps[-1][1] != u:
                real_steps.append((lv, u))
        base = Staircase(X.ids[x], real_steps[0][0], tuple(real_steps))
        entries.append(DecoratedStaircase(base, None))

    order_ids = tuple(X.ids[i] for i in order_idx)
    meta = {
        "n": n,
        "mode": "oracle",
        "tie_breaks": {"f": ordering.has_f_ties, "d": ordering.has_d_ties},
    }
    return Staircode(entries, order_ids, ordering, meta, tuple(rank_steps))


@dataclass(frozen=True)
class EdgeClass:
    """An edge (pair of ids) with its birth grade and negativity."""

    pair: tuple[str, str]
    rank_grade: tuple[int, int]
    real_grade: tuple[float, float]
    negative: bool


def classify_edges(
    X: AugmentedMetricSpace,
    ordering: GenericOrdering | None = None,
    grid: GradeGrid | None = None,
) -> list[EdgeClass]:
    """Negative/positive classification of every edge at its birth grade."""
    ordering = ordering or GenericOrdering(X)
    grid = grid or GradeGrid(X, ordering)
    out = []
    for r in range(1, X.n * (X.n - 1) // 2 + 1):
        i, j = ordering.pair_at_rank(r)
        bp = max(ordering.position(i), ordering.position(j)) + 1
        negative = grid.count(bp, r) < grid.count(bp, r - 1)
        a, b = sorted((i, j), key=ordering.position)
        out.append(
            EdgeClass(
                pair=(X.ids[a], X.ids[b]),
                rank_grade=(bp, r),
                real_grade=(ordering.sigma_of_rank(bp), X.d(i, j)),
                negative=negative,
            )
        )
    return out


def oracle_betti(
    X: AugmentedMetricSpace,
    ordering: GenericOrdering | None = None,
    grid: GradeGrid | None = None,
) -> GradedBetti:
    """Graded Betti numbers by inverting the dimension function on the rank grid.

    h(a) = dm(a) - dm(a-e1) - dm(a-e2) + dm(a-e1-e2); on the eps-rank-0 row h
    is the new-vertex count (beta_0); above it h = -beta_1 + beta_2 with at
    most one of the two nonzero at any rank grade (generic), so the sign
    determines everything.  |h| > 1 would contradict that and raises.
    """
    ordering = ordering or GenericOrdering(X)
    grid = grid or GradeGrid(X, ordering)
    n, m = X.n, X.n * (X.n - 1) // 2
    b0: dict[Grade, int] = {}
    b1: dict[Grade, int] = {}
    b2: dict[Grade, int] = {}

    def grade(i: int, r: int) -> Grade:
        return Grade(
            ordering.sigma_of_rank(i),
            ordering.eps_of_rank(r),
            sigma_rank=i,
            eps_rank=r,
        )

    for i in range(1, n + 1):
        for r in range(m + 1):
            h = grid.count(i, r) - grid.count(i - 1, r)
            if r > 0:
                h -= grid.count(i, r - 1) - grid.count(i - 1, r - 1)
            if r == 0:
                if h != 1:
                    raise AssertionError("expected exactly one new vertex per column")
                b0[grade(i, 0)] = 1
            elif h == -1:
                b1[grade(i, r)] = 1
            elif h == 1:
                b2[grade(i, r)] = 1
            elif h != 0:
                raise AssertionError(f"|h|>1 at rank grade {(i, r)}: not generic")
    return GradedBetti(b0, b1, b2)


def oracle_line_barcode(X: AugmentedMetricSpace, order, L: LineQuery) -> list[Bar]:
    """1-parameter elder-rule barcode of the grid filtration restricted to L.

    Sweeps the crossing parameters of L with every f-level, eps=0, and every
    distance value; at each event the partition is recomputed and aliveness
    (being the oldest of one's block) recorded.  Crossing parameters use the
    same LineQuery formulas as the query module, so endpoints compare exactly.
    """
    if isinstance(order, GenericOrdering):
        ordering = order
    else:
        ordering = GenericOrdering(X, order)
    n = X.n
    order_idx = ordering.point_order
    pos = ordering.position

    t_floor = L.t_of_eps(0.0)
    t_sigma = {i: L.t_of_sigma(float(X.f[i])) for i in range(n)}
    events = {t_floor}
    events.update(t for t in t_sigma.values() if t >= t_floor)
    pair_ts = []
    for r in range(1, n * (n - 1) // 2 + 1):
        i, j = ordering.pair_at_rank(r)
        t = L.t_of_eps(X.d(i, j))
        pair_ts.append((t, i, j))
        if t >= t_floor:
            events.add(t)
    events = sorted(events)

    alive_at: dict[int, list[bool]] = {i: [] for i in range(n)}
    present_at: dict[int, list[bool]] = {i: [] for i in range(n)}
    for t in events:
        present = [i for i in range(n) if t_sigma[i] <= t and t >= t_floor]
        pset = set(present)
        parent = {i: i for i in present}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for te, i, j in pair_ts:
            if te <= t and i in pset and j in pset:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[rb] = ra
        blocks: dict[int, list[int]] = {}
        for x in present:
            blocks.setdefault(find(x), []).append(x)
        oldest = set()
        for blk in blocks.values():
            oldest.add(min(blk, key=pos))
        for i in range(n):
            present_at[i].append(i in pset)
            alive_at[i].append(i in oldest)

    bars = []
    for i in range(n):
        flags = alive_at[i]
        if not any(flags):
            continue
        b = flags.index(True)
        d = None
        for k in range(b, len(events)):
            if flags[k]:
                if not (k == b or flags[k - 1]):
                    raise AssertionError("aliveness must be a single run along L")
            elif present_at[i][k]:
                d = k
                break
        birth_t = events[b]
        death_t = events[d] if d is not None else INF
        bg = (L.sigma_at(birth_t), max(0.0, L.eps_at(birth_t)))
        dg = None if d is None else (L.sigma_at(death_t), L.eps_at(death_t))
        bars.append(Bar(X.ids[i], birth_t, death_t, bg, dg))
    bars.sort(key=lambda bar: (bar.birth_t, bar.owner))
    return bars
