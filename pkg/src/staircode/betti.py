"""Corner statistics, graded Betti numbers, dimension function, decomposability checks.

All Betti accounting happens at rank grades (sigma-rank = 1-based position in
point_order, eps-rank = 1-based position in pair_order) where genericity is
guaranteed, and results are mapped to real coordinates for reporting.  When a
staircode carries no rank data (e.g. loaded from a stripped document) the
real-coordinate staircases are used directly, which is equivalent for generic
inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    INF,
    AugmentedMetricSpace,
    GenericOrdering,
    Grade,
    Staircase,
    Staircode,
    staircase_contains,
    staircase_corners,
)


class FeatureFunction:
    """Sparse map grade -> nonnegative count for one corner type j."""

    def __init__(self, j: int, counts: dict[Grade, int]):
        self.j = j
        self.counts = {g: c for g, c in counts.items() if c}

    def mass(self) -> int:
        return sum(self.counts.values())

    def support(self) -> frozenset[Grade]:
        return frozenset(self.counts)

    def real_counts(self) -> dict[tuple[float, float], int]:
        out: dict[tuple[float, float], int] = {}
        for g, c in self.counts.items():
            out[g.real()] = out.get(g.real(), 0) + c
        return out

    def real_support(self) -> frozenset[tuple[float, float]]:
        return frozenset(self.real_counts())

    def __getitem__(self, g: Grade) -> int:
        return self.counts.get(g, 0)


@dataclass
class GradedBetti:
    """Sparse beta_0, beta_1, beta_2 maps (grade -> count)."""

    b0: dict[Grade, int]
    b1: dict[Grade, int]
    b2: dict[Grade, int]

    def betti(self, i: int) -> dict[Grade, int]:
        return (self.b0, self.b1, self.b2)[i]

    def support(self, i: int) -> frozenset[Grade]:
        return frozenset(g for g, c in self.betti(i).items() if c)

    def real(self, i: int) -> dict[tuple[float, float], int]:
        out: dict[tuple[float, float], int] = {}
        for g, c in self.betti(i).items():
            out[g.real()] = out.get(g.real(), 0) + c
        return out

    def real_support(self, i: int) -> frozenset[tuple[float, float]]:
        return frozenset(self.real(i))

    def rank_support(self, i: int) -> frozenset[tuple[int, int]]:
        return frozenset(
            (g.sigma_rank, g.eps_rank)
            for g in self.betti(i)
            if g.sigma_rank is not None and g.eps_rank is not None
        )

    def mass(self, i: int) -> int:
        return sum(self.betti(i).values())


def _rank_staircase(owner: str, rank_steps: tuple[tuple[int, float], ...]) -> Staircase:
    """Rank-coordinate staircase: sigma-ranks as floats, eps-ranks (or inf) as u."""
    steps = tuple((float(k), float(u) if u != INF else INF) for k, u in rank_steps)
    return Staircase(owner, steps[0][0], steps)


def feature_functions(S: Staircode) -> tuple[FeatureFunction, FeatureFunction, FeatureFunction]:
    """Aggregate corner counts gamma_0, gamma_1, gamma_2 over all staircases."""
    counts: tuple[dict[Grade, int], ...] = ({}, {}, {})
    if S.rank_steps is not None and S.ordering is not None:
        ordering = S.ordering
        for ds, rsteps in zip(S.entries, S.rank_steps):
            for g, typ in staircase_corners(_rank_staircase(ds.base.owner, rsteps)):
                kr, er = int(g.sigma), int(g.eps)
                grade = Grade(
                    ordering.sigma_of_rank(kr),
                    ordering.eps_of_rank(er),
                    sigma_rank=kr,
                    eps_rank=er,
                )
                counts[typ][grade] = counts[typ].get(grade, 0) + 1
    else:
        for ds in S.entries:
            for g, typ in staircase_corners(ds.base):
                counts[typ][g] = counts[typ].get(g, 0) + 1
    return tuple(FeatureFunction(j, c) for j, c in enumerate(counts))


def graded_betti(S: Staircode) -> GradedBetti:
    """beta_0 = gamma_0, beta_1 = gamma_1 - gamma_2, beta_2 = gamma_2 - gamma_1
    (truncated subtraction, computed per rank grade)."""
    g0, g1, g2 = feature_functions(S)
    b1: dict[Grade, int] = {}
    b2: dict[Grade, int] = {}
    for g in set(g1.counts) | set(g2.counts):
        d = g1[g] - g2[g]
        if d > 0:
            b1[g] = d
        elif d < 0:
            b2[g] = -d
    return GradedBetti(dict(g0.counts), b1, b2)


def _as_grade(a) -> Grade:
    if isinstance(a, Grade):
        return a
    sigma, eps = a
    return Grade(float(sigma), float(eps))


def dimension_function(obj: GradedBetti | Staircode, a) -> int:
    """dim of H0 at grade a: number of components of Rips_eps(X_sigma).

    Staircode route: count staircases containing a (the elder rule).  Betti
    route: alternating sum of beta counts at grades <= a.  Both agree.
    """
    g = _as_grade(a)
    if isinstance(obj, Staircode):
        return sum(staircase_contains(ds.base, g) for ds in obj.entries)
    total = 0
    for i, sign in ((0, 1), (1, -1), (2, 1)):
        for grade, c in obj.betti(i).items():
            if grade.sigma <= g.sigma and grade.eps <= g.eps:
                total += sign * c
    return total


def check_ultrametric(X: AugmentedMetricSpace) -> bool:
    """Exhaustive triple check: in every triangle the two largest sides are equal."""
    mat = X.matrix()
    for i, j, k in itertools.combinations(range(X.n), 3):
        a, b, c = sorted((mat[i, j], mat[i, k], mat[j, k]))
        if b != c:
            return False
    return True


def _minimax_matrix(mat, members: list[int], pair_ranks: list[tuple[int, int, float]]):
    """Single-linkage ultrametric u over ``members`` (positions into mat rows).

    ``pair_ranks``: pairs of local indices with real weights, pre-sorted by
    (weight, tie-break).  Returns a dict-of-dict u[a][b] for local indices.
    """
    k = len(members)
    u = [[0.0] * k for _ in range(k)]
    parent = list(range(k))
    blocks = {r: [r] for r in range(k)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, w in pair_ranks:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        for p in blocks[ra]:
            row = u[p]
            for q in blocks[rb]:
                row[q] = w
                u[q][p] = w
        if len(blocks[ra]) < len(blocks[rb]):
            ra, rb = rb, ra
        parent[rb] = ra
        blocks[ra].extend(blocks.pop(rb))
    return u


def check_constant_conqueror(X: AugmentedMetricSpace, order=None):
    """Whether every point admits one conqueror valid at every sigma-level.

    For each non-minimal x and each f-level sigma >= f(x), the conqueror set
    is the argmin, over older points y, of the chain-merge scale
    u_{X_sigma}(x, y) (real values; ties admit several).  Returns
    (True, None) if every point's sets intersect across levels, else
    (False, witness) with the failing point and its per-level sets.
    """
    if isinstance(order, GenericOrdering):
        ordering = order
    else:
        ordering = GenericOrdering(X, order)
    n = X.n
    mat = X.matrix()
    order_idx = ordering.point_order
    # pairs of positions sorted like pair_order (weight, then input-index pair)
    pos_pairs = []
    for r in range(1, n * (n - 1) // 2 + 1):
        i, j = ordering.pair_at_rank(r)
        a, b = ordering.position(i), ordering.position(j)
        pos_pairs.append((a, b, X.d(i, j)))

    surviving: list[set[int] | None] = [None] * n
    level_sets: list[list[tuple[float, frozenset[int]]]] = [[] for _ in range(n)]
    for level, end in ordering.f_levels:
        k = end + 1
        prefix_pairs = [(a, b, w) for a, b, w in pos_pairs if a < k and b < k]
        u = _minimax_matrix(mat, list(range(k)), prefix_pairs)
        for p in range(1, k):
            vals = u[p][:p]
            mn = min(vals)
            cset = frozenset(q for q, v in enumerate(vals) if v == mn)
            level_sets[p].append((level, cset))
            if surviving[p] is None:
                surviving[p] = set(cset)
            else:
                surviving[p] &= cset

    for p in range(1, n):
        if not surviving[p]:
            witness = {
                "id": X.ids[order_idx[p]],
                "levels": [
                    (lv, tuple(sorted(X.ids[order_idx[q]] for q in cs)))
                    for lv, cs in level_sets[p]
                ],
            }
            return False, witness
    return True, None


def decomposability_necessary_test(S: Staircode) -> str:
    """Betti-mismatch necessary test for interval decomposability.

    If H0 were interval decomposable its Betti numbers would equal those of
    the direct sum of staircase interval modules, i.e. the gamma functions.
    Any grade where gamma_1 and gamma_2 overlap (so beta truncates) rules
    that out.  "consistent" is NOT a proof of decomposability.
    """
    _, g1, g2 = feature_functions(S)
    overlap = set(g1.counts) & set(g2.counts)
    return "not_interval_decomposable" if overlap else "consistent"
