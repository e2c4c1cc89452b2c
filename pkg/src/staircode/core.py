"""Shared domain types: augmented metric spaces, orderings, staircases, lines.

Grades are stored as (sigma, eps) pairs with sigma on the horizontal (filter)
axis and eps on the vertical (scale) axis.  Staircase membership is closed at
the birth column and at eps=0 and open at the upper envelope.  The envelope
value +inf (globally oldest point) is ``math.inf``; it is only ever compared,
never used in arithmetic.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

INF = math.inf


def pair_index(i: int, j: int) -> int:
    """Condensed index of the unordered pair {i,j}: (i<j) -> j*(j-1)/2 + i."""
    if i == j:
        raise ValueError("distance pairs need two distinct points")
    if i > j:
        i, j = j, i
    return j * (j - 1) // 2 + i


def euclidean_condensed(coords: np.ndarray) -> np.ndarray:
    """Pairwise Euclidean distances in condensed lower-triangular order."""
    coords = np.asarray(coords, dtype=float)
    n = coords.shape[0]
    out = np.empty(n * (n - 1) // 2, dtype=float)
    pos = 0
    for j in range(1, n):
        diff = coords[:j] - coords[j]
        out[pos : pos + j] = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        pos += j
    return out


class AugmentedMetricSpace:
    """A finite point set with pairwise distances and one filter value per point.

    Distances are condensed, lower-triangular row-major: pair (i,j) with i<j
    lives at index j*(j-1)/2 + i.  The triangle inequality is NOT required.
    If ``coords`` is given, distances must match the Euclidean ones within
    1e-9 relative tolerance.
    """

    def __init__(self, ids: Sequence[str], f, dist, coords=None):
        ids = tuple(str(x) for x in ids)
        n = len(ids)
        if n < 1:
            raise ValueError("need at least one point")
        if len(set(ids)) != n:
            raise ValueError("duplicate point ids")
        f = np.asarray(f, dtype=float)
        if f.shape != (n,) or not np.all(np.isfinite(f)):
            raise ValueError("f must be %d finite reals" % n)
        m = n * (n - 1) // 2
        dist = np.asarray(dist, dtype=float)
        if dist.shape != (m,):
            raise ValueError("dist must be condensed with length %d" % m)
        if m and (not np.all(np.isfinite(dist)) or float(dist.min()) < 0.0):
            raise ValueError("distances must be finite and nonnegative")
        if coords is not None:
            coords = np.asarray(coords, dtype=float)
            if coords.ndim != 2 or coords.shape[0] != n or not np.all(np.isfinite(coords)):
                raise ValueError("coords must be a finite n x d matrix")
            if m and not np.allclose(dist, euclidean_condensed(coords), rtol=1e-9, atol=1e-12):
                raise ValueError("dist does not match Euclidean distances of coords")
        self.n = n
        self.ids = ids
        self.f = f
        self.dist = dist
        self.coords = coords
        self._index_of = {p: k for k, p in enumerate(ids)}
        for a in (f, dist) + (() if coords is None else (coords,)):
            a.setflags(write=False)

    @classmethod
    def from_points(cls, ids, f, coords) -> "AugmentedMetricSpace":
        """Euclidean-mode constructor: distances computed from coordinates."""
        coords = np.asarray(coords, dtype=float)
        return cls(ids, f, euclidean_condensed(coords), coords)

    @classmethod
    def from_matrix(cls, ids, f, matrix, coords=None) -> "AugmentedMetricSpace":
        """Constructor from a full square symmetric distance matrix."""
        matrix = np.asarray(matrix, dtype=float)
        n = len(ids)
        if matrix.shape != (n, n):
            raise ValueError("distance matrix must be n x n")
        if np.any(matrix != matrix.T) or np.any(np.diag(matrix) != 0.0):
            raise ValueError("distance matrix must be symmetric with zero diagonal")
        cond = np.empty(n * (n - 1) // 2, dtype=float)
        for j in range(1, n):
            cond[j * (j - 1) // 2 : j * (j + 1) // 2] = matrix[j, :j]
        return cls(ids, f, cond, coords)

    def d(self, i: int, j: int) -> float:
        """Distance between input indices i and j."""
        if i == j:
            return 0.0
        return float(self.dist[pair_index(i, j)])

    def index_of(self, pid: str) -> int:
        return self._index_of[pid]

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=float)
        for j in range(1, self.n):
            row = self.dist[j * (j - 1) // 2 : j * (j + 1) // 2]
            out[j, :j] = row
            out[:j, j] = row
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        mode = "euclidean" if self.coords is not None else "generic"
        return f"AugmentedMetricSpace(n={self.n}, {mode})"


class GenericOrdering:
    """Deterministic total orders on points and pairs, with 1-based ranks.

    Points are sorted by (f value, input index); pairs by (distance, i, j)
    with i < j on input indices.  These tie-breaks make every downstream
    construction unique.
    """

    def __init__(self, space: AugmentedMetricSpace, point_order=None):
        n = space.n
        if point_order is None:
            point_order = np.lexsort((np.arange(n), space.f))
        point_order = tuple(int(i) for i in point_order)
        if sorted(point_order) != list(range(n)):
            raise ValueError("point_order must be a permutation of range(n)")
        fo = space.f[list(point_order)]
        if np.any(fo[1:] < fo[:-1]):
            raise ValueError("point_order is not compatible with f")
        pos = [0] * n
        for p, i in enumerate(point_order):
            pos[i] = p
        self.space = space
        self.point_order = point_order
        self._pos = tuple(pos)

        m = n * (n - 1) // 2
        if m:
            ii = np.empty(m, dtype=np.int64)
            jj = np.empty(m, dtype=np.int64)
            k = 0
            for j in range(1, n):
                ii[k : k + j] = np.arange(j)
                jj[k : k + j] = j
                k += j
            order = np.lexsort((jj, ii, space.dist))
            self._pair_by_rank = np.stack([ii[order], jj[order]], axis=1)
            rank = np.empty(m, dtype=np.int64)
            rank[order] = np.arange(1, m + 1)
            self._pair_rank = rank
        else:
            self._pair_by_rank = np.empty((0, 2), dtype=np.int64)
            self._pair_rank = np.empty(0, dtype=np.int64)

        self.has_f_ties = bool(n > 1 and np.any(np.diff(np.sort(space.f)) == 0.0))
        self.has_d_ties = bool(m > 1 and np.any(np.diff(np.sort(space.dist)) == 0.0))

        # f-levels: distinct sigma values with the last order-position of each
        # level's group (the prefix realizing the sublevel set X_sigma).
        levels: list[tuple[float, int]] = []
        for p, i in enumerate(point_order):
            v = float(space.f[i])
            if levels and levels[-1][0] == v:
                levels[-1] = (v, p)
            else:
                levels.append((v, p))
        self.f_levels = tuple(levels)

    @property
    def n(self) -> int:
        return self.space.n

    def position(self, i: int) -> int:
        """0-based position of input index i in point_order."""
        return self._pos[i]

    def f_rank(self, i: int) -> int:
        """1-based sigma-rank of input index i."""
        return self._pos[i] + 1

    def d_rank(self, i: int, j: int) -> int:
        """1-based eps-rank of the pair {i, j}."""
        return int(self._pair_rank[pair_index(i, j)])

    def pair_at_rank(self, r: int) -> tuple[int, int]:
        i, j = self._pair_by_rank[r - 1]
        return int(i), int(j)

    @property
    def pair_order(self) -> tuple[tuple[int, int], ...]:
        return tuple((int(i), int(j)) for i, j in self._pair_by_rank)

    def sigma_of_rank(self, k: int) -> float:
        """Real f-value of the point with sigma-rank k."""
        return float(self.space.f[self.point_order[k - 1]])

    def eps_of_rank(self, r: int) -> float:
        """Real distance value at eps-rank r (rank 0 means eps = 0)."""
        if r == 0:
            return 0.0
        i, j = self.pair_at_rank(r)
        return self.space.d(i, j)


@dataclass(frozen=True)
class Grade:
    """A point (sigma, eps) of the parameter plane, with optional ranks."""

    sigma: float
    eps: float
    sigma_rank: int | None = None
    eps_rank: int | None = None

    def __post_init__(self):
        if not self.eps >= 0.0:
            raise ValueError("eps must be nonnegative")

    def leq(self, other: "Grade") -> bool:
        return self.sigma <= other.sigma and self.eps <= other.eps

    def real(self) -> tuple[float, float]:
        return (self.sigma, self.eps)


@dataclass(frozen=True)
class Staircase:
    """One elder-rule staircase region.

    ``steps`` is the upper envelope: u(sigma) = u_j for sigma in
    [sigma_j, sigma_{j+1}) and u = u_last for sigma >= sigma_last.
    Membership: (sigma, eps) in I  <=>  sigma >= birth_sigma and
    0 <= eps < u(sigma).  u_1 may be +inf (globally oldest point).
    """

    owner: str
    birth_sigma: float
    steps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("staircase needs at least one step")
        if self.steps[0][0] != self.birth_sigma:
            raise ValueError("first step must start at birth_sigma")
        prev_s, prev_u = self.steps[0]
        if not prev_u >= 0.0:
            raise ValueError("envelope values must be nonnegative")
        for s, u in self.steps[1:]:
            if not s > prev_s:
                raise ValueError("step sigmas must be strictly increasing")
            if not (0.0 <= u <= prev_u):
                raise ValueError("envelope must be nonnegative and non-increasing")
            prev_s, prev_u = s, u
        object.__setattr__(self, "_sigmas", tuple(s for s, _ in self.steps))

    def envelope_at(self, sigma: float) -> float:
        """u(sigma); returns 0.0 left of the birth column (empty fiber)."""
        if sigma < self.birth_sigma:
            return 0.0
        idx = bisect_right(self._sigmas, sigma) - 1
        return self.steps[idx][1]

    @property
    def is_quadrant(self) -> bool:
        return len(self.steps) == 1 and self.steps[0][1] == INF


def staircase_contains(s: Staircase, g: Grade) -> bool:
    """Membership test: closed at birth column and eps=0, open at the envelope."""
    return g.sigma >= s.birth_sigma and g.eps < s.envelope_at(g.sigma)


def staircase_corners(s: Staircase) -> list[tuple[Grade, int]]:
    """Corner points of a staircase, as (grade, type) with type in {0,1,2}.

    type-0: the minimal element (birth, 0).  type-1: the top of the birth
    column (birth, u_1) when u_1 is finite, plus the inner corner
    (sigma_{j+1}, u_{j+1}) of every envelope drop.  type-2: the outer corner
    (sigma_{j+1}, u_j) of every drop.  These are exactly the grades where the
    double difference of the indicator is +1 (inside: type 0), -1 (type 1) or
    +1 (outside: type 2), so summing (-1)^j over corners <= a recovers the
    indicator.  An empty staircase (u_1 = 0) has no corners.
    """
    s1, u1 = s.steps[0]
    if u1 <= 0.0:
        return []
    corners: list[tuple[Grade, int]] = [(Grade(s1, 0.0), 0)]
    if u1 != INF:
        corners.append((Grade(s1, u1), 1))
    prev_u = u1
    for sig, u in s.steps[1:]:
        if u == prev_u:  # redundant step, no corner
            continue
        corners.append((Grade(sig, u), 1))
        if prev_u != INF:
            corners.append((Grade(sig, prev_u), 2))
        prev_u = u
    return corners


@dataclass(frozen=True)
class DecoratedStaircase:
    """A staircase plus its conqueror decoration.

    ``conqueror`` is a run-length encoding [(sigma_from, id), ...]: the
    conqueror of the owner is ``id`` for sigma in [sigma_from, next run).
    The globally oldest point is its own conqueror everywhere.  ``None``
    means undecorated (oracle output, stripped documents).
    """

    base: Staircase
    conqueror: tuple[tuple[float, str], ...] | None = None

    def __post_init__(self):
        if self.conqueror is not None:
            if not self.conqueror:
                raise ValueError("decorated staircase needs at least one run")
            if self.conqueror[0][0] != self.base.birth_sigma:
                raise ValueError("conqueror runs must start at birth_sigma")
            starts = [sf for sf, _ in self.conqueror]
            if any(b <= a for a, b in zip(starts, starts[1:])):
                raise ValueError("conqueror run starts must strictly increase")
            object.__setattr__(self, "_run_starts", tuple(starts))

    @property
    def owner(self) -> str:
        return self.base.owner

    def conqueror_at(self, sigma: float) -> str:
        if self.conqueror is None:
            raise ValueError("staircase is undecorated")
        if sigma < self.base.birth_sigma:
            raise ValueError("sigma is left of the birth column")
        return self.conqueror[bisect_right(self._run_starts, sigma) - 1][1]


class Staircode:
    """The elder-rule staircode: one (decorated) staircase per point.

    ``entries`` follow ``order_ids`` (point_order as ids).  ``rank_steps``,
    when present, stores per entry the rank-coordinate envelope
    ((sigma_rank, eps_rank), ...) with eps_rank = math.inf for the quadrant;
    Betti accounting uses it so that tie-broken grades stay distinct.
    """

    def __init__(
        self,
        entries: Iterable[DecoratedStaircase],
        order_ids: Sequence[str],
        ordering: GenericOrdering | None = None,
        meta: Mapping | None = None,
        rank_steps: Sequence[tuple[tuple[int, float], ...]] | None = None,
    ):
        self.entries = tuple(entries)
        self.order_ids = tuple(order_ids)
        if len(self.entries) != len(self.order_ids):
            raise ValueError("one entry per ordered point id required")
        for ds, pid in zip(self.entries, self.order_ids):
            if ds.base.owner != pid:
                raise ValueError("entries must follow order_ids")
        if self.entries and not self.entries[0].base.is_quadrant:
            raise ValueError("first staircase in point order must be the full quadrant")
        self.ordering = ordering
        self.meta = dict(meta or {})
        self.rank_steps = tuple(rank_steps) if rank_steps is not None else None
        self._by_owner = {ds.base.owner: ds for ds in self.entries}

    @property
    def n(self) -> int:
        return len(self.entries)

    def entry(self, pid: str) -> DecoratedStaircase:
        return self._by_owner[pid]

    def staircases(self) -> tuple[Staircase, ...]:
        return tuple(ds.base for ds in self.entries)

    @property
    def decorated(self) -> bool:
        return all(ds.conqueror is not None for ds in self.entries)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Staircode(n={self.n}, decorated={self.decorated})"


@dataclass(frozen=True)
class LineQuery:
    """A line of strictly positive slope through two anchor points (sigma, eps).

    Parameterized by arc length t from the anchor with smaller sigma, so both
    coordinates strictly increase with t (t may be negative behind the
    anchor).  All crossing parameters below are computed with the same
    formulas everywhere so equality comparisons are reproducible.
    """

    p0: tuple[float, float]
    p1: tuple[float, float]

    def __post_init__(self):
        (s0, e0), (s1, e1) = self.p0, self.p1
        for v in (s0, e0, s1, e1):
            if not math.isfinite(v):
                raise ValueError("line anchors must be finite")
        ds, de = s1 - s0, e1 - e0
        if ds == 0.0 or de == 0.0 or (ds > 0.0) != (de > 0.0):
            raise ValueError("line must have positive slope")
        if ds < 0.0:
            s0, e0, ds, de = s1, e1, -ds, -de
        norm = math.hypot(ds, de)
        object.__setattr__(self, "anchor", (s0, e0))
        object.__setattr__(self, "unit", (ds / norm, de / norm))

    @property
    def slope(self) -> float:
        return self.unit[1] / self.unit[0]

    def sigma_at(self, t: float) -> float:
        return self.anchor[0] + t * self.unit[0]

    def eps_at(self, t: float) -> float:
        return self.anchor[1] + t * self.unit[1]

    def point_at(self, t: float) -> tuple[float, float]:
        return (self.sigma_at(t), self.eps_at(t))

    def t_of_sigma(self, sigma: float) -> float:
        return (sigma - self.anchor[0]) / self.unit[0]

    def t_of_eps(self, eps: float) -> float:
        return (eps - self.anchor[1]) / self.unit[1]


@dataclass(frozen=True)
class Bar:
    """Half-open bar [birth_t, death_t) of a fibered barcode along a line.

    Endpoints are line parameters; the (sigma, eps) coordinates of both
    endpoints are carried along (death_grade is None for infinite bars).
    Bars constructed by queries are nonempty unless explicitly requested.
    """

    owner: str
    birth_t: float
    death_t: float
    birth_grade: tuple[float, float] | None = None
    death_grade: tuple[float, float] | None = None

    def __post_init__(self):
        if not self.birth_t <= self.death_t:
            raise ValueError("bar birth must not exceed death")

    @property
    def is_empty(self) -> bool:
        return self.birth_t == self.death_t

    @property
    def is_infinite(self) -> bool:
        return self.death_t == INF

    @property
    def length(self) -> float:
        return self.death_t - self.birth_t
