"""Shared fixtures: the worked 4-point examples and random-space generators.

The 4-point running example ("d45") is the 3-4-5 right triangle plus an
interior point: d12=3, d23=4, d13=5, d24=1.5, d34=2.5, d14=3.6 with filter
values f=(1,2,3,4).  Its Euclidean variant places the points in the plane,
which replaces d14 by sqrt(11.25) (= ~3.354, still between 3 and 4, so every
pairwise rank, and hence every rank-level expected value, is unchanged).
"""

from __future__ import annotations

import math
import random

import pytest

import staircode as sc

D45_IDS = ("x1", "x2", "x3", "x4")
D45_F = (1.0, 2.0, 3.0, 4.0)
# condensed lower-triangular order: d12, d13, d23, d14, d24, d34
D45_DIST = (3.0, 5.0, 4.0, 3.6, 1.5, 2.5)
D45_COORDS = ((0.0, 0.0), (3.0, 0.0), (3.0, 4.0), (3.0, 1.5))

EX53_F = (1.0, 3.0, 2.0, 4.0)
EX38_F = (1.0, 2.0, 2.0, 4.0)


@pytest.fixture
def d45() -> sc.AugmentedMetricSpace:
    return sc.AugmentedMetricSpace(D45_IDS, D45_F, D45_DIST)


@pytest.fixture
def d45_euclidean() -> sc.AugmentedMetricSpace:
    return sc.AugmentedMetricSpace.from_points(D45_IDS, D45_F, D45_COORDS)


@pytest.fixture
def ex53() -> sc.AugmentedMetricSpace:
    return sc.AugmentedMetricSpace(D45_IDS, EX53_F, D45_DIST)


@pytest.fixture
def ex38() -> sc.AugmentedMetricSpace:
    return sc.AugmentedMetricSpace(D45_IDS, EX38_F, D45_DIST)


def random_space(rng: random.Random, n: int | None = None, mode: str = "generic") -> sc.AugmentedMetricSpace:
    """A small random space; roughly half the draws contain f- or d-ties."""
    n = n if n is not None else rng.randint(2, 8)
    ids = [f"p{k}" for k in range(n)]
    if rng.random() < 0.4:
        f = [float(rng.choice((0, 1, 2, 3))) for _ in range(n)]
    else:
        f = [round(rng.uniform(0.0, 10.0), 3) for _ in range(n)]
    if mode == "euclidean":
        dim = rng.choice((1, 2, 3))
        grid = rng.random() < 0.4
        coords = [
            [float(rng.randrange(0, 4)) if grid else rng.uniform(0.0, 10.0) for _ in range(dim)]
            for _ in range(n)
        ]
        return sc.AugmentedMetricSpace.from_points(ids, f, coords)
    m = n * (n - 1) // 2
    if rng.random() < 0.4:
        dist = [rng.choice((0.5, 1.0, 1.5, 2.0, 2.5)) for _ in range(m)]
    else:
        dist = [round(rng.uniform(0.1, 5.0), 3) for _ in range(m)]
    return sc.AugmentedMetricSpace(ids, f, dist)


def random_ultrametric(rng: random.Random, n: int) -> sc.AugmentedMetricSpace:
    """Hierarchy construction: merging clusters at increasing heights makes
    every triangle isoceles with the two largest sides equal."""
    clusters = [[k] for k in range(n)]
    dist = [[0.0] * n for _ in range(n)]
    height = 0.0
    while len(clusters) > 1:
        height += round(rng.uniform(0.5, 2.0), 3)
        a = clusters.pop(rng.randrange(len(clusters)))
        b = clusters.pop(rng.randrange(len(clusters)))
        for i in a:
            for j in b:
                dist[i][j] = dist[j][i] = height
        clusters.append(a + b)
    condensed = [dist[j][i] for j in range(1, n) for i in range(j)]
    f = [round(rng.uniform(0.0, 5.0), 3) for _ in range(n)]
    return sc.AugmentedMetricSpace([f"u{k}" for k in range(n)], f, condensed)


def random_line(rng: random.Random, X: sc.AugmentedMetricSpace) -> sc.LineQuery:
    """A positive-slope line whose window overlaps the data's grade range."""
    s_lo, s_hi = float(X.f.min()) - 1.0, float(X.f.max()) + 1.0
    e_hi = float(X.dist.max()) * 1.2 + 1.0 if X.dist.size else 2.0
    anchor = (rng.uniform(s_lo, s_hi), rng.uniform(-0.2 * e_hi, e_hi))
    angle = rng.uniform(0.05, math.pi / 2 - 0.05)
    return sc.LineQuery(anchor, (anchor[0] + math.cos(angle), anchor[1] + math.sin(angle)))
