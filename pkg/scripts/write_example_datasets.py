"""Write the worked example datasets to disk in every supported format.

The four-point running example is a 3-4-5 right triangle with an interior
point (d12=3, d23=4, d13=5, d24=1.5, d34=2.5, d14=3.6).  Varying only its
filter values produces three instructive inputs:

  d45          f = (1,2,3,4)   constant conqueror, interval decomposable
  ex53         f = (1,3,2,4)   fails the decomposability necessary test
  ex38         f = (1,2,2,4)   tied filter values, order-dependent staircode

plus a planar variant of d45 (coordinates instead of a distance matrix) and a
random ultrametric hierarchy.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import staircode as sc
from staircode.cli_io import dataset_to_json

IDS = ("x1", "x2", "x3", "x4")
DIST = (3.0, 5.0, 4.0, 3.6, 1.5, 2.5)  # condensed: d12,d13,d23,d14,d24,d34
COORDS = ((0.0, 0.0), (3.0, 0.0), (3.0, 4.0), (3.0, 1.5))
FILTERS = {"d45": (1.0, 2.0, 3.0, 4.0), "ex53": (1.0, 3.0, 2.0, 4.0), "ex38": (1.0, 2.0, 2.0, 4.0)}


def random_ultrametric(rng: random.Random, n: int) -> sc.AugmentedMetricSpace:
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


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="ultrametric seed")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for name, f in FILTERS.items():
        X = sc.AugmentedMetricSpace(IDS, f, DIST)
        (out / f"{name}.json").write_text(json.dumps(dataset_to_json(X), indent=2) + "\n")

    # the same points as CSV + separate lower-triangular distance file
    rows = ["id,f"] + [f"{pid},{v}" for pid, v in zip(IDS, FILTERS["d45"])]
    (out / "d45.csv").write_text("\n".join(rows) + "\n")
    (out / "d45_dist.csv").write_text("3\n5,4\n3.6,1.5,2.5\n")

    # planar variant: same distance ranks with d14 = sqrt(11.25)
    rows = ["id,f,x,y"] + [
        f"{pid},{v},{c[0]},{c[1]}"
        for pid, v, c in zip(IDS, FILTERS["d45"], COORDS)
    ]
    (out / "d45_euclidean.csv").write_text("\n".join(rows) + "\n")

    U = random_ultrametric(random.Random(args.seed), 8)
    (out / "ultrametric.json").write_text(json.dumps(dataset_to_json(U), indent=2) + "\n")

    for p in sorted(out.iterdir()):
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
