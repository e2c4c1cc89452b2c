"""Timing sweep over random planar clouds: staircode build and line queries.

Emits one JSON line per size with compute/index seconds and mean query
milliseconds, plus a final line with size-doubling runtime ratios (the
near-quadratic sanity check).  Thin wrapper around `staircode bench`.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stdout
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from staircode.cli_io import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--n", type=int, nargs="+", default=[125, 250, 500, 1000], help="cloud sizes"
    )
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--queries", type=int, default=100)
    args = parser.parse_args()

    buf = io.StringIO()
    argv = ["bench", "--dim", str(args.dim), "--seed", str(args.seed),
            "--queries", str(args.queries), "--n", *map(str, args.n)]
    with redirect_stdout(buf):
        code = cli_main(argv)
    if code != 0:
        return code

    rows = [json.loads(line) for line in buf.getvalue().splitlines()]
    for row in rows:
        print(json.dumps(row))
    ratios = {}
    by_n = {row["n"]: row["compute_s"] for row in rows}
    for n, t in by_n.items():
        if 2 * n in by_n and t > 0:
            ratios[f"{n}->{2 * n}"] = round(by_n[2 * n] / t, 2)
    print(json.dumps({"doubling_ratios": ratios}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
