"""Dataset parsing, staircode documents, the command line, and the HTTP server.

Exit codes: 1 for file/argument parse errors, 2 for violated invariants
(structurally valid input that fails validation), 3 for oracle mismatches.
All JSON output is serialized with sorted keys and compact separators, so
identical requests produce byte-identical responses; infinite envelope
values are written as the string "inf" (never the non-JSON Infinity token).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import mimetypes
import os
import random
import sys
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

import numpy as np

from .betti import (
    check_constant_conqueror,
    check_ultrametric,
    decomposability_necessary_test,
    dimension_function,
    graded_betti,
)
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
from .oracle import GradeGrid, oracle_betti, oracle_line_barcode, oracle_staircode
from .query import build_index, query_barcode, query_treegram
from .staircode import compute_staircode, compute_staircode_ordered
from .treegram import Treegram


class CliError(Exception):
    exit_code = 1


class ParseError(CliError):
    exit_code = 1


class InvariantError(CliError):
    exit_code = 2


class OracleMismatch(CliError):
    exit_code = 3


# --------------------------------------------------------------------------
# dataset files


def _float(text, what: str) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: not a number: {text!r}") from None
    if math.isnan(v):
        raise ParseError(f"{what}: NaN is not allowed")
    return v


def _space(ids, f, dist=None, coords=None) -> AugmentedMetricSpace:
    try:
        if dist is None:
            return AugmentedMetricSpace.from_points(ids, f, coords)
        return AugmentedMetricSpace(ids, f, dist, coords)
    except ValueError as e:
        raise InvariantError(str(e)) from None


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with open(path, newline="") as fh:
            return [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    except OSError as e:
        raise ParseError(str(e)) from None


def _lower_triangle(rows: list[list[str]], n: int, what: str) -> np.ndarray:
    """Condensed distances from n-1 lower-triangular rows or an n x n matrix."""
    vals = [[_float(c, what) for c in row] for row in rows]
    if len(vals) == n and all(len(r) == n for r in vals):
        mat = np.asarray(vals, dtype=float)
        if np.any(mat != mat.T) or np.any(np.diag(mat) != 0.0):
            raise InvariantError(f"{what}: matrix must be symmetric with zero diagonal")
        out = []
        for j in range(1, n):
            out.extend(mat[j, :j])
        return np.asarray(out, dtype=float)
    if len(vals) == n - 1 and all(len(r) == k + 1 for k, r in enumerate(vals)):
        return np.asarray([v for row in vals for v in row], dtype=float)
    raise ParseError(
        f"{what}: expected {n - 1} lower-triangular rows (row k with k entries)"
        f" or a full {n} x {n} matrix"
    )


def dataset_from_json(obj) -> AugmentedMetricSpace:
    """Build a space from the canonical JSON form {points: [...], dist?: ...}."""
    if not isinstance(obj, dict) or "points" not in obj:
        raise ParseError("dataset JSON must be an object with a 'points' list")
    pts = obj["points"]
    if not isinstance(pts, list) or not pts:
        raise ParseError("'points' must be a nonempty list")
    ids, f, coords = [], [], []
    for k, p in enumerate(pts):
        if not isinstance(p, dict) or "id" not in p or "f" not in p:
            raise ParseError(f"point #{k} must have 'id' and 'f'")
        ids.append(str(p["id"]))
        f.append(_float(p["f"], f"point {p['id']} f"))
        if "coords" in p:
            coords.append([_float(c, f"point {p['id']} coords") for c in p["coords"]])
    if coords and len(coords) != len(pts):
        raise ParseError("either every point has coords or none does")
    dist = None
    if obj.get("dist") is not None:
        d = obj["dist"]
        if not isinstance(d, list):
            raise ParseError("'dist' must be a list")
        if d and isinstance(d[0], list):
            rows = [[str(v) for v in row] for row in d]
            dist = _lower_triangle(rows, len(pts), "dist")
        else:
            want = len(pts) * (len(pts) - 1) // 2
            if len(d) != want:
                raise ParseError(f"'dist' must have {want} condensed entries")
            dist = np.asarray([_float(v, "dist") for v in d], dtype=float)
    if dist is None and not coords:
        raise ParseError("dataset needs 'dist' or per-point 'coords'")
    return _space(ids, f, dist, np.asarray(coords) if coords else None)


def dataset_to_json(X: AugmentedMetricSpace) -> dict:
    """Canonical JSON form; parsing it back reproduces the space exactly."""
    points = []
    for k, pid in enumerate(X.ids):
        p = {"id": pid, "f": float(X.f[k])}
        if X.coords is not None:
            p["coords"] = [float(c) for c in X.coords[k]]
        points.append(p)
    dist = [
        [float(v) for v in X.dist[j * (j - 1) // 2 : j * (j + 1) // 2]]
        for j in range(1, X.n)
    ]
    return {"points": points, "dist": dist}


def load_dataset(path, dist_path=None) -> AugmentedMetricSpace:
    """Load a dataset file: points CSV (with optional coordinate columns and
    optional separate distance CSV) or the JSON form."""
    p = Path(path)
    if not p.exists():
        raise ParseError(f"no such file: {path}")
    if p.suffix.lower() == ".json":
        try:
            obj = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ParseError(f"{path}: {e}") from None
        if dist_path is not None:
            raise ParseError("--dist applies only to CSV datasets")
        return dataset_from_json(obj)

    rows = _read_rows(p)
    if not rows:
        raise ParseError(f"{path}: empty dataset")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "id" or header[1] != "f":
        raise ParseError(f"{path}: header must start with 'id,f'")
    dim = len(header) - 2
    ids, f, coords = [], [], []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}: line {k}: expected {len(header)} fields")
        ids.append(row[0].strip())
        f.append(_float(row[1], f"{path}: line {k}: f"))
        if dim:
            coords.append([_float(c, f"{path}: line {k}: coords") for c in row[2:]])
    dist = None
    if dist_path is not None:
        dp = Path(dist_path)
        if not dp.exists():
            raise ParseError(f"no such file: {dist_path}")
        dist = _lower_triangle(_read_rows(dp), len(ids), str(dist_path))
    if dist is None and not dim:
        raise ParseError(f"{path}: no coordinate columns, so --dist is required")
    return _space(ids, f, dist, np.asarray(coords) if dim else None)


# --------------------------------------------------------------------------
# staircode documents


def _u_to_json(u: float):
    return "inf" if u == INF else u


def _u_from_json(v, what: str) -> float:
    if v == "inf":
        return INF
    if isinstance(v, (int, float)) and math.isfinite(v) and not isinstance(v, bool):
        return float(v)
    raise ParseError(f"{what}: envelope value must be a number or 'inf'")


def staircode_to_document(S: Staircode) -> dict:
    """The canonical on-disk/HTTP form of a decorated staircode."""
    if not S.decorated:
        raise InvariantError("documents require a decorated staircode")
    gb = graded_betti(S)
    betti = {}
    for i in range(3):
        pairs = []
        for (s, e), c in sorted(gb.real(i).items()):
            pairs.extend([[s, e]] * c)
        betti[f"b{i}"] = pairs
    return {
        "order": list(S.order_ids),
        "staircases": [
            {
                "id": ds.base.owner,
                "birth_sigma": ds.base.birth_sigma,
                "steps": [{"sigma": s, "u": _u_to_json(u)} for s, u in ds.base.steps],
                "conqueror": [
                    {"sigma_from": sf, "id": cid} for sf, cid in ds.conqueror
                ],
            }
            for ds in S.entries
        ],
        "betti": betti,
        "meta": dict(S.meta),
    }


def document_to_staircode(doc) -> Staircode:
    """Rebuild the in-memory staircode (no rank data) from a document."""
    if not isinstance(doc, dict):
        raise ParseError("staircode document must be a JSON object")
    for key in ("order", "staircases", "meta"):
        if key not in doc:
            raise ParseError(f"staircode document is missing {key!r}")
    entries = []
    try:
        for sc in doc["staircases"]:
            steps = tuple(
                (
                    _float(st["sigma"], "step sigma"),
                    _u_from_json(st["u"], f"staircase {sc['id']}"),
                )
                for st in sc["steps"]
            )
            runs = tuple(
                (_float(r["sigma_from"], "conqueror sigma_from"), str(r["id"]))
                for r in sc["conqueror"]
            )
            base = Staircase(str(sc["id"]), _float(sc["birth_sigma"], "birth"), steps)
            entries.append(DecoratedStaircase(base, runs))
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed staircase entry: {e}") from None
    except ValueError as e:
        raise InvariantError(str(e)) from None
    try:
        return Staircode(entries, tuple(str(x) for x in doc["order"]), None, doc["meta"])
    except ValueError as e:
        raise InvariantError(str(e)) from None


def load_document(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"no such file: {path}")
    try:
        return json.loads(p.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"{path}: {e}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _bar_to_json(bar: Bar) -> dict:
    return {
        "owner": bar.owner,
        "birth_t": bar.birth_t,
        "death_t": _u_to_json(bar.death_t),
        "birth_grade": list(bar.birth_grade) if bar.birth_grade else None,
        "death_grade": list(bar.death_grade) if bar.death_grade else None,
    }


def _treegram_to_json(t: Treegram) -> dict:
    return {
        "leaves": list(t.leaves),
        "births": list(t.births),
        "merges": [
            {"height": m.height, "left": m.left, "right": m.right} for m in t.merges
        ],
    }


def _parse_line_spec(text: str) -> LineQuery:
    try:
        a, b = text.split(":")
        s0, e0 = (float(v) for v in a.split(","))
        s1, e1 = (float(v) for v in b.split(","))
    except ValueError:
        raise ParseError(
            f"line must look like 'sigma1,eps1:sigma2,eps2', got {text!r}"
        ) from None
    try:
        return LineQuery((s0, e0), (s1, e1))
    except ValueError as e:
        raise ParseError(str(e)) from None


def _parse_grade_spec(text: str) -> Grade:
    try:
        s, e = (float(v) for v in text.split(","))
    except ValueError:
        raise ParseError(f"grade must look like 'sigma,eps', got {text!r}") from None
    try:
        return Grade(s, e)
    except ValueError as e:
        raise ParseError(str(e)) from None


# --------------------------------------------------------------------------
# oracle verification


def _match(cond: bool, what: str) -> None:
    if not cond:
        raise OracleMismatch(what)


def _same_staircodes(a: Staircode, b: Staircode) -> None:
    _match(a.order_ids == b.order_ids, "point orders differ")
    for da, db in zip(a.entries, b.entries):
        _match(da.base == db.base, f"staircase of {da.base.owner} differs")
    if a.rank_steps is not None and b.rank_steps is not None:
        _match(a.rank_steps == b.rank_steps, "rank envelopes differ")


def _random_line(rng: random.Random, X: AugmentedMetricSpace) -> LineQuery:
    s_lo, s_hi = float(X.f.min()) - 1.0, float(X.f.max()) + 1.0
    e_hi = float(X.dist.max()) * 1.2 + 1.0 if X.dist.size else 2.0
    anchor = (rng.uniform(s_lo, s_hi), rng.uniform(-0.2 * e_hi, e_hi))
    angle = rng.uniform(0.05, math.pi / 2 - 0.05)
    p1 = (anchor[0] + math.cos(angle), anchor[1] + math.sin(angle))
    return LineQuery(anchor, p1)


def oracle_verify(X: AugmentedMetricSpace, n_lines: int = 20, seed: int = 0) -> None:
    """Cross-check the fast pipeline against the brute-force oracle; raises
    OracleMismatch on the first disagreement."""
    S = compute_staircode(X)
    ordering = S.ordering
    grid = GradeGrid(X, ordering)
    _same_staircodes(S, oracle_staircode(X, ordering, grid))

    gb = graded_betti(S)
    ob = oracle_betti(X, ordering, grid)
    for i in range(3):
        _match(gb.betti(i) == ob.betti(i), f"graded Betti b{i} differs")

    eps_levels: list[tuple[float, int]] = [(0.0, 0)]
    m = X.n * (X.n - 1) // 2
    for r in range(1, m + 1):
        i, j = ordering.pair_at_rank(r)
        v = X.d(i, j)
        if eps_levels and eps_levels[-1][0] == v:
            eps_levels[-1] = (v, r)
        else:
            eps_levels.append((v, r))
    for lv, end in ordering.f_levels:
        for ev, r in eps_levels:
            want = grid.count(end + 1, r)
            g = Grade(lv, ev)
            _match(
                dimension_function(S, g) == want,
                f"staircode dimension at ({lv},{ev}) != {want}",
            )
            _match(
                dimension_function(gb, g) == want,
                f"Betti dimension at ({lv},{ev}) != {want}",
            )

    idx = build_index(S)
    rng = random.Random(seed)
    for _ in range(n_lines):
        L = _random_line(rng, X)
        fast = query_barcode(idx, L)
        _match(fast == query_barcode(S, L), "index and linear scan disagree")
        _match(fast == oracle_line_barcode(X, ordering, L), f"bars differ on {L.p0}:{L.p1}")


# --------------------------------------------------------------------------
# HTTP server


class StaircodeServer(ThreadingHTTPServer):
    """Read-only JSON API over an immutable staircode document."""

    daemon_threads = True

    def __init__(self, document: dict, port: int = 0, static_dir=None):
        self.document = document
        self.staircode = document_to_staircode(document)
        self.index = build_index(self.staircode)
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        super().__init__(("127.0.0.1", port), _Handler)


class _Handler(BaseHTTPRequestHandler):
    server: StaircodeServer
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, body: bytes, ctype: str) -> None:
        self.send_response(code)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _json(self, obj, code: int = 200) -> None:
        self._send(code, (_dumps(obj) + "\n").encode(), "application/json")

    def _bad(self, message: str) -> None:
        self._json({"error": message}, 400)

    def _line_param(self, params) -> LineQuery | None:
        raw = params.get("l")
        if not raw:
            self._bad("missing query parameter l=sigma1,eps1:sigma2,eps2")
            return None
        try:
            return _parse_line_spec(raw[0])
        except ParseError as e:
            self._bad(str(e))
            return None

    def do_GET(self):  # noqa: N802 (http.server API)
        url = urlsplit(self.path)
        route = url.path
        params = parse_qs(url.query)
        srv = self.server
        if route == "/api/meta":
            self._json(srv.document["meta"])
        elif route == "/api/staircode":
            self._json(srv.document)
        elif route == "/api/betti":
            self._json(srv.document["betti"])
        elif route == "/api/barcode":
            L = self._line_param(params)
            if L is not None:
                bars = query_barcode(srv.index, L)
                self._json({"bars": [_bar_to_json(b) for b in bars]})
        elif route == "/api/treegram":
            L = self._line_param(params)
            if L is not None:
                self._json(_treegram_to_json(query_treegram(srv.index, L)))
        elif route == "/api/dim":
            raw = params.get("g")
            if not raw:
                self._bad("missing query parameter g=sigma,eps")
                return
            try:
                g = _parse_grade_spec(raw[0])
            except ParseError as e:
                self._bad(str(e))
                return
            self._json({"dim": dimension_function(srv.staircode, g)})
        elif route.startswith("/api/"):
            self._json({"error": f"unknown route {route}"}, 404)
        else:
            self._static(route)

    def _static(self, route: str) -> None:
        base = self.server.static_dir
        if base is None:
            self._json({"error": "no static bundle configured"}, 404)
            return
        rel = route.lstrip("/") or "index.html"
        target = (base / rel).resolve()
        if not target.is_relative_to(base) or not target.is_file():
            self._json({"error": "not found"}, 404)
            return
        ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
        self._send(200, target.read_bytes(), ctype)


def make_server(document: dict, port: int = 0, static_dir=None) -> StaircodeServer:
    """Bind (port 0 = ephemeral) without starting the serve loop."""
    return StaircodeServer(document, port, static_dir)


# --------------------------------------------------------------------------
# CLI


def _load_order(path) -> list[str]:
    p = Path(path)
    if not p.exists():
        raise ParseError(f"no such file: {path}")
    text = p.read_text().strip()
    if text.startswith("["):
        try:
            return [str(x) for x in json.loads(text)]
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: {e}") from None
    return [line.strip() for line in text.splitlines() if line.strip()]


def _compute_from_args(args) -> Staircode:
    X = load_dataset(args.dataset, getattr(args, "dist", None))
    try:
        if getattr(args, "order", None):
            ids = _load_order(args.order)
            if sorted(ids) != sorted(X.ids):
                raise ParseError("--order must list every point id exactly once")
            return compute_staircode_ordered(X, ids, args.mode)
        return compute_staircode(X, args.mode)
    except ValueError as e:
        raise InvariantError(str(e)) from None


def _cmd_compute(args) -> int:
    doc = staircode_to_document(_compute_from_args(args))
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_betti(args) -> int:
    doc = load_document(args.staircode)
    if "betti" not in doc:
        raise ParseError("document has no betti block")
    sys.stdout.write(_dumps(doc["betti"]) + "\n")
    return 0


def _cmd_dim(args) -> int:
    S = document_to_staircode(load_document(args.staircode))
    g = _parse_grade_spec(args.grade)
    sys.stdout.write(f"{dimension_function(S, g)}\n")
    return 0


def _cmd_query(args) -> int:
    S = document_to_staircode(load_document(args.staircode))
    L = _parse_line_spec(args.line)
    if args.treegram:
        out = _treegram_to_json(query_treegram(S, L))
    else:
        out = {"bars": [_bar_to_json(b) for b in query_barcode(S, L)]}
    sys.stdout.write(_dumps(out) + "\n")
    return 0


def _cmd_check(args) -> int:
    X = load_dataset(args.dataset, args.dist)
    try:
        S = compute_staircode(X)
        ok, witness = check_constant_conqueror(X, S.ordering)
        report = {
            "ultrametric": check_ultrametric(X),
            "constant_conqueror": ok,
            "witness": witness,
            "necessary_test": decomposability_necessary_test(S),
        }
    except ValueError as e:
        raise InvariantError(str(e)) from None
    sys.stdout.write(_dumps(report) + "\n")
    return 0


def _cmd_oracle_verify(args) -> int:
    X = load_dataset(args.dataset, args.dist)
    try:
        oracle_verify(X, n_lines=args.lines, seed=args.seed)
    except ValueError as e:
        raise InvariantError(str(e)) from None
    sys.stdout.write("ok\n")
    return 0


def _cmd_bench(args) -> int:
    rng = np.random.default_rng(args.seed)
    for n in args.n:
        coords = rng.uniform(0.0, 100.0, size=(n, args.dim))
        f = rng.uniform(0.0, 10.0, size=n)
        X = AugmentedMetricSpace.from_points([f"p{k}" for k in range(n)], f, coords)
        t0 = time.perf_counter()
        S = compute_staircode(X, "euclidean")
        t1 = time.perf_counter()
        idx = build_index(S)
        t2 = time.perf_counter()
        lines = [_random_line(random.Random(args.seed + k), X) for k in range(args.queries)]
        t3 = time.perf_counter()
        total = 0
        for L in lines:
            total += len(query_barcode(idx, L))
        t4 = time.perf_counter()
        sys.stdout.write(
            _dumps(
                {
                    "n": n,
                    "dim": args.dim,
                    "compute_s": round(t1 - t0, 4),
                    "index_s": round(t2 - t1, 4),
                    "query_ms": round((t4 - t3) / max(1, len(lines)) * 1000.0, 4),
                    "bars_reported": total,
                }
            )
            + "\n"
        )
    return 0


def _cmd_serve(args) -> int:
    doc = load_document(args.staircode)
    port = args.port
    if port is None:
        port = int(os.environ.get("STAIRCODE_PORT", "8080"))
    server = make_server(doc, port, args.static)
    host, bound = server.server_address[:2]
    sys.stderr.write(f"serving on http://{host}:{bound}\n")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staircode",
        description="Elder-rule staircodes, fibered barcode queries, and graded "
        "Betti numbers of the Rips bifiltration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_dataset(p):
        p.add_argument("dataset", help="points CSV or dataset JSON")
        p.add_argument("--dist", help="lower-triangular distance CSV", default=None)

    p = sub.add_parser("compute", help="compute the decorated staircode")
    add_dataset(p)
    p.add_argument("--mode", choices=("generic", "euclidean"), default=None)
    p.add_argument("--order", help="file listing point ids, oldest first", default=None)
    p.add_argument("-o", "--output", default=None, help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("betti", help="print the graded Betti support of a staircode")
    p.add_argument("staircode")
    p.set_defaults(func=_cmd_betti)

    p = sub.add_parser("dim", help="dimension (component count) at a grade")
    p.add_argument("staircode")
    p.add_argument("--grade", required=True, help="sigma,eps")
    p.set_defaults(func=_cmd_dim)

    p = sub.add_parser("query", help="fibered barcode or treegram along a line")
    p.add_argument("staircode")
    p.add_argument("--line", required=True, help="sigma1,eps1:sigma2,eps2")
    p.add_argument("--treegram", action="store_true")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("check", help="ultrametric / constant-conqueror / decomposability report")
    add_dataset(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("oracle-verify", help="cross-check the pipeline against the brute-force oracle")
    add_dataset(p)
    p.add_argument("--lines", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle_verify)

    p = sub.add_parser("bench", help="timing on random Euclidean clouds")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=int, default=100)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="serve the query API (and optional static UI)")
    p.add_argument("staircode")
    p.add_argument("--port", type=int, default=None, help="default $STAIRCODE_PORT or 8080")
    p.add_argument("--static", default=None, help="directory with the UI bundle")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
