"""Fibered barcode / treegram queries along positive-slope lines.

A line L enters a staircase either through its bottom edge (birth column at
or left of the point where L crosses eps = 0) or through its left edge (the
staircase's top corner lies strictly above L).  The index answers the first
case with one binary search over birth values and the second with a segment
tree over the top corners whose nodes store peeled upper-hull layers —
reporting the points above L from a hull layer walks a contiguous arc around
the extreme vertex, so query time is proportional to output size (plus
logarithms).  A configuration flag degrades the second case to a linear scan
using the *same* per-point predicate, so both paths report identical sets.

Every geometric comparison is expressed through the line's t_of_sigma /
t_of_eps crossing parameters.  The brute-force oracle uses the same formulas,
which makes bar endpoints (and emptiness decisions) bit-identical across the
index path, the scan path, and the oracle.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .core import INF, Bar, DecoratedStaircase, LineQuery, Staircode
from .treegram import MergeEvent, Treegram, _Replay


@dataclass(frozen=True)
class QueryIndexConfig:
    """Tuning knobs for the query index.

    linear_scan: replace the segment-tree left-edge reporting with a linear
    scan over top corners (identical output, used for cross-checking).
    hull_cutoff: hull layers shorter than this are scanned directly instead
    of peak-searched.
    """

    linear_scan: bool = False
    hull_cutoff: int = 8


def _line_exit(steps, L: LineQuery, t_birth: float):
    """Where L leaves the staircase envelope, searching from the entry step.

    Returns (t_exit, exit_sigma) with exit_sigma set to the exact drop column
    for a vertical exit and None for a horizontal one; t_exit is +inf when L
    stays inside forever (quadrant).  Both binary searches compare monotone
    sequences of crossing parameters, so they are float-safe.
    """
    r = len(steps)
    lo, hi = 0, r - 1  # entry step: last step starting at or before t_birth
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if L.t_of_sigma(steps[mid][0]) <= t_birth:
            lo = mid
        else:
            hi = mid - 1
    k_start = lo

    def crossed_by_end(k: int) -> bool:
        u = steps[k][1]
        if u == INF:
            return False
        t_cross = L.t_of_eps(u)
        if k + 1 < r:
            return t_cross <= L.t_of_sigma(steps[k + 1][0])
        return True

    lo, hi = k_start, r
    while lo < hi:
        mid = (lo + hi) // 2
        if crossed_by_end(mid):
            hi = mid
        else:
            lo = mid + 1
    if lo == r:
        return INF, None
    t_step = L.t_of_sigma(steps[lo][0])
    t_cross = L.t_of_eps(steps[lo][1])
    if t_cross > t_step:
        return t_cross, None
    return t_step, steps[lo][0]


def _bar_for_entry(ds: DecoratedStaircase, L: LineQuery, t_floor: float) -> Bar | None:
    """L ∩ I_x as a half-open bar, or None when the intersection is empty."""
    s = ds.base
    t_birth = max(L.t_of_sigma(s.birth_sigma), t_floor)
    t_exit, _ = _line_exit(s.steps, L, t_birth)
    if t_exit <= t_birth:
        return None
    bg = (L.sigma_at(t_birth), max(0.0, L.eps_at(t_birth)))
    dg = None if t_exit == INF else (L.sigma_at(t_exit), L.eps_at(t_exit))
    return Bar(s.owner, t_birth, t_exit, bg, dg)


class _Layer:
    """One upper-hull layer: columns strictly increasing in sigma."""

    __slots__ = ("sigma", "u", "entry", "slopes")

    def __init__(self, pts):
        self.sigma = [p[0] for p in pts]
        self.u = [p[1] for p in pts]
        self.entry = [p[2] for p in pts]
        self.slopes = [
            (self.u[k + 1] - self.u[k]) / (self.sigma[k + 1] - self.sigma[k])
            for k in range(len(pts) - 1)
        ]


def _peel_layers(points) -> list[_Layer]:
    """Peeled upper hulls of (sigma, u, entry) points; collinear points kept.

    Points sharing a sigma column enter successive layers from the top down,
    so every point lands on exactly one layer and the stopping rule "no point
    of this layer is above L ⇒ none below it is either" holds.
    """
    layers = []
    remaining = sorted(points, key=lambda p: (p[0], -p[1], p[2]))
    while remaining:
        cand = []
        rest = []
        prev = None
        for p in remaining:
            if p[0] != prev:
                cand.append(p)
                prev = p[0]
            else:
                rest.append(p)
        hull: list = []
        dropped = []
        for p in cand:
            while len(hull) >= 2:
                (ax, ay, _), (bx, by, _) = hull[-2], hull[-1]
                if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) > 0.0:
                    dropped.append(hull.pop())
                else:
                    break
            hull.append(p)
        layers.append(_Layer(hull))
        remaining = sorted(rest + dropped, key=lambda p: (p[0], -p[1], p[2]))
    return layers


class _TreeNode:
    __slots__ = ("lo", "hi", "left", "right", "layers")

    def __init__(self, pts, lo, hi):
        self.lo = lo
        self.hi = hi
        self.layers = _peel_layers(pts[lo:hi])
        if hi - lo > 1:
            mid = (lo + hi) // 2
            self.left = _TreeNode(pts, lo, mid)
            self.right = _TreeNode(pts, mid, hi)
        else:
            self.left = self.right = None


class FiberedQueryIndex:
    """Preprocessed staircode answering line queries output-sensitively."""

    def __init__(self, staircode: Staircode, config: QueryIndexConfig | None = None):
        self.staircode = staircode
        self.config = config or QueryIndexConfig()
        births = sorted(
            (ds.base.birth_sigma, e) for e, ds in enumerate(staircode.entries)
        )
        self._birth_keys = [b for b, _ in births]
        self._birth_entries = [e for _, e in births]
        tops = []
        quads = []
        for e, ds in enumerate(staircode.entries):
            s = ds.base
            u1 = s.steps[0][1]
            if u1 == INF:
                quads.append((s.birth_sigma, e))
            else:
                tops.append((s.birth_sigma, u1, e))
        quads.sort()
        self._quad_keys = [b for b, _ in quads]
        self._quad_entries = [e for _, e in quads]
        self._tops = sorted(tops)
        self._top_keys = [p[0] for p in self._tops]
        self._tree = None
        if self._tops and not self.config.linear_scan:
            self._tree = _TreeNode(self._tops, 0, len(self._tops))

    # -- candidate reporting ------------------------------------------------

    def _layer_report(self, layer: _Layer, L, slope_l, out, stats) -> int:
        sig, uu, ee = layer.sigma, layer.u, layer.entry
        m = len(sig)

        def g(k: int) -> float:
            if stats is not None:
                stats["evaluated"] += 1
            return L.t_of_eps(uu[k]) - L.t_of_sigma(sig[k])

        found = 0
        if m <= self.config.hull_cutoff:
            for k in range(m):
                if g(k) > 0.0:
                    out.append(ee[k])
                    found += 1
            return found
        slopes = layer.slopes
        lo, hi = 0, m - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if slopes[mid] <= slope_l:
                hi = mid
            else:
                lo = mid + 1
        peak = lo
        # walk outward from the peak; tolerate up to two rounding dips
        for start, step in ((peak, -1), (peak + 1, 1)):
            k, miss = start, 0
            while 0 <= k < m:
                if g(k) > 0.0:
                    out.append(ee[k])
                    found += 1
                    miss = 0
                else:
                    miss += 1
                    if miss > 2:
                        break
                k += step
        return found

    def _node_report(self, node: _TreeNode, L, slope_l, out, stats) -> None:
        if stats is not None:
            stats["nodes"] += 1
        for layer in node.layers:
            if stats is not None:
                stats["layers"] += 1
            if not self._layer_report(layer, L, slope_l, out, stats):
                break

    def _tree_report(self, node: _TreeNode, lo, L, slope_l, out, stats) -> None:
        if lo <= node.lo:
            self._node_report(node, L, slope_l, out, stats)
            return
        if lo >= node.hi:
            return
        self._tree_report(node.left, lo, L, slope_l, out, stats)
        self._tree_report(node.right, lo, L, slope_l, out, stats)

    def report(self, L: LineQuery, stats: dict | None = None) -> list[int]:
        """Indices of entries whose staircase L may intersect (exact superset:
        every nonempty intersection is reported; reported empties are filtered
        by the bar builder)."""
        t_floor = L.t_of_eps(0.0)
        sigma0 = L.sigma_at(t_floor)
        out = list(self._birth_entries[: bisect_right(self._birth_keys, sigma0)])
        out.extend(self._quad_entries[bisect_right(self._quad_keys, sigma0) :])
        start = bisect_right(self._top_keys, sigma0)
        if start < len(self._tops):
            slope_l = L.unit[1] / L.unit[0]
            if self._tree is None:
                for sig, u1, e in self._tops[start:]:
                    if stats is not None:
                        stats["evaluated"] += 1
                    if L.t_of_eps(u1) - L.t_of_sigma(sig) > 0.0:
                        out.append(e)
            else:
                self._tree_report(self._tree, start, L, slope_l, out, stats)
        if stats is not None:
            stats["reported"] += len(out)
        return out


def build_index(S: Staircode, config: QueryIndexConfig | None = None) -> FiberedQueryIndex:
    """Preprocess a staircode for fibered queries."""
    return FiberedQueryIndex(S, config)


def _as_index(obj) -> FiberedQueryIndex:
    if isinstance(obj, FiberedQueryIndex):
        return obj
    if isinstance(obj, Staircode):
        return FiberedQueryIndex(obj, QueryIndexConfig(linear_scan=True))
    raise TypeError("expected a Staircode or FiberedQueryIndex")


def query_barcode(index, L: LineQuery, verbose: bool = False, stats: dict | None = None):
    """Multiset of half-open bars {{L ∩ I_x}}, empty intersections removed.

    Bars are sorted by (birth parameter, owner id).  With ``verbose`` the
    return value is (bars, owners-with-empty-intersection).
    """
    idx = _as_index(index)
    t_floor = L.t_of_eps(0.0)
    bars = []
    for e in idx.report(L, stats):
        bar = _bar_for_entry(idx.staircode.entries[e], L, t_floor)
        if bar is not None:
            bars.append(bar)
    bars.sort(key=lambda bar: (bar.birth_t, bar.owner))
    if verbose:
        hit = {bar.owner for bar in bars}
        empty = [pid for pid in idx.staircode.order_ids if pid not in hit]
        return bars, empty
    return bars


def query_treegram(index, L: LineQuery) -> Treegram:
    """The fibered treegram over the line parameter, from the decorations.

    Every point contributes a leaf born where L reaches both the point's
    birth column and eps = 0.  Every point except the globally oldest is
    merged into its conqueror's block where L exits its staircase (at the
    leaf birth when the intersection is empty).
    """
    idx = _as_index(index)
    S = idx.staircode
    if not S.decorated:
        raise ValueError("fibered treegrams require a decorated staircode")
    t_floor = L.t_of_eps(0.0)
    leaves = S.order_ids
    births = []
    events = []
    for e, ds in enumerate(S.entries):
        s = ds.base
        t_birth = max(L.t_of_sigma(s.birth_sigma), t_floor)
        births.append(t_birth)
        t_exit, exit_sigma = _line_exit(s.steps, L, t_birth)
        if t_exit == INF:
            continue
        if t_exit <= t_birth:  # empty intersection: conquered on arrival
            t_event = t_birth
            sigma_c = max(s.birth_sigma, L.sigma_at(t_event))
        elif exit_sigma is not None:  # vertical exit: exact drop column
            t_event = t_exit
            sigma_c = exit_sigma
        else:  # horizontal exit
            t_event = t_exit
            sigma_c = max(s.birth_sigma, L.sigma_at(t_event))
        events.append((t_event, e, s.owner, ds.conqueror_at(sigma_c)))
    events.sort(key=lambda ev: (ev[0], ev[1]))
    uf = _Replay(leaves, births)
    merges = []
    for t_event, _, owner, partner in events:
        merges.append(MergeEvent(t_event, uf.name_of(owner), uf.name_of(partner)))
        uf.union(owner, partner)
    return Treegram(leaves, tuple(births), tuple(merges))
