"""Orthogonal grid drawings: representation, legality checks, scaling, naive search.

Each edge is routed with at most one horizontal and one vertical segment
meeting at an optional bend.  Routes may touch only at shared endpoints.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import LayoutError
from .reporting import Report
from .x3c import BipartiteGraph

GridPoint = tuple[int, int]


@dataclass(frozen=True)
class EdgeRoute:
    u: str
    v: str
    bend: GridPoint | None = None

    def key(self) -> tuple[str, str]:
        return tuple(sorted((self.u, self.v)))


@dataclass(frozen=True)
class OrthogonalLayout:
    vertices: dict[str, GridPoint]
    edges: tuple[EdgeRoute, ...]

    def segments(self, route: EdgeRoute) -> list[tuple[GridPoint, GridPoint]]:
        a, b = self.vertices[route.u], self.vertices[route.v]
        if route.bend is None:
            return [(a, b)]
        return [(a, route.bend), (route.bend, b)]

    def route_points(self, route: EdgeRoute) -> list[GridPoint]:
        a, b = self.vertices[route.u], self.vertices[route.v]
        return [a, b] if route.bend is None else [a, route.bend, b]

    def scaled(self, k: int) -> "OrthogonalLayout":
        vs = {n: (p[0] * k, p[1] * k) for n, p in self.vertices.items()}
        es = tuple(
            EdgeRoute(e.u, e.v, None if e.bend is None else (e.bend[0] * k, e.bend[1] * k))
            for e in self.edges
        )
        return OrthogonalLayout(vs, es)


def _axis_aligned(a: GridPoint, b: GridPoint) -> bool:
    return a[0] == b[0] or a[1] == b[1]


def _seg_len(a: GridPoint, b: GridPoint) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _on_segment(p, a, b) -> bool:
    if a[0] == b[0]:
        return p[0] == a[0] and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    if a[1] == b[1]:
        return p[1] == a[1] and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
    return False


def _segments_conflict(s1, s2, shared: set[GridPoint]) -> bool:
    """True when two axis-aligned segments share a point that is not an allowed endpoint."""
    (a1, b1), (a2, b2) = s1, s2
    h1, h2 = a1[1] == b1[1], a2[1] == b2[1]
    lo1x, hi1x = sorted((a1[0], b1[0]))
    lo1y, hi1y = sorted((a1[1], b1[1]))
    lo2x, hi2x = sorted((a2[0], b2[0]))
    lo2y, hi2y = sorted((a2[1], b2[1]))
    if hi1x < lo2x or hi2x < lo1x or hi1y < lo2y or hi2y < lo1y:
        return False
    # overlapping bounding boxes of axis-aligned segments: intersection is a
    # point or a colinear stretch
    if h1 == h2:
        if h1:  # both horizontal
            if a1[1] != a2[1]:
                return False
            lo, hi = max(lo1x, lo2x), min(hi1x, hi2x)
            if lo > hi:
                return False
            if lo == hi and (lo, a1[1]) in shared:
                return False
            return True
        if a1[0] != a2[0]:
            return False
        lo, hi = max(lo1y, lo2y), min(hi1y, hi2y)
        if lo > hi:
            return False
        if lo == hi and (a1[0], lo) in shared:
            return False
        return True
    if not h1:
        (a1, b1), (a2, b2) = (a2, b2), (a1, b1)
        lo1x, hi1x, lo2x, hi2x = lo2x, hi2x, lo1x, hi1x
        lo1y, hi1y, lo2y, hi2y = lo2y, hi2y, lo1y, hi1y
    # now s1 horizontal, s2 vertical
    x, y = a2[0], a1[1]
    if lo1x <= x <= hi1x and lo2y <= y <= hi2y:
        return (x, y) not in shared
    return False


def validate_layout(graph: BipartiteGraph, layout: OrthogonalLayout) -> Report:
    rep = Report()
    missing = [v for v in graph.vertices if v not in layout.vertices]
    rep.add("all vertices placed", not missing, f"missing {missing[:5]}")
    if missing:
        return rep
    pts = list(layout.vertices.values())
    rep.add("vertex positions distinct", len(set(pts)) == len(pts), "")
    want = {tuple(sorted(e)) for e in graph.edges}
    got = {e.key() for e in layout.edges}
    rep.add("edge set matches graph", want == got,
            f"extra {sorted(got - want)[:3]}, missing {sorted(want - got)[:3]}")
    for e in layout.edges:
        segs = layout.segments(e)
        names = f"({e.u},{e.v})"
        ok_axis = all(_axis_aligned(a, b) and a != b for a, b in segs)
        rep.add(f"edge {names} segments axis-aligned and nonzero", ok_axis, "")
        if e.bend is not None and ok_axis:
            (a, m), (m2, b) = segs
            horiz = [s for s in segs if s[0][1] == s[1][1]]
            vert = [s for s in segs if s[0][0] == s[1][0]]
            rep.add(f"edge {names} has one horizontal and one vertical segment",
                    len(horiz) == 1 and len(vert) == 1, "")
    # vertex degree on the grid: a vertex point may be touched only by its own edges
    for name, p in layout.vertices.items():
        deg = graph.degree(name)
        rep.add(f"vertex {name} degree fits the grid", deg <= 4, f"degree {deg}")
        for e in layout.edges:
            if name in (e.u, e.v):
                continue
            for a, b in layout.segments(e):
                if _on_segment(p, a, b):
                    rep.add(f"edge ({e.u},{e.v}) avoids vertex {name}", False, f"passes through {p}")
    # route-pair conflicts
    for e1, e2 in itertools.combinations(layout.edges, 2):
        shared = {layout.vertices[n] for n in (e1.u, e1.v) if n in (e2.u, e2.v)}
        for s1 in layout.segments(e1):
            for s2 in layout.segments(e2):
                if _segments_conflict(s1, s2, shared):
                    rep.add(f"edges ({e1.u},{e1.v}) and ({e2.u},{e2.v}) do not overlap",
                            False, f"{s1} vs {s2}")
    # bend points must not coincide with any vertex
    for e in layout.edges:
        if e.bend is not None and e.bend in set(layout.vertices.values()):
            rep.add(f"edge ({e.u},{e.v}) bend avoids vertices", False, f"bend {e.bend}")
    rep.add("route overlap scan complete", True, "")
    return rep


@dataclass(frozen=True)
class LayoutScaleReport:
    min_segment: float
    min_parallel_gap: float
    factor: int
    scaled_min_segment: float
    scaled_min_gap: float


def _min_parallel_gap(layout: OrthogonalLayout) -> float:
    """Smallest distance between segments of edges that share no endpoint."""
    gap = math.inf
    edges = layout.edges
    for e1, e2 in itertools.combinations(edges, 2):
        if set((e1.u, e1.v)) & set((e2.u, e2.v)):
            continue
        for s1 in layout.segments(e1):
            for s2 in layout.segments(e2):
                gap = min(gap, _segment_distance(s1, s2))
    return gap


def _segment_distance(s1, s2) -> float:
    def pt_seg(p, a, b):
        ax, ay = a
        bx, by = b
        px, py = p
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        if L2 == 0:
            return math.hypot(px - ax, py - ay)
        t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
        return math.hypot(px - (ax + t * dx), py - (ay + t * dy))

    (a1, b1), (a2, b2) = s1, s2
    return min(
        pt_seg(a1, a2, b2),
        pt_seg(b1, a2, b2),
        pt_seg(a2, a1, b1),
        pt_seg(b2, a1, b1),
    )


def scale_layout(layout: OrthogonalLayout, L: float, factor: int | None = None
                 ) -> tuple[OrthogonalLayout, LayoutScaleReport]:
    """Scale by the least integer giving min segment >= L and parallel gap >= 4L.

    ``factor`` overrides the computed multiple (used by callers that need
    extra slack, e.g. to fit chains).
    """
    segs = [s for e in layout.edges for s in layout.segments(e)]
    if not segs:
        raise LayoutError("layout has no edges")
    min_seg = min(_seg_len(a, b) for a, b in segs)
    if min_seg == 0:
        raise LayoutError("degenerate zero-length segment")
    gap = _min_parallel_gap(layout)
    k = max(1, math.ceil(L / min_seg))
    if math.isfinite(gap) and gap > 0:
        k = max(k, math.ceil(4 * L / gap))
    if factor is not None:
        if factor < k:
            raise LayoutError(f"explicit factor {factor} below required minimum {k}")
        k = factor
    scaled = layout.scaled(k)
    return scaled, LayoutScaleReport(min_seg, gap, k, min_seg * k, gap * k)


def naive_layout(graph: BipartiteGraph, grid: int = 6, budget: int = 2_000_000) -> OrthogonalLayout | None:
    """Bounded backtracking search for a legal layout of a tiny graph.

    Vertices are placed in degree-descending order on a ``grid`` x ``grid``
    board; every placement immediately routes all edges into already-placed
    vertices (straight, then either single-bend corner).  Returns None when
    the budget runs out or no layout exists within the board.
    """
    names = sorted(graph.vertices, key=lambda v: (-graph.degree(v), v))
    if len(names) > 14:
        raise LayoutError("naive layout search is for graphs with at most 14 vertices")
    adj = {v: set(graph.neighbors(v)) for v in names}
    cells = [(x, y) for x in range(grid) for y in range(grid)]
    pos: dict[str, GridPoint] = {}
    routes: dict[tuple[str, str], EdgeRoute] = {}
    nodes = [0]

    def ok_against_existing(candidate: EdgeRoute, probe: OrthogonalLayout) -> bool:
        for e in routes.values():
            shared_names = set((candidate.u, candidate.v)) & set((e.u, e.v))
            shared = {probe.vertices[n] for n in shared_names}
            for s1 in probe.segments(candidate):
                for s2 in probe.segments(e):
                    if _segments_conflict(s1, s2, shared):
                        return False
        for name, p in pos.items():
            if name in (candidate.u, candidate.v):
                continue
            for a, b in probe.segments(candidate):
                if _on_segment(p, a, b):
                    return False
        if candidate.bend is not None and candidate.bend in pos.values():
            return False
        for a, b in probe.segments(candidate):
            if a == b or not _axis_aligned(a, b):
                return False
        return True

    def route_options(u: str, v: str) -> list[EdgeRoute]:
        (x1, y1), (x2, y2) = pos[u], pos[v]
        out = []
        if x1 == x2 or y1 == y2:
            out.append(EdgeRoute(u, v, None))
        else:
            out.append(EdgeRoute(u, v, (x2, y1)))
            out.append(EdgeRoute(u, v, (x1, y2)))
        return out

    def place(k: int) -> bool:
        nodes[0] += 1
        if nodes[0] > budget:
            return False
        if k == len(names):
            return True
        v = names[k]
        for cell in cells:
            if cell in pos.values():
                continue
            pos[v] = cell
            pending = [u for u in adj[v] if u in pos]
            chosen: list[tuple[str, str]] = []

            def route_all(idx: int) -> bool:
                if idx == len(pending):
                    return place(k + 1)
                u = pending[idx]
                probe = OrthogonalLayout(dict(pos), tuple(routes.values()))
                for cand in route_options(u, v):
                    if ok_against_existing(cand, probe):
                        routes[cand.key()] = cand
                        chosen.append(cand.key())
                        if route_all(idx + 1):
                            return True
                        routes.pop(chosen.pop())
                return False

            if route_all(0):
                return True
            del pos[v]
        return False

    if place(0):
        return OrthogonalLayout(dict(pos), tuple(routes.values()))
    return None
