"""The PC-X3C -> Euclid-dSR construction, forward synthesis, and cover extraction.

Pipeline: scale the orthogonal layout, replace element/set vertices by their
gadgets, lay agent chains along the edge routes (the epsilon ladder absorbs
the exact path length, with the bend landing on a gamma agent), hang an
enforcement tail and a star gadget off every chain's set end, then add the
garbage collectors that make the agent count divisible by d.  A built-in
post-validator re-measures every constrained distance and the cross-gadget
clearances; ``reduce`` retries at larger integer scales until it passes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Agent, Instance, Point
from .errors import ChainFitError, ContractViolation, ReductionError
from .gadgets import (
    PHI,
    Pose,
    Star3Params,
    StarDParams,
    StarInstance,
    blob,
    circle_intersections,
    garbage_size,
    rot,
    star3_frame,
    star_solution_groups,
    stard_frame,
    unit,
    validate_star3,
    validate_starD,
)
from .layout import OrthogonalLayout, scale_layout
from .reporting import Report
from .x3c import Cover, X3CInstance, validate_x3c
from .layout import validate_layout as _validate_layout
from .x3c import associated_graph

TRI_ELEMENT = 8.0  # element leaves: pairwise distance
SET_SIDE_3 = 10.0  # set triangle side for d=3
SET_RADIUS_GE4 = 10.0  # set corners sit at exactly 10 from the W cluster
JUNK_CLEARANCE = 220.0  # parked garbage triples: clear of a full tail+star footprint


@dataclass(frozen=True)
class ReductionParams:
    L: float = 200.0
    epsilon: float = 5e-4
    max_scale_bumps: int = 48

    def epsilon_d(self, d: int) -> float:
        return 1.0 / (2000.0 * d)

    def near_zero(self, d: int) -> float:
        # d>=4 constraints bind cluster members individually; spreads must
        # stay below the 1e-6 audit tolerance with first-order slack
        return 1e-4 if d == 3 else 1e-8


# ---------------------------------------------------------------------------
# chain sizing and the epsilon ladder


def chain_length(L1: float, L2: float) -> int:
    """Largest n with sum_{z=1..2n} (8 + 0.01 z) <= L1 + L2."""
    total = L1 + L2
    if total < 16.03:
        raise ContractViolation(f"path of length {total} is too short for any chain")
    n = 1
    while True:
        m = n + 1
        if 16 * m + 0.01 * m * (2 * m + 1) <= total:
            n = m
        else:
            return n


def epsilon_bounds(n_hat: int) -> tuple[float, float]:
    lb = 2 * (2 * n_hat - 1) / (2 * n_hat + 1)
    ub = 2 * (2 * n_hat - 1) / (2 * n_hat)
    return lb, ub


def _fill_below(count: int, total: float, hi: float) -> list[float] | None:
    """Strictly increasing positive values, each < hi, summing to total.

    Affine profile around the mean; the slope is backed off from both the
    positivity and the ceiling bound, which also guarantees strictness.
    """
    if count == 0:
        return [] if abs(total) < 1e-12 else None
    mu = total / count
    if not (0 < mu < hi):
        return None
    if count == 1:
        return [mu]
    s_cap = min(2 * (hi - mu), 2 * mu) / (count - 1)
    s = 0.5 * s_cap
    if s <= 1e-12:
        return None
    return [mu + s * (z - (count + 1) / 2) for z in range(1, count + 1)]


def _fill_run(count: int, total: float, lo: float, end: float) -> list[float] | None:
    """Strictly increasing values in (lo, end], last exactly ``end``, given sum."""
    if count == 0:
        return [] if abs(total) < 1e-12 else None
    if count == 1:
        return [end] if abs(total - end) < 1e-9 else None
    rest = total - end
    mu = rest / (count - 1)
    if not (lo < mu < end):
        return None
    s_cap = min(2 * (end - mu), 2 * (mu - lo)) / max(count - 2, 1)
    s = 0.4 * s_cap
    if s <= 1e-12:
        return None
    vals = [mu + s * (z - count / 2) for z in range(1, count)]
    return vals + [end]


def build_epsilons(
    n_hat: int,
    path_length: float,
    epsilon: float,
    prefix_length: float | None = None,
) -> tuple[list[float], int | None]:
    """Strictly increasing epsilon ladder whose gaps sum to ``path_length``.

    The last value is pinned at 2 - epsilon and the second-to-last must land
    in the band [2(2n-1)/(2n+1), 2(2n-1)/(2n)].  With a bend, the cumulative
    gap length hits ``prefix_length`` exactly at an even station, so the
    bending point coincides with a gamma agent.
    """
    if n_hat < 1:
        raise ChainFitError("n_hat must be >= 1")
    last = 2.0 - epsilon
    lb, ub = epsilon_bounds(n_hat)
    F = path_length - 16.0 * n_hat - last
    if n_hat == 1:
        if prefix_length is not None:
            raise ChainFitError("a one-link chain cannot carry a bend")
        if not (lb <= F <= ub):
            raise ChainFitError(f"n=1 needs eps_1 in [{lb:.4f}, {ub:.4f}], got {F:.4f}")
        return [F, last], None
    K = 2 * n_hat - 1
    if F <= 0:
        raise ChainFitError(f"path too short for n_hat={n_hat}")

    if prefix_length is None:
        y_lo = max(lb, F / K * (1 + 1e-9))
        y_hi = min(ub, F * (1 - 1e-9))
        if y_lo > y_hi:
            raise ChainFitError(f"no ladder for n_hat={n_hat}, length {path_length:.3f}")
        y = 0.5 * (y_lo + y_hi)
        body = _fill_below(K - 1, F - y, y)
        if body is None:
            raise ChainFitError(f"no ladder for n_hat={n_hat}, length {path_length:.3f}")
        return body + [y, last], None

    # bend: prefix indices 1..2z' carry exactly prefix_length of arc
    best_zp = prefix_length / path_length * n_hat
    order = sorted(range(1, n_hat), key=lambda zp: (abs(zp - best_zp), zp))
    for zp in order:
        m = 2 * zp
        q = K - m
        F_pre = prefix_length - 16.0 * zp
        F_suf = F - F_pre
        if F_pre <= 0 or F_suf <= 0:
            continue
        y_lo = max(lb, F_suf / q * (1 + 1e-9))
        y_hi = min(ub, F_suf * (1 - 1e-9))
        if y_lo > y_hi:
            continue
        y = 0.5 * (y_lo + y_hi)
        em_lo = F_pre / m
        em_hi = min(F_pre, y)
        if q >= 2:
            em_hi = min(em_hi, (F_suf - y) / (q - 1))
        if em_lo >= em_hi:
            continue
        em = 0.5 * (em_lo + em_hi)
        prefix = _fill_run(m, F_pre, 0.0, em)
        suffix = _fill_run(q, F_suf, em, y)
        if prefix is None or suffix is None:
            continue
        eps = prefix + suffix + [last]
        if any(e2 - e1 <= 0 for e1, e2 in zip(eps, eps[1:])):
            continue
        if abs(sum(eps[:m]) + 16.0 * zp - prefix_length) > 1e-7:
            continue
        return eps, zp
    raise ChainFitError(
        f"no ladder with a gamma bend for n_hat={n_hat}, legs {prefix_length:.3f}/"
        f"{path_length - prefix_length:.3f}"
    )


# ---------------------------------------------------------------------------
# small vector helpers


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _mul(a, s):
    return (a[0] * s, a[1] * s)


def _norm(a):
    return math.hypot(*a)


def _perp(a):
    return (-a[1], a[0])


class _Polyline:
    def __init__(self, pts: list[tuple[float, float]]):
        self.pts = pts
        self.cum = [0.0]
        for a, b in zip(pts, pts[1:]):
            self.cum.append(self.cum[-1] + _norm(_sub(b, a)))

    @property
    def length(self) -> float:
        return self.cum[-1]

    def at(self, s: float) -> tuple[tuple[float, float], tuple[float, float]]:
        """Point and unit direction at arclength s."""
        for k in range(len(self.pts) - 1):
            if s <= self.cum[k + 1] + 1e-12:
                seg = _sub(self.pts[k + 1], self.pts[k])
                u = _mul(seg, 1.0 / _norm(seg))
                return _add(self.pts[k], _mul(u, s - self.cum[k])), u
        seg = _sub(self.pts[-1], self.pts[-2])
        u = _mul(seg, 1.0 / _norm(seg))
        return self.pts[-1], u


def _fit_triangle(center, dirs: list[tuple[float, float]], radius: float):
    """Corner directions for a gadget triangle matched to outgoing edge rays.

    Tries all assignments of the three 120-degree corners to the given unit
    directions and picks the rotation with the least total angular error.
    Returns (corner position list aligned with dirs, rotation angle).
    """
    target = [math.atan2(d[1], d[0]) for d in dirs]
    best = None
    for perm in itertools.permutations(range(3)):
        # corner perm[k] serves dirs[k]; optimal rotation is the circular mean
        rel = [target[k] - 2 * math.pi * perm[k] / 3 for k in range(3)]
        sx = sum(math.cos(r) for r in rel)
        sy = sum(math.sin(r) for r in rel)
        theta = math.atan2(sy, sx)
        err = 0.0
        for k in range(3):
            d = (target[k] - (theta + 2 * math.pi * perm[k] / 3) + math.pi) % (2 * math.pi) - math.pi
            err += abs(d)
        if best is None or err < best[0]:
            best = (err, perm, theta)
    _, perm, theta = best
    corners = []
    for k in range(3):
        ang = theta + 2 * math.pi * perm[k] / 3
        corners.append(_add(center, (radius * math.cos(ang), radius * math.sin(ang))))
    return corners, theta


# ---------------------------------------------------------------------------
# certificate


@dataclass
class ReductionCertificate:
    d: int
    epsilon: float
    epsilon_d: float
    near_zero: float
    L: float
    scale: int
    elements: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    edges: dict = field(default_factory=dict)
    junk: list = field(default_factory=list)
    symmetries: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "epsilon": self.epsilon,
            "epsilon_d": self.epsilon_d,
            "near_zero": self.near_zero,
            "L": self.L,
            "scale": self.scale,
            "elements": self.elements,
            "sets": self.sets,
            "edges": self.edges,
            "junk": self.junk,
            "symmetries": self.symmetries,
            "counts": self.counts,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ReductionCertificate":
        return ReductionCertificate(
            d=int(doc["d"]),
            epsilon=float(doc["epsilon"]),
            epsilon_d=float(doc["epsilon_d"]),
            near_zero=float(doc["near_zero"]),
            L=float(doc["L"]),
            scale=int(doc["scale"]),
            elements=doc["elements"],
            sets=doc["sets"],
            edges=doc["edges"],
            junk=doc["junk"],
            symmetries=doc["symmetries"],
            counts=doc["counts"],
        )


# ---------------------------------------------------------------------------
# the construction


class _Builder:
    def __init__(self, x3c: X3CInstance, layout: OrthogonalLayout, d: int,
                 params: ReductionParams, scale: int):
        self.x3c = x3c
        self.layout = layout.scaled(scale)
        self.d = d
        self.params = params
        self.scale = scale
        self.eps = params.epsilon
        self.eps_d = params.epsilon_d(d)
        self.nz = params.near_zero(d)
        self.agents: dict[str, tuple[float, float]] = {}
        self.tags: dict[str, str] = {}
        self.cert = ReductionCertificate(
            d=d, epsilon=self.eps, epsilon_d=self.eps_d, near_zero=self.nz,
            L=float(params.L), scale=scale,
        )
        self.obstacles: list[tuple[tuple[float, float], tuple[float, float]]] = [
            (tuple(map(float, a)), tuple(map(float, b)))
            for e in self.layout.edges
            for a, b in self.layout.segments(e)
        ]
        self.placed_probes: list[tuple[float, float]] = []

    # -- small helpers

    def put(self, aid: str, xy: tuple[float, float], tag: str) -> str:
        if aid in self.agents:
            raise ReductionError(f"duplicate agent id {aid}")
        self.agents[aid] = xy
        self.tags[aid] = tag
        return aid

    def edge_endpoints(self, route) -> tuple[str, str]:
        """(element vertex, set vertex) names for a layout edge."""
        if route.u.startswith("u"):
            return route.u, route.v
        return route.v, route.u

    # -- phases

    def build(self) -> tuple[Instance, ReductionCertificate]:
        self.star_params = self._star_params()
        leaf_pos, corner_pos = self._place_vertex_gadgets()
        if self.d >= 4:
            self._park_junk()  # before the tails, so they route around the lots
        routes = {}
        for route in self.layout.edges:
            uname, wname = self.edge_endpoints(route)
            i = int(uname[1:])
            j = int(wname[1:])
            routes[(i, j)] = route
        for (i, j) in sorted(routes):
            self._build_edge(i, j, routes[(i, j)], leaf_pos[(i, j)], corner_pos[(j, i)])
        ids = sorted(self.agents)
        agents = [Agent(a, Point(*self.agents[a]), tag=self.tags[a]) for a in ids]
        inst = Instance(self.d, agents)
        self.cert.counts = {
            "agents": len(agents),
            "per_edge_star_tail": {k: len(v["star"]["ids"]) + len(v["F"]) + 1 + len(v.get("Y", [])) + len(v["R"])
                                   for k, v in self.cert.edges.items()},
        }
        return inst, self.cert

    def _star_params(self):
        if self.d == 3:
            return Star3Params(
                dist_5_to_1011=10 + 4 * self.eps, near_zero=self.nz, epsilon=self.eps
            )
        return StarDParams(
            self.d, a=18.0, b=22.6, c=22.7,
            b_prime=22.6 + 1e-6 if self.d % 2 == 0 else None,
            c_prime=22.7 + 1e-6 if self.d % 2 == 0 else None,
            epsilon=self.eps, epsilon_d=self.eps_d, near_zero=self.nz,
        )

    def _place_vertex_gadgets(self):
        """Element triangles (+U clusters) and set triangles (+W clusters)."""
        d = self.d
        leaf_pos: dict[tuple[int, int], tuple[float, float]] = {}
        corner_pos: dict[tuple[int, int], tuple[float, float]] = {}
        incident: dict[str, list] = {v: [] for v in self.layout.vertices}
        for route in self.layout.edges:
            incident[route.u].append(route)
            incident[route.v].append(route)
        r_elem = TRI_ELEMENT / math.sqrt(3.0)
        r_set = SET_SIDE_3 / math.sqrt(3.0) if d == 3 else SET_RADIUS_GE4
        for vname in sorted(self.layout.vertices):
            center = tuple(map(float, self.layout.vertices[vname]))
            dirs = []
            partners = []
            for route in incident[vname]:
                pts = self.layout.route_points(route)
                if route.u != vname:
                    pts = list(reversed(pts))
                seg = _sub(pts[1], pts[0])
                dirs.append(_mul(seg, 1.0 / _norm(seg)))
                other = route.v if route.u == vname else route.u
                partners.append(int(other[1:]))
            corners, theta = _fit_triangle(center, dirs, r_elem if vname.startswith("u") else r_set)
            self.cert.symmetries[vname] = theta
            if vname.startswith("u"):
                i = int(vname[1:])
                leaves = {}
                for k, j in enumerate(partners):
                    aid = self.put(f"e{i}/S{j}", corners[k], f"elem:{i}")
                    leaf_pos[(i, j)] = corners[k]
                    leaves[str(j)] = aid
                if d == 3:
                    center_ids = [self.put(f"e{i}", center, f"elem:{i}")]
                else:
                    center_ids = [
                        self.put(f"e{i}/U{t}", xy, f"elem:{i}")
                        for t, xy in enumerate(blob(center, d - 2, 0.45 * self.nz))
                    ]
                self.cert.elements[str(i)] = {"center": center_ids, "leaves": leaves}
            else:
                j = int(vname[1:])
                corner_ids = {}
                for k, i in enumerate(partners):
                    aid = self.put(f"S{j}/e{i}", corners[k], f"set:{j}")
                    corner_pos[(j, i)] = corners[k]
                    corner_ids[str(i)] = aid
                cluster = []
                if d >= 4:
                    cluster = [
                        self.put(f"S{j}/W{t}", xy, f"set:{j}")
                        for t, xy in enumerate(blob(center, d - 3, 0.45 * self.nz))
                    ]
                self.cert.sets[str(j)] = {
                    "corners": corner_ids,
                    "cluster": cluster,
                    "vertex": [center[0], center[1]],
                }
        return leaf_pos, corner_pos

    def _build_edge(self, i: int, j: int, route, leaf_xy, corner_xy) -> None:
        d = self.d
        eps = self.eps
        nz = self.nz
        pts = self.layout.route_points(route)
        if route.u.startswith("w"):
            pts = list(reversed(pts))
        poly_pts = [leaf_xy] + [tuple(map(float, p)) for p in pts[1:-1]] + [corner_xy]
        poly = _Polyline(poly_pts)
        seg_lengths = [(_norm(_sub(b, a))) for a, b in zip(pts, pts[1:])]
        n_formula = chain_length(seg_lengths[0], seg_lengths[1] if len(seg_lengths) > 1 else 0.0)
        prefix = poly.cum[1] if len(poly_pts) == 3 else None
        fit = None
        for n_hat in range(n_formula, 0, -1):
            try:
                eps_seq, z_bend = build_epsilons(n_hat, poly.length, eps, prefix)
                fit = (n_hat, eps_seq, z_bend)
                break
            except ChainFitError:
                continue
        if fit is None:
            raise ChainFitError(f"edge ({i},{j}): no chain fits path of length {poly.length:.3f}")
        n_hat, eps_seq, z_bend = fit
        pre = f"e{i}/S{j}"
        gaps = [8.0 + e for e in eps_seq]
        cums = list(itertools.accumulate(gaps))
        pairs: list[list[str]] = []
        gammas: list[str] = []
        m = d - 1
        for z in range(1, n_hat + 1):
            s = cums[2 * z - 2]  # pair station: after gap 2z-1
            p, u = poly.at(s)
            v = _perp(u)
            ids = []
            for t in range(m):
                off = 0.9 * nz * (t / (m - 1) - 0.5) if m > 1 else 0.0
                ids.append(self.put(f"{pre}/a[{z:02d}]/{t}", _add(p, _mul(v, off)), f"edge:{i}:{j}"))
            pairs.append(ids)
            if z < n_hat:
                g, _ = poly.at(cums[2 * z - 1])
                gammas.append(self.put(f"{pre}/g[{z:02d}]", g, f"edge:{i}:{j}"))
        # tail + star off the set end: pick the (side, turn) with the most room
        _, u_end = poly.at(poly.length - 1e-9)
        turns = (0, -25, 25, -45, 45, -60, 60) if d == 3 else (0, -20, 20, -40, 40)
        best = None
        for turn_deg in turns:
            for side in (1, -1):
                tail = self._tail_geometry(corner_xy, u_end, side, math.radians(turn_deg))
                score = self._tail_score(i, j, tail)
                if best is None or score > best[0]:
                    best = (score, side, turn_deg, tail)
        _, side, turn_deg, tail = best
        if d >= 4:
            self._place_r(tail)
        edge_entry = self._commit_tail(pre, i, j, tail)
        self.cert.edges[f"{i}:{j}"] = {
            "n_hat": n_hat,
            "epsilons": eps_seq,
            "z_bend": z_bend,
            "leaf": f"e{i}/S{j}",
            "corner": f"S{j}/e{i}",
            "pairs": pairs,
            "gammas": gammas,
            "side": side,
            "turn_deg": turn_deg,
            **edge_entry,
        }

    def _tail_geometry(self, Q, u, side: int, turn: float) -> dict:
        return tail_geometry(self.d, self.eps, self.nz, self.star_params, Q, u, side, turn)


    def _place_r(self, tail: dict) -> None:
        """R garbage blob: anywhere on the star's (ell, 2 ell) band, in the
        direction with the most foreign clearance."""
        g_count = garbage_size(self.d)
        if not g_count:
            return
        ell = self.star_params.ell
        sc = tail["star_center"]
        star_pts = list(tail["star_pos"].values())
        own_tail = list(tail["F"]) + [tail["h"]] + list(tail["Y"])
        best = None
        for deg in range(0, 360, 15):
            dir_out = rot((1.0, 0.0), math.radians(deg))

            def nearest_star(t: float) -> float:
                cand = (sc[0] + t * dir_out[0], sc[1] + t * dir_out[1])
                return min(_norm(_sub(cand, p)) for p in star_pts)

            lo, hi = 1.0, 300.0
            for _ in range(48):  # nearest-star distance grows with t
                mid = 0.5 * (lo + hi)
                if nearest_star(mid) < 1.45 * ell:
                    lo = mid
                else:
                    hi = mid
            t = 0.5 * (lo + hi)
            cand = (sc[0] + t * dir_out[0], sc[1] + t * dir_out[1])
            near = nearest_star(t)
            if not (ell * 1.05 < near < 2 * ell * 0.95):
                continue
            score = min(_point_segment_dist(cand, a, b) for a, b in self.obstacles)
            for q in self.placed_probes:
                score = min(score, _norm(_sub(cand, q)))
            for q in own_tail:
                score = min(score, _norm(_sub(cand, q)))
            if best is None or score > best[0]:
                best = (score, cand)
        if best is None:
            raise ChainFitError("no banded spot for the R garbage blob")
        base = best[1]
        tail["R"] = blob(base, g_count, 0.45 * self.nz)

    def _tail_score(self, i: int, j: int, tail: dict) -> float:
        """Clearance of a candidate tail: min distance from its star (all
        obstacles) and its tail proper (foreign obstacles) to the world."""
        own_route = {
            (tuple(map(float, a)), tuple(map(float, b)))
            for e in self.layout.edges
            if {e.u, e.v} == {f"u{i}", f"w{j}"}
            for a, b in self.layout.segments(e)
        }
        star_pts = list(tail["star_pos"].values()) + list(tail["R"])
        tail_pts = list(tail["F"]) + [tail["h"]] + list(tail["Y"])
        score = math.inf
        for p in star_pts:
            for seg in self.obstacles:
                score = min(score, _point_segment_dist(p, seg[0], seg[1]))
        for p in tail_pts:
            for seg in self.obstacles:
                if seg in own_route:
                    continue
                score = min(score, _point_segment_dist(p, seg[0], seg[1]))
        if self.placed_probes:
            arr = np.array(self.placed_probes)
            for p in star_pts + tail_pts:
                diff = arr - np.array(p)
                score = min(score, float(np.hypot(diff[:, 0], diff[:, 1]).min()))
        return score

    def _commit_tail(self, pre: str, i: int, j: int, tail: dict) -> dict:
        tag = f"edge:{i}:{j}"
        f_ids = [self.put(f"{pre}/F{t}", p, tag) for t, p in enumerate(tail["F"])]
        h_id = self.put(f"{pre}/h", tail["h"], tag)
        y_ids = [self.put(f"{pre}/Y{t}", p, tag) for t, p in enumerate(tail["Y"])]
        star_ids = []
        for aid in sorted(tail["star_pos"]):
            star_ids.append(self.put(f"{pre}/star/{aid}", tail["star_pos"][aid], tag))
        if self.d == 3:
            ordered = [f"{pre}/star/{k}" for k in map(str, range(12))]
            star = {"ids": ordered}
        else:
            roles_world = {role: [f"{pre}/star/{a}" for a in members]
                           for role, members in tail["roles"].items()}
            star = {"ids": star_ids, "roles": roles_world}
        r_ids = [self.put(f"{pre}/R{t}", p, tag) for t, p in enumerate(tail["R"])]
        self.placed_probes.extend(
            list(tail["star_pos"].values()) + list(tail["F"]) + [tail["h"]]
            + list(tail["Y"]) + list(tail["R"])
        )
        return {"F": f_ids, "h": h_id, "Y": y_ids, "star": star, "R": r_ids}

    def _park_junk(self) -> None:
        n = self.x3c.n
        m = len(self.x3c.sets)
        for t in range(m - n):
            park = n + t  # 0-based set index: the last m-n sets host the triples
            vx, vy = self.cert.sets[str(park + 1)]["vertex"]
            best = None
            for dir_xy in ((0.0, -1.0), (0.0, 1.0), (-1.0, 0.0), (1.0, 0.0)):
                cand = (vx + JUNK_CLEARANCE * dir_xy[0], vy + JUNK_CLEARANCE * dir_xy[1])
                score = min(
                    _point_segment_dist(cand, a, b) for a, b in self.obstacles
                )
                if self.placed_probes:
                    score = min(score, min(_norm(_sub(cand, q)) for q in self.placed_probes))
                if best is None or score > best[0]:
                    best = (score, cand)
            base = best[1]
            ids = [
                self.put(f"junk{t}/{k}", xy, f"junk:{t}")
                for k, xy in enumerate(blob(base, 3, 0.45 * self.nz))
            ]
            self.placed_probes.append(base)
            self.cert.junk.append({"ids": ids, "park": park, "pos": [base[0], base[1]]})


def tail_geometry(d: int, eps: float, nz: float, star_params, Q, u, side: int, turn: float) -> dict:
    """Positions for the enforcement tail and star hanging off a chain end.

    f/F sit on the intersection of the anchor circles; everything beyond
    h follows the (possibly turned) tail axis, each hop realized on an
    exact circle around its predecessor.
    """
    v = _mul(_perp(u), side)
    g_last = 8.0 + (2.0 - eps)  # 10 - eps
    M = _add(Q, _mul(u, -g_last))
    mid = _mul(_add(M, Q), 0.5)
    rho_f = 10.0 + 1.5 * eps
    rho_w = rho_f if d == 3 else 10.0 + 15.0 / (d - 1)
    cands = circle_intersections(M, rho_f, Q, rho_w)
    if not cands:
        raise ReductionError("tail anchor circles do not meet")
    f_center = max(cands, key=lambda p: (p[0] - mid[0]) * v[0] + (p[1] - mid[1]) * v[1])
    w_dir = rot(v, turn)  # tail axis: perpendicular, independent of the
    # F anchor's skew (asymmetric circles push it off-center for d >= 4)
    rho_h = (10.0 if d == 3 else 15.0) + 2 * eps
    h_xy = _add(f_center, _mul(w_dir, rho_h))
    m = d - 1
    base_ang = math.atan2(f_center[1] - h_xy[1], f_center[0] - h_xy[0])
    f_pos = []
    for t in range(m):
        off = (0.9 * nz * (t / (m - 1) - 0.5) if m > 1 else 0.0) / rho_h
        ang = base_ang + off
        f_pos.append((h_xy[0] + rho_h * math.cos(ang), h_xy[1] + rho_h * math.sin(ang)))
    out: dict = {"F": f_pos, "h": h_xy}
    if d == 3:
        s_t = math.sqrt((10 + 3 * eps) ** 2 - (nz / 2) ** 2)
        m1011 = _add(h_xy, _mul(w_dir, s_t))
        s_5 = math.sqrt((10 + 4 * eps) ** 2 - (nz / 2) ** 2)
        p5 = _add(m1011, _mul(w_dir, s_5))
        frame = star3_frame(star_params)
        u5 = unit(frame["5"])
        theta = math.atan2(-w_dir[1], -w_dir[0]) - math.atan2(u5[1], u5[0])
        r5 = rot(frame["5"], theta)
        pose = Pose(p5[0] - r5[0], p5[1] - r5[1], theta)
        out["star_pos"] = {str(k): pose.apply(frame[str(k)]) for k in range(12)}
        out["roles"] = None
        out["Y"] = []
        out["R"] = []
        return out
    rho_y = 15.0 + 3 * eps
    base_ang = math.atan2(w_dir[1], w_dir[0])
    y_pos = []
    for t in range(d - 1):
        off = (0.9 * nz * (t / (d - 2) - 0.5)) / rho_y
        ang = base_ang + off
        y_pos.append((h_xy[0] + rho_y * math.cos(ang), h_xy[1] + rho_y * math.sin(ang)))
    out["Y"] = y_pos
    yc = _add(h_xy, _mul(w_dir, rho_y))
    frame, roles = stard_frame(star_params, include_y=False)
    if d % 2 == 1:
        anchor = frame["0"]
        u0 = unit(anchor)
        theta = math.atan2(-w_dir[1], -w_dir[0]) - math.atan2(u0[1], u0[0])
        target = _add(yc, _mul(w_dir, 15.0 + 4 * eps))
    else:
        p0, p1 = frame["0"], frame["1"]
        midf = _mul(_add(p0, p1), 0.5)
        bis = _perp(unit(_sub(p1, p0)))
        if bis[0] * midf[0] + bis[1] * midf[1] < 0:
            bis = _mul(bis, -1.0)
        theta = math.atan2(-w_dir[1], -w_dir[0]) - math.atan2(bis[1], bis[0])
        sep = _norm(_sub(p1, p0))
        anchor = midf
        target = _add(yc, _mul(w_dir, math.sqrt((15.0 + 4 * eps) ** 2 - (sep / 2) ** 2)))
    ra = rot(anchor, theta)
    pose = Pose(target[0] - ra[0], target[1] - ra[1], theta)
    out["star_pos"] = {aid: pose.apply(frame[aid]) for aid in sorted(frame)}
    out["roles"] = roles
    anchor_ids = roles["X1"] + ["1"] if d % 2 == 1 else ["4", "5"]
    apts = [pose.apply(frame[a]) for a in anchor_ids]
    out["r_anchor"] = (sum(p[0] for p in apts) / len(apts), sum(p[1] for p in apts) / len(apts))
    out["star_center"] = pose.apply((0.0, 0.0))
    out["R"] = []
    return out



def _point_segment_dist(p, a, b) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def reduce(
    x3c: X3CInstance,
    layout: OrthogonalLayout,
    d: int = 3,
    params: ReductionParams | None = None,
) -> tuple[Instance, ReductionCertificate]:
    """Build the Euclid-dSR instance realizing the X3C question, post-validated."""
    if d < 3:
        raise ContractViolation("the reduction needs d >= 3")
    params = params or ReductionParams()
    rep = validate_x3c(x3c)
    if not rep.ok:
        raise ReductionError("invalid X3C instance: " + rep.summary())
    lrep = _validate_layout(associated_graph(x3c), layout)
    if not lrep.ok:
        raise ReductionError("invalid layout: " + lrep.summary())
    _, scale_rep = scale_layout(layout, params.L)
    base = scale_rep.factor
    last_error: Exception | None = None
    for bump in range(params.max_scale_bumps):
        scale = base + bump
        try:
            inst, cert = _Builder(x3c, layout, d, params, scale).build()
        except ChainFitError as exc:
            last_error = exc
            continue
        report = validate_reduced(inst, cert)
        if report.ok:
            return inst, cert
        if all("clearance" in c.name or "band" in c.name for c in report.failures):
            last_error = ReductionError(report.summary())
            continue
        raise ReductionError("post-validation failed: " + report.summary())
    raise ReductionError(f"no workable scale in {params.max_scale_bumps} bumps: {last_error}")


# ---------------------------------------------------------------------------
# post-validation: every quoted distance, re-measured


def validate_reduced(inst: Instance, cert: ReductionCertificate) -> Report:
    rep = Report()
    d = cert.d
    eps = cert.epsilon
    nz = cert.near_zero
    tol = 1e-6
    pos = {a.id: (a.pos.x, a.pos.y) for a in inst.agents}

    def dd(a: str, b: str) -> float:
        return math.hypot(pos[a][0] - pos[b][0], pos[a][1] - pos[b][1])

    def close(name, a, b, target):
        rep.add(name, abs(dd(a, b) - target) < tol, f"{dd(a, b):.9f} vs {target:.9f}")

    def in_window(name, a, b, lo, hi):
        val = dd(a, b)
        rep.add(name, lo - 1e-12 <= val < hi, f"{val:.9f} in [{lo:.9f},{hi:.9f})")

    def spread(name, ids, bound):
        worst = max((dd(a, b) for a, b in itertools.combinations(ids, 2)), default=0.0)
        rep.add(name, worst <= bound + 1e-9, f"{worst:.3e}")

    # element gadgets
    for i, entry in sorted(cert.elements.items(), key=lambda kv: int(kv[0])):
        leaves = [entry["leaves"][k] for k in sorted(entry["leaves"], key=int)]
        for a, b in itertools.combinations(leaves, 2):
            close(f"element {i}: leaf-leaf == 8", a, b, TRI_ELEMENT)
        center = entry["center"]
        spread(f"element {i}: center cluster close to zero", center, nz)
        ds = [dd(center[0], leaf) for leaf in leaves]
        rep.add(f"element {i}: center equidistant from leaves", max(ds) - min(ds) < tol,
                f"spread {max(ds) - min(ds):.2e}")
    # set gadgets
    side = SET_SIDE_3 if d == 3 else SET_RADIUS_GE4 * math.sqrt(3.0)
    for j, entry in sorted(cert.sets.items(), key=lambda kv: int(kv[0])):
        corners = [entry["corners"][k] for k in sorted(entry["corners"], key=int)]
        for a, b in itertools.combinations(corners, 2):
            close(f"set {j}: corner-corner == {side:.6f}", a, b, side)
        if d >= 4:
            spread(f"set {j}: W cluster close to zero", entry["cluster"], nz)
            for w in entry["cluster"]:
                for cpt in corners:
                    close(f"set {j}: W to corner == 10", w, cpt, SET_RADIUS_GE4)
    # chains and tails
    for key, e in sorted(cert.edges.items()):
        n_hat = e["n_hat"]
        eps_seq = e["epsilons"]
        lb, ub = epsilon_bounds(n_hat)
        rep.add(f"edge {key}: eps strictly increasing",
                all(b - a > 0 for a, b in zip(eps_seq, eps_seq[1:])), "")
        rep.add(f"edge {key}: eps_last == 2 - epsilon", abs(eps_seq[-1] - (2 - eps)) < 1e-12, "")
        rep.add(f"edge {key}: eps_{2 * n_hat - 1} in band", lb - 1e-9 <= eps_seq[-2] <= ub + 1e-9,
                f"{eps_seq[-2]:.6f} in [{lb:.6f},{ub:.6f}]")
        gammas = [e["leaf"]] + e["gammas"] + [e["corner"]]
        for z in range(1, n_hat + 1):
            pair = e["pairs"][z - 1]
            spread(f"edge {key}: pair {z} close to zero", pair, nz)
            for t, member in enumerate(pair):
                close(f"edge {key}: gap ({z},left) member {t} == 8+eps_{2 * z - 1}",
                      member, gammas[z - 1], 8.0 + eps_seq[2 * z - 2])
                close(f"edge {key}: gap ({z},right) member {t} == 8+eps_{2 * z}",
                      member, gammas[z], 8.0 + eps_seq[2 * z - 1])
        # tail
        F = e["F"]
        h = e["h"]
        spread(f"edge {key}: F close to zero", F, nz)
        rho_h = (10.0 if d == 3 else 15.0) + 2 * eps
        for f in F:
            close(f"edge {key}: h to F == {rho_h:.6f}", h, f, rho_h)
            for x in e["pairs"][-1]:
                in_window(f"edge {key}: F to last pair in [10+eps, 10+2eps)", f, x,
                          10 + eps, 10 + 2 * eps)
            if d == 3:
                in_window(f"edge {key}: F to corner in [10+eps, 10+2eps)", f, e["corner"],
                          10 + eps, 10 + 2 * eps)
            else:
                close(f"edge {key}: F to corner == 10+15/(d-1)", f, e["corner"],
                      10.0 + 15.0 / (d - 1))
        if d == 3:
            s10, s11 = e["star"]["ids"][10], e["star"]["ids"][11]
            s5 = e["star"]["ids"][5]
            close(f"edge {key}: 10 to h == 10+3eps", s10, h, 10 + 3 * eps)
            close(f"edge {key}: 11 to h == 10+3eps", s11, h, 10 + 3 * eps)
            close(f"edge {key}: 5 to 10 == 10+4eps", s5, s10, 10 + 4 * eps)
            close(f"edge {key}: 5 to 11 == 10+4eps", s5, s11, 10 + 4 * eps)
        else:
            Y = e["Y"]
            spread(f"edge {key}: Y close to zero", Y, nz)
            roles = e["star"]["roles"]
            anchors = roles["outer"][:2] if d % 2 == 0 else roles["outer"][:1]
            for y in Y:
                close(f"edge {key}: h to Y == 15+3eps", h, y, 15 + 3 * eps)
                for anchor in anchors:
                    close(f"edge {key}: Y to outer anchor == 15+4eps", y, anchor, 15 + 4 * eps)
            # R band
            if e["R"]:
                spread(f"edge {key}: R close to zero", e["R"], nz)
                star_ids = e["star"]["ids"]
                ell = PHI * 18.0
                lo = min(dd(r, s) for r in e["R"] for s in star_ids)
                rep.add(f"edge {key}: R band (ell, 2ell)", ell < lo < 2 * ell, f"nearest {lo:.4f}")
    # star-internal validation (reuses the gadget validators)
    for key, e in sorted(cert.edges.items()):
        star_agents = tuple(inst.agent(a) for a in e["star"]["ids"])
        if d == 3:
            params = Star3Params(dist_5_to_1011=10 + 4 * eps, near_zero=nz, epsilon=eps)
            star = StarInstance(star_agents, params, Pose(), "star3", {"ids": list(e["star"]["ids"])})
            sub = validate_star3(star, context=inst)
        else:
            params = StarDParams(d, a=18.0, b=22.6, c=22.7,
                                 b_prime=22.6 + 1e-6 if d % 2 == 0 else None,
                                 c_prime=22.7 + 1e-6 if d % 2 == 0 else None,
                                 epsilon=eps, epsilon_d=cert.epsilon_d, near_zero=nz)
            star = StarInstance(star_agents, params, Pose(), "starD", e["star"]["roles"])
            sub = validate_starD(star, context=None)
        for c in sub.checks:
            rep.add(f"edge {key} star: {c.name}", c.passed, c.detail, c.boundary)
    # sizes per the construction
    n = len(cert.elements) // 3
    m = len(cert.sets)
    for key, e in sorted(cert.edges.items()):
        rep.add(f"edge {key}: pair width == d-1", all(len(p) == d - 1 for p in e["pairs"]), "")
        rep.add(f"edge {key}: |F| == d-1", len(e["F"]) == d - 1, f"{len(e['F'])}")
        if d >= 4:
            rep.add(f"edge {key}: |Y| == d-1", len(e["Y"]) == d - 1, f"{len(e['Y'])}")
            rep.add(f"edge {key}: |R| per garbage formula", len(e["R"]) == garbage_size(d),
                    f"{len(e['R'])} vs {garbage_size(d)}")
    if d >= 4:
        rep.add("junk triple count == m - n", len(cert.junk) == m - n, f"{len(cert.junk)} vs {m - n}")
        for t, entry in enumerate(cert.junk):
            spread(f"junk {t}: close to zero", entry["ids"], nz)
    rep.add("agent count divisible by d", len(inst) % d == 0, f"{len(inst)} agents")
    # clearances between units
    rep.checks.extend(_clearance_checks(inst, cert).checks)
    return rep


def _group_min(coords, idx_a, idx_b) -> float:
    if not len(idx_a) or not len(idx_b):
        return math.inf
    a = coords[np.array(idx_a)]
    b = coords[np.array(idx_b)]
    diff = a[:, None, :] - b[None, :, :]
    return float(np.sqrt((diff * diff).sum(axis=2)).min())


def _clearance_checks(inst: Instance, cert: ReductionCertificate) -> Report:
    """Cross-unit distances: stars insulated by ell, garbage by 2*ell, tails
    by their own ladder floors against the set gadget they hang off."""
    rep = Report()
    d = cert.d
    eps = cert.epsilon
    ell_star = PHI * (6.6 if d == 3 else 18.0)
    rho_h = (10.0 if d == 3 else 15.0) + 2 * eps
    coords = inst.coords
    ids = inst.ids
    idx = {aid: k for k, aid in enumerate(ids)}
    for key, e in sorted(cert.edges.items()):
        i, j = key.split(":")
        star_ids = e["star"]["ids"]
        tail_ids = list(e["F"]) + [e["h"]] + list(e.get("Y", []))
        own = set(star_ids) | set(tail_ids) | set(e["R"])
        other = [k for k, aid in enumerate(ids) if aid not in own]
        lo = _group_min(coords, [idx[a] for a in star_ids], other)
        rep.add(f"edge {key}: star clearance > ell", lo > ell_star, f"min {lo:.4f}")
        # tail floors mirror each member's preference ladder: anything not a
        # designed target must stay beyond what that member already has
        own_set = list(cert.sets[j]["corners"].values()) + list(cert.sets[j]["cluster"])
        chain = [a for pair in e["pairs"] for a in pair] + e["gammas"] + [e["leaf"]]
        near_ok = set(own_set) | set(e["pairs"][-1]) | {e["corner"]}
        chain_body = [idx[a] for a in chain if a not in near_ok]
        set_others = [idx[a] for a in own_set if a != e["corner"]]
        foreign = [k for k, aid in enumerate(ids)
                   if aid not in own and aid not in near_ok and aid not in set(chain)]
        fidx = [idx[a] for a in e["F"]]
        lo = _group_min(coords, fidx, chain_body + set_others)
        rep.add(f"edge {key}: F ladder floor (own surroundings)", lo > 10 + eps,
                f"min {lo:.4f} floor {10 + eps:.4f}")
        lo = _group_min(coords, fidx, foreign)
        rep.add(f"edge {key}: F ladder floor (foreign)", lo > 10 + 2 * eps, f"min {lo:.4f}")
        rho_t = (10.0 if d == 3 else 15.0) + 3 * eps
        lo = _group_min(coords, [idx[e["h"]]], chain_body + set_others + foreign)
        rep.add(f"edge {key}: h ladder floor", lo > rho_t, f"min {lo:.4f} floor {rho_t:.4f}")
        if e.get("Y"):
            yidx = [idx[a] for a in e["Y"]]
            lo = _group_min(coords, yidx, chain_body + set_others + foreign)
            rep.add(f"edge {key}: Y ladder floor (b/2)", lo > 22.6 / 2, f"min {lo:.4f}")
        if e["R"]:
            ridx = [idx[a] for a in e["R"]]
            lo = _group_min(coords, ridx, [idx[a] for a in star_ids])
            rep.add(f"edge {key}: R band nearest-star in (ell, 2ell)",
                    ell_star < lo < 2 * ell_star, f"nearest {lo:.4f}")
            exempt = set(star_ids) | set(e["R"])
            foreign = [k for k, aid in enumerate(ids) if aid not in exempt]
            lo = _group_min(coords, ridx, foreign)
            rep.add(f"edge {key}: R foreign clearance > 2ell", lo > 2 * ell_star, f"min {lo:.4f}")
    for t, entry in enumerate(cert.junk):
        jidx = [idx[a] for a in entry["ids"]]
        foreign = [k for k, aid in enumerate(ids) if aid not in set(entry["ids"])]
        lo = _group_min(coords, jidx, foreign)
        rep.add(f"junk {t}: clearance > 2ell", lo > 2 * ell_star, f"min {lo:.4f}")
    # different edges' chains must not approach each other
    edge_keys = sorted(cert.edges)
    chain_idx = {}
    for key in edge_keys:
        e = cert.edges[key]
        members = [a for pair in e["pairs"] for a in pair] + e["gammas"]
        chain_idx[key] = [idx[a] for a in members]
    for k1, k2 in itertools.combinations(edge_keys, 2):
        i1, j1 = k1.split(":")
        i2, j2 = k2.split(":")
        lo = _group_min(coords, chain_idx[k1], chain_idx[k2])
        shared = (i1 == i2) or (j1 == j2)
        floor = ell_star if not shared else 8.0
        rep.add(f"chains {k1} vs {k2} clearance", lo > floor, f"min {lo:.4f} floor {floor:.2f}")
    return rep


# ---------------------------------------------------------------------------
# forward synthesis and cover extraction


def build_solution(cert: ReductionCertificate, cover: Cover) -> list[list[str]]:
    """Coalition groups of the forward-direction matching for a valid cover."""
    d = cert.d
    chosen = set(int(j) + 1 for j in cover.indices)  # 1-based set names
    sets_of_element: dict[int, list[int]] = {}
    for key in cert.edges:
        i, j = map(int, key.split(":"))
        sets_of_element.setdefault(i, []).append(j)
    # cover sanity against the certificate's incidence structure
    covered: dict[int, int] = {}
    for i, js in sets_of_element.items():
        hits = [j for j in js if j in chosen]
        if len(hits) != 1:
            raise ContractViolation(f"cover does not hit element {i} exactly once: {hits}")
        covered[i] = hits[0]
    groups: list[list[str]] = []
    for j, entry in sorted(cert.sets.items(), key=lambda kv: int(kv[0])):
        if int(j) in chosen:
            groups.append(list(entry["corners"].values()) + list(entry["cluster"]))
    for i, entry in sorted(cert.elements.items(), key=lambda kv: int(kv[0])):
        unchosen = [entry["leaves"][k] for k in sorted(entry["leaves"], key=int)
                    if int(k) not in chosen]
        groups.append(list(entry["center"]) + unchosen)
    for key, e in sorted(cert.edges.items()):
        i, j = map(int, key.split(":"))
        n_hat = e["n_hat"]
        gammas = [e["leaf"]] + e["gammas"] + [e["corner"]]
        if j in chosen:
            for z in range(1, n_hat + 1):
                groups.append(e["pairs"][z - 1] + [gammas[z - 1]])
        else:
            for z in range(1, n_hat + 1):
                groups.append(e["pairs"][z - 1] + [gammas[z]])
        groups.append(e["F"] + [e["h"]])
        if d == 3:
            s = e["star"]["ids"]
            groups.append([s[5], s[10], s[11]])
            groups.append([s[1], s[6], s[8]])
            groups.append([s[2], s[3], s[7]])
            groups.append([s[0], s[4], s[9]])
        else:
            roles = dict(e["star"]["roles"])
            roles["Y"] = e["Y"]
            groups.extend(star_solution_groups(roles, d, e["R"]))
    if d >= 4:
        # closest-pair-first assignment: a W cluster and a triple that mutually
        # prefer each other are always matched, so no garbage pair blocks
        unchosen_sets = sorted(int(j) for j in cert.sets if int(j) not in chosen)
        pairs = []
        for j in unchosen_sets:
            vx, vy = cert.sets[str(j)]["vertex"]
            for t in range(len(cert.junk)):
                dist_jt = math.hypot(cert.junk[t]["pos"][0] - vx, cert.junk[t]["pos"][1] - vy)
                pairs.append((dist_jt, j, t))
        pairs.sort()
        used_j: set[int] = set()
        used_t: set[int] = set()
        for _, j, t in pairs:
            if j in used_j or t in used_t:
                continue
            used_j.add(j)
            used_t.add(t)
            groups.append(list(cert.sets[str(j)]["cluster"]) + list(cert.junk[t]["ids"]))
            if len(used_j) == len(unchosen_sets):
                break
    return groups


def extract_cover(cert: ReductionCertificate, groups: list[list[str]]) -> tuple[Cover, list[str]]:
    """Cover read off a matching: sets whose first chain link is shifted.

    Returns the cover and its violation list; the list is empty whenever the
    matching was stable (per the backward-direction argument).
    """
    have = {tuple(sorted(g)) for g in groups}
    chosen: set[int] = set()
    for key, e in sorted(cert.edges.items()):
        i, j = map(int, key.split(":"))
        first_shifted = tuple(sorted(e["pairs"][0] + [e["leaf"]]))
        if first_shifted in have:
            chosen.add(j)
    cover = Cover(tuple(sorted(j - 1 for j in chosen)))
    # violations are judged against the incidence structure in the certificate
    sets_of_element: dict[int, list[int]] = {}
    for key in cert.edges:
        i, j = map(int, key.split(":"))
        sets_of_element.setdefault(i, []).append(j)
    problems = []
    expected = len(cert.elements) // 3
    if len(chosen) != expected:
        problems.append(f"|K|={len(chosen)} != n={expected}")
    for i, js in sorted(sets_of_element.items()):
        hits = [j for j in js if j in chosen]
        if len(hits) != 1:
            problems.append(f"element {i} covered {len(hits)} times")
    return cover, problems
