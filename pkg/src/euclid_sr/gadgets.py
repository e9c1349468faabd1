"""Star gadgets: the 12-agent pentagon star (d=3) and the cluster stars for d >= 4.

Builders produce exact coordinates from parameter sets; validators re-measure
every constraint numerically, so a build is never trusted blindly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Agent, Instance, Point
from .errors import ConstructionError
from .reporting import Report

PHI = (1.0 + math.sqrt(5.0)) / 2.0  # regular pentagon diagonal / edge


@dataclass(frozen=True)
class Pose:
    """Rigid motion: rotate by ``angle`` (radians) around the origin, then translate."""

    dx: float = 0.0
    dy: float = 0.0
    angle: float = 0.0

    def apply(self, p: tuple[float, float]) -> tuple[float, float]:
        ca, sa = math.cos(self.angle), math.sin(self.angle)
        x, y = p
        return (ca * x - sa * y + self.dx, sa * x + ca * y + self.dy)


def rot(v: tuple[float, float], angle: float) -> tuple[float, float]:
    ca, sa = math.cos(angle), math.sin(angle)
    return (ca * v[0] - sa * v[1], sa * v[0] + ca * v[1])


def unit(v: tuple[float, float]) -> tuple[float, float]:
    n = math.hypot(*v)
    return (v[0] / n, v[1] / n)


def circle_intersections(c1, r1, c2, r2) -> list[tuple[float, float]]:
    """Intersection points of two circles (0, 1, or 2 points)."""
    (x1, y1), (x2, y2) = c1, c2
    d = math.hypot(x2 - x1, y2 - y1)
    if d == 0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx = x1 + a * (x2 - x1) / d
    my = y1 + a * (y2 - y1) / d
    ux, uy = (x2 - x1) / d, (y2 - y1) / d
    p1 = (mx - h * uy, my + h * ux)
    p2 = (mx + h * uy, my - h * ux)
    return [p1] if h == 0 else [p1, p2]


def angle_deg(mid, p, q) -> float:
    """Angle at ``mid`` between rays toward p and q, in degrees."""
    v1 = (p[0] - mid[0], p[1] - mid[1])
    v2 = (q[0] - mid[0], q[1] - mid[1])
    dot = v1[0] * v2[0] + v1[1] * v2[1]
    n = math.hypot(*v1) * math.hypot(*v2)
    return math.degrees(math.acos(max(-1.0, min(1.0, dot / n))))


def blob(center: tuple[float, float], count: int, radius: float) -> list[tuple[float, float]]:
    """``count`` points inside a circle of the given radius around center."""
    if count == 1:
        return [center]
    return [
        (center[0] + radius * math.cos(2 * math.pi * k / count),
         center[1] + radius * math.sin(2 * math.pi * k / count))
        for k in range(count)
    ]


# ---------------------------------------------------------------------------
# d = 3 star


@dataclass(frozen=True)
class Star3Params:
    a: float = 6.6
    b: float = 10.1
    c: float = 10.2
    dist_5_to_1011: float = 9.95
    near_zero: float = 1e-4
    epsilon: float = 5e-4

    @property
    def ell(self) -> float:
        return PHI * self.a

    def violations(self) -> list[str]:
        out = []
        if not (self.a < self.b < self.c < self.ell):
            out.append("a<b<c<ell")
        if not (self.a < self.dist_5_to_1011 < self.b):
            out.append("a<dist(5,10)<b")
        if not (0 < self.epsilon < 0.001):
            out.append("0<epsilon<0.001")
        if not (0 < self.near_zero < self.epsilon):
            out.append("0<near_zero<epsilon")
        cos_theta = (self.a**2 + self.b**2 - self.c**2) / (2 * self.a * self.b)
        if cos_theta < 0.0:  # theta above 90 degrees
            out.append("theta<=90")
        return out


@dataclass(frozen=True)
class StarInstance:
    agents: tuple[Agent, ...]  # index order matches the construction's naming
    params: object
    pose: Pose
    kind: str  # star3 | starD-odd | starD-even
    roles: dict

    def positions(self) -> dict[str, tuple[float, float]]:
        return {a.id: (a.pos.x, a.pos.y) for a in self.agents}

    def to_instance(self, d: int, tolerance: float | None = None) -> Instance:
        return Instance(d, self.agents, tolerance)


def star3_frame(params: Star3Params) -> dict[str, tuple[float, float]]:
    """Coordinates for agents 0..11 with the pentagon centered at the origin.

    Outer point i+5 closes the (i, i+1 mod 5) edge into an (a, b, c) triangle
    on the outside; 10 and 11 straddle the outward radial through point 5.
    """
    a, b, c = params.a, params.b, params.c
    rp = a / (2 * math.sin(math.pi / 5))
    pos: dict[str, tuple[float, float]] = {}
    for i in range(5):
        ang = math.radians(90 + 72 * i)
        pos[str(i)] = (rp * math.cos(ang), rp * math.sin(ang))
    for i in range(5):
        p_i, p_j = pos[str(i)], pos[str((i + 1) % 5)]
        cands = circle_intersections(p_i, b, p_j, c)
        if not cands:
            raise ConstructionError(f"outer point {i + 5}: circles (b={b}, c={c}) do not meet")
        pos[str(i + 5)] = max(cands, key=lambda q: math.hypot(*q))
    q = params.dist_5_to_1011
    u5 = unit(pos["5"])
    half = math.asin(params.near_zero / (2 * q))
    p5 = pos["5"]
    for name, ang in (("10", +half), ("11", -half)):
        d = rot(u5, ang)
        pos[name] = (p5[0] + q * d[0], p5[1] + q * d[1])
    return pos


def build_star3(
    pose: Pose | None = None,
    params: Star3Params | None = None,
    standalone: bool = True,
    id_prefix: str = "",
) -> StarInstance:
    """12-agent pentagon star.  With ``standalone=False`` the caller intends to
    re-anchor points 10/11 against an enforcement tail, so the self-check is
    left to the caller's validator."""
    params = params or Star3Params()
    bad = params.violations()
    if bad:
        raise ConstructionError(f"infeasible star3 parameters: {', '.join(bad)}")
    pose = pose or Pose()
    frame = star3_frame(params)
    agents = tuple(
        Agent(f"{id_prefix}{k}", Point(*pose.apply(frame[str(k)])), tag=f"star:{k}")
        for k in range(12)
    )
    star = StarInstance(agents, params, pose, "star3", {"ids": [a.id for a in agents]})
    if standalone:
        report = validate_star3(star)
        if not report.ok:
            raise ConstructionError("built star3 fails its validator: " + report.summary())
    return star


def validate_star3(star: StarInstance, context: Instance | None = None) -> Report:
    """Numeric re-check of every distance/angle constraint of the 12-agent star.

    ``context`` supplies the surrounding instance for the containment checks.
    """
    p: Star3Params = star.params
    pts = [(a.pos.x, a.pos.y) for a in star.agents]

    def dd(i: int, j: int) -> float:
        return math.hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])

    rep = Report()
    tol = 1e-6
    for i in range(5):
        j = (i + 1) % 5
        rep.add(f"pentagon edge ({i},{j}) == a", abs(dd(i, j) - p.a) < tol, f"{dd(i, j):.9f} vs {p.a}")
        k = (i + 2) % 5
        rep.add(f"pentagon diagonal ({i},{k}) == ell", abs(dd(i, k) - p.ell) < tol,
                f"{dd(i, k):.9f} vs {p.ell:.9f}")
        rep.add(f"outer {i + 5} to {i} == b", abs(dd(i + 5, i) - p.b) < tol, f"{dd(i + 5, i):.9f}")
        rep.add(f"outer {i + 5} to {j} == c", abs(dd(i + 5, j) - p.c) < tol, f"{dd(i + 5, j):.9f}")
        theta = angle_deg(pts[i], pts[j], pts[i + 5])
        rep.add(f"angle at ({j},{i},{i + 5}) <= 90", theta <= 90.0 + 1e-9, f"{theta:.3f} deg")
        rep.add(f"dist({j + 5}, {i}) > ell", dd(j + 5, i) > p.ell, f"{dd(j + 5, i):.6f}")
    for i in range(1, 5):
        others = [dd(i + 5, j) for j in range(12) if j not in (i + 5, i, (i + 1) % 5)]
        rep.add(f"outer {i + 5} nearest: {i} (b) then {(i + 1) % 5} (c)",
                p.b < p.c < min(others), f"third-nearest {min(others):.6f}")
    rep.add("dist(5,10) in (a, b)", p.a < dd(5, 10) < p.b, f"{dd(5, 10):.9f}")
    rep.add("dist(5,11) in (a, b)", p.a < dd(5, 11) < p.b, f"{dd(5, 11):.9f}")
    rep.add("dist(10,11) <= near_zero", dd(10, 11) <= p.near_zero * (1 + 1e-9), f"{dd(10, 11):.3e}")
    five_rest = [dd(5, j) for j in range(10) if j not in (5, 0, 1)]
    rep.add("5's order: 10,11 then 0 (b) then 1 (c)",
            max(dd(5, 10), dd(5, 11)) < p.b and abs(dd(5, 0) - p.b) < tol
            and abs(dd(5, 1) - p.c) < tol and p.c < min(five_rest),
            f"rest min {min(five_rest):.6f}")
    for j in (10, 11):
        others = [dd(j, k) for k in range(10) if k != 5]
        rep.add(f"dist({j}, W∖{{5,10,11}}) > ell", min(others) > p.ell, f"min {min(others):.6f}")
        ang = angle_deg(pts[5], pts[0], pts[j])
        rep.add(f"angle at (0,5,{j}) > 90", ang > 90.0, f"{ang:.3f} deg")
    if context is not None:
        star_ids = {a.id for a in star.agents}
        outside = [a for a in context.agents if a.id not in star_ids]
        if outside:
            worst = min(
                math.hypot(pts[k][0] - o.pos.x, pts[k][1] - o.pos.y)
                for k in range(10)
                for o in outside
            )
            rep.add("W∖{10,11} to non-W > ell", worst > p.ell, f"min {worst:.6f}")
            lo = min(
                math.hypot(pts[j][0] - o.pos.x, pts[j][1] - o.pos.y)
                for j in (10, 11)
                for o in outside
            )
            bound = dd(5, 10) - p.epsilon
            rep.add("10/11 to non-W >= dist(5,10) - epsilon", lo >= bound - 1e-9,
                    f"min {lo:.9f} vs {bound:.9f}", boundary=abs(lo - bound) < 1e-9)
    return rep


# ---------------------------------------------------------------------------
# d >= 4 stars


@dataclass(frozen=True)
class StarDParams:
    d: int
    a: float
    b: float
    c: float
    b_prime: float | None = None
    c_prime: float | None = None
    epsilon: float = 5e-4
    epsilon_d: float | None = None
    near_zero: float | None = None

    def __post_init__(self):
        if self.epsilon_d is None:
            object.__setattr__(self, "epsilon_d", 1.0 / (2000.0 * self.d))
        if self.near_zero is None:
            # cluster spread must stay well inside the [x, x+eps_d] windows
            object.__setattr__(self, "near_zero", min(1e-4, self.epsilon_d / 4))

    @property
    def kappa(self) -> int:
        return (self.d - 1) // 2

    @property
    def ell(self) -> float:
        return PHI * self.a

    @property
    def even(self) -> bool:
        return self.d % 2 == 0

    @staticmethod
    def defaults(d: int) -> "StarDParams":
        if d < 4:
            raise ConstructionError("StarDParams requires d >= 4")
        if d % 2 == 1:
            return StarDParams(d, a=6.6, b=10.1, c=10.2)
        # primed lengths exceed b and c, but only by a hair: the outer pairs
        # must stay near-coincident, which keeps the offsets at micro scale
        return StarDParams(d, a=9.0, b=10.1, c=10.2, b_prime=10.1 + 1e-6, c_prime=10.2 + 1e-6)

    def violations(self) -> list[str]:
        out = []
        if self.d < 4:
            out.append("d>=4")
        if not (0 < self.epsilon_d < 1.0 / (1000.0 * self.d)):
            out.append("0<epsilon_d<1/(1000d)")
        if not (0 < self.near_zero <= self.epsilon_d / 4 + 1e-15):
            out.append("near_zero at most epsilon_d/4")
        if not (self.a < self.b < self.c < self.ell):
            out.append("a<b<c<ell")
        if self.even:
            bp, cp = self.b_prime, self.c_prime
            if bp is None or cp is None:
                out.append("even d requires b_prime and c_prime")
                return out
            if not (self.b < bp < self.ell):
                out.append("b<b'<ell")
            if not (self.c < cp < self.ell):
                out.append("c<c'<ell")
            if not (self.b + bp < 3 * self.a):
                out.append("b+b'<3a")
            if not (self.c + cp < 3 * self.a):
                out.append("c+c'<3a")
            if not (self.b + bp < self.a + self.ell):
                out.append("b+b'<a+ell")
            if not (self.c + cp < self.b + self.ell):
                out.append("c+c'<b+ell")
        else:
            if not (self.b < 2 * self.a):
                out.append("b<2a")
        return out


def stard_frame(params: StarDParams, include_y: bool = True):
    """Positions and roles for the d>=4 star, pentagon centered at the origin.

    roles: 'X0'..'X4' member id lists, 'outer' outer-point ids, 'Y' (optional).
    """
    kappa = params.kappa
    nz = params.near_zero
    eps_d = params.epsilon_d
    pos: dict[str, tuple[float, float]] = {}
    roles: dict[str, list[str]] = {}
    side = params.a + (eps_d / 2 if params.even else 0.0)
    rp = side / (2 * math.sin(math.pi / 5))
    centers = []
    for i in range(5):
        ang = math.radians(90 + 72 * i)
        centers.append((rp * math.cos(ang), rp * math.sin(ang)))
        ids = []
        for k, xy in enumerate(blob(centers[i], kappa, 0.45 * nz)):
            aid = f"X{i}/{k}"
            pos[aid] = xy
            ids.append(aid)
        roles[f"X{i}"] = ids
    outer_ids: list[str] = []
    if params.even:
        for i in range(5):
            ci, cj = centers[i], centers[(i + 1) % 5]
            p_even = circle_intersections(ci, params.c + eps_d / 2, cj, params.b_prime + eps_d / 2)
            p_odd = circle_intersections(ci, params.c_prime + eps_d / 2, cj, params.b + eps_d / 2)
            if not p_even or not p_odd:
                raise ConstructionError(f"even star outer pair {2 * i},{2 * i + 1}: no intersection")
            pos[str(2 * i)] = max(p_even, key=lambda q: math.hypot(*q))
            pos[str(2 * i + 1)] = max(p_odd, key=lambda q: math.hypot(*q))
            outer_ids += [str(2 * i), str(2 * i + 1)]
    else:
        for i in range(5):
            cands = circle_intersections(centers[i], params.b, centers[(i + 1) % 5], params.c)
            if not cands:
                raise ConstructionError(f"odd star outer point {i}: no intersection")
            pos[str(i)] = max(cands, key=lambda q: math.hypot(*q))
            outer_ids.append(str(i))
    roles["outer"] = outer_ids
    if include_y:
        y_count = 2 * kappa + 1 if params.even else 2 * kappa
        width = eps_d / 2 if params.even else params.epsilon / 2
        if params.even:
            anchor = ((pos["0"][0] + pos["1"][0]) / 2, (pos["0"][1] + pos["1"][1]) / 2)
        else:
            anchor = pos["0"]
        u = unit(anchor)
        r = params.b - width
        yc = (anchor[0] + r * u[0], anchor[1] + r * u[1])
        ids = []
        for k, xy in enumerate(blob(yc, y_count, 0.45 * nz)):
            aid = f"Y/{k}"
            pos[aid] = xy
            ids.append(aid)
        roles["Y"] = ids
    return pos, roles


def build_starD(pose: Pose | None = None, params: StarDParams | None = None, d: int | None = None,
                id_prefix: str = "") -> StarInstance:
    """Cluster star for d >= 4 (7k+11 agents for even d, 7k+5 for odd d)."""
    if params is None:
        if d is None:
            raise ConstructionError("build_starD needs params or d")
        params = StarDParams.defaults(d)
    bad = params.violations()
    if bad:
        raise ConstructionError(f"infeasible starD parameters: {', '.join(bad)}")
    pose = pose or Pose()
    pos, roles = stard_frame(params)
    agents = []
    order = sorted(pos)
    for aid in order:
        tag = "outer" if aid in roles["outer"] else ("Y" if aid.startswith("Y") else "cluster")
        agents.append(Agent(f"{id_prefix}{aid}", Point(*pose.apply(pos[aid])), tag=f"starD:{tag}:{aid}"))
    roles = {k: [f"{id_prefix}{i}" for i in v] for k, v in roles.items()}
    star = StarInstance(tuple(agents), params, pose, "starD-even" if params.even else "starD-odd", roles)
    report = validate_starD(star)
    if not report.ok:
        raise ConstructionError("built starD fails its validator: " + report.summary())
    return star


def validate_starD(star: StarInstance, context: Instance | None = None) -> Report:
    p: StarDParams = star.params
    pos = star.positions()
    roles = star.roles
    rep = Report()
    kappa = p.kappa
    nz = p.near_zero
    eps = p.epsilon_d
    X = [[pos[i] for i in roles[f"X{i}"]] for i in range(5)]
    outer = {i: pos[aid] for i, aid in enumerate(roles["outer"])}
    Y = [pos[i] for i in roles.get("Y", [])]

    def span(group) -> float:
        return max((math.hypot(a[0] - b[0], a[1] - b[1]) for a in group for b in group), default=0.0)

    def band(g1, g2):
        ds = [math.hypot(a[0] - b[0], a[1] - b[1]) for a in g1 for b in g2]
        return min(ds), max(ds)

    for i in range(5):
        rep.add(f"cluster X{i} radius close to zero", span(X[i]) <= nz + 1e-9, f"{span(X[i]):.2e}")
        lo, hi = band(X[i], X[(i + 1) % 5])
        lo2, hi2 = band(X[i], X[(i + 2) % 5])
        if p.even:
            rep.add(f"X{i}-X{(i + 1) % 5} in [a, a+eps_d]", p.a - 1e-12 <= lo and hi <= p.a + eps + 1e-12,
                    f"[{lo:.6f},{hi:.6f}]")
            rep.add(f"X{i}-X{(i + 2) % 5} in [ell, ell+eps_d]",
                    p.ell - 1e-9 <= lo2 and hi2 <= p.ell + eps + 1e-9, f"[{lo2:.6f},{hi2:.6f}]")
        else:
            rep.add(f"X{i}-X{(i + 1) % 5} == a", abs(lo - p.a) <= 2 * nz and abs(hi - p.a) <= 2 * nz,
                    f"[{lo:.6f},{hi:.6f}]")
            rep.add(f"X{i}-X{(i + 2) % 5} == ell", abs(lo2 - p.ell) <= 2 * nz and abs(hi2 - p.ell) <= 2 * nz,
                    f"[{lo2:.6f},{hi2:.6f}]")
    if p.even:
        for i in range(5):
            e, o = outer[2 * i], outer[2 * i + 1]
            lo, hi = band([e], X[i])
            rep.add(f"outer {2 * i} to X{i} in [c, c+eps_d]", p.c - 1e-12 <= lo and hi <= p.c + eps + 1e-12,
                    f"[{lo:.6f},{hi:.6f}]")
            lo, hi = band([e], X[(i + 1) % 5])
            rep.add(f"outer {2 * i} to X{(i + 1) % 5} in [b', b'+eps_d]",
                    p.b_prime - 1e-12 <= lo and hi <= p.b_prime + eps + 1e-12, f"[{lo:.6f},{hi:.6f}]")
            lo, hi = band([o], X[i])
            rep.add(f"outer {2 * i + 1} to X{i} in [c', c'+eps_d]",
                    p.c_prime - 1e-12 <= lo and hi <= p.c_prime + eps + 1e-12, f"[{lo:.6f},{hi:.6f}]")
            lo, hi = band([o], X[(i + 1) % 5])
            rep.add(f"outer {2 * i + 1} to X{(i + 1) % 5} in [b, b+eps_d]",
                    p.b - 1e-12 <= lo and hi <= p.b + eps + 1e-12, f"[{lo:.6f},{hi:.6f}]")
            pair = math.hypot(e[0] - o[0], e[1] - o[1])
            rep.add(f"outer pair ({2 * i},{2 * i + 1}) close to zero", pair < eps, f"{pair:.2e}")
            worst = max(
                angle_deg(x, e, xp)
                for x in X[i]
                for xp in X[(i + 1) % 5]
            )
            rep.add(f"angle at (outer {2 * i}, X{i}, X{(i + 1) % 5}) < 90", worst < 90.0, f"{worst:.2f} deg")
            worst = max(
                angle_deg(xp, o, x)
                for x in X[i]
                for xp in X[(i + 1) % 5]
            )
            rep.add(f"angle at (outer {2 * i + 1}, X{(i + 1) % 5}, X{i}) < 90", worst < 90.0, f"{worst:.2f} deg")
    else:
        for i in range(5):
            o = outer[i]
            lo, hi = band([o], X[i])
            rep.add(f"outer {i} to X{i} == b", abs(lo - p.b) <= 2 * nz and abs(hi - p.b) <= 2 * nz,
                    f"[{lo:.6f},{hi:.6f}]")
            lo, hi = band([o], X[(i + 1) % 5])
            rep.add(f"outer {i} to X{(i + 1) % 5} == c", abs(lo - p.c) <= 2 * nz and abs(hi - p.c) <= 2 * nz,
                    f"[{lo:.6f},{hi:.6f}]")
        rep.add("b < 2a", p.b < 2 * p.a, f"{p.b} vs {2 * p.a}")
    rep.add("a<b<c<ell", p.a < p.b < p.c < p.ell, "")
    if p.even:
        rep.add("b+b'<3a and c+c'<3a", p.b + p.b_prime < 3 * p.a and p.c + p.c_prime < 3 * p.a, "")
        rep.add("b+b'<a+ell and c+c'<b+ell",
                p.b + p.b_prime < p.a + p.ell and p.c + p.c_prime < p.b + p.ell, "")
    if Y:
        rep.add("Y radius close to zero", span(Y) <= nz + 1e-9, f"{span(Y):.2e}")
        anchors = roles["outer"][:2] if p.even else roles["outer"][:1]
        width = eps if p.even else p.epsilon
        for aid in anchors:
            lo, hi = band([pos[aid]], Y)
            rep.add(f"Y to outer {aid} in [b-eps, b)", p.b - width - 1e-9 <= lo and hi < p.b,
                    f"[{lo:.6f},{hi:.6f}]")
        rest = [q for k, q in pos.items() if k not in roles.get("Y", []) and k not in anchors]
        lo = min(math.hypot(a[0] - b[0], a[1] - b[1]) for a in Y for b in rest)
        rep.add("Y to W∖(anchors ∪ Y) > ell", lo > p.ell, f"min {lo:.6f}")
        if p.even:
            a0, a1 = anchors
            for j, cluster in ((a0, X[1]), (a1, X[0])):
                worst = min(angle_deg(pos[j], y, x) for y in Y for x in cluster)
                rep.add(f"angle at (Y, outer {j}, opposite cluster) > 90", worst > 90.0, f"{worst:.2f} deg")
    if context is not None:
        star_ids = {a.id for a in star.agents}
        outside = [a for a in context.agents if a.id not in star_ids]
        if outside:
            y_ids = set(roles.get("Y", []))
            lo_core = min(
                math.hypot(q[0] - o.pos.x, q[1] - o.pos.y)
                for k, q in pos.items()
                if k not in y_ids
                for o in outside
            )
            rep.add("star core to foreign agents > b/2", lo_core > p.b / 2, f"min {lo_core:.6f}")
            if Y:
                lo_y = min(
                    math.hypot(q[0] - o.pos.x, q[1] - o.pos.y) for q in Y for o in outside
                )
                rep.add("Y to foreign agents >= b/2", lo_y >= p.b / 2 - 1e-9, f"min {lo_y:.6f}")
    return rep


# ---------------------------------------------------------------------------
# closed star sub-instances (star + its garbage collectors), used by the
# sampled necessary-condition checks


def garbage_size(d: int) -> int:
    kappa = (d - 1) // 2
    if d % 2 == 1:
        return d - kappa - 2
    if d <= 6:
        return 2 * d - kappa - 5
    return d - kappa - 5


def star_solution_groups(roles: dict, d: int, garbage: list[str]) -> list[list[str]]:
    """Forward-direction coalitions for a closed star (Y standing in for the tail).

    For odd d the pentagon pairs are (X2,X3)+outer2 and (X4,X0)+outer4 with X1
    and outers 1,3 absorbed by the garbage: pairing each edge with its own
    b-side outer point is what keeps the pentagon blocking-free.
    """
    outer = roles["outer"]
    groups: list[list[str]] = []
    kappa = (d - 1) // 2
    if d % 2 == 1:
        groups.append(roles["Y"] + [outer[0]])
        groups.append(roles["X2"] + roles["X3"] + [outer[2]])
        groups.append(roles["X4"] + roles["X0"] + [outer[4]])
        groups.append(roles["X1"] + [outer[1], outer[3]] + garbage)
    else:
        groups.append(roles["Y"] + [outer[0]])
        groups.append(roles["X1"] + roles["X2"] + [outer[2], outer[3]])
        groups.append(roles["X3"] + roles["X4"] + [outer[6], outer[7]])
        seq = [outer[1], outer[8], outer[9], outer[4]]
        if d <= 6:
            take = d - kappa
            groups.append(roles["X0"] + seq[:take])
            rest = [x for x in seq[take:]] + [outer[5]]
        else:
            groups.append(roles["X0"] + [outer[1], outer[4], outer[5], outer[8], outer[9]])
            rest = []
        if rest or garbage:
            groups.append(rest + garbage)
    return groups


def build_starD_closed(d: int, params: StarDParams | None = None) -> tuple[Instance, dict]:
    """Standalone star plus its R-garbage, closed to a size divisible by d.

    The garbage blob sits in the (ell, 2 ell) band off its leftover partner
    group, beyond everything else's interaction range.
    """
    params = params or StarDParams.defaults(d)
    star = build_starD(params=params)
    pos = star.positions()
    roles = dict(star.roles)
    g_count = garbage_size(d)
    agents = list(star.agents)
    garbage_ids: list[str] = []
    if g_count:
        if d % 2 == 1:
            anchor_ids = roles["X1"] + [roles["outer"][1]]
        else:
            anchor_ids = [roles["outer"][4], roles["outer"][5]]
        cx = sum(pos[i][0] for i in anchor_ids) / len(anchor_ids)
        cy = sum(pos[i][1] for i in anchor_ids) / len(anchor_ids)
        u = unit((cx, cy))
        r = 1.5 * params.ell
        base = (cx + r * u[0], cy + r * u[1])
        for k, xy in enumerate(blob(base, g_count, 0.45 * params.near_zero)):
            aid = f"R/{k}"
            garbage_ids.append(aid)
            agents.append(Agent(aid, Point(*xy), tag="garbage:R"))
    roles["R"] = garbage_ids
    inst = Instance(d, agents)
    # the band constraint is against the nearest same-star agent
    if garbage_ids:
        lo = min(
            math.hypot(pos[s][0] - inst.agent(g).pos.x, pos[s][1] - inst.agent(g).pos.y)
            for s in pos
            for g in garbage_ids
        )
        if not (params.ell < lo < 2 * params.ell):
            raise ConstructionError(f"garbage band violated: nearest star agent at {lo:.4f}")
    return inst, roles
