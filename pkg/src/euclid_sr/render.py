"""Static SVG drawings of embeddings, matchings, and blocking witnesses."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .core import Instance, Matching
from .stability import BlockingWitness

VIEW = 1200.0
MARGIN = 0.05

PALETTE = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
]


def _transform(inst: Instance):
    xs = [a.pos.x for a in inst.agents]
    ys = [a.pos.y for a in inst.agents]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    pad = VIEW * MARGIN
    scale = (VIEW - 2 * pad) / span

    def to_screen(p) -> tuple[float, float]:
        # y flipped: screen grows downward
        return (pad + (p.x - lo_x) * scale, VIEW - pad - (p.y - lo_y) * scale)

    return to_screen


def _hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain; fine for coalition-sized inputs."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def render_svg(
    inst: Instance,
    pi: Matching | None = None,
    witness: BlockingWitness | None = None,
    labels: bool = False,
) -> str:
    """One circle per agent, convex-hull outlines per coalition, witness in red.

    Labels are decluttered: a label is dropped when it would come within 2px
    of one already drawn.
    """
    to_screen = _transform(inst)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{VIEW:.0f}" height="{VIEW:.0f}" '
        f'viewBox="0 0 {VIEW:.0f} {VIEW:.0f}">',
        f'<rect width="{VIEW:.0f}" height="{VIEW:.0f}" fill="white"/>',
    ]
    if pi is not None:
        for k, c in enumerate(pi.coalitions):
            pts = [to_screen(inst.agent(m).pos) for m in c.members]
            hull = _hull(pts)
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in hull)
            color = PALETTE[k % len(PALETTE)]
            if len(hull) >= 3:
                parts.append(
                    f'<polygon points="{path}" fill="{color}" fill-opacity="0.15" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
            else:
                (x1, y1), (x2, y2) = hull[0], hull[-1]
                parts.append(
                    f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                    f'stroke="{color}" stroke-width="1.5"/>'
                )
    if witness is not None:
        pts = [to_screen(inst.agent(m).pos) for m in witness.coalition.members]
        hull = _hull(pts)
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in hull)
        if len(hull) >= 3:
            parts.append(
                f'<polygon points="{path}" fill="none" stroke="#d62728" stroke-width="2.5"/>'
            )
        else:
            (x1, y1), (x2, y2) = hull[0], hull[-1]
            parts.append(
                f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                f'stroke="#d62728" stroke-width="2.5"/>'
            )
    witness_ids = set(witness.coalition.members) if witness is not None else set()
    r = max(1.5, min(4.0, 120.0 / max(len(inst), 1) ** 0.5))
    placed_labels: list[tuple[float, float]] = []
    for a in inst.agents:
        x, y = to_screen(a.pos)
        fill = "#d62728" if a.id in witness_ids else "#222222"
        title = escape(a.tag or a.id)
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:.2f}" fill="{fill}">'
            f"<title>{title}</title></circle>"
        )
        if labels:
            if all(math.hypot(x - px, y - py) >= 2.0 for px, py in placed_labels):
                placed_labels.append((x, y))
                parts.append(
                    f'<text x="{x + r + 1:.2f}" y="{y - r - 1:.2f}" font-size="8" '
                    f'fill="#555555">{escape(a.id)}</text>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
