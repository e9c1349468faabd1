"""Canonical PC-X3C test fixture: a hexagonal-prism incidence structure.

n=1 would force K_{3,3} (non-planar), so the smallest usable scale is n=2.
The prism graph is 3-regular, planar, and bipartite; labeling one color class
as elements and the other as sets yields a PC-X3C instance with three exact
covers.  Sets are ordered so that the brute-force oracle returns {S1, S2}
first, leaving the remaining sets as the garbage-collector parking spots.
"""
from __future__ import annotations

from .layout import EdgeRoute, OrthogonalLayout
from .x3c import X3CInstance


def prism_x3c() -> X3CInstance:
    return X3CInstance.of(
        2,
        [
            (1, 2, 4),  # S1: outer vertex between elements 1 and 2, spoke to 4
            (3, 5, 6),  # S2: complementary cover partner of S1
            (2, 3, 5),
            (1, 4, 6),
            (1, 3, 6),
            (2, 4, 5),
        ],
    )


def prism_layout() -> OrthogonalLayout:
    """Hand-made orthogonal drawing of the prism's associated graph.

    Outer ring (u1 w1 u2 w3 u3 w5), inner ring (w4 u4 w6 u5 w2 u6), six
    straight spokes.  Min segment 2 grid units; non-adjacent clearance ~4.47.
    """
    vertices = {
        "u1": (8, 0),
        "w1": (16, 0),
        "u2": (28, 10),
        "w3": (20, 20),
        "u3": (12, 20),
        "w5": (0, 10),
        "w4": (8, 6),
        "u4": (16, 6),
        "w6": (22, 10),
        "u5": (20, 14),
        "w2": (12, 14),
        "u6": (6, 10),
    }
    edges = (
        EdgeRoute("u1", "w1"),
        EdgeRoute("w1", "u2", (28, 0)),
        EdgeRoute("u2", "w3", (28, 20)),
        EdgeRoute("w3", "u3"),
        EdgeRoute("u3", "w5", (0, 20)),
        EdgeRoute("w5", "u1", (0, 0)),
        EdgeRoute("w4", "u4"),
        EdgeRoute("u4", "w6", (22, 6)),
        EdgeRoute("w6", "u5", (20, 10)),
        EdgeRoute("u5", "w2"),
        EdgeRoute("w2", "u6", (6, 14)),
        EdgeRoute("u6", "w4", (6, 6)),
        EdgeRoute("u1", "w4"),
        EdgeRoute("w1", "u4"),
        EdgeRoute("u2", "w6"),
        EdgeRoute("w3", "u5"),
        EdgeRoute("u3", "w2"),
        EdgeRoute("w5", "u6"),
    )
    return OrthogonalLayout(vertices, edges)
