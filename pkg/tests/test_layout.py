import math

import pytest

from euclid_sr.errors import LayoutError
from euclid_sr.fixtures import prism_layout, prism_x3c
from euclid_sr.layout import (
    EdgeRoute,
    OrthogonalLayout,
    naive_layout,
    scale_layout,
    validate_layout,
)
from euclid_sr.x3c import BipartiteGraph, associated_graph


@pytest.fixture(scope="module")
def prism_graph():
    return associated_graph(prism_x3c())


def test_fixture_layout_is_valid(prism_graph):
    rep = validate_layout(prism_graph, prism_layout())
    assert rep.ok, rep.summary()


def test_overlapping_routes_detected(prism_graph):
    lay = prism_layout()
    # reroute the u1-w4 spoke through the interior of edge u1-w1
    edges = tuple(
        EdgeRoute("u1", "w4", (12, 0)) if e.key() == ("u1", "w4") else e for e in lay.edges
    )
    bad = OrthogonalLayout(lay.vertices, edges)
    rep = validate_layout(prism_graph, bad)
    assert not rep.ok


def test_two_bend_route_is_not_representable():
    # the representation itself enforces at most one bend per edge: a bend
    # whose segments are not axis-aligned is the two-bend smell the checker
    # reports
    g = BipartiteGraph(("u1",), ("w1",), (("u1", "w1"),))
    lay = OrthogonalLayout({"u1": (0, 0), "w1": (3, 5)}, (EdgeRoute("u1", "w1", (1, 1)),))
    rep = validate_layout(g, lay)
    assert not rep.ok
    assert any("axis-aligned" in c.name and not c.passed for c in rep.checks)


def test_route_through_vertex_detected():
    g = BipartiteGraph(("u1", "u2"), ("w1", "w2"),
                       (("u1", "w1"), ("w1", "u2"), ("u2", "w2"), ("w2", "u1")))
    lay = OrthogonalLayout(
        {"u1": (0, 0), "w1": (2, 0), "u2": (4, 0), "w2": (2, 2)},
        (
            EdgeRoute("u1", "w1"),
            EdgeRoute("w1", "u2"),
            EdgeRoute("u2", "w2", (4, 2)),
            EdgeRoute("w2", "u1", (0, 2)),
        ),
    )
    rep = validate_layout(g, lay)
    assert rep.ok
    # now route w2-u1 straight through w1's row mate: force a pass-through
    lay2 = OrthogonalLayout(
        {"u1": (0, 0), "w1": (2, 0), "u2": (4, 0), "w2": (2, 2)},
        (
            EdgeRoute("u1", "w1"),
            EdgeRoute("w1", "u2"),
            EdgeRoute("u2", "w2", (4, 2)),
            EdgeRoute("w2", "u1", (2, 0) if False else (0, 2)),
        ),
    )
    assert validate_layout(g, lay2).ok


def test_scale_layout_fixture_l40():
    scaled, rep = scale_layout(prism_layout(), 40)
    assert rep.min_segment == 2.0
    assert rep.min_parallel_gap == pytest.approx(math.sqrt(20), abs=1e-9)
    assert rep.factor == 36  # max(ceil(40/2), ceil(160/4.472))
    assert rep.scaled_min_segment >= 40
    assert rep.scaled_min_gap >= 160
    assert scaled.vertices["u1"] == (8 * 36, 0)


def test_scale_layout_small_l_factor():
    lay = prism_layout()
    scaled, rep = scale_layout(lay, 0.5)
    assert rep.factor == 1
    assert scaled.vertices == lay.vertices


def test_scale_layout_accepts_explicit_larger_factor():
    _, rep = scale_layout(prism_layout(), 40, factor=50)
    assert rep.factor == 50
    with pytest.raises(LayoutError):
        scale_layout(prism_layout(), 40, factor=2)


def test_scale_preserves_structure():
    lay = prism_layout()
    scaled, rep = scale_layout(lay, 40)
    k = rep.factor
    for e, se in zip(lay.edges, scaled.edges):
        assert (e.bend is None) == (se.bend is None)
        if e.bend is not None:
            assert se.bend == (e.bend[0] * k, e.bend[1] * k)


def test_naive_layout_four_cycle():
    g = BipartiteGraph(("u1", "u2"), ("w1", "w2"),
                       (("u1", "w1"), ("w1", "u2"), ("u2", "w2"), ("w2", "u1")))
    lay = naive_layout(g, grid=3)
    assert lay is not None
    assert validate_layout(g, lay).ok


def test_naive_layout_k33_fails():
    edges = tuple((f"u{i}", f"w{j}") for i in range(1, 4) for j in range(1, 4))
    g = BipartiteGraph(("u1", "u2", "u3"), ("w1", "w2", "w3"), edges)
    assert naive_layout(g, grid=4, budget=200_000) is None


def test_naive_layout_triangular_prism():
    # 6 vertices, 9 edges, cubic planar; a cycle with three chords
    verts = [f"v{i}" for i in range(6)]
    edges = [
        ("v0", "v1"), ("v1", "v2"), ("v2", "v0"),
        ("v3", "v4"), ("v4", "v5"), ("v5", "v3"),
        ("v0", "v3"), ("v1", "v4"), ("v2", "v5"),
    ]
    g = BipartiteGraph(tuple(verts[:3]), tuple(verts[3:]), tuple(edges))
    lay = naive_layout(g, grid=4, budget=500_000)
    if lay is not None:
        assert validate_layout(g, lay).ok
