import json

import pytest

from euclid_sr import io as eio
from euclid_sr.core import Matching
from euclid_sr.fixtures import prism_layout, prism_x3c
from euclid_sr.layout import validate_layout
from euclid_sr.x3c import associated_graph, validate_x3c


def test_instance_roundtrip_bit_exact(star3_instance, tmp_path):
    p = tmp_path / "star3.json"
    eio.write_instance(star3_instance, p)
    back = eio.read_instance(p)
    assert back.d == star3_instance.d
    assert back.tolerance == star3_instance.tolerance
    for a, b in zip(star3_instance.agents, back.agents):
        assert a.id == b.id and a.tag == b.tag
        assert a.pos.x == b.pos.x and a.pos.y == b.pos.y  # bit-identical


def test_writing_twice_is_byte_identical(star3_instance, tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    eio.write_instance(star3_instance, p1)
    eio.write_instance(star3_instance, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_matching_roundtrip(star3_instance, star3_stable_groups, tmp_path):
    pi = Matching.of(star3_instance, star3_stable_groups)
    p = tmp_path / "m.json"
    eio.write_matching(pi, p)
    back = eio.read_matching(p, star3_instance)
    assert back == pi


def test_matching_with_unknown_id_is_located(star3_instance, tmp_path):
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"coalitions": [["0", "1", "zz"]]}))
    with pytest.raises(eio.FormatError) as err:
        eio.read_matching(p, star3_instance)
    assert "zz" in str(err.value)


def test_x3c_roundtrip_and_validation(tmp_path):
    p = tmp_path / "x3c.json"
    eio.write_x3c(prism_x3c(), p)
    back = eio.read_x3c(p)
    assert back == prism_x3c()
    assert validate_x3c(back).ok


def test_layout_roundtrip(tmp_path):
    p = tmp_path / "layout.json"
    eio.write_layout(prism_layout(), p)
    back = eio.read_layout(p)
    assert back.vertices == prism_layout().vertices
    assert set(e.key() for e in back.edges) == set(e.key() for e in prism_layout().edges)
    assert validate_layout(associated_graph(prism_x3c()), back).ok


def test_layout_unknown_vertex_is_located(tmp_path):
    p = tmp_path / "layout.json"
    p.write_text(json.dumps({"vertices": {"u1": [0, 0]}, "edges": [{"u": "u1", "v": "w9"}]}))
    with pytest.raises(eio.FormatError) as err:
        eio.read_layout(p)
    assert "edges[0]" in str(err.value)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{"d": 3,\n  "agents": [}')
    with pytest.raises(eio.FormatError) as err:
        eio.read_instance(p)
    assert "line 2" in str(err.value)


def test_invalid_instance_rejected_on_read(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({
        "d": 3,
        "agents": [{"id": "a", "x": 0, "y": 0}, {"id": "b", "x": 1, "y": 1}],
    }))
    with pytest.raises(eio.FormatError) as err:
        eio.read_instance(p)
    assert "divisible" in str(err.value)


def test_certificate_roundtrip(reduced_d3, tmp_path):
    _, cert = reduced_d3
    p = tmp_path / "cert.json"
    eio.write_certificate(cert, p)
    back = eio.read_certificate(p)
    assert back.scale == cert.scale
    assert back.edges.keys() == cert.edges.keys()
    p2 = tmp_path / "cert2.json"
    eio.write_certificate(back, p2)
    assert p.read_bytes() == p2.read_bytes()


def test_cover_roundtrip(fixture_cover, tmp_path):
    p = tmp_path / "cover.json"
    eio.write_cover(fixture_cover, p)
    assert eio.read_cover(p) == fixture_cover
