"""Deterministic JSON file formats for instances, matchings, X3C, layouts, certificates.

Writers emit sorted keys and 17-significant-digit decimals, so writing the
same object twice is byte-identical and read(write(x)) reproduces x exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from .core import Agent, Instance, Matching, Point
from .errors import EuclidSRError
from .layout import EdgeRoute, OrthogonalLayout
from .reduction import ReductionCertificate
from .x3c import Cover, X3CInstance


class FormatError(EuclidSRError):
    """Malformed document or invariant violation, with a located message."""


def _fmt_float(x: float) -> float:
    # round-trip through 17 significant digits: bit-exact on reparse
    return float(f"{x:.17g}")


def _clean(o: Any) -> Any:
    if isinstance(o, float):
        if not math.isfinite(o):
            raise FormatError("non-finite float in document")
        return _fmt_float(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _dump(doc: dict, path: str | Path | None) -> str:
    text = json.dumps(_clean(doc), sort_keys=True, indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _load(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _need(doc: dict, key: str, where: str):
    if key not in doc:
        raise FormatError(f"{where}: missing field {key!r}")
    return doc[key]


# -- instances


def write_instance(inst: Instance, path: str | Path | None = None) -> str:
    doc = {
        "d": inst.d,
        "tolerance": inst.tolerance,
        "agents": [
            {"id": a.id, "x": a.pos.x, "y": a.pos.y, "tag": a.tag}
            for a in inst.agents
        ],
    }
    return _dump(doc, path)


def read_instance(path: str | Path) -> Instance:
    doc = _load(path)
    where = str(path)
    d = int(_need(doc, "d", where))
    agents = []
    for k, a in enumerate(_need(doc, "agents", where)):
        spot = f"{where}: agents[{k}]"
        agents.append(
            Agent(
                str(_need(a, "id", spot)),
                Point(float(_need(a, "x", spot)), float(_need(a, "y", spot))),
                a.get("tag"),
            )
        )
    try:
        return Instance(d, agents, doc.get("tolerance"))
    except EuclidSRError as exc:
        raise FormatError(f"{where}: {exc}") from None


# -- matchings


def write_matching(pi: Matching, path: str | Path | None = None) -> str:
    return _dump({"coalitions": sorted(sorted(c.members) for c in pi.coalitions)}, path)


def read_matching(path: str | Path, inst: Instance) -> Matching:
    doc = _load(path)
    groups = _need(doc, "coalitions", str(path))
    try:
        return Matching.of(inst, groups)
    except EuclidSRError as exc:
        raise FormatError(f"{path}: {exc}") from None


def read_matching_groups(path: str | Path) -> list[list[str]]:
    doc = _load(path)
    return [list(map(str, g)) for g in _need(doc, "coalitions", str(path))]


# -- X3C instances and covers


def write_x3c(inst: X3CInstance, path: str | Path | None = None) -> str:
    return _dump({"n": inst.n, "sets": [list(s) for s in inst.sets]}, path)


def read_x3c(path: str | Path) -> X3CInstance:
    doc = _load(path)
    sets = [tuple(int(e) for e in s) for s in _need(doc, "sets", str(path))]
    for k, s in enumerate(sets):
        if len(s) != 3:
            raise FormatError(f"{path}: sets[{k}] does not have 3 entries")
    return X3CInstance(int(_need(doc, "n", str(path))), tuple(sets))


def write_cover(cover: Cover, path: str | Path | None = None) -> str:
    return _dump({"indices": sorted(cover.indices)}, path)


def read_cover(path: str | Path) -> Cover:
    doc = _load(path)
    return Cover(tuple(sorted(int(j) for j in _need(doc, "indices", str(path)))))


# -- layouts


def write_layout(layout: OrthogonalLayout, path: str | Path | None = None) -> str:
    doc = {
        "vertices": {n: [int(p[0]), int(p[1])] for n, p in layout.vertices.items()},
        "edges": [
            {"u": e.u, "v": e.v, "bend": None if e.bend is None else [int(e.bend[0]), int(e.bend[1])]}
            for e in sorted(layout.edges, key=lambda e: e.key())
        ],
    }
    return _dump(doc, path)


def read_layout(path: str | Path) -> OrthogonalLayout:
    doc = _load(path)
    where = str(path)
    vertices = {
        str(n): (int(p[0]), int(p[1])) for n, p in _need(doc, "vertices", where).items()
    }
    edges = []
    for k, e in enumerate(_need(doc, "edges", where)):
        spot = f"{where}: edges[{k}]"
        u, v = str(_need(e, "u", spot)), str(_need(e, "v", spot))
        for name in (u, v):
            if name not in vertices:
                raise FormatError(f"{spot}: unknown vertex {name!r}")
        bend = e.get("bend")
        edges.append(EdgeRoute(u, v, None if bend is None else (int(bend[0]), int(bend[1]))))
    return OrthogonalLayout(vertices, tuple(edges))


# -- reduction certificates


def write_certificate(cert: ReductionCertificate, path: str | Path | None = None) -> str:
    return _dump(cert.to_dict(), path)


def read_certificate(path: str | Path) -> ReductionCertificate:
    doc = _load(path)
    for key in ("d", "epsilon", "elements", "sets", "edges"):
        _need(doc, key, str(path))
    return ReductionCertificate.from_dict(doc)
