"""Planar-cubic exact cover by 3-sets: instance model, checks, and a brute-force oracle.

Elements are 1..3n; the collection holds exactly 3n triples and every element
occurs in exactly three of them.  Planarity is never tested here: a valid
orthogonal layout of the associated graph is the planarity witness.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ContractViolation
from .reporting import Report


@dataclass(frozen=True)
class X3CInstance:
    n: int
    sets: tuple[tuple[int, int, int], ...]

    @staticmethod
    def of(n: int, sets) -> "X3CInstance":
        return X3CInstance(n, tuple(tuple(s) for s in sets))

    @property
    def elements(self) -> range:
        return range(1, 3 * self.n + 1)


@dataclass(frozen=True)
class Cover:
    indices: tuple[int, ...]  # 0-based set indices

    def violations(self, inst: X3CInstance) -> list[str]:
        out = []
        if len(self.indices) != inst.n:
            out.append(f"|K|={len(self.indices)} != n={inst.n}")
        seen: set[int] = set()
        for j in self.indices:
            if not (0 <= j < len(inst.sets)):
                out.append(f"index {j} out of range")
                continue
            s = set(inst.sets[j])
            if seen & s:
                out.append(f"set {j} overlaps previous choices")
            seen |= s
        if seen != set(inst.elements):
            out.append("union is not the whole element set")
        return out


def validate_x3c(inst: X3CInstance) -> Report:
    rep = Report()
    rep.add("n positive", inst.n >= 1, f"n={inst.n}")
    rep.add("m == 3n", len(inst.sets) == 3 * inst.n, f"m={len(inst.sets)}")
    universe = set(inst.elements)
    for j, s in enumerate(inst.sets):
        rep.add(f"set {j} has 3 distinct elements", len(set(s)) == 3 and set(s) <= universe, f"{s}")
    occ = {e: 0 for e in inst.elements}
    for s in inst.sets:
        for e in set(s):
            if e in occ:
                occ[e] += 1
    bad = {e: k for e, k in occ.items() if k != 3}
    rep.add("every element occurs in exactly 3 sets", not bad, f"violations: {bad}" if bad else "")
    return rep


@dataclass(frozen=True)
class BipartiteGraph:
    """Associated element/set incidence graph (u{i} vs w{j} vertex names)."""

    us: tuple[str, ...]
    ws: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.us + self.ws

    def degree(self, v: str) -> int:
        return sum(1 for e in self.edges if v in e)

    def neighbors(self, v: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out


def associated_graph(inst: X3CInstance) -> BipartiteGraph:
    us = tuple(f"u{i}" for i in inst.elements)
    ws = tuple(f"w{j + 1}" for j in range(len(inst.sets)))
    edges = []
    for j, s in enumerate(inst.sets):
        for i in sorted(set(s)):
            edges.append((f"u{i}", f"w{j + 1}"))
    return BipartiteGraph(us, ws, tuple(edges))


def solve_x3c_bruteforce(inst: X3CInstance) -> Cover | None:
    """Backtracking over the lowest uncovered element; oracle for tiny instances."""
    if inst.n > 6:
        raise ContractViolation("brute-force oracle is for n <= 6")
    by_element: dict[int, list[int]] = {e: [] for e in inst.elements}
    for j, s in enumerate(inst.sets):
        for e in set(s):
            by_element[e].append(j)

    chosen: list[int] = []
    covered: set[int] = set()

    def rec() -> bool:
        missing = [e for e in inst.elements if e not in covered]
        if not missing:
            return True
        e = missing[0]
        for j in by_element[e]:
            s = set(inst.sets[j])
            if covered & s:
                continue
            chosen.append(j)
            covered.update(s)
            if rec():
                return True
            chosen.pop()
            covered.difference_update(s)
        return False

    if rec():
        return Cover(tuple(sorted(chosen)))
    return None


def all_covers(inst: X3CInstance) -> list[Cover]:
    """Every exact cover, by exhaustive combination filtering (test oracle)."""
    out = []
    for combo in itertools.combinations(range(len(inst.sets)), inst.n):
        c = Cover(combo)
        if not c.violations(inst):
            out.append(c)
    return out
