"""Geometric primitives, agents, instances, matchings, and distance-sum preferences.

All types are immutable after construction; every operation is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CoalitionSizeError,
    ContractViolation,
    CoverageError,
    InvalidInstanceError,
    OverlapError,
    UnknownAgentError,
)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInstanceError(f"non-finite coordinate ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


def dist(p: Point, q: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(p.x - q.x, p.y - q.y)


@dataclass(frozen=True)
class Agent:
    id: str
    pos: Point
    tag: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise InvalidInstanceError("agent id must be non-empty")


class Pref(Enum):
    PREFERS_S = "PREFERS_S"
    INDIFFERENT = "INDIFFERENT"
    PREFERS_T = "PREFERS_T"


class Instance:
    """An agent set with planar coordinates and coalition size d.

    ``tolerance`` is the preference comparison band: sums closer than tau
    count as indifferent.  When omitted it defaults to 1e-9 times the
    instance diameter, strictly below every designed slack in this package.
    """

    def __init__(self, d: int, agents: Sequence[Agent], tolerance: float | None = None):
        if d < 2:
            raise InvalidInstanceError(f"coalition size d={d} must be >= 2")
        agents = tuple(agents)
        if len(agents) % d != 0:
            raise InvalidInstanceError(f"{len(agents)} agents not divisible by d={d}")
        ids = [a.id for a in agents]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidInstanceError(f"duplicate agent ids: {dup[:5]}")
        if tolerance is not None and (not math.isfinite(tolerance) or tolerance < 0):
            raise InvalidInstanceError(f"tolerance {tolerance} must be a finite non-negative real")
        self.d = d
        self.agents = agents
        self._index = {a.id: k for k, a in enumerate(agents)}
        self.coords = np.array([[a.pos.x, a.pos.y] for a in agents], dtype=float)
        if tolerance is None:
            tolerance = 1e-9 * self.diameter()
        self.tolerance = float(tolerance)
        self._dist_matrix: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.agents)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.agents)

    def index(self, agent_id: str) -> int:
        try:
            return self._index[agent_id]
        except KeyError:
            raise UnknownAgentError(f"unknown agent id {agent_id!r}") from None

    def agent(self, agent_id: str) -> Agent:
        return self.agents[self.index(agent_id)]

    def diameter(self) -> float:
        if len(self.agents) < 2:
            return 0.0
        lo = self.coords.min(axis=0)
        hi = self.coords.max(axis=0)
        # bounding-box diagonal: within sqrt(2) of the true diameter, cheap at any size
        return float(np.hypot(*(hi - lo)))

    def dist_matrix(self) -> np.ndarray:
        """Full pairwise distance matrix, cached.  Only sensible for n <= ~5000."""
        if self._dist_matrix is None:
            diff = self.coords[:, None, :] - self.coords[None, :, :]
            self._dist_matrix = np.sqrt((diff * diff).sum(axis=2))
        return self._dist_matrix

    def row_dists(self, k: int) -> np.ndarray:
        """Distances from agent index k to all agents (O(n), no matrix cache)."""
        if self._dist_matrix is not None:
            return self._dist_matrix[k]
        diff = self.coords - self.coords[k]
        return np.hypot(diff[:, 0], diff[:, 1])


@dataclass(frozen=True, order=True)
class Coalition:
    """A size-d agent set, stored as a sorted id tuple."""

    members: tuple[str, ...]

    @staticmethod
    def of(ids: Iterable[str]) -> "Coalition":
        members = tuple(sorted(ids))
        if len(set(members)) != len(members):
            raise ContractViolation(f"coalition has repeated members: {members}")
        return Coalition(members)

    def __contains__(self, agent_id: str) -> bool:
        return agent_id in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Matching:
    """A partition of the instance's agents into size-d coalitions."""

    coalitions: tuple[Coalition, ...]
    _assignment: dict = field(repr=False, hash=False, compare=False, default_factory=dict)

    @staticmethod
    def of(inst: Instance, groups: Iterable[Iterable[str]]) -> "Matching":
        coalitions = tuple(sorted(Coalition.of(g) for g in groups))
        seen: dict[str, Coalition] = {}
        for c in coalitions:
            if len(c) != inst.d:
                raise CoalitionSizeError(f"coalition {c.members} has size {len(c)}, want {inst.d}")
            for m in c:
                if m not in inst._index:
                    raise CoverageError(f"coalition member {m!r} is not in the instance")
                if m in seen:
                    raise OverlapError(f"agent {m!r} appears in two coalitions")
                seen[m] = c
        missing = [i for i in inst.ids if i not in seen]
        if missing:
            raise CoverageError(f"{len(missing)} agents unmatched, e.g. {missing[:5]}")
        return Matching(coalitions, seen)

    def coalition_of(self, agent_id: str) -> Coalition:
        try:
            return self._assignment[agent_id]
        except KeyError:
            raise UnknownAgentError(f"agent {agent_id!r} not in matching") from None

    def __iter__(self):
        return iter(self.coalitions)

    def __contains__(self, c) -> bool:
        if isinstance(c, Coalition):
            return c in self.coalitions
        return Coalition.of(c) in self.coalitions

    def groups(self) -> list[list[str]]:
        return [list(c.members) for c in self.coalitions]


def sum_dist(x: str, coalition: Iterable[str], inst: Instance) -> float:
    """Sum of distances from agent x to every member of the coalition.

    The x-to-x term contributes 0 when x is itself a member.
    """
    k = inst.index(x)
    total = 0.0
    for m in coalition:
        total += float(np.hypot(*(inst.coords[k] - inst.coords[inst.index(m)])))
    return total


def compare_pref(x: str, s, t, inst: Instance) -> Pref:
    """Three-way distance-sum comparison of two coalitions containing x."""
    s = s if isinstance(s, Coalition) else Coalition.of(s)
    t = t if isinstance(t, Coalition) else Coalition.of(t)
    if x not in s or x not in t:
        raise ContractViolation(f"agent {x!r} must belong to both compared coalitions")
    ds = sum_dist(x, s, inst)
    dt = sum_dist(x, t, inst)
    if ds < dt - inst.tolerance:
        return Pref.PREFERS_S
    if dt < ds - inst.tolerance:
        return Pref.PREFERS_T
    return Pref.INDIFFERENT
