"""Greedy matching for d=2 and exact stable-matching enumeration for small instances."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .core import Coalition, Instance, Matching
from .errors import ContractViolation
from .stability import SearchMode, find_blocking, verify_stable


def greedy_match_2(inst: Instance) -> Matching:
    """Repeatedly match the closest remaining pair; ties break on the id pair.

    The output is stable for distance-sum preferences in the plane.
    """
    if inst.d != 2:
        raise ContractViolation(f"greedy_match_2 requires d=2, got d={inst.d}")
    ids = inst.ids
    pairs = []
    for a, b in itertools.combinations(range(len(ids)), 2):
        i, j = sorted((ids[a], ids[b]))
        d = float(np.hypot(*(inst.coords[a] - inst.coords[b])))
        pairs.append((d, i, j))
    pairs.sort()
    used: set[str] = set()
    groups = []
    for _, i, j in pairs:
        if i in used or j in used:
            continue
        used.update((i, j))
        groups.append([i, j])
        if len(used) == len(ids):
            break
    return Matching.of(inst, groups)


def all_partitions(inst: Instance) -> Iterator[list[list[str]]]:
    """Every partition of the agents into size-d groups, in canonical order.

    Canonical: each group is led by the smallest unmatched id, groups listed
    in formation order.  12 agents at d=3 yield 15,400 partitions.
    """
    ids = sorted(inst.ids)
    d = inst.d

    def rec(remaining: tuple[str, ...], acc: list[list[str]]) -> Iterator[list[list[str]]]:
        if not remaining:
            yield [list(g) for g in acc]
            return
        head, rest = remaining[0], remaining[1:]
        for combo in itertools.combinations(rest, d - 1):
            left = tuple(x for x in rest if x not in combo)
            acc.append([head, *combo])
            yield from rec(left, acc)
            acc.pop()

    yield from rec(tuple(ids), [])


def enumerate_stable_reference(inst: Instance) -> list[Matching]:
    """No-pruning reference: filter every partition through verify_stable."""
    out = []
    for groups in all_partitions(inst):
        pi = Matching.of(inst, groups)
        if verify_stable(pi, inst).stable:
            out.append(pi)
    return out


@dataclass(frozen=True)
class EnumerationResult:
    matchings: tuple[Matching, ...]
    exhaustive: bool
    nodes: int


def enumerate_stable(
    inst: Instance,
    limit: int | None = None,
    budget: int | None = None,
    on_prune: Callable[[Coalition], None] | None = None,
) -> EnumerationResult:
    """Branch-and-bound enumeration of all stable matchings.

    The lowest-id unmatched agent is extended with every id-ordered candidate
    group.  A partial assignment dies as soon as some size-d coalition of
    already-matched agents blocks it: those agents' sums are final in every
    extension, so the cut is sound.  ``on_prune`` observes each cut with the
    blocking coalition and the partial groups at that node (test hook).
    """
    ids = sorted(inst.ids)
    d = inst.d
    n = len(ids)
    idx_of = {i: k for k, i in enumerate(np.array(inst.ids))}
    coords = inst.coords
    tau = inst.tolerance
    dm = inst.dist_matrix() if n <= 2048 else None

    def pdist(a: str, b: str) -> float:
        ia, ib = idx_of[a], idx_of[b]
        if dm is not None:
            return float(dm[ia, ib])
        return float(np.hypot(*(coords[ia] - coords[ib])))

    sums: dict[str, float] = {}
    found: list[Matching] = []
    nodes = 0
    budget_left = [budget if budget is not None else -1]
    exhausted = [False]

    def group_sums(group: list[str]) -> dict[str, float]:
        out = {}
        for a in group:
            out[a] = sum(pdist(a, b) for b in group if b != a)
        return out

    def blocked_by_matched(new_group: list[str]) -> Coalition | None:
        """A blocking coalition among matched agents that touches new_group, if any."""
        matched = list(sums.keys())
        # candidates: for each member of the new group, matched agents inside
        # both improvement radii; any blocker containing a new member is found
        # from that member, and blockers avoiding the new group were ruled out
        # at an earlier node.
        for a in new_group:
            ra = sums[a] - tau
            if ra <= 0:
                continue
            pool = [
                b
                for b in matched
                if b != a and (delta := pdist(a, b)) < ra and delta < sums[b] - tau
            ]
            pool.sort()
            if len(pool) < d - 1:
                continue
            for combo in itertools.combinations(pool, d - 1):
                members = sorted([a, *combo])
                ok = True
                for m in members:
                    s = sum(pdist(m, x) for x in members if x != m)
                    if not (s < sums[m] - tau):
                        ok = False
                        break
                if ok:
                    return Coalition.of(members)
        return None

    def rec(remaining: tuple[str, ...], acc: list[list[str]]) -> bool:
        nonlocal nodes
        if limit is not None and len(found) >= limit:
            return False
        if budget_left[0] == 0:
            exhausted[0] = True
            return False
        if budget_left[0] > 0:
            budget_left[0] -= 1
        nodes += 1
        if not remaining:
            found.append(Matching.of(inst, [list(g) for g in acc]))
            return True
        head, rest = remaining[0], remaining[1:]
        for combo in itertools.combinations(rest, d - 1):
            group = [head, *combo]
            gs = group_sums(group)
            sums.update(gs)
            blocker = blocked_by_matched(group)
            if blocker is None:
                left = tuple(x for x in rest if x not in combo)
                acc.append(group)
                rec(left, acc)
                acc.pop()
            elif on_prune is not None:
                on_prune(blocker, [list(g) for g in acc] + [list(group)])
            for a in group:
                del sums[a]
            if limit is not None and len(found) >= limit:
                return False
            if budget_left[0] == 0:
                exhausted[0] = True
                return False
        return True

    rec(tuple(ids), [])
    truncated = exhausted[0] or (limit is not None and len(found) >= limit)
    return EnumerationResult(tuple(found), not truncated, nodes)


@dataclass(frozen=True)
class ExistsResult:
    verdict: str  # YES | NO | UNKNOWN
    witness: Matching | None = None


def exists_stable(inst: Instance, budget: int | None = None) -> ExistsResult:
    """YES with a witness, NO only on exhaustive failure, UNKNOWN on budget cuts."""
    if inst.d == 2:
        return ExistsResult("YES", greedy_match_2(inst))
    res = enumerate_stable(inst, limit=1, budget=budget)
    if res.matchings:
        return ExistsResult("YES", res.matchings[0])
    if res.exhaustive:
        return ExistsResult("NO")
    return ExistsResult("UNKNOWN")
