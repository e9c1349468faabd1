"""Blocking-coalition detection: a naive enumerator and a spatially pruned search.

A coalition W blocks a matching when every member's distance sum inside W
beats its assigned coalition by more than the instance tolerance.  The
pruned search exploits that every member of a blocking coalition must lie
within every other member's improvement radius (its current distance sum),
which keeps candidate pools tiny on gadget-style instances.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from statistics import median

import numpy as np

from .core import Coalition, Instance, Matching, sum_dist
from .errors import ContractViolation


class SearchMode(Enum):
    NAIVE = "NAIVE"
    PRUNED = "PRUNED"


@dataclass(frozen=True)
class BlockingWitness:
    coalition: Coalition
    improvements: tuple[tuple[str, float, float], ...]  # (agent, old sum, new sum)


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    witness: BlockingWitness | None = None

    def __bool__(self) -> bool:
        return self.stable


class SpatialGrid:
    """Uniform-bucket index over agent positions for radius queries.

    Cell size follows the median nearest-neighbor distance, clamped from
    below by diameter/512: cluster-heavy instances (members 1e-8 apart)
    would otherwise degenerate into per-point cells.
    """

    def __init__(self, inst: Instance):
        coords = inst.coords
        n = len(coords)
        if n >= 2:
            sample = coords if n <= 512 else coords[:: max(1, n // 512)]
            nn = []
            for p in sample:
                d = np.hypot(*(coords - p).T)
                d[d == 0.0] = np.inf
                nn.append(float(d.min()))
            cell = max(median(nn), inst.diameter() / 512.0, 1e-12)
        else:
            cell = 1.0
        self.cell = cell
        self._buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        for k, (x, y) in enumerate(coords):
            self._buckets[(int(x // cell), int(y // cell))].append(k)
        self._coords = coords

    def within(self, k: int, radius: float) -> np.ndarray:
        """Indices of agents within ``radius`` of agent k (k excluded)."""
        x, y = self._coords[k]
        c = self.cell
        span = int(radius // c) + 1
        cx, cy = int(x // c), int(y // c)
        out: list[int] = []
        for bx in range(cx - span, cx + span + 1):
            for by in range(cy - span, cy + span + 1):
                out.extend(self._buckets.get((bx, by), ()))
        idx = np.array([i for i in out if i != k], dtype=int)
        if idx.size == 0:
            return idx
        d = np.hypot(*(self._coords[idx] - self._coords[k]).T)
        return idx[d <= radius]


def current_sums(pi: Matching, inst: Instance) -> np.ndarray:
    """Per-agent distance sum inside its assigned coalition, indexed like inst.agents."""
    sums = np.zeros(len(inst))
    for c in pi.coalitions:
        idx = np.array([inst.index(m) for m in c.members])
        pts = inst.coords[idx]
        diff = pts[:, None, :] - pts[None, :, :]
        sums[idx] = np.sqrt((diff * diff).sum(axis=2)).sum(axis=1)
    return sums


def _witness(inst: Instance, pi: Matching, members_idx) -> BlockingWitness:
    ids = sorted(inst.ids[k] for k in members_idx)
    improvements = []
    for a in ids:
        old = sum_dist(a, pi.coalition_of(a), inst)
        new = sum_dist(a, ids, inst)
        improvements.append((a, old, new))
    return BlockingWitness(Coalition.of(ids), tuple(improvements))


def is_blocking(w, pi: Matching, inst: Instance) -> BlockingWitness | None:
    """Witness iff every member of w strictly improves over its assignment."""
    w = w if isinstance(w, Coalition) else Coalition.of(w)
    if len(w) != inst.d:
        raise ContractViolation(f"coalition size {len(w)} != d={inst.d}")
    idx = [inst.index(m) for m in w.members]
    pts = inst.coords[idx]
    diff = pts[:, None, :] - pts[None, :, :]
    new = np.sqrt((diff * diff).sum(axis=2)).sum(axis=1)
    for k, a in enumerate(w.members):
        old = sum_dist(a, pi.coalition_of(a), inst)
        if not (new[k] < old - inst.tolerance):
            return None
    return _witness(inst, pi, idx)


def _naive_scan(inst: Instance, pi: Matching, sums: np.ndarray) -> BlockingWitness | None:
    tau = inst.tolerance
    order = np.argsort(np.array(inst.ids)).tolist()
    dm = inst.dist_matrix()
    # chunked so NAIVE stays usable (if slow) on mid-size instances
    combo_iter = itertools.combinations(order, inst.d)
    while True:
        chunk = list(itertools.islice(combo_iter, 200_000))
        if not chunk:
            return None
        combos = np.array(chunk)
        member_sums = np.zeros(combos.shape)
        for a in range(inst.d):
            for b in range(inst.d):
                if a != b:
                    member_sums[:, a] += dm[combos[:, a], combos[:, b]]
        ok = np.all(member_sums < sums[combos] - tau, axis=1)
        hits = np.flatnonzero(ok)
        if hits.size:
            # combos over id-sorted agents come out in lexicographic id order
            return _witness(inst, pi, combos[hits[0]].tolist())


def _pool_for(
    inst: Instance, sums: np.ndarray, k: int, rank: np.ndarray, grid: SpatialGrid | None
) -> np.ndarray:
    """Candidate co-members for blocking coalitions whose lex-least member is k.

    v qualifies only if d(k, v) sits under both improvement radii and v comes
    after k in id order; both conditions are necessary for membership, so the
    pruned scan stays exhaustive.
    """
    tau = inst.tolerance
    if grid is not None:
        idx = grid.within(k, max(sums[k] - tau, 0.0))
        if idx.size == 0:
            return idx
        d = np.hypot(*(inst.coords[idx] - inst.coords[k]).T)
        ok = (d < sums[k] - tau) & (d < sums[idx] - tau) & (rank[idx] > rank[k])
        return idx[ok]
    d = inst.row_dists(k)
    ok = (d < sums[k] - tau) & (d < sums - tau) & (rank > rank[k])
    ok[k] = False
    return np.flatnonzero(ok)


def _scan_agent(
    inst: Instance,
    pi: Matching,
    sums: np.ndarray,
    k: int,
    rank: np.ndarray,
    grid: SpatialGrid | None = None,
) -> BlockingWitness | None:
    pool = _pool_for(inst, sums, k, rank, grid)
    need = inst.d - 1
    if pool.size < need:
        return None
    pool = pool[np.argsort(rank[pool])]
    coords = inst.coords
    tau = inst.tolerance
    dk = inst.row_dists(k)
    if pool.size <= 40:
        combos = list(itertools.combinations(pool.tolist(), need))
        if not combos:
            return None
        arr = np.array(combos)  # (m, need)
        # member sums: distance to k plus pairwise distances within the combo
        pts = coords[arr]  # (m, need, 2)
        diff = pts[:, :, None, :] - pts[:, None, :, :]
        inner = np.sqrt((diff * diff).sum(axis=3)).sum(axis=2)  # (m, need)
        to_k = dk[arr]
        new_members = inner + to_k
        new_k = to_k.sum(axis=1)
        ok = (new_k < sums[k] - tau) & np.all(new_members < sums[arr] - tau, axis=1)
        hits = np.flatnonzero(ok)
        if hits.size:
            return _witness(inst, pi, [k] + arr[hits[0]].tolist())
        return None
    # rare fat pool: DFS in id order, pruned on k's own partial sum
    pool_list = pool.tolist()

    def dfs(start: int, chosen: list[int], sum_k: float) -> list[int] | None:
        if sum_k >= sums[k] - tau:
            return None
        if len(chosen) == need:
            idxs = [k] + chosen
            pts = coords[idxs]
            diff = pts[:, None, :] - pts[None, :, :]
            new = np.sqrt((diff * diff).sum(axis=2)).sum(axis=1)
            if np.all(new < sums[idxs] - tau):
                return chosen
            return None
        for pos in range(start, len(pool_list) - (need - len(chosen)) + 1):
            v = pool_list[pos]
            r = dfs(pos + 1, chosen + [v], sum_k + dk[v])
            if r is not None:
                return r
        return None

    hit = dfs(0, [], 0.0)
    if hit is not None:
        return _witness(inst, pi, [k] + hit)
    return None


def find_blocking(
    pi: Matching,
    inst: Instance,
    mode: SearchMode = SearchMode.PRUNED,
    jobs: int = 1,
) -> BlockingWitness | None:
    """First blocking coalition in lexicographic id order, or None.

    NAIVE enumerates every size-d subset; PRUNED restricts each scan to the
    improvement-radius pool.  Both agree on existence, and both report the
    lexicographically first witness.
    """
    sums = current_sums(pi, inst)
    if mode is SearchMode.NAIVE:
        return _naive_scan(inst, pi, sums)
    ids = np.array(inst.ids)
    order = np.argsort(ids)
    rank = np.empty(len(ids), dtype=int)
    rank[order] = np.arange(len(ids))
    grid = SpatialGrid(inst) if len(inst) > 512 else None
    if jobs <= 1:
        for k in order.tolist():
            w = _scan_agent(inst, pi, sums, k, rank, grid)
            if w is not None:
                return w
        return None
    # parallel chunks; the reported witness is still the lex-first because
    # chunks are consumed in rank order and each chunk scans in rank order
    chunk = max(8, len(order) // (jobs * 4))
    chunks = [order[i : i + chunk].tolist() for i in range(0, len(order), chunk)]

    def scan_chunk(ks: list[int]) -> BlockingWitness | None:
        for k in ks:
            w = _scan_agent(inst, pi, sums, k, rank, grid)
            if w is not None:
                return w
        return None

    with ThreadPoolExecutor(max_workers=jobs) as ex:
        for res in ex.map(scan_chunk, chunks):
            if res is not None:
                return res
    return None


def verify_stable(pi: Matching, inst: Instance, jobs: int = 1) -> StabilityVerdict:
    w = find_blocking(pi, inst, SearchMode.PRUNED, jobs=jobs)
    return StabilityVerdict(w is None, w)
