"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance and budget is pinned here, not configured elsewhere.
"""
import itertools
import math
import time

import numpy as np
import pytest

from euclid_sr import io as eio
from euclid_sr.core import Agent, Coalition, Instance, Matching, Point
from euclid_sr.fixtures import prism_layout, prism_x3c
from euclid_sr.gadgets import StarInstance, build_star3, build_starD, validate_star3, validate_starD
from euclid_sr.lemmas import check_chain_dichotomy, check_star3, sample_starD_necessity
from euclid_sr.reduction import build_solution, extract_cover, validate_reduced
from euclid_sr.solvers import greedy_match_2
from euclid_sr.stability import SearchMode, find_blocking, verify_stable
from euclid_sr.x3c import solve_x3c_bruteforce


def _report(num: int, took: float, budget: float, detail: str) -> None:
    assert took < budget, f"criterion {num} exceeded its {budget}s budget ({took:.1f}s)"
    print(f"ACCEPTANCE {num}: PASS ({took:.1f}s < {budget:.0f}s) {detail}")


def test_criterion_01_lemma2_exhaustive():
    t0 = time.time()
    result = check_star3()
    assert result.partitions == 15400
    assert result.all_contain_51011
    # stable-matching count frozen from the derived reference run
    assert len(result.stable) == 3
    _report(1, time.time() - t0, 5.0, result.summary())


def test_criterion_02_greedy_d2_correctness():
    t0 = time.time()
    rng = np.random.Generator(np.random.Philox(2024))
    for trial in range(200):
        n = int(rng.integers(5, 21)) * 2  # 10..40 agents
        pts = rng.uniform(0.0, 1000.0, size=(n, 2))
        inst = Instance(2, [Agent(f"a{k:02d}", Point(*p)) for k, p in enumerate(pts)])
        verdict = verify_stable(greedy_match_2(inst), inst)
        assert verdict.stable, f"trial {trial}: greedy output unstable"
    _report(2, time.time() - t0, 10.0, "200/200 greedy matchings verified stable")


def test_criterion_03_checker_oracle_equivalence():
    t0 = time.time()
    rng = np.random.Generator(np.random.Philox(777))
    agree = 0
    for trial in range(500):
        n = int(rng.integers(2, 6)) * 3  # 6..15 agents
        pts = rng.uniform(0.0, 100.0, size=(n, 2))
        inst = Instance(3, [Agent(f"a{k:02d}", Point(*p)) for k, p in enumerate(pts)])
        perm = rng.permutation(n)
        ids = list(inst.ids)
        pi = Matching.of(inst, [[ids[m] for m in perm[k : k + 3]] for k in range(0, n, 3)])
        naive = find_blocking(pi, inst, SearchMode.NAIVE)
        pruned = find_blocking(pi, inst, SearchMode.PRUNED)
        assert (naive is None) == (pruned is None), f"trial {trial}: verdicts differ"
        agree += 1
    _report(3, time.time() - t0, 60.0, f"{agree}/500 NAIVE and PRUNED verdicts identical")


def test_criterion_04_chain_dichotomy_exhaustive():
    t0 = time.time()
    result = check_chain_dichotomy()
    assert result.enumeration.exhaustive
    assert result.all_dichotomous, result.phases
    assert result.all_contain_H
    assert len(result.enumeration.matchings) >= 2  # both phases realized
    _report(4, time.time() - t0, 600.0, result.summary())


@pytest.fixture(scope="module")
def covers():
    return solve_x3c_bruteforce(prism_x3c())


def test_criterion_05_forward_direction_d3(reduced_d3, covers):
    inst, cert = reduced_d3
    t0 = time.time()
    pi = Matching.of(inst, build_solution(cert, covers))
    verdict = verify_stable(pi, inst)
    assert verdict.stable, verdict.witness
    _report(5, time.time() - t0, 60.0, f"d=3 solution over {len(inst)} agents is stable")


def test_criterion_06_forward_direction_d4_d5(reduced_d4, reduced_d5, covers):
    for num, (inst, cert) in (("d=4", reduced_d4), ("d=5", reduced_d5)):
        t0 = time.time()
        pi = Matching.of(inst, build_solution(cert, covers))
        verdict = verify_stable(pi, inst)
        assert verdict.stable, verdict.witness
        _report(6, time.time() - t0, 120.0, f"{num} solution over {len(inst)} agents is stable")


def test_criterion_07_roundtrip(reduced_d3, reduced_d4, reduced_d5, covers):
    t0 = time.time()
    for inst, cert in (reduced_d3, reduced_d4, reduced_d5):
        groups = build_solution(cert, covers)
        got, problems = extract_cover(cert, groups)
        assert not problems
        assert got.indices == covers.indices
        assert not got.violations(prism_x3c())
    _report(7, time.time() - t0, 1.0, "extract_cover . build_solution = identity at d=3,4,5")


def _perturb(star, k, delta):
    agents = list(star.agents)
    a = agents[k]
    r = math.hypot(a.pos.x, a.pos.y) or 1.0
    agents[k] = a.__class__(
        a.id, type(a.pos)(a.pos.x * (1 + delta / r), a.pos.y * (1 + delta / r)), a.tag
    )
    return StarInstance(tuple(agents), star.params, star.pose, star.kind, star.roles)


def test_criterion_08_validator_sensitivity():
    t0 = time.time()
    star3 = build_star3()
    assert validate_star3(star3).ok
    eps = star3.params.epsilon
    for k in range(len(star3.agents)):
        assert not validate_star3(_perturb(star3, k, 2 * eps)).ok, f"star3 agent {k}"
    tripped = 0
    for d in (4, 5):
        star = build_starD(d=d)
        assert validate_starD(star).ok
        for k in range(len(star.agents)):
            assert not validate_starD(_perturb(star, k, 2 * eps)).ok, f"starD(d={d}) agent {k}"
            tripped += 1
    _report(8, time.time() - t0, 1.0,
            f"defaults pass; every +2eps perturbation trips a check ({12 + tripped} agents)")


def test_criterion_09_lemma9_sampled_necessity():
    t0 = time.time()
    result = sample_starD_necessity(d=5, samples=10_000, seed=0)
    assert result.all_blocked, result.summary()
    _report(9, time.time() - t0, 300.0, result.summary())


def test_criterion_10_distance_literal_audit(reduced_d3, reduced_d4, reduced_d5):
    # every quoted distance constant is re-measured within 1e-6 on the built
    # fixtures; the set gadget's corner spacing for d >= 4 is the one
    # documented substitution (10*sqrt(3), realizing the exact W-distance 10,
    # in place of the unrealizable 17.5/10 pairing)
    t0 = time.time()
    for inst, cert in (reduced_d3, reduced_d4, reduced_d5):
        rep = validate_reduced(inst, cert)
        assert rep.ok, rep.summary()
        names = " | ".join(c.name for c in rep.checks)
        assert "== 8" in names and "[10+eps, 10+2eps)" in names
        if cert.d == 3:
            assert "10+2eps" in names and "10+3eps" in names and "10+4eps" in names
        else:
            assert "15+3eps" in names and "15+4eps" in names and "10+15/(d-1)" in names
            assert "W to corner == 10" in names
            assert "(ell, 2ell)" in names
    _report(10, time.time() - t0, 5.0, "all audited distance literals hold within 1e-6")


def test_criterion_11_io_byte_stability(reduced_d3, covers, tmp_path):
    t0 = time.time()
    inst, cert = reduced_d3
    pi = Matching.of(inst, build_solution(cert, covers))
    jobs = [
        ("instance", lambda p: eio.write_instance(inst, p), eio.read_instance),
        ("matching", lambda p: eio.write_matching(pi, p), lambda p: eio.read_matching(p, inst)),
        ("x3c", lambda p: eio.write_x3c(prism_x3c(), p), eio.read_x3c),
        ("layout", lambda p: eio.write_layout(prism_layout(), p), eio.read_layout),
        ("certificate", lambda p: eio.write_certificate(cert, p), eio.read_certificate),
        ("cover", lambda p: eio.write_cover(covers, p), eio.read_cover),
    ]
    for name, write, read in jobs:
        p1 = tmp_path / f"{name}1.json"
        p2 = tmp_path / f"{name}2.json"
        write(p1)
        write(p2)
        assert p1.read_bytes() == p2.read_bytes(), f"{name}: write not byte-stable"
        back = read(p1)
        p3 = tmp_path / f"{name}3.json"
        if name == "instance":
            eio.write_instance(back, p3)
        elif name == "matching":
            eio.write_matching(back, p3)
        elif name == "x3c":
            eio.write_x3c(back, p3)
        elif name == "layout":
            eio.write_layout(back, p3)
        elif name == "certificate":
            eio.write_certificate(back, p3)
        else:
            eio.write_cover(back, p3)
        assert p1.read_bytes() == p3.read_bytes(), f"{name}: read/write not an identity"
    _report(11, time.time() - t0, 1.0, "six formats byte-stable and read/write-idempotent")
