import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from euclid_sr.core import Matching
from euclid_sr.errors import ConstructionError
from euclid_sr.gadgets import (
    PHI,
    Pose,
    Star3Params,
    StarDParams,
    StarInstance,
    build_star3,
    build_starD,
    build_starD_closed,
    garbage_size,
    star_solution_groups,
    validate_star3,
    validate_starD,
)
from euclid_sr.stability import verify_stable


def test_default_params_derived_values():
    p = Star3Params()
    assert p.ell == pytest.approx(PHI * 6.6, abs=1e-12)
    # law of cosines at the pentagon vertex: theta ~ 71.8 degrees, under 90
    cos_theta = (p.a**2 + p.b**2 - p.c**2) / (2 * p.a * p.b)
    theta = math.degrees(math.acos(cos_theta))
    assert theta == pytest.approx(71.85, abs=0.1)
    assert theta <= 90.0
    assert not p.violations()


def test_build_star3_passes_validator():
    star = build_star3()
    report = validate_star3(star)
    assert report.ok, report.summary()


def test_outer_next_neighbor_exceeds_diagonal():
    star = build_star3()
    pos = star.positions()
    p = star.params
    for i in range(5):
        j = (i + 1) % 5 + 5
        d = math.dist(pos[str(j)], pos[str(i)])
        assert d > p.ell


@settings(max_examples=20, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(0, 2 * math.pi))
def test_pose_invariance(dx, dy, angle):
    base = build_star3()
    moved = build_star3(pose=Pose(dx, dy, angle))
    rep = validate_star3(moved)
    assert rep.ok
    # all pairwise distances invariant under the pose
    p0 = base.positions()
    p1 = moved.positions()
    for a in ("0", "5", "10"):
        for b in ("3", "7", "11"):
            assert math.dist(p0[a], p0[b]) == pytest.approx(math.dist(p1[a], p1[b]), abs=1e-9)


def test_validator_detects_perturbed_point_10():
    star = build_star3()
    agents = list(star.agents)
    # drop point 10 onto the pentagon: containment fails
    agents[10] = agents[10].__class__(agents[10].id, agents[0].pos, agents[10].tag)
    bad = StarInstance(tuple(agents), star.params, star.pose, star.kind, star.roles)
    rep = validate_star3(bad)
    assert not rep.ok
    assert any("W∖{5,10,11}" in c.name for c in rep.failures)


def test_degenerate_params_rejected():
    with pytest.raises(ConstructionError):
        build_star3(params=Star3Params(b=10.2, c=10.2))  # b == c


def test_validator_sensitivity_to_2eps_perturbations():
    # nudging any single constrained agent by +2 epsilon radially must trip
    # at least one check
    star = build_star3()
    eps = star.params.epsilon
    for k in range(12):
        agents = list(star.agents)
        a = agents[k]
        r = math.hypot(a.pos.x, a.pos.y) or 1.0
        moved = a.__class__(
            a.id,
            type(a.pos)(a.pos.x * (1 + 2 * eps / r), a.pos.y * (1 + 2 * eps / r)),
            a.tag,
        )
        agents[k] = moved
        bad = StarInstance(tuple(agents), star.params, star.pose, star.kind, star.roles)
        assert not validate_star3(bad).ok, f"agent {k} perturbation went unnoticed"


def test_starD_odd_counts_and_validation():
    star = build_starD(d=5)
    assert len(star.agents) == 7 * 2 + 5  # kappa = 2
    assert validate_starD(star).ok


def test_starD_even_counts_and_validation():
    star = build_starD(d=4)
    assert len(star.agents) == 7 * 1 + 11  # kappa = 1
    assert validate_starD(star).ok


def test_starD_param_relations_even_example():
    # the documented example parameter set satisfies the stated inequality
    # system (it is not embeddable as a star: the outer pairs would not be
    # near-coincident, which is why the builder defaults use micro offsets)
    p = StarDParams(4, a=9.0, b=10.1, c=10.2, b_prime=10.3, c_prime=10.4)
    assert p.ell == pytest.approx(14.5623, abs=1e-3)
    assert p.b + p.b_prime == pytest.approx(20.4) and 3 * p.a == 27.0
    assert p.c + p.c_prime == pytest.approx(20.6)
    assert p.b + p.b_prime < p.a + p.ell
    assert p.c + p.c_prime < p.b + p.ell
    assert not p.violations()


def test_starD_odd_param_violations():
    p = StarDParams(5, a=4.0, b=10.1, c=10.2)  # b >= 2a
    assert "b<2a" in p.violations()


def test_starD_even_requires_primes():
    p = StarDParams(4, a=9.0, b=10.1, c=10.2)
    assert "even d requires b_prime and c_prime" in p.violations()


def test_starD_validator_detects_moved_outer():
    star = build_starD(d=5)
    agents = list(star.agents)
    k = next(i for i, a in enumerate(agents) if a.id == "0")
    a = agents[k]
    agents[k] = a.__class__(a.id, type(a.pos)(a.pos.x + 0.01, a.pos.y), a.tag)
    bad = StarInstance(tuple(agents), star.params, star.pose, star.kind, star.roles)
    assert not validate_starD(bad).ok


def test_garbage_sizes_by_parity():
    assert garbage_size(5) == 1
    assert garbage_size(7) == 2
    assert garbage_size(4) == 2
    assert garbage_size(6) == 5
    assert garbage_size(8) == 0


def test_closed_star_solution_is_stable_odd():
    # the odd-d claim is sharp: Y u {0} is forced, and the solution shape
    # built around it survives the blocking search
    inst, roles = build_starD_closed(5)
    assert len(inst) % 5 == 0
    groups = star_solution_groups(roles, 5, roles["R"])
    pi = Matching.of(inst, groups)
    verdict = verify_stable(pi, inst)
    assert verdict.stable, verdict.witness
    y_group = next(g for g in groups if set(roles["Y"]) <= set(g))
    assert set(y_group) == set(roles["Y"]) | {roles["outer"][0]}


def test_closed_star_even_necessity_sampled():
    # even d only forces Y to meet 0 or 1: matchings where both avoid Y
    # always admit a blocking coalition
    import numpy as np

    from euclid_sr.stability import find_blocking

    inst, roles = build_starD_closed(4)
    ids = sorted(inst.ids)
    y = set(roles["Y"])
    zero_one = {roles["outer"][0], roles["outer"][1]}
    rng = np.random.Generator(np.random.Philox(14))
    checked = 0
    while checked < 60:
        perm = rng.permutation(len(ids))
        groups = [[ids[m] for m in perm[k : k + 4]] for k in range(0, len(ids), 4)]
        bad = any(set(g) & y and set(g) & zero_one for g in groups)
        if bad:
            continue
        checked += 1
        pi = Matching.of(inst, groups)
        assert find_blocking(pi, inst) is not None
