import itertools
import math

import pytest

from euclid_sr.core import Coalition, Matching
from euclid_sr.errors import ChainFitError, ContractViolation
from euclid_sr.fixtures import prism_layout, prism_x3c
from euclid_sr.reduction import (
    ReductionCertificate,
    build_epsilons,
    build_solution,
    chain_length,
    epsilon_bounds,
    extract_cover,
    validate_reduced,
)
from euclid_sr.stability import find_blocking, verify_stable
from euclid_sr.x3c import Cover


def test_chain_length_examples():
    assert chain_length(40, 0) == 2       # sum for 4 terms is 32.10, for 6 terms 48.21
    assert chain_length(16.03, 0) == 1    # exactly the boundary
    assert chain_length(120, 80) == 12    # 24 terms sum to 195
    with pytest.raises(ContractViolation):
        chain_length(10, 0)


def test_epsilon_bounds_pin_paper_band():
    lb, ub = epsilon_bounds(2)
    assert lb == pytest.approx(1.2)
    assert ub == pytest.approx(1.5)
    lb, ub = epsilon_bounds(12)
    assert lb == pytest.approx(1.84)
    assert ub == pytest.approx(23 / 12)


@pytest.mark.parametrize("total", [36.0, 36.8, 37.6])
def test_build_epsilons_exact_fit_n2(total):
    eps, bend = build_epsilons(2, total, 5e-4)
    assert bend is None
    assert len(eps) == 4
    assert eps[-1] == 2 - 5e-4
    assert 1.2 - 1e-9 <= eps[2] <= 1.5 + 1e-9
    assert all(b > a for a, b in zip(eps, eps[1:]))
    assert sum(8 + e for e in eps) == pytest.approx(total, abs=1e-9)


def test_build_epsilons_n12_band():
    eps, _ = build_epsilons(12, 205.0, 5e-4)
    assert len(eps) == 24
    assert 1.84 - 1e-9 <= eps[22] <= 23 / 12 + 1e-9
    assert all(b > a for a, b in zip(eps, eps[1:]))


def test_build_epsilons_bend_lands_on_gamma():
    total, leg1 = 781.6, 427.4
    eps, zp = build_epsilons(46, total, 5e-4, prefix_length=leg1)
    assert zp is not None and 1 <= zp <= 45
    assert sum(8 + e for e in eps[: 2 * zp]) == pytest.approx(leg1, abs=1e-7)
    assert sum(8 + e for e in eps) == pytest.approx(total, abs=1e-7)


def test_build_epsilons_infeasible():
    with pytest.raises(ChainFitError):
        build_epsilons(2, 20.0, 5e-4)  # far below 16*2
    with pytest.raises(ChainFitError):
        build_epsilons(1, 40.0, 5e-4, prefix_length=20.0)  # bend needs n >= 2


def test_reduced_d3_passes_post_validator(reduced_d3):
    inst, cert = reduced_d3
    rep = validate_reduced(inst, cert)
    assert rep.ok, rep.summary()
    # the designed equality dist(10,h) == dist(5,10) - eps is flagged per edge
    assert len(rep.boundary_cases) == len(cert.edges)


def test_reduced_d3_counts(reduced_d3):
    inst, cert = reduced_d3
    assert len(inst) % 3 == 0
    for key, e in cert.edges.items():
        # 15 star/tail agents per incidence at d=3: 12 star + f, g, h
        assert len(e["star"]["ids"]) == 12
        assert len(e["F"]) == 2
        assert len(e["pairs"]) == e["n_hat"]
        assert len(e["gammas"]) == e["n_hat"] - 1
        chain_agents = 2 * e["n_hat"] + (e["n_hat"] - 1)
        assert chain_agents == 3 * e["n_hat"] - 1


def test_reduced_d3_distance_literals(reduced_d3):
    inst, cert = reduced_d3
    pos = {a.id: (a.pos.x, a.pos.y) for a in inst.agents}
    eps = cert.epsilon

    def dd(a, b):
        return math.dist(pos[a], pos[b])

    e = cert.edges[sorted(cert.edges)[0]]
    h = e["h"]
    f, g = e["F"]
    s = e["star"]["ids"]
    assert dd(h, f) == pytest.approx(10 + 2 * eps, abs=1e-6)
    assert dd(h, g) == pytest.approx(10 + 2 * eps, abs=1e-6)
    assert dd(s[10], h) == pytest.approx(10 + 3 * eps, abs=1e-6)
    assert dd(s[11], h) == pytest.approx(10 + 3 * eps, abs=1e-6)
    assert dd(s[5], s[10]) == pytest.approx(10 + 4 * eps, abs=1e-6)
    for x in (*e["pairs"][-1], e["corner"]):
        assert 10 + eps <= dd(f, x) < 10 + 2 * eps
    # element triangle and set triangle
    leaves = [cert.elements["1"]["leaves"][k] for k in sorted(cert.elements["1"]["leaves"])]
    for a, b in itertools.combinations(leaves, 2):
        assert dd(a, b) == pytest.approx(8.0, abs=1e-6)
    corners = list(cert.sets["1"]["corners"].values())
    for a, b in itertools.combinations(corners, 2):
        assert dd(a, b) == pytest.approx(10.0, abs=1e-6)


def test_forward_solution_stable_d3(reduced_d3, solution_d3):
    inst, _ = reduced_d3
    assert verify_stable(solution_d3, inst).stable


def test_chain_phase_matches_cover_d3(reduced_d3, fixture_cover, solution_d3):
    _, cert = reduced_d3
    chosen = {j + 1 for j in fixture_cover.indices}
    for key, e in cert.edges.items():
        _, j = map(int, key.split(":"))
        first_shifted = Coalition.of(e["pairs"][0] + [e["leaf"]])
        assert (first_shifted in solution_d3) == (j in chosen)


def test_roundtrip_d3(reduced_d3, fixture_cover, solution_d3):
    _, cert = reduced_d3
    cover, problems = extract_cover(cert, solution_d3.groups())
    assert not problems
    assert cover.indices == fixture_cover.indices


def test_all_three_covers_roundtrip_d3(reduced_d3):
    inst, cert = reduced_d3
    for cover in (Cover((0, 1)), Cover((2, 3)), Cover((4, 5))):
        groups = build_solution(cert, cover)
        Matching.of(inst, groups)  # valid partition for every cover
        got, problems = extract_cover(cert, groups)
        assert not problems
        assert got.indices == cover.indices


def test_build_solution_rejects_invalid_cover(reduced_d3):
    _, cert = reduced_d3
    with pytest.raises(ContractViolation):
        build_solution(cert, Cover((0, 2)))  # overlapping sets


def test_extract_cover_reports_problems_on_garbage_matching(reduced_d3):
    inst, cert = reduced_d3
    ids = sorted(inst.ids)
    groups = [ids[k : k + 3] for k in range(0, len(ids), 3)]
    cover, problems = extract_cover(cert, groups)
    assert problems  # arbitrary matchings do not encode a cover


def test_unstable_variant_detected_d3(reduced_d3, fixture_cover):
    # matching the set triangle of an unchosen set (its chains left in the
    # all-A phase) leaves the enforcement pair f,g able to grab the corner
    inst, cert = reduced_d3
    groups = build_solution(cert, fixture_cover)
    unchosen = next(j for j in sorted(cert.sets) if int(j) - 1 not in fixture_cover.indices)
    # swap: free the corners of `unchosen` out of their chains
    key = next(k for k in sorted(cert.edges) if k.endswith(f":{unchosen}"))
    e = cert.edges[key]
    corner = e["corner"]
    last_pair = e["pairs"][-1]
    gamma_prev = ([e["leaf"]] + e["gammas"])[-1]
    a_last = sorted(last_pair + [corner])
    shifted_last = sorted(last_pair + [gamma_prev])
    assert a_last in [sorted(g) for g in groups]
    mutated = [g for g in groups if sorted(g) != a_last]
    # break the tail triple to absorb the freed agents (any rearrangement
    # keeping a partition will do; stability must now fail)
    f, g_, h = e["F"][0], e["F"][1], e["h"]
    tail = next(gr for gr in mutated if sorted(gr) == sorted([f, g_, h]))
    mutated.remove(tail)
    mutated += [[corner, f, g_], [h] + [x for x in shifted_last if x != corner][:2]]
    leftovers = set(inst.ids) - {m for gr in mutated for m in gr}
    assert len(leftovers) % 3 == 0
    rest = sorted(leftovers)
    mutated += [rest[k : k + 3] for k in range(0, len(rest), 3)]
    pi = Matching.of(inst, mutated)
    assert find_blocking(pi, inst) is not None


def test_certificate_roundtrips_as_dict(reduced_d3):
    _, cert = reduced_d3
    doc = cert.to_dict()
    back = ReductionCertificate.from_dict(doc)
    assert back.to_dict() == doc


def test_reduced_d4_gadget_sizes(reduced_d4):
    inst, cert = reduced_d4
    assert len(inst) % 4 == 0
    assert len(cert.junk) == 4  # m - n garbage triples
    for entry in cert.junk:
        assert len(entry["ids"]) == 3
    for entry in cert.sets.values():
        assert len(entry["cluster"]) == 1  # W_j of size d-3
    for entry in cert.elements.values():
        assert len(entry["center"]) == 2  # U_i of size d-2
    for e in cert.edges.values():
        assert all(len(p) == 3 for p in e["pairs"])  # A-hat layers of size d-1
        assert len(e["R"]) == 2  # 2d - kappa - 5 at d=4
        assert len(e["Y"]) == 3


def test_reduced_d5_star_roles(reduced_d5):
    _, cert = reduced_d5
    for e in cert.edges.values():
        roles = e["star"]["roles"]
        assert len(roles["outer"]) == 5  # odd-d star: five outer points
        assert all(len(roles[f"X{i}"]) == 2 for i in range(5))  # kappa = 2
        assert len(e["R"]) == 1  # d - kappa - 2 at d=5


def test_reduce_is_deterministic(reduced_d3):
    from euclid_sr import io as eio
    from euclid_sr.reduction import ReductionParams
    from euclid_sr.reduction import reduce as reduce_x3c

    inst1, cert1 = reduced_d3
    inst2, cert2 = reduce_x3c(prism_x3c(), prism_layout(), d=3, params=ReductionParams(L=40))
    assert eio.write_instance(inst1) == eio.write_instance(inst2)
    assert eio.write_certificate(cert1) == eio.write_certificate(cert2)
