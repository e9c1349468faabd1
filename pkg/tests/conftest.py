import pytest

from euclid_sr.core import Instance, Matching
from euclid_sr.fixtures import prism_layout, prism_x3c
from euclid_sr.gadgets import build_star3
from euclid_sr.reduction import ReductionParams, build_solution, reduce
from euclid_sr.x3c import solve_x3c_bruteforce


@pytest.fixture(scope="session")
def star3_instance() -> Instance:
    return build_star3().to_instance(3)


@pytest.fixture(scope="session")
def star3_stable_groups() -> list[list[str]]:
    return [["5", "10", "11"], ["1", "6", "8"], ["2", "3", "7"], ["0", "4", "9"]]


@pytest.fixture(scope="session")
def fixture_cover():
    return solve_x3c_bruteforce(prism_x3c())


def _reduced(d: int):
    inst, cert = reduce(prism_x3c(), prism_layout(), d=d, params=ReductionParams(L=40))
    return inst, cert


@pytest.fixture(scope="session")
def reduced_d3():
    return _reduced(3)


@pytest.fixture(scope="session")
def reduced_d4():
    return _reduced(4)


@pytest.fixture(scope="session")
def reduced_d5():
    return _reduced(5)


@pytest.fixture(scope="session")
def solution_d3(reduced_d3, fixture_cover):
    inst, cert = reduced_d3
    return Matching.of(inst, build_solution(cert, fixture_cover))
