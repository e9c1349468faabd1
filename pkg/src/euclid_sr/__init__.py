"""Euclidean d-dimensional stable roommates: instances, solvers, gadgets, reduction."""

from .core import Agent, Coalition, Instance, Matching, Point, Pref, compare_pref, dist, sum_dist
from .stability import (
    BlockingWitness,
    SearchMode,
    StabilityVerdict,
    find_blocking,
    is_blocking,
    verify_stable,
)
from .solvers import (
    EnumerationResult,
    ExistsResult,
    enumerate_stable,
    enumerate_stable_reference,
    exists_stable,
    greedy_match_2,
)
from .gadgets import (
    Pose,
    Star3Params,
    StarDParams,
    StarInstance,
    build_star3,
    build_starD,
    build_starD_closed,
    validate_star3,
    validate_starD,
)
from .x3c import BipartiteGraph, Cover, X3CInstance, associated_graph, solve_x3c_bruteforce, validate_x3c
from .layout import EdgeRoute, LayoutScaleReport, OrthogonalLayout, naive_layout, scale_layout, validate_layout
from .reduction import (
    ReductionCertificate,
    ReductionParams,
    build_epsilons,
    build_solution,
    chain_length,
    extract_cover,
    reduce,
    validate_reduced,
)
from .render import render_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
