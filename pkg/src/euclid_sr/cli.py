"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 negative verdict (unstable / no cover /
no stable matching), 4 validation failure, 5 search budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io as eio
from .errors import BudgetExhausted, EuclidSRError
from .gadgets import build_star3, build_starD
from .layout import scale_layout, validate_layout
from .lemmas import check_chain_dichotomy, check_star3, sample_starD_necessity
from .reduction import ReductionParams, build_solution, extract_cover
from .reduction import reduce as reduce_x3c
from .render import render_svg
from .solvers import enumerate_stable, greedy_match_2
from .stability import verify_stable
from .x3c import associated_graph, solve_x3c_bruteforce, validate_x3c

OK, USAGE, NEGATIVE, INVALID, BUDGET = 0, 2, 3, 4, 5


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    if args.kind == "star3":
        star = build_star3(standalone=args.standalone)
        inst = star.to_instance(3)
        _emit(eio.write_instance(inst), args.output)
        _log(f"star3: {len(inst)} agents")
        return OK
    star = build_starD(d=args.d)
    # starD agent counts are not divisible by d until garbage is added, so
    # emit the raw agent list with d recorded for downstream tooling
    payload = {
        "d": args.d,
        "tolerance": 0.0,
        "agents": [
            {"id": a.id, "x": a.pos.x, "y": a.pos.y, "tag": a.tag} for a in star.agents
        ],
    }
    _emit(json.dumps(payload, sort_keys=True, indent=1) + "\n", args.output)
    _log(f"starD(d={args.d}): {len(star.agents)} agents")
    return OK


def cmd_solve(args) -> int:
    inst = eio.read_instance(args.instance)
    if args.method == "greedy2":
        pi = greedy_match_2(inst)
        _emit(eio.write_matching(pi), args.output)
        return OK
    res = enumerate_stable(inst, limit=args.limit, budget=args.budget)
    doc = {
        "exhaustive": res.exhaustive,
        "matchings": [sorted(sorted(c.members) for c in pi.coalitions) for pi in res.matchings],
    }
    _emit(json.dumps(doc, sort_keys=True, indent=1) + "\n", args.output)
    if not res.matchings:
        if res.exhaustive:
            _log("no stable matching exists")
            return NEGATIVE
        _log("budget exhausted before any stable matching was found")
        return BUDGET
    return OK


def cmd_verify(args) -> int:
    inst = eio.read_instance(args.instance)
    pi = eio.read_matching(args.matching, inst)
    verdict = verify_stable(pi, inst, jobs=args.jobs)
    if verdict.stable:
        print("STABLE")
        return OK
    w = verdict.witness
    print("UNSTABLE")
    print(json.dumps({
        "coalition": list(w.coalition.members),
        "improvements": [
            {"agent": a, "old": old, "new": new} for a, old, new in w.improvements
        ],
    }, sort_keys=True, indent=1))
    return NEGATIVE


def cmd_reduce(args) -> int:
    x3c = eio.read_x3c(args.x3c)
    layout = eio.read_layout(args.layout)
    params = ReductionParams(L=args.scale)
    inst, cert = reduce_x3c(x3c, layout, d=args.d, params=params)
    _emit(eio.write_instance(inst), args.output)
    if args.cert:
        eio.write_certificate(cert, args.cert)
    _log(f"reduced: {len(inst)} agents at grid scale {cert.scale}")
    return OK


def cmd_synthesize(args) -> int:
    cert = eio.read_certificate(args.cert)
    cover = eio.read_cover(args.cover)
    groups = build_solution(cert, cover)
    doc = {"coalitions": sorted(sorted(g) for g in groups)}
    _emit(json.dumps(doc, sort_keys=True, indent=1) + "\n", args.output)
    return OK


def cmd_extract(args) -> int:
    cert = eio.read_certificate(args.cert)
    groups = eio.read_matching_groups(args.matching)
    cover, problems = extract_cover(cert, groups)
    _emit(eio.write_cover(cover), args.output)
    for p in problems:
        _log(f"cover violation: {p}")
    return INVALID if problems else OK


def cmd_x3c(args) -> int:
    inst = eio.read_x3c(args.x3c)
    if args.action == "validate":
        rep = validate_x3c(inst)
        print(rep.summary())
        return OK if rep.ok else INVALID
    rep = validate_x3c(inst)
    if not rep.ok:
        _log(rep.summary())
        return INVALID
    cover = solve_x3c_bruteforce(inst)
    if cover is None:
        print("no exact cover")
        return NEGATIVE
    _emit(eio.write_cover(cover), args.output)
    return OK


def cmd_layout(args) -> int:
    x3c = eio.read_x3c(args.x3c)
    graph = associated_graph(x3c)
    layout = eio.read_layout(args.layout)
    rep = validate_layout(graph, layout)
    if args.action == "validate":
        print(rep.summary())
        return OK if rep.ok else INVALID
    if not rep.ok:
        _log(rep.summary())
        return INVALID
    scaled, sr = scale_layout(layout, args.L)
    _emit(eio.write_layout(scaled), args.output)
    _log(
        f"factor {sr.factor}: min segment {sr.min_segment} -> {sr.scaled_min_segment}, "
        f"min gap {sr.min_parallel_gap:.3f} -> {sr.scaled_min_gap:.3f}"
    )
    return OK


def cmd_render(args) -> int:
    inst = eio.read_instance(args.instance)
    pi = eio.read_matching(args.matching, inst) if args.matching else None
    witness = None
    if args.show_witness and pi is not None:
        verdict = verify_stable(pi, inst)
        witness = verdict.witness
    _emit(render_svg(inst, pi, witness, labels=args.labels), args.output)
    return OK


def cmd_lemma(args) -> int:
    if args.check == "check-star3":
        r = check_star3()
        print(r.summary())
        return OK if r.all_contain_51011 and r.stable else INVALID
    if args.check == "check-chain-dichotomy":
        r = check_chain_dichotomy(budget=args.budget)
        print(r.summary())
        if not r.enumeration.exhaustive:
            return BUDGET
        return OK if r.all_dichotomous and r.all_contain_H else INVALID
    r = sample_starD_necessity(d=args.d, samples=args.samples, seed=args.seed)
    print(r.summary())
    return OK if r.all_blocked else INVALID


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="euclid-sr",
        description="Euclidean d-dimensional stable roommates: gadgets, solvers, reduction.",
    )
    ap.add_argument("--seed", type=int, default=0, help="seed for all sampling subcommands")
    ap.add_argument("--jobs", type=int, default=1, help="worker threads for stability checks")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit gadget instances")
    gsub = gen.add_subparsers(dest="kind", required=True)
    g3 = gsub.add_parser("star3")
    g3.add_argument("--standalone", action=argparse.BooleanOptionalAction, default=True)
    g3.add_argument("-o", "--output", default=None)
    g3.set_defaults(func=cmd_gen)
    gd = gsub.add_parser("star")
    gd.add_argument("--d", type=int, required=True)
    gd.add_argument("-o", "--output", default=None)
    gd.set_defaults(func=cmd_gen)

    sv = sub.add_parser("solve", help="find stable matchings")
    sv.add_argument("instance")
    sv.add_argument("--method", choices=["greedy2", "enumerate"], required=True)
    sv.add_argument("--limit", type=int, default=None)
    sv.add_argument("--budget", type=int, default=None)
    sv.add_argument("-o", "--output", default=None)
    sv.set_defaults(func=cmd_solve)

    vf = sub.add_parser("verify", help="check a matching for stability")
    vf.add_argument("instance")
    vf.add_argument("matching")
    vf.set_defaults(func=cmd_verify)

    rd = sub.add_parser("reduce", help="PC-X3C to Euclid-dSR")
    rd.add_argument("x3c")
    rd.add_argument("layout")
    rd.add_argument("--d", type=int, default=3)
    rd.add_argument("--scale", type=float, default=200.0)
    rd.add_argument("-o", "--output", default=None)
    rd.add_argument("--cert", default=None)
    rd.set_defaults(func=cmd_reduce)

    sy = sub.add_parser("synthesize-solution", help="forward matching from a cover")
    sy.add_argument("cert")
    sy.add_argument("cover")
    sy.add_argument("-o", "--output", default=None)
    sy.set_defaults(func=cmd_synthesize)

    ex = sub.add_parser("extract-cover", help="cover read off a matching")
    ex.add_argument("cert")
    ex.add_argument("matching")
    ex.add_argument("-o", "--output", default=None)
    ex.set_defaults(func=cmd_extract)

    x3 = sub.add_parser("x3c", help="X3C utilities")
    x3.add_argument("action", choices=["solve", "validate"])
    x3.add_argument("x3c")
    x3.add_argument("-o", "--output", default=None)
    x3.set_defaults(func=cmd_x3c)

    ly = sub.add_parser("layout", help="orthogonal layout utilities")
    ly.add_argument("action", choices=["validate", "scale"])
    ly.add_argument("x3c")
    ly.add_argument("layout")
    ly.add_argument("--L", type=float, default=200.0)
    ly.add_argument("-o", "--output", default=None)
    ly.set_defaults(func=cmd_layout)

    rn = sub.add_parser("render", help="SVG drawing")
    rn.add_argument("instance")
    rn.add_argument("matching", nargs="?", default=None)
    rn.add_argument("--labels", action="store_true")
    rn.add_argument("--show-witness", action="store_true")
    rn.add_argument("-o", "--output", default=None)
    rn.set_defaults(func=cmd_render)

    lm = sub.add_parser("lemma", help="acceptance-suite drivers")
    lm.add_argument("check", choices=["check-star3", "check-chain-dichotomy", "sample-starD"])
    lm.add_argument("--d", type=int, default=5)
    lm.add_argument("--samples", type=int, default=10_000)
    lm.add_argument("--budget", type=int, default=None)
    lm.set_defaults(func=cmd_lemma)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        _log(str(exc))
        return BUDGET
    except eio.FormatError as exc:
        _log(str(exc))
        return INVALID
    except (EuclidSRError, OSError) as exc:
        _log(str(exc))
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
