"""Command-line entry point.

Maps are written "f0,f1,f2;g0,g1,g2" (coefficients high X-power first),
points "x,y".  Results go to stdout as JSON.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .arith import PlaceSet, factor
from .census import CensusConfig, dumps_report, emit_report, run_census, verify_report
from .dynamics import conjugacy_via_cycles, make_map, mobius_count_bound, orbit, periodic_points, rational_cycles
from .errors import DomainError, ResourceError
from .families import phi4, phi4_bad_bound, psi3
from .proj import cross_term, delta_p, ideal_I, normalize
from .reduction import reduction_report, to_normal_form

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_map(text: str):
    try:
        f, g = text.split(";")
        fs = [Fraction(t) for t in f.split(",")]
        gs = [Fraction(t) for t in g.split(",")]
    except ValueError:
        raise DomainError(f"bad map {text!r}; expected 'f0,f1,f2;g0,g1,g2'") from None
    return make_map(fs, gs)


def parse_point(text: str):
    try:
        x, y = (Fraction(t) for t in text.split(","))
    except ValueError:
        raise DomainError(f"bad point {text!r}; expected 'x,y'") from None
    return normalize(x, y)


def _pt(P) -> list[int]:
    return [P.x, P.y]


def _map_json(phi) -> list[list[int]]:
    return [list(phi.F.coeffs), list(phi.G.coeffs)]


def _out(obj) -> None:
    json.dump(obj, sys.stdout, sort_keys=True, indent=1, default=str)
    sys.stdout.write("\n")


def cmd_goodred(args) -> int:
    phi = parse_map(args.map)
    rep = reduction_report(phi, PlaceSet.parse(args.s))
    _out({"map": _map_json(phi), **rep.to_json()})
    return EXIT_OK


def cmd_orbit(args) -> int:
    phi = parse_map(args.map)
    res = orbit(phi, parse_point(args.point), args.steps)
    _out(
        {
            "tail": [_pt(P) for P in res.tail],
            "cycle": [_pt(P) for P in res.cycle] if res.cycle else None,
            "converged": res.converged,
        }
    )
    return EXIT_OK


def cmd_periodic(args) -> int:
    phi = parse_map(args.map)
    pts = periodic_points(phi, args.period)
    cycles = rational_cycles(phi, args.period)
    _out(
        {
            "period": args.period,
            "points": [_pt(P) for P in pts],
            "cycles": [[_pt(P) for P in C] for C in cycles],
            "bound": mobius_count_bound(phi.degree, args.period),
        }
    )
    return EXIT_OK


def cmd_normalform(args) -> int:
    phi = parse_map(args.map)
    pts = [parse_point(t) for t in args.orbit.split(";")]
    if len(pts) != 4:
        raise DomainError("--orbit needs four points eta;alpha;beta;gamma")
    nf, A = to_normal_form(phi, *pts)
    _out(
        {
            "lam": str(nf.lam),
            "a": str(nf.a),
            "b": str(nf.b),
            "c": str(nf.c),
            "valid": nf.valid,
            "mobius": list(A.entries()),
            "normal_form": _map_json(nf.to_map()),
        }
    )
    return EXIT_OK


def cmd_distance(args) -> int:
    P, Q = parse_point(args.p), parse_point(args.q)
    S = PlaceSet.parse(args.s or "")
    cross = cross_term(P, Q)
    if cross == 0:
        raise DomainError("the points coincide; the distance is infinite")
    primes = sorted(set(factor(cross).primes()) | set(S.primes))
    _out(
        {
            "p": _pt(P),
            "q": _pt(Q),
            "delta": {str(p): delta_p(P, Q, p) for p in primes},
            "ideal": ideal_I(P, Q, S).generator,
            "s": list(S.primes),
        }
    )
    return EXIT_OK


def cmd_family(args) -> int:
    a = Fraction(args.param)
    S = PlaceSet.parse(args.s or "")
    member = phi4(a) if args.name == "phi4" else psi3(a)
    rep = reduction_report(member.map, S)
    out = {
        "family": member.tag,
        "param": str(a),
        "map": _map_json(member.map),
        "cycle": [_pt(P) for P in member.cycle],
        "reduction": rep.to_json(),
    }
    if args.name == "phi4":
        out["bad_bound"] = phi4_bad_bound(a)
    _out(out)
    return EXIT_OK


def cmd_conjugacy(args) -> int:
    phi, psi = parse_map(args.map1), parse_map(args.map2)
    res = conjugacy_via_cycles(phi, psi, args.period)
    _out({"status": res.status, "witness": list(res.witness.entries()) if res.witness else None})
    return EXIT_OK


def cmd_census(args) -> int:
    cfg = CensusConfig(PlaceSet.parse(args.s), args.height, args.strategy, args.max_period)
    result = run_census(cfg, args.workers)
    if args.out:
        emit_report(result, args.out)
    else:
        sys.stdout.write(dumps_report(result))
    summary = result.summary()
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_VERIFY if result.violations else EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.infile, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read {args.infile}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    problems = verify_report(doc)
    _out({"records": len(doc.get("records", [])), "problems": problems})
    return EXIT_VERIFY if problems else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="p1dyn", description="Quadratic rational maps over Q: reduction, cycles, census.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("goodred", help="discriminant and bad primes outside S")
    p.add_argument("--map", required=True)
    p.add_argument("--s", default="")
    p.set_defaults(func=cmd_goodred)

    p = sub.add_parser("orbit", help="iterate a point until it cycles")
    p.add_argument("--map", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--steps", type=int, default=64)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("periodic", help="rational points of exact period n")
    p.add_argument("--map", required=True)
    p.add_argument("--period", type=int, required=True)
    p.set_defaults(func=cmd_periodic)

    p = sub.add_parser("normalform", help="normal form from an orbit eta;alpha;beta;gamma")
    p.add_argument("--map", required=True)
    p.add_argument("--orbit", required=True)
    p.set_defaults(func=cmd_normalform)

    p = sub.add_parser("distance", help="p-adic distances and the ideal I(P, Q)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--s", default="")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("family", help="members of the phi4 and psi3 families")
    p.add_argument("name", choices=("phi4", "psi3"))
    p.add_argument("--param", required=True)
    p.add_argument("--s", default="")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("conjugacy", help="conjugacy test anchored on rational n-cycles")
    p.add_argument("--map1", required=True)
    p.add_argument("--map2", required=True)
    p.add_argument("--period", type=int, required=True)
    p.set_defaults(func=cmd_conjugacy)

    p = sub.add_parser("census", help="enumerate, verify and classify good-reduction maps")
    p.add_argument("--s", default="2,3")
    p.add_argument("--height", type=int, default=8)
    p.add_argument("--max-period", type=int, default=6)
    p.add_argument("--strategy", choices=("by-cycles", "by-coeffs"), default="by-cycles")
    p.add_argument("--workers", type=int, default=None, help="default: available CPUs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("verify", help="re-check a stored census report")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DomainError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
