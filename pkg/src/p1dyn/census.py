"""Bounded census of quadratic maps with good reduction outside S.

Two phases, both fanned out over worker processes: candidate coefficient
tuples are generated and filtered for good reduction, then each distinct map
gets its rational cycles harvested and every applicable check run.  Maps are
bucketed into conjugacy classes in the parent and the report is emitted as
deterministic JSON, independent of the worker count.
"""
from __future__ import annotations

import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .arith import PlaceSet, strip_primes
from .dynamics import (
    POWER_BUDGET,
    Cycle,
    RationalMap,
    apply_map,
    check_cycle_ideal_laws,
    conjugacy_via_cycles,
    conjugate_map,
    is_cycle,
    map_from_coeffs,
    mobius_count_bound,
    periodic_points,
)
from .errors import DomainError, ResourceError
from .families import classify_prop_n3
from .proj import INFINITY, ONE, ZERO, ProjPoint, mobius_inverse, mobius_to_zero_inf_one, points_of_height
from .reduction import check_n3part1, good_outside, to_normal_form, verify_lemma_n34

STRATEGIES = ("by-cycles", "by-coeffs")
DEFAULT_S = (2, 3)
DEFAULT_HEIGHT = 8
DEFAULT_MAX_PERIOD = 6
BOX_HEIGHT_LIMIT = 16  # (2H+1)^6 boxes; also keeps int64 resultants exact
BRANCH_ORDER = ("branch-i", "branch-ii", "branch-iii", "finite-set-candidate", "precondition-failed")


@dataclass(frozen=True)
class CensusConfig:
    S: PlaceSet = field(default_factory=lambda: PlaceSet(DEFAULT_S))
    height: int = DEFAULT_HEIGHT
    strategy: str = "by-cycles"
    max_period: int = DEFAULT_MAX_PERIOD

    def __post_init__(self):
        object.__setattr__(self, "S", PlaceSet.of(self.S))
        if self.height < 1:
            raise DomainError("height must be positive")
        if self.max_period < 1:
            raise DomainError("max period must be positive")
        if self.strategy not in STRATEGIES:
            raise DomainError(f"unknown strategy {self.strategy!r}")
        if 2**self.max_period > POWER_BUDGET:
            raise ResourceError(f"max period {self.max_period} needs iterates beyond the degree budget {POWER_BUDGET}")

    def to_json(self) -> dict:
        return {
            "s": list(self.S.primes),
            "height": self.height,
            "strategy": self.strategy,
            "max_period": self.max_period,
        }


# ---------------------------------------------------------------------------
# phase 1: candidates
# ---------------------------------------------------------------------------


def quadratic_resultant(c: tuple) -> int:
    f0, f1, f2, g0, g1, g2 = c
    return (f0 * g2 - f2 * g0) ** 2 - (f0 * g1 - f1 * g0) * (f1 * g2 - f2 * g1)


def _good_coeffs(c: tuple, primes: tuple[int, ...]) -> bool:
    r = quadratic_resultant(c)
    return r != 0 and strip_primes(r, primes) == 1


def _primitive(ints) -> tuple[int, ...] | None:
    g = 0
    for n in ints:
        g = math.gcd(g, n)
    if g == 0:
        return None
    if next(n for n in ints if n) < 0:
        g = -g
    return tuple(n // g for n in ints)


def nf_coeffs(l: int, m: int, a: int, b: int, c: int) -> tuple | None:
    """Primitive coefficients of [(X - lam Y)(aX + bY) : X(aX + cY)], lam = l/m; None unless quadratic."""
    if l == 0 or a == 0 or b == 0 or b == c or a * l == -c * m:
        return None
    # m * F = (mX - lY)(aX + bY), m * G = X(maX + mcY)
    return _primitive((m * a, m * b - l * a, -l * b, m * a, m * c, 0))


def _lams(H: int) -> list[ProjPoint]:
    return [P for P in points_of_height(H) if not P.is_infinity and P not in (ZERO, ONE)]


def _unit_nf3(S: PlaceSet, H: int, a: int) -> list[tuple]:
    # 3-cycles [0:1] -> [1:0] -> [1:1]: lam = 1, (a, b, c) in the box
    out = []
    for b in range(-H, H + 1):
        for c in range(-H, H + 1):
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            co = nf_coeffs(1, 1, a, b, c)
            if co is not None and _good_coeffs(co, S.primes):
                out.append(co)
    return out


def _unit_nf4(S: PlaceSet, H: int, L: ProjPoint) -> list[tuple]:
    # 4-cycles lam -> 0 -> oo -> 1 -> lam: Psi(1) = lam means (1 - lam)(a + b) = lam (a + c);
    # (a, b) in the box, c solved and the triple rescaled to integers
    l, m = L.x, L.y
    out = []
    for a in range(-H, H + 1):
        for b in range(-H, H + 1):
            # c = ((m - l)(a + b) - l a) / l
            num = (m - l) * (a + b) - l * a
            co = nf_coeffs(l, m, a * l, b * l, num)
            if co is not None and _good_coeffs(co, S.primes):
                out.append(co)
    return out


def _unit_nf5(S: PlaceSet, H: int, L: ProjPoint) -> list[tuple]:
    # longer cycles lam -> 0 -> oo -> 1 -> P4 -> P5 -> ...: Psi(1) = P4 and Psi(P4) = P5
    # are two linear conditions on (a : b : c), generically fixing the map
    l, m = L.x, L.y
    pts = points_of_height(H)
    out = []

    def row(x, y, u, w):
        # w * mF(x, y) - u * mG(x, y) = 0 as a linear form in (a, b, c)
        t = m * x - l * y
        return (w * t * x - u * m * x * x, w * t * y, -u * m * x * y)

    for P4 in pts:
        if P4 in (ZERO, INFINITY, ONE, L):
            continue
        r1 = row(1, 1, P4.x, P4.y)
        for P5 in pts:
            if P5 in (ZERO, INFINITY, ONE, P4):
                continue
            r2 = row(P4.x, P4.y, P5.x, P5.y)
            a = r1[1] * r2[2] - r1[2] * r2[1]
            b = r1[2] * r2[0] - r1[0] * r2[2]
            c = r1[0] * r2[1] - r1[1] * r2[0]
            co = nf_coeffs(l, m, a, b, c)
            if co is not None and _good_coeffs(co, S.primes) and _zero_periodic(co):
                out.append(co)
    return out


def _zero_periodic(co: tuple, max_steps: int = 12) -> bool:
    """Whether [0:1] returns within max_steps; heights double each step, so keep it short."""
    f0, f1, f2, g0, g1, g2 = co
    x, y = 0, 1
    for _ in range(max_steps):
        x, y = f0 * x * x + f1 * x * y + f2 * y * y, g0 * x * x + g1 * x * y + g2 * y * y
        g = math.gcd(x, y)
        x, y = x // g, y // g
        if x == 0:
            return True
    return False


def _unit_box(S: PlaceSet, H: int, f0: int) -> list[tuple]:
    vals = np.arange(-H, H + 1, dtype=np.int64)
    g0, g1, g2 = (a.ravel() for a in np.meshgrid(vals, vals, vals, indexing="ij"))
    out = []
    for f1, f2 in itertools.product(range(-H, H + 1), repeat=2):
        first = next((v for v in (f0, f1, f2) if v), 0)
        if first <= 0:
            continue  # F = 0 or sign not canonical
        res = (f0 * g2 - f2 * g0) ** 2 - (f0 * g1 - f1 * g0) * (f1 * g2 - f2 * g1)
        ok = res != 0
        r = np.abs(np.where(ok, res, 1))
        for p in S:
            while True:
                div = r % p == 0
                if not div.any():
                    break
                r = np.where(div, r // p, r)
        ok &= r == 1
        ok &= np.gcd(np.gcd(np.gcd(g0, g1), g2), math.gcd(math.gcd(f0, f1), f2)) == 1
        for i in np.nonzero(ok)[0]:
            out.append((f0, f1, f2, int(g0[i]), int(g1[i]), int(g2[i])))
    return out


def _work_units(strategy: str, H: int) -> list[tuple]:
    if strategy == "by-coeffs":
        return [("box", f0) for f0 in range(-H, H + 1)]
    units: list[tuple] = [("nf3", a) for a in range(-H, H + 1) if a != 0]
    units += [("nf4", L) for L in _lams(H)]
    units += [("nf5", L) for L in _lams(H)]
    return units


def _run_unit(args) -> list[tuple]:
    S, H, (kind, param) = args
    fn = {"nf3": _unit_nf3, "nf4": _unit_nf4, "nf5": _unit_nf5, "box": _unit_box}[kind]
    return fn(S, H, param)


def _pool_map(fn, items: list, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def candidate_coeffs(S, strategy: str = "by-cycles", height: int = DEFAULT_HEIGHT, workers: int = 1) -> list[tuple]:
    """Sorted distinct coefficient tuples of the enumerated good-reduction maps."""
    S = PlaceSet.of(S)
    if height < 1:
        raise DomainError("height must be positive")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    if strategy == "by-coeffs" and height > BOX_HEIGHT_LIMIT:
        raise ResourceError(f"by-coeffs height {height} exceeds the box budget {BOX_HEIGHT_LIMIT}")
    units = _work_units(strategy, height)
    found = set()
    for chunk in _pool_map(_run_unit, [(S, height, u) for u in units], workers):
        found.update(chunk)
    return sorted(found)


def enumerate_maps(S, strategy: str = "by-cycles", height: int = DEFAULT_HEIGHT, workers: int = 1) -> Iterator[RationalMap]:
    """Degree-2 maps with good reduction outside S found by the given strategy, each once."""
    for co in candidate_coeffs(S, strategy, height, workers):
        yield map_from_coeffs(co)


# ---------------------------------------------------------------------------
# phase 2: per-map analysis
# ---------------------------------------------------------------------------


def group_cycles(phi: RationalMap, pts: Iterable[ProjPoint]) -> list[Cycle]:
    """Split a set of periodic points into cycles, each starting at its smallest point."""
    seen: set[ProjPoint] = set()
    out = []
    for P in sorted(pts):
        if P in seen:
            continue
        cyc = [P]
        Q = apply_map(phi, P)
        while Q != P:
            cyc.append(Q)
            Q = apply_map(phi, Q)
        seen.update(cyc)
        out.append(Cycle(tuple(cyc)))
    return out


def class_key(phi: RationalMap, cycles: list[Cycle]) -> tuple | None:
    """Least coefficient tuple among conjugates anchoring a shortest cycle of length >= 3 at 0, oo, 1.

    Conjugate maps carry cycles to cycles preserving order, so this is a
    complete invariant for conjugacy relative to rational cycles.
    """
    long = [C for C in cycles if len(C) >= 3]
    if not long:
        return None
    n = min(len(C) for C in long)
    best = None
    for C in long:
        if len(C) != n:
            continue
        for h in range(n):
            co = conjugate_map(phi, mobius_to_zero_inf_one(C[h], C[h + 1], C[h + 2])).coeffs
            if best is None or co < best:
                best = co
    return (n,) + best


def _check(name: str, fn, violations: list[str]):
    try:
        ok = fn()
    except DomainError as exc:
        violations.append(f"{name}: {exc}")
        return False
    if not ok:
        violations.append(f"{name} failed")
    return ok


def analyze_map(coeffs: tuple, S, max_period: int) -> dict:
    """Cycles, checks and class key of one map, as a plain dict."""
    S = PlaceSet.of(S)
    phi = map_from_coeffs(coeffs)
    violations: list[str] = []
    cycles: list[Cycle] = []
    bound_ok = True
    for n in range(1, max_period + 1):
        pts = periodic_points(phi, n)
        if len(pts) > mobius_count_bound(phi.degree, n):
            bound_ok = False
            violations.append(f"period {n}: {len(pts)} points exceed the bound")
        cycles.extend(group_cycles(phi, pts))
    for C in cycles:
        if not is_cycle(phi, C):
            violations.append(f"{C} is not a cycle")

    prop61 = True
    for C in cycles:
        if len(C) >= 2:
            rep = check_cycle_ideal_laws(phi, C, S)
            if not rep.ok:
                prop61 = False
                violations.extend(rep.violations)

    n34 = None
    n3part1 = None
    labels: set[str] = set()
    for C in cycles:
        if len(C) not in (3, 4):
            continue
        n = len(C)
        for h in range(n):
            eta, alpha, beta, gamma = C[h - 1], C[h], C[h + 1], C[h + 2]
            nf, A = to_normal_form(phi, eta, alpha, beta, gamma)
            Ainv = mobius_inverse(A)
            ok = _check("lemma n34", lambda: verify_lemma_n34(nf, S, Ainv).ok, violations)
            n34 = ok if n34 is None else (n34 and ok)
            if n != 3:
                continue
            s = nf.scaled()
            a, c = s.a / s.b, s.c / s.b
            ok = _check("lemma n3 part 1", lambda: check_n3part1(a, c, Ainv, S).ok, violations)
            n3part1 = ok if n3part1 is None else (n3part1 and ok)
            try:
                label = classify_prop_n3(a, c, S).label
            except DomainError as exc:
                violations.append(f"prop n3: {exc}")
                label = "precondition-failed"
            labels.add(label)

    # a record falls in a branch if any marked 3-cycle normalizes into it
    branch = next((b for b in BRANCH_ORDER if b in labels), None)
    key = class_key(phi, cycles)
    return {
        "coeffs": tuple(coeffs),
        "disc": str(abs(phi.resultant)),
        "cycles": [[[P.x, P.y] for P in C] for C in cycles],
        "key": key,
        "checks": {
            "prop61": prop61,
            "mobius_bound": bound_ok,
            "n34": n34,
            "n3part1": n3part1,
            "prop_n3_branch": branch,
        },
        "violations": violations,
    }


def _analyze(args) -> dict:
    return analyze_map(*args)


# ---------------------------------------------------------------------------
# classes and report
# ---------------------------------------------------------------------------


def _key_id(key: tuple) -> str:
    return f"n{key[0]}:" + ",".join(map(str, key[1:]))


def _cycles_of(rec: dict, n: int) -> list[Cycle]:
    return [Cycle(tuple(ProjPoint(x, y) for x, y in c)) for c in rec["cycles"] if len(c) == n]


def classify(records: list[dict], confirm: bool = True) -> list[dict]:
    """Partition records (with cycles of length >= 3) into conjugacy classes.

    Records are bucketed by :func:`class_key`; each member is then confirmed
    conjugate to the bucket representative by the cycle-anchored test.
    Sets ``class_id`` on every record (None for the unclassified ones).
    """
    buckets: dict[tuple, list[dict]] = {}
    for rec in records:
        key = rec["key"]
        rec["class_id"] = None if key is None else _key_id(tuple(key))
        if key is not None:
            buckets.setdefault(tuple(key), []).append(rec)
    classes = []
    for key, members in sorted(buckets.items()):
        members.sort(key=lambda r: r["coeffs"])
        rep = members[0]
        if confirm:
            n = key[0]
            phi = map_from_coeffs(rep["coeffs"])
            for other in members[1:]:
                psi = map_from_coeffs(other["coeffs"])
                res = conjugacy_via_cycles(phi, psi, n, _cycles_of(rep, n), _cycles_of(other, n))
                if not res.found:
                    raise AssertionError(f"maps {rep['coeffs']} and {other['coeffs']} share a key but are not conjugate")
        classes.append({"id": _key_id(key), "representative": _wire_map(rep["coeffs"]), "size": len(members)})
    return classes


def _wire_map(coeffs) -> list[list[int]]:
    half = len(coeffs) // 2
    return [list(coeffs[:half]), list(coeffs[half:])]


@dataclass
class CensusResult:
    config: CensusConfig
    records: list[dict]
    classes: list[dict]

    @property
    def violations(self) -> list[str]:
        return [v for r in self.records for v in r["violations"]]

    def summary(self) -> dict:
        per_period: dict[str, int] = {}
        for r in self.records:
            for n in sorted({len(c) for c in r["cycles"]}):
                per_period[str(n)] = per_period.get(str(n), 0) + 1
        class_periods: dict[str, set] = {}
        for r in self.records:
            if r["class_id"] is None:
                continue
            for n in {len(c) for c in r["cycles"]}:
                class_periods.setdefault(str(n), set()).add(r["class_id"])
        branches: dict[str, int] = {}
        for r in self.records:
            b = r["checks"]["prop_n3_branch"]
            if b is not None:
                branches[b] = branches.get(b, 0) + 1
        return {
            "records": len(self.records),
            "classes": len(self.classes),
            "unclassified": sum(1 for r in self.records if r["class_id"] is None),
            "records_per_period": per_period,
            "classes_per_period": {k: len(v) for k, v in class_periods.items()},
            "prop_n3_branches": branches,
            "finite_set_candidates": branches.get("finite-set-candidate", 0),
            "violations": len(self.violations),
        }

    def classes_with_period(self, n: int) -> int:
        return self.summary()["classes_per_period"].get(str(n), 0)

    def to_json(self) -> dict:
        records = []
        for r in self.records:
            checks = dict(r["checks"])
            records.append(
                {
                    "map": _wire_map(r["coeffs"]),
                    "disc": r["disc"],
                    "cycles": [{"points": c, "period": len(c)} for c in r["cycles"]],
                    "class_id": r["class_id"],
                    "checks": checks,
                    "violations": r["violations"],
                }
            )
        return {
            "config": self.config.to_json(),
            "records": records,
            "classes": self.classes,
            "summary": self.summary(),
        }


def default_workers() -> int:
    return os.cpu_count() or 1


def run_census(config: CensusConfig, workers: int | None = None) -> CensusResult:
    if workers is None:
        workers = default_workers()
    coeffs = candidate_coeffs(config.S, config.strategy, config.height, workers)
    S = config.S
    records = _pool_map(_analyze, [(c, S, config.max_period) for c in coeffs], workers)
    records.sort(key=lambda r: r["coeffs"])
    classes = classify(records)
    return CensusResult(config, records, classes)


def dumps_report(result: CensusResult) -> str:
    return json.dumps(result.to_json(), sort_keys=True, indent=1) + "\n"


def emit_report(result: CensusResult, sink) -> None:
    """Write the report to a path or a text stream."""
    text = dumps_report(result)
    if hasattr(sink, "write"):
        sink.write(text)
        return
    try:
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write census report to {sink}: {exc}") from exc


# ---------------------------------------------------------------------------
# re-verification of a stored report
# ---------------------------------------------------------------------------


def verify_report(doc: dict) -> list[str]:
    """Re-run soundness checks and all theorem checks on a stored report; returns problems."""
    problems = []
    cfg = doc.get("config", {})
    S = PlaceSet.of(cfg.get("s", ()))
    max_period = int(cfg.get("max_period", DEFAULT_MAX_PERIOD))
    for rec in doc.get("records", []):
        f, g = rec["map"]
        coeffs = tuple(f) + tuple(g)
        try:
            phi = map_from_coeffs(coeffs)
        except DomainError as exc:
            problems.append(f"{coeffs}: {exc}")
            continue
        if not good_outside(phi, S):
            problems.append(f"{coeffs}: not good outside {S}")
        for c in rec["cycles"]:
            pts = [ProjPoint(x, y) for x, y in c["points"]]
            if not is_cycle(phi, pts) or len(pts) != c["period"]:
                problems.append(f"{coeffs}: stored cycle {c['points']} does not check")
        fresh = analyze_map(coeffs, S, max_period)
        problems.extend(f"{coeffs}: {v}" for v in fresh["violations"])
        for k, v in rec["checks"].items():
            if fresh["checks"].get(k) != v:
                problems.append(f"{coeffs}: stored check {k}={v} but recomputed {fresh['checks'].get(k)}")
    return problems
