"""Explicit quadratic families with prescribed rational cycles, and checks of their claims."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import PlaceSet, as_rat, enumerate_s_units, is_s_unit
from .dynamics import (
    RationalMap,
    conjugacy_via_cycles,
    conjugate_map,
    exact_period,
    is_cycle,
    make_map,
    maps_equal,
    periodic_points,
    rational_cycles,
    tuples_equivalent,
)
from .errors import DomainError
from .forms import BinaryForm, rational_roots
from .proj import INFINITY, ONE, ZERO, Mobius, ProjPoint, apply_mobius, mobius_sending, point

PHI4_EXCLUDED = (Fraction(0), Fraction(-2), Fraction(2), Fraction(4))
PSI3_CYCLE = (ZERO, INFINITY, ONE)
ENDP_BOUND = 6


@dataclass(frozen=True)
class FamilyMember:
    tag: str  # "phi4" | "psi3" | "nf3"
    params: tuple[Fraction, ...]
    map: RationalMap
    cycle: tuple[ProjPoint, ...] = ()

    def rebuild(self) -> "FamilyMember":
        return BUILDERS[self.tag](*self.params)


def phi4_cycle(a) -> tuple[ProjPoint, ...]:
    return (ZERO, point(a), INFINITY, point(2))


def phi4(a) -> FamilyMember:
    """[(X - 2Y)(4X - a^2 Y) : 2(X - aY)(X - Y)], with 4-cycle 0 -> a -> oo -> 2."""
    a = as_rat(a)
    if a in PHI4_EXCLUDED:
        raise DomainError(f"a = {a} is excluded (a must avoid 0, -2, 2, 4)")
    F = [4, -(8 + a * a), 2 * a * a]
    G = [2, -2 * (a + 1), 2 * a]
    return FamilyMember("phi4", (a,), make_map(F, G), phi4_cycle(a))


def phi4_bad_bound(a) -> int:
    """|2 d n (n - 4d)(n^2 - 4d^2)| for a = n/d in lowest terms."""
    a = as_rat(a)
    if a in PHI4_EXCLUDED:
        raise DomainError(f"a = {a} is excluded (a must avoid 0, -2, 2, 4)")
    n, d = a.numerator, a.denominator
    return abs(2 * d * n * (n - 4 * d) * (n * n - 4 * d * d))


def psi3(a) -> FamilyMember:
    """[(X - Y)(aX + Y) : aX^2], with 3-cycle 0 -> oo -> 1."""
    a = as_rat(a)
    if a == 0:
        raise DomainError("a = 0 is excluded")
    return FamilyMember("psi3", (a,), make_map([a, 1 - a, -1], [a, 0, 0]), PSI3_CYCLE)


def nf3(a, c) -> FamilyMember:
    """[(X - Y)(aX + Y) : X(aX + cY)]."""
    a, c = as_rat(a), as_rat(c)
    return FamilyMember("nf3", (a, c), make_map([a, 1 - a, -1], [a, c, 0]), PSI3_CYCLE)


BUILDERS = {"phi4": phi4, "psi3": psi3, "nf3": nf3}


# ---------------------------------------------------------------------------
# the period-2 curve attached to phi4
# ---------------------------------------------------------------------------


def curve_C(a, t) -> Fraction:
    a, t = as_rat(a), as_rat(t)
    return 2 * t * t - a * a * t + 3 * a * t - 4 * t + a * a - 4 * a


def curve_C_contains(a, t) -> bool:
    return curve_C(a, t) == 0


@dataclass
class Period2Report:
    a: Fraction
    period2: list[ProjPoint]
    curve_points: list[Fraction]
    non_converse: list[tuple[Fraction, int | None]]  # (t, exact period of [t:1] or None)

    @property
    def forward_holds(self) -> bool:
        return all(curve_C_contains(self.a, P.affine()) for P in self.period2 if not P.is_infinity)


def period2_points_on_C(a) -> Period2Report:
    """Exact-period-2 points of phi4(a) against the rational points of C above a."""
    a = as_rat(a)
    phi = phi4(a).map
    per2 = periodic_points(phi, 2)
    for P in per2:
        if not P.is_infinity and not curve_C_contains(a, P.affine()):
            raise AssertionError(f"period-2 point {P} of phi4({a}) is off the curve")
    # C above a is 2t^2 + (3a - a^2 - 4)t + (a^2 - 4a) = 0
    coeffs = [Fraction(2), 3 * a - a * a - 4, a * a - 4 * a]
    den = 1
    for c in coeffs:
        den = den * c.denominator
    form = BinaryForm(tuple(int(c * den) for c in coeffs))
    ts = sorted(r.point.affine() for r in rational_roots(form) if not r.point.is_infinity)
    per2_set = set(per2)
    witnesses = []
    for t in ts:
        P = point(t)
        if P not in per2_set:
            witnesses.append((t, exact_period(phi, P, 8)))
    return Period2Report(a, per2, ts, witnesses)


# ---------------------------------------------------------------------------
# classification of the 3-cycle normal form
# ---------------------------------------------------------------------------


@dataclass
class N3Classification:
    label: str  # "branch-i" | "branch-ii" | "branch-iii" | "finite-set-candidate"
    matches: list[str]


def classify_prop_n3(a, c, S) -> N3Classification:
    """Which degenerate branch (a = -1, c = 0, c = 1 - a) the pair falls in, if any."""
    a, c = as_rat(a), as_rat(c)
    S = PlaceSet.of(S)
    if not is_s_unit(a, S):
        raise DomainError(f"a = {a} is not an S-unit for S = {S}")
    if not is_s_unit(a + c, S):
        raise DomainError(f"a + c = {a + c} is not an S-unit for S = {S}")
    matches = []
    if a == -1:
        matches.append("branch-i")
    if c == 0:
        matches.append("branch-ii")
    if c == 1 - a:
        matches.append("branch-iii")
    return N3Classification(matches[0] if matches else "finite-set-candidate", matches)


# ---------------------------------------------------------------------------
# conjugates inside the psi3 family
# ---------------------------------------------------------------------------


@dataclass
class EndpReport:
    a: Fraction
    S: PlaceSet
    bound: int
    conjugate_params: list[Fraction]
    inconclusive: list[Fraction]

    @property
    def count(self) -> int:
        return len(self.conjugate_params)


def endp_count(a, S, search_bound: int = 8) -> EndpReport:
    """Members psi3(b), b an S-unit within the exponent bound, conjugate to psi3(a) over Q."""
    a = as_rat(a)
    S = PlaceSet.of(S)
    base = psi3(a).map
    base_cycles = rational_cycles(base, 3)
    found, unknown = [], []
    for b in enumerate_s_units(S, search_bound):
        other = psi3(b).map
        res = conjugacy_via_cycles(base, other, 3, phi_cycles=base_cycles)
        if res.status == "conjugate":
            found.append(b)
        elif res.status == "inconclusive":
            unknown.append(b)
    if len(found) > ENDP_BOUND:
        raise AssertionError(f"psi3({a}) has {len(found)} conjugates in the family, more than {ENDP_BOUND}")
    return EndpReport(a, S, search_bound, found, unknown)


# ---------------------------------------------------------------------------
# the two conjugation identities bridging the branches
# ---------------------------------------------------------------------------

BRIDGE = Mobius(1, -1, 1, 0)
BRIDGE_INV = Mobius(0, 1, -1, 1)


def _branch_i(v: Fraction) -> RationalMap:
    # (X - Y)^2 : X(X - (v + 1)Y)
    return make_map([1, -2, 1], [1, -(v + 1), 0])


def _branch_iii(a: Fraction) -> RationalMap:
    # (X - Y)(aX + Y) : X(aX + (1 - a)Y)
    return make_map([a, 1 - a, -1], [a, 1 - a, 0])


def _target(u: Fraction) -> RationalMap:
    # (X - Y)(-u^-1 X + Y) : -u^-1 X^2
    w = -1 / u
    return make_map([w, 1 - w, -1], [w, 0, 0])


@dataclass
class BridgeReport:
    first: list[tuple[Fraction, bool]] = field(default_factory=list)
    second: list[tuple[Fraction, bool]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.first + self.second)


def m1_bridge_check(samples: int = 25, seed: int = 0, params: Sequence | None = None) -> BridgeReport:
    """B o branch-i o B^-1 and B^-1 o branch-iii o B land in the psi3 family."""
    if params is None:
        rng = random.Random(seed)
        params = []
        while len(params) < samples:
            q = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
            if q != 0:
                params.append(q)
    report = BridgeReport()
    for q in params:
        q = as_rat(q)
        report.first.append((q, maps_equal(conjugate_map(_branch_i(q), BRIDGE), _target(q))))
        report.second.append((q, maps_equal(conjugate_map(_branch_iii(q), BRIDGE_INV), _target(q))))
    return report


# ---------------------------------------------------------------------------
# equivalent 4-tuples inside the phi4 family
# ---------------------------------------------------------------------------


@dataclass
class PartnerReport:
    a: Fraction
    S: PlaceSet
    candidates: list[Fraction]
    partners: list[tuple[Fraction, Mobius, int]]

    @property
    def count(self) -> int:
        return len(self.partners)

    @property
    def matches_two(self) -> bool:
        return self.count == 2


def phi4_partners(a, S) -> PartnerReport:
    """Parameters b whose 4-cycle tuple is PGL_2(R_S)-equivalent to that of phi4(a).

    For each rotation h the three correspondences not involving [b:1] force
    the Moebius map; the image of the remaining point is the only possible b.
    """
    a = as_rat(a)
    S = PlaceSet.of(S)
    T = phi4_cycle(a)
    fixed = {0: ZERO, 2: INFINITY, 3: point(2)}  # positions of Q not depending on b
    cands = set()
    for h in range(4):
        src, dst = [], []
        for i in range(4):
            j = (i + h) % 4
            if j in fixed:
                src.append(T[i])
                dst.append(fixed[j])
        A = mobius_sending(tuple(src), tuple(dst))
        i_b = (1 - h) % 4
        Q = apply_mobius(A, T[i_b])
        if not Q.is_infinity and Q.affine() not in PHI4_EXCLUDED:
            cands.add(Q.affine())
    partners = []
    for b in sorted(cands):
        hit = tuples_equivalent(T, phi4_cycle(b), S)
        if hit is not None:
            partners.append((b, hit[0], hit[1]))
    return PartnerReport(a, S, sorted(cands), partners)


def psi3_good_for_units(S, bound: int) -> list[tuple[Fraction, bool, bool]]:
    """(a, cycle ok, good outside S) for every S-unit a within the exponent bound."""
    from .reduction import reduction_report

    out = []
    for a in enumerate_s_units(S, bound):
        m = psi3(a)
        out.append((a, is_cycle(m.map, m.cycle), reduction_report(m.map, S).good_outside_S))
    return out
