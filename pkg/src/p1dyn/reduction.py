"""Discriminants and good reduction, the quadratic normal form, and lemma verifiers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import PlaceSet, SIdeal, as_rat, factor, is_prime, is_s_integer, is_s_unit, outside_s_part, strip_primes, vp_int
from .errors import DomainError
from .forms import common_root_mod_p, det_bareiss, resultant, sylvester_matrix
from .dynamics import RationalMap, apply_map, conjugate_map, exact_period, make_map, maps_equal
from .proj import ZERO, Mobius, ProjPoint, apply_mobius, mobius_disc, mobius_inverse, mobius_to_zero_inf_one

CROSS_CHECK_LIMIT = 100


def _res(phi: RationalMap) -> int:
    return phi.resultant or resultant(phi.F, phi.G)


def vp_disc(phi: RationalMap, p: int) -> int:
    if not is_prime(p):
        raise DomainError(f"{p} is not a prime")
    # joint content 1, so the min-valuation correction is zero
    m = min(vp_int(c, p) for c in phi.coeffs if c)
    val = vp_int(_res(phi), p) - 2 * phi.degree * m
    assert val >= 0
    return val


def disc(phi: RationalMap) -> int:
    """Positive generator of Disc(phi) over Z."""
    return abs(_res(phi))


def good_outside(phi: RationalMap, S) -> bool:
    return strip_primes(_res(phi), PlaceSet.of(S)) == 1


@dataclass
class ReductionReport:
    disc: int
    bad_primes_outside_S: list[int]
    good_outside_S: bool
    S: PlaceSet = field(default_factory=PlaceSet)
    certified: bool = True

    def to_json(self) -> dict:
        return {
            "disc": str(self.disc),
            "s": list(self.S.primes),
            "bad_primes_outside_s": self.bad_primes_outside_S,
            "good_outside_s": self.good_outside_S,
            "certified": self.certified,
        }


def reduction_report(phi: RationalMap, S) -> ReductionReport:
    S = PlaceSet.of(S)
    D = disc(phi)
    rest = strip_primes(D, S)
    fac = factor(rest) if rest > 1 else factor(1)
    bad = fac.primes()
    for p in bad:
        if p < CROSS_CHECK_LIMIT and not common_root_mod_p(phi.F, phi.G, p):
            raise AssertionError(f"p={p} divides Disc but the forms have no common root mod p")
    return ReductionReport(D, bad, not bad, S, fac.certified)


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalFormNF:
    """Psi = [(X - lam Y)(aX + bY) : X(aX + cY)]."""

    lam: Fraction
    a: Fraction
    b: Fraction
    c: Fraction

    @property
    def valid(self) -> bool:
        lam, a, b, c = self.lam, self.a, self.b, self.c
        return lam != 0 and a != 0 and b != 0 and b != c and a * lam != -c

    def forms(self) -> tuple[list[Fraction], list[Fraction]]:
        lam, a, b, c = self.lam, self.a, self.b, self.c
        return [a, b - lam * a, -lam * b], [a, c, Fraction(0)]

    def to_map(self) -> RationalMap:
        if not self.valid:
            raise DomainError(f"normal form {self} does not have degree two")
        return make_map(*self.forms())

    def scaled(self) -> "NormalFormNF":
        """Same map with a, b, c coprime integers (first nonzero positive)."""
        vals = (self.a, self.b, self.c)
        lcm = 1
        for v in vals:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        ints = [int(v * lcm) for v in vals]
        g = 0
        for n in ints:
            g = math.gcd(g, n)
        if next(n for n in ints if n) < 0:
            g = -g
        return NormalFormNF(self.lam, *(Fraction(n // g) for n in ints))

    def __str__(self) -> str:
        return f"nf(lam={self.lam}, a={self.a}, b={self.b}, c={self.c})"


def to_normal_form(phi: RationalMap, eta: ProjPoint, alpha: ProjPoint, beta: ProjPoint, gamma: ProjPoint):
    """(nf, A) with A = mobius_to_zero_inf_one(alpha, beta, gamma) and A phi A^-1 = Psi_nf.

    The orbit must satisfy phi: eta -> alpha -> beta -> gamma with alpha,
    beta, gamma distinct; lam is the affine coordinate of A(eta).
    """
    if phi.degree != 2:
        raise DomainError("normal form needs a quadratic map")
    if len({alpha, beta, gamma}) != 3:
        raise DomainError(f"alpha, beta, gamma must be distinct: {alpha}, {beta}, {gamma}")
    for src, dst, name in ((eta, alpha, "eta -> alpha"), (alpha, beta, "alpha -> beta"), (beta, gamma, "beta -> gamma")):
        if apply_map(phi, src) != dst:
            raise DomainError(f"orbit relation {name} fails")
    A = mobius_to_zero_inf_one(alpha, beta, gamma)
    psi = conjugate_map(phi, A)
    lam = apply_mobius(A, eta).affine()
    f0, f1, f2, g0, g1, g2 = (Fraction(v) for v in psi.coeffs)
    a, c = f0, g1
    b = f1 + lam * a
    nf = NormalFormNF(lam, a, b, c)
    if g2 != 0 or f0 != g0 or f2 != -lam * b or not maps_equal(nf.to_map(), psi):
        raise AssertionError(f"normal form read-off failed for {phi}")
    if not maps_equal(conjugate_map(psi, mobius_inverse(A)), phi):
        raise AssertionError("normal form round trip failed")
    return nf, A


def milnor_form(b, c) -> RationalMap:
    """Homogenized (z^2 + bz)/(cz + 1)."""
    b, c = as_rat(b), as_rat(c)
    return make_map([1, b, 0], [0, c, 1])


# ---------------------------------------------------------------------------
# lemma verifiers
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    checks: dict[str, bool]
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


def verify_lemma_n34(nf: NormalFormNF, S, A: Mobius) -> CheckReport:
    """a, b, lam and a*lam + c are S-units once a, b, c are coprime integers."""
    S = PlaceSet.of(S)
    if not nf.valid:
        raise DomainError("hypothesis 1 fails: the normal form does not have degree two")
    psi = nf.to_map()
    if exact_period(psi, ZERO, 4) not in (3, 4):
        raise DomainError("hypothesis 2 fails: [0:1] does not have exact period 3 or 4")
    if not good_outside(conjugate_map(psi, A), S):
        raise DomainError(f"hypothesis 3 fails: A Psi A^-1 is not good outside {S}")
    s = nf.scaled()
    vals = {"a": s.a, "b": s.b, "lam": s.lam, "a*lam+c": s.a * s.lam + s.c}
    return CheckReport(
        {k: is_s_unit(v, S) if v != 0 else False for k, v in vals.items()},
        {k: str(v) for k, v in vals.items()},
    )


def nf3_map(a, c) -> RationalMap:
    """[(X - Y)(aX + Y) : X(aX + cY)]."""
    a, c = as_rat(a), as_rat(c)
    return make_map([a, 1 - a, -1], [a, c, 0])


def nf3_params(psi: RationalMap) -> tuple[Fraction, Fraction]:
    """(a, c) of a map in [(X - Y)(aX + Y) : X(aX + cY)] shape."""
    f0, f1, f2, g0, g1, g2 = psi.coeffs
    if g2 != 0 or f0 != g0 or f2 == 0 or f0 + f1 + f2 != 0:
        raise DomainError(f"{psi} is not of the (X - Y)(aX + Y) : X(aX + cY) shape")
    k = Fraction(-f2)
    return f0 / k, g1 / k


def _ideal_divides(I: SIdeal, x, S: PlaceSet) -> bool:
    x = as_rat(x)
    if x == 0:
        return True
    if not is_s_integer(x, S):
        return False
    return outside_s_part(x, S).generator % I.generator == 0


def check_n3part1(a, c, A: Mobius, S) -> CheckReport:
    """Disc([A])^2 = (c - 1), Disc([A]) | 1 + a + a^2 and 1 - v + v^2 (v = a + c), a and v S-units."""
    S = PlaceSet.of(S)
    a, c = as_rat(a), as_rat(c)
    try:
        psi = nf3_map(a, c)
    except DomainError as exc:
        raise DomainError(f"(a, c) = ({a}, {c}) does not give a quadratic map: {exc}") from None
    if not good_outside(conjugate_map(psi, A), S):
        raise DomainError(f"A Psi A^-1 is not good outside {S}")
    D = mobius_disc(A, S)
    v = a + c
    cm1 = c - 1
    eq = is_s_integer(cm1, S) and cm1 != 0 and outside_s_part(cm1, S) == D * D
    checks = {
        "a_unit": is_s_unit(a, S),
        "a+c_unit": is_s_unit(v, S),
        "disc_sq_eq_c-1": eq,
        "disc_divides_1+a+a2": _ideal_divides(D, 1 + a + a * a, S),
        "disc_divides_1-v+v2": _ideal_divides(D, 1 - v + v * v, S),
    }
    return CheckReport(checks, {"disc_A": str(D.generator), "a": str(a), "c": str(c)})


def resultant_nf3(a, c) -> Fraction:
    """-a(a + c)(c - 1), cross-checked against the Sylvester determinant."""
    a, c = as_rat(a), as_rat(c)
    value = -a * (a + c) * (c - 1)
    fs, gs = [a, 1 - a, Fraction(-1)], [a, c, Fraction(0)]
    lcm = 1
    for v in fs + gs:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    syl = det_bareiss(sylvester_matrix([int(v * lcm) for v in fs], [int(v * lcm) for v in gs]))
    if Fraction(syl, lcm**4) != value:
        raise AssertionError(f"resultant mismatch at a={a}, c={c}")
    return value
