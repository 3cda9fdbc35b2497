"""Points of P^1(Q), Moebius transformations, p-adic distance and the ideals I(P, Q)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .arith import PlaceSet, SIdeal, as_rat, is_s_unit, outside_s_part, vp, vp_int
from .errors import DomainError, InfiniteDistanceError


def _clear_denominators(values) -> list[int]:
    values = [as_rat(v) for v in values]
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in values]
    g = 0
    for n in ints:
        g = math.gcd(g, n)
    if g == 0:
        return ints
    return [n // g for n in ints]


@dataclass(frozen=True, order=True)
class ProjPoint:
    """[x:y] with gcd(x, y) = 1 and y > 0, or the point at infinity [1:0]."""

    x: int
    y: int

    def __post_init__(self):
        x, y = self.x, self.y
        if (x, y) == (0, 0):
            raise DomainError("[0:0] is not a point")
        if math.gcd(x, y) != 1 or y < 0 or (y == 0 and x != 1):
            raise DomainError(f"({x},{y}) is not a canonical representative; use normalize()")

    @property
    def is_infinity(self) -> bool:
        return self.y == 0

    def affine(self) -> Fraction:
        if self.y == 0:
            raise DomainError("the point at infinity has no affine coordinate")
        return Fraction(self.x, self.y)

    def __iter__(self):
        return iter((self.x, self.y))

    def __str__(self) -> str:
        return f"[{self.x}:{self.y}]"


ZERO = ProjPoint(0, 1)
INFINITY = ProjPoint(1, 0)
ONE = ProjPoint(1, 1)


def normalize(x, y) -> ProjPoint:
    """Canonical representative of [x:y] for rational x, y."""
    x, y = _clear_denominators((x, y))
    if x == 0 and y == 0:
        raise DomainError("[0:0] is not a point")
    if y < 0 or (y == 0 and x < 0):
        x, y = -x, -y
    return ProjPoint(x, y)


def point(t) -> ProjPoint:
    """The affine point [t:1]."""
    return normalize(as_rat(t), 1)


def naive_height(P: ProjPoint) -> int:
    return max(abs(P.x), abs(P.y))


def points_of_height(bound: int) -> list[ProjPoint]:
    """All points of P^1(Q) with naive height at most ``bound``, sorted."""
    pts = {INFINITY}
    for y in range(1, bound + 1):
        for x in range(-bound, bound + 1):
            if math.gcd(x, y) == 1:
                pts.add(ProjPoint(x, y))
    return sorted(pts)


@dataclass(frozen=True)
class Mobius:
    """The class in PGL_2(Q) of the matrix (a b / c d).

    Entries are jointly coprime with the first nonzero entry positive, so
    equal classes compare equal componentwise.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if self.a * self.d - self.b * self.c == 0:
            raise DomainError(f"singular matrix {entries}")
        g = 0
        for e in entries:
            g = math.gcd(g, e)
        first = next(e for e in entries if e != 0)
        if g != 1 or first < 0:
            raise DomainError(f"{entries} is not canonical; use Mobius.make()")

    @classmethod
    def make(cls, a, b, c, d) -> "Mobius":
        ints = _clear_denominators((a, b, c, d))
        first = next((e for e in ints if e != 0), 0)
        if first < 0:
            ints = [-e for e in ints]
        return cls(*ints)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        return f"({self.a} {self.b} / {self.c} {self.d})"


IDENTITY = Mobius(1, 0, 0, 1)


def apply_mobius(A: Mobius, P: ProjPoint) -> ProjPoint:
    return normalize(A.a * P.x + A.b * P.y, A.c * P.x + A.d * P.y)


def mobius_compose(A: Mobius, B: Mobius) -> Mobius:
    """The class of A*B, acting as P -> A(B(P))."""
    return Mobius.make(
        A.a * B.a + A.b * B.c,
        A.a * B.b + A.b * B.d,
        A.c * B.a + A.d * B.c,
        A.c * B.b + A.d * B.d,
    )


def mobius_inverse(A: Mobius) -> Mobius:
    return Mobius.make(A.d, -A.b, -A.c, A.a)


def mobius_to_zero_inf_one(P0: ProjPoint, P1: ProjPoint, P2: ProjPoint) -> Mobius:
    """The unique class sending P0, P1, P2 to [0:1], [1:0], [1:1]."""
    if len({P0, P1, P2}) != 3:
        raise DomainError(f"points must be pairwise distinct: {P0}, {P1}, {P2}")

    # L_i vanishes at P_i; z -> L0(z) L1(P2) / (L1(z) L0(P2))
    def lin(P, Q):
        return P.y * Q.x - P.x * Q.y

    k1 = lin(P1, P2)
    k0 = lin(P0, P2)
    return Mobius.make(k1 * P0.y, -k1 * P0.x, k0 * P1.y, -k0 * P1.x)


def mobius_sending(src, dst) -> Mobius:
    """The class sending the distinct triple ``src`` to the distinct triple ``dst``."""
    return mobius_compose(mobius_inverse(mobius_to_zero_inf_one(*dst)), mobius_to_zero_inf_one(*src))


def cross_term(P: ProjPoint, Q: ProjPoint) -> int:
    return P.x * Q.y - Q.x * P.y


def delta_p_coords(x1, y1, x2, y2, p: int) -> int:
    """Logarithmic distance from arbitrary rational coordinates (three-term formula)."""
    x1, y1, x2, y2 = (as_rat(v) for v in (x1, y1, x2, y2))
    cross = x1 * y2 - x2 * y1
    if cross == 0:
        raise InfiniteDistanceError("points coincide")

    def vmin(u, v):
        return min(vp(w, p) for w in (u, v) if w != 0)

    return vp(cross, p) - vmin(x1, y1) - vmin(x2, y2)


def delta_p(P: ProjPoint, Q: ProjPoint, p: int) -> int:
    cross = cross_term(P, Q)
    if cross == 0:
        raise InfiniteDistanceError(f"delta_p undefined for equal points {P}")
    vp(1, p)  # primality check
    return vp_int(cross, p)


def ideal_I(P: ProjPoint, Q: ProjPoint, S) -> SIdeal:
    cross = cross_term(P, Q)
    if cross == 0:
        raise DomainError(f"ideal_I undefined for equal points {P}")
    return outside_s_part(cross, S)


def is_pgl2_rs(A: Mobius, S) -> bool:
    return is_s_unit(A.det, PlaceSet.of(S))


def mobius_disc(A: Mobius, S) -> SIdeal:
    """Disc([A]) as an ideal of R_S; entries of A are already coprime."""
    return outside_s_part(A.det, S)
