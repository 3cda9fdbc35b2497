"""Rational self-maps of P^1 over Q: iteration, periodic points, cycles, conjugation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from .arith import PlaceSet, SIdeal, as_rat, strip_primes
from .errors import DegenerateMapError, DomainError, ResourceError, UnsupportedLengthError
from .forms import BinaryForm, compose, evaluate, linear, rational_roots, resultant
from .proj import (
    Mobius,
    ProjPoint,
    apply_mobius,
    ideal_I,
    is_pgl2_rs,
    mobius_compose,
    mobius_inverse,
    mobius_to_zero_inf_one,
    normalize,
)

POWER_BUDGET = 2**16
DEFAULT_MAX_STEPS = 64


@dataclass(frozen=True)
class RationalMap:
    """[F : G] with Res(F, G) != 0, joint content 1 and canonical sign.

    Build instances with :func:`make_map`; the constructor only checks.
    """

    F: BinaryForm
    G: BinaryForm
    resultant: int = field(compare=False, repr=False, default=0)

    @property
    def degree(self) -> int:
        return self.F.degree

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.F.coeffs + self.G.coeffs

    def __str__(self) -> str:
        return f"[{self.F} : {self.G}]"

    def __call__(self, P: ProjPoint) -> ProjPoint:
        return apply_map(self, P)


def _canonical_pair(F: BinaryForm, G: BinaryForm) -> tuple[BinaryForm, BinaryForm]:
    both = F.coeffs + G.coeffs
    g = 0
    for c in both:
        g = math.gcd(g, c)
    if next(c for c in both if c) < 0:
        g = -g
    return BinaryForm(tuple(c // g for c in F.coeffs)), BinaryForm(tuple(c // g for c in G.coeffs))


def _canonical_from_coeffs(fs: Sequence[int], gs: Sequence[int]):
    both = list(fs) + list(gs)
    g = 0
    for c in both:
        g = math.gcd(g, c)
    if g == 0:
        raise DegenerateMapError("both forms vanish")
    if next(c for c in both if c) < 0:
        g = -g
    return tuple(c // g for c in fs), tuple(c // g for c in gs)


def make_map(F, G) -> RationalMap:
    """Normalize a pair of same-degree forms into a RationalMap.

    Accepts BinaryForms or coefficient sequences (rationals allowed, cleared
    jointly).  Raises DegenerateMapError when Res(F, G) = 0.
    """
    fs = list(F.coeffs if isinstance(F, BinaryForm) else F)
    gs = list(G.coeffs if isinstance(G, BinaryForm) else G)
    if len(fs) != len(gs):
        raise DomainError(f"degree mismatch: {len(fs) - 1} vs {len(gs) - 1}")
    if len(fs) < 2:
        raise DomainError("a rational map needs degree >= 1")
    vals = [as_rat(c) for c in fs + gs]
    lcm = 1
    for v in vals:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in vals]
    if not any(ints[: len(fs)]) or not any(ints[len(fs) :]):
        raise DegenerateMapError("one of the forms is zero")
    f2, g2 = _canonical_from_coeffs(ints[: len(fs)], ints[len(fs) :])
    Fc, Gc = BinaryForm(f2), BinaryForm(g2)
    res = resultant(Fc, Gc)
    if res == 0:
        raise DegenerateMapError(f"Res(F, G) = 0 for [{Fc} : {Gc}]")
    return RationalMap(Fc, Gc, res)


def map_from_coeffs(coeffs: Sequence) -> RationalMap:
    """Map from the flat tuple (f_0..f_d, g_0..g_d)."""
    half = len(coeffs) // 2
    return make_map(coeffs[:half], coeffs[half:])


def apply_map(phi: RationalMap, P: ProjPoint) -> ProjPoint:
    return normalize(evaluate(phi.F, P.x, P.y), evaluate(phi.G, P.x, P.y))


def compose_maps(phi: RationalMap, psi: RationalMap) -> RationalMap:
    """phi o psi."""
    F = compose(phi.F, psi.F, psi.G)
    G = compose(phi.G, psi.F, psi.G)
    return make_map(*_canonical_pair(F, G))


def power_map(phi: RationalMap, n: int, budget: int = POWER_BUDGET) -> RationalMap:
    if n < 1:
        raise DomainError("iterate index must be >= 1")
    if phi.degree**n > budget:
        raise ResourceError(f"degree {phi.degree}^{n} exceeds budget {budget}")
    out = phi
    for _ in range(n - 1):
        F = compose(phi.F, out.F, out.G)
        G = compose(phi.G, out.F, out.G)
        F, G = _canonical_pair(F, G)
        # Res of an iterate is a power-product of Res(phi); skip recomputing it
        out = RationalMap(F, G, 0)
    return out


def maps_equal(phi: RationalMap, psi: RationalMap) -> bool:
    return phi.F == psi.F and phi.G == psi.G


def conjugate_map(phi: RationalMap, A: Mobius) -> RationalMap:
    """[A] o phi o [A]^-1."""
    a, b, c, d = A.entries()
    u, v = linear(d, -b), linear(-c, a)
    Fi = compose(phi.F, u, v)
    Gi = compose(phi.G, u, v)
    F = [a * f + b * g for f, g in zip(Fi.coeffs, Gi.coeffs)]
    G = [c * f + d * g for f, g in zip(Fi.coeffs, Gi.coeffs)]
    return make_map(F, G)


# ---------------------------------------------------------------------------
# orbits and periodic points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cycle:
    points: tuple[ProjPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise DomainError("empty cycle")
        if len(set(pts)) != len(pts):
            raise DomainError("cycle points must be distinct")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i % len(self.points)]

    def rotate(self, k: int) -> "Cycle":
        k %= len(self.points)
        return Cycle(self.points[k:] + self.points[:k])

    def canonical(self) -> "Cycle":
        """Rotation starting at the smallest point."""
        return self.rotate(self.points.index(min(self.points)))

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.points)) + ")"


class OrbitResult(NamedTuple):
    tail: tuple[ProjPoint, ...]
    cycle: Cycle | None

    @property
    def converged(self) -> bool:
        return self.cycle is not None


def orbit(phi: RationalMap, P: ProjPoint, max_steps: int = DEFAULT_MAX_STEPS) -> OrbitResult:
    """Iterate until a point repeats; ``cycle`` is None if the budget runs out."""
    if max_steps < 1:
        raise DomainError("max_steps must be >= 1")
    seen = {P: 0}
    path = [P]
    Q = P
    for step in range(1, max_steps + 1):
        Q = apply_map(phi, Q)
        if Q in seen:
            start = seen[Q]
            return OrbitResult(tuple(path[:start]), Cycle(tuple(path[start:])))
        seen[Q] = step
        path.append(Q)
    return OrbitResult(tuple(path), None)


def exact_period(phi: RationalMap, P: ProjPoint, max_n: int) -> int | None:
    """Minimal n <= max_n with phi^n(P) = P, or None."""
    Q = P
    for n in range(1, max_n + 1):
        Q = apply_map(phi, Q)
        if Q == P:
            return n
    return None


def mobius_count_bound(d: int, n: int) -> int:
    """Upper bound on the number of points of exact period n for degree d."""
    if n == 1:
        return d + 1
    return sum(_mobius_mu(n // k) * d**k for k in range(1, n + 1) if n % k == 0)


def _mobius_mu(n: int) -> int:
    mu, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if m > 1 else mu


def period_form(phi: RationalMap, n: int, budget: int = POWER_BUDGET) -> BinaryForm:
    """C_n = Y F_n - X G_n where phi^n = [F_n : G_n]."""
    pn = power_map(phi, n, budget)
    F = [0] + list(pn.F.coeffs)  # Y * F_n
    G = list(pn.G.coeffs) + [0]  # X * G_n
    return BinaryForm(tuple(f - g for f, g in zip(F, G)))


def periodic_points(phi: RationalMap, n: int, budget: int = POWER_BUDGET) -> list[ProjPoint]:
    """Rational points of exact period n, sorted."""
    if n < 1:
        raise DomainError("period must be >= 1")
    roots = rational_roots(period_form(phi, n, budget))
    return [r.point for r in roots if exact_period(phi, r.point, n) == n]


def rational_cycles(phi: RationalMap, n: int, budget: int = POWER_BUDGET) -> list[Cycle]:
    """The rational n-cycles of phi, each rotated to start at its smallest point."""
    pts = periodic_points(phi, n, budget)
    seen: set[ProjPoint] = set()
    cycles = []
    for P in pts:
        if P in seen:
            continue
        cyc = [P]
        Q = apply_map(phi, P)
        while Q != P:
            cyc.append(Q)
            Q = apply_map(phi, Q)
        seen.update(cyc)
        cycles.append(Cycle(tuple(cyc)).canonical())
    return sorted(cycles, key=lambda c: c.points)


def is_cycle(phi: RationalMap, C) -> bool:
    pts = tuple(C)
    if not pts or len(set(pts)) != len(pts):
        return False
    return all(apply_map(phi, pts[i]) == pts[(i + 1) % len(pts)] for i in range(len(pts)))


# ---------------------------------------------------------------------------
# interpolation through point constraints
# ---------------------------------------------------------------------------


def _nullspace(rows: list[list[int]], ncols: int) -> list[tuple[int, ...]]:
    """Integer basis (primitive vectors) of the kernel of an integer matrix."""
    M = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        ints = [int(x * lcm) for x in v]
        g = 0
        for x in ints:
            g = math.gcd(g, x)
        basis.append(tuple(x // g for x in ints))
    return basis


def _rank(rows: list[Sequence[int]]) -> int:
    ncols = len(rows[0]) if rows else 0
    return ncols - len(_nullspace([list(r) for r in rows], ncols)) if rows else 0


@dataclass(frozen=True)
class Interpolation:
    """Solution space of Phi(P) = Q constraints on quadratic maps.

    ``basis`` spans the coefficient vectors (f0, f1, f2, g0, g1, g2);
    ``maps`` are the basis members that are genuine degree-2 maps.  When the
    space is a single projective point, ``maps`` is that map or empty.
    """

    basis: tuple[tuple[int, ...], ...]
    maps: tuple[RationalMap, ...]

    @property
    def projective_dimension(self) -> int:
        return len(self.basis) - 1

    @property
    def unique_map(self) -> RationalMap | None:
        if len(self.basis) == 1 and self.maps:
            return self.maps[0]
        return None

    def contains(self, phi: RationalMap) -> bool:
        if not self.basis:
            return False
        return _rank(list(self.basis) + [phi.coeffs]) == len(self.basis)


def interpolate_quadratic(constraints: Sequence[tuple[ProjPoint, ProjPoint]]) -> Interpolation:
    if not 1 <= len(constraints) <= 6:
        raise DomainError("between 1 and 6 constraints are supported")
    sources = [P for P, _ in constraints]
    if len(set(sources)) != len(sources):
        raise DomainError("constraint sources must be distinct")
    rows = []
    for P, Q in constraints:
        mons = (P.x * P.x, P.x * P.y, P.y * P.y)
        rows.append([Q.y * m for m in mons] + [-Q.x * m for m in mons])
    basis = _nullspace(rows, 6)
    maps = []
    for v in basis:
        try:
            maps.append(make_map(v[:3], v[3:]))
        except DomainError:
            pass
    return Interpolation(tuple(basis), tuple(maps))


# ---------------------------------------------------------------------------
# cycle ideals and equivalence of tuples
# ---------------------------------------------------------------------------


def cycle_ideals(C, S) -> list[SIdeal]:
    pts = tuple(C)
    if len(pts) < 2:
        raise DomainError("cycle_ideals needs at least two points")
    return [ideal_I(pts[0], pts[i], S) for i in range(1, len(pts))]


@dataclass
class IdealLawReport:
    ideals: list[SIdeal]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def _good_outside(phi: RationalMap, S: PlaceSet) -> bool:
    return strip_primes(phi.resultant or resultant(phi.F, phi.G), S) == 1


def check_cycle_ideal_laws(phi: RationalMap, C, S) -> IdealLawReport:
    """I(P_0, P_i) = I(P_k, P_{k+i}) for all i, k, and I_1 | I_i."""
    S = PlaceSet.of(S)
    if not _good_outside(phi, S):
        raise DomainError(f"map does not have good reduction outside {S}")
    if not is_cycle(phi, C):
        raise DomainError("the tuple is not a cycle of the map")
    pts = tuple(C)
    n = len(pts)
    ideals = cycle_ideals(pts, S) if n >= 2 else []
    violations = []
    for i in range(1, n):
        for k in range(n):
            other = ideal_I(pts[k], pts[(k + i) % n], S)
            if other != ideals[i - 1]:
                violations.append(f"I({k},{(k + i) % n})={other} != I_{i}={ideals[i - 1]}")
        if not ideals[0].divides(ideals[i - 1]):
            violations.append(f"I_1={ideals[0]} does not divide I_{i}={ideals[i - 1]}")
    return IdealLawReport(ideals, violations)


def tuples_equivalent(T1, T2, S) -> tuple[Mobius, int] | None:
    """A witness [A] in PGL_2(R_S) and rotation h with A(P_i) = Q_{i+h}, or None."""
    P, Q = tuple(T1), tuple(T2)
    n = len(P)
    if n != len(Q):
        raise DomainError("tuples must have the same length")
    if n < 3:
        raise UnsupportedLengthError("equivalence is only decided for n >= 3")
    S = PlaceSet.of(S)
    MP = mobius_to_zero_inf_one(P[0], P[1], P[2])
    for h in range(n):
        target = (Q[h % n], Q[(h + 1) % n], Q[(h + 2) % n])
        A = mobius_compose(mobius_inverse(mobius_to_zero_inf_one(*target)), MP)
        if not is_pgl2_rs(A, S):
            continue
        if all(apply_mobius(A, P[i]) == Q[(i + h) % n] for i in range(n)):
            return A, h
    return None


# ---------------------------------------------------------------------------
# conjugacy anchored on rational cycles
# ---------------------------------------------------------------------------


class ConjugacyResult(NamedTuple):
    status: str  # "conjugate" | "not-conjugate" | "inconclusive"
    witness: Mobius | None = None

    @property
    def found(self) -> bool:
        return self.status == "conjugate"


def cycle_anchored_forms(phi: RationalMap, cycles: Sequence[Cycle]) -> dict[tuple, Mobius]:
    """Conjugates of phi moving each rotation of each cycle's first three points to 0, oo, 1.

    Keys are coefficient tuples of the conjugated maps; values the Moebius used.
    """
    out: dict[tuple, Mobius] = {}
    for C in cycles:
        n = len(C)
        for h in range(n):
            M = mobius_to_zero_inf_one(C[h], C[h + 1], C[h + 2])
            out.setdefault(conjugate_map(phi, M).coeffs, M)
    return out


def conjugacy_via_cycles(
    phi: RationalMap,
    psi: RationalMap,
    n: int,
    phi_cycles: Sequence[Cycle] | None = None,
    psi_cycles: Sequence[Cycle] | None = None,
) -> ConjugacyResult:
    """Decide PGL_2(Q)-conjugacy of phi and psi relative to their rational n-cycles.

    Any conjugacy carries the n-cycles of phi bijectively onto those of psi,
    so anchoring one cycle of phi and trying every cycle and rotation of psi
    is complete.
    """
    if n < 3:
        raise UnsupportedLengthError("cycle-anchored conjugacy needs n >= 3")
    if phi_cycles is None:
        phi_cycles = rational_cycles(phi, n)
    if psi_cycles is None:
        psi_cycles = rational_cycles(psi, n)
    if not phi_cycles or not psi_cycles:
        if bool(phi_cycles) != bool(psi_cycles):
            return ConjugacyResult("not-conjugate")
        return ConjugacyResult("inconclusive")
    if len(phi_cycles) != len(psi_cycles) or phi.degree != psi.degree:
        return ConjugacyResult("not-conjugate")
    C = phi_cycles[0]
    MC = mobius_to_zero_inf_one(C[0], C[1], C[2])
    for D in psi_cycles:
        for h in range(n):
            MD = mobius_to_zero_inf_one(D[h], D[h + 1], D[h + 2])
            A = mobius_compose(mobius_inverse(MD), MC)
            if maps_equal(conjugate_map(phi, A), psi):
                return ConjugacyResult("conjugate", A)
    return ConjugacyResult("not-conjugate")
