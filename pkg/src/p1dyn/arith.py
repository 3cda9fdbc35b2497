"""Exact rationals, p-adic valuations, S-integers and S-units over Q.

Rationals are :class:`fractions.Fraction` throughout.  The archimedean
place is implicit: a :class:`PlaceSet` lists only the finite primes of S.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .errors import DomainError, UndefinedValuationError

DEFAULT_UNIT_BOUND = 12
TRIAL_DIVISION_LIMIT = 10**6

# Miller-Rabin with these bases is deterministic below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass int, Fraction or str")
    return Fraction(x)


def _miller_rabin(n: int, bases: Iterable[int]) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality test; deterministic below ~3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n < _MR_DETERMINISTIC_BOUND:
        return _miller_rabin(n, _MR_BASES)
    rng = random.Random(n)
    return _miller_rabin(n, _MR_BASES + tuple(rng.randrange(2, n - 1) for _ in range(24)))


def is_certified_prime(n: int) -> bool:
    return n < _MR_DETERMINISTIC_BOUND and is_prime(n)


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise DomainError(f"{p!r} is not a prime")


@dataclass(frozen=True)
class PlaceSet:
    """The finite primes of S, strictly increasing."""

    primes: tuple[int, ...] = ()

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        if any(not is_prime(p) for p in ps):
            raise DomainError(f"non-prime in place set: {ps}")
        if len(set(ps)) != len(ps):
            raise DomainError(f"duplicate primes in place set: {ps}")
        object.__setattr__(self, "primes", tuple(sorted(ps)))

    @classmethod
    def of(cls, S) -> "PlaceSet":
        if isinstance(S, PlaceSet):
            return S
        if S is None:
            return cls()
        if isinstance(S, str):
            return cls.parse(S)
        return cls(tuple(S))

    @classmethod
    def parse(cls, text: str) -> "PlaceSet":
        text = text.strip().strip("{}")
        if not text:
            return cls()
        return cls(tuple(int(t) for t in text.split(",") if t.strip()))

    def __contains__(self, p) -> bool:
        return p in self.primes

    def __iter__(self):
        return iter(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.primes)) + "}"


@dataclass(frozen=True, order=True)
class SIdeal:
    """A nonzero ideal of R_S, given by its positive generator prime to S."""

    generator: int

    def __post_init__(self):
        if self.generator < 1:
            raise DomainError("ideal generator must be positive")

    def __mul__(self, other: "SIdeal") -> "SIdeal":
        return SIdeal(self.generator * other.generator)

    def divides(self, other: "SIdeal") -> bool:
        return other.generator % self.generator == 0

    @property
    def is_unit_ideal(self) -> bool:
        return self.generator == 1

    def __int__(self) -> int:
        return self.generator

    def __str__(self) -> str:
        return f"({self.generator})"


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer; no primality check."""
    if n == 0:
        raise UndefinedValuationError("v_p(0) is undefined")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp(x, p: int) -> int:
    x = as_rat(x)
    if x == 0:
        raise UndefinedValuationError("v_p(0) is undefined")
    _require_prime(p)
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


def strip_primes(n: int, primes: Iterable[int]) -> int:
    """|n| with every factor from ``primes`` removed."""
    n = abs(n)
    if n == 0:
        raise UndefinedValuationError("cannot strip primes from 0")
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def is_s_integer(x, S) -> bool:
    x = as_rat(x)
    return strip_primes(x.denominator, PlaceSet.of(S)) == 1


def is_s_unit(x, S) -> bool:
    x = as_rat(x)
    if x == 0:
        return False
    S = PlaceSet.of(S)
    return strip_primes(x.numerator, S) == 1 and strip_primes(x.denominator, S) == 1


def s_unit_exponents(x, S) -> tuple[int, ...] | None:
    """Exponent vector of an S-unit over the primes of S, or None."""
    x = as_rat(x)
    if not is_s_unit(x, S):
        return None
    return tuple(vp_int(x.numerator, p) - vp_int(x.denominator, p) for p in PlaceSet.of(S))


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------

_small_primes: list[int] = []


def _primes_below(limit: int) -> list[int]:
    global _small_primes
    if not _small_primes or _small_primes[-1] < limit - 1000:
        sieve = bytearray([1]) * limit
        sieve[0:2] = b"\x00\x00"
        for i in range(2, math.isqrt(limit) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(range(i * i, limit, i)))
        _small_primes = [i for i, flag in enumerate(sieve) if flag]
    return _small_primes


def _brent(n: int) -> int:
    """A nontrivial factor of the odd composite n (Pollard rho, Brent variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


class Factorization(list):
    """List of (prime, exponent) pairs.

    ``uncertified`` holds the factors whose primality is only probable
    (beyond the deterministic Miller-Rabin range).
    """

    def __init__(self, pairs=(), uncertified=()):
        super().__init__(pairs)
        self.uncertified = tuple(uncertified)

    @property
    def certified(self) -> bool:
        return not self.uncertified

    def primes(self) -> list[int]:
        return [p for p, _ in self]


def factor(n: int) -> Factorization:
    if n == 0:
        raise DomainError("cannot factor 0")
    n = abs(int(n))
    found: dict[int, int] = {}
    for p in _primes_below(TRIAL_DIVISION_LIMIT):
        if p * p > n:
            break
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        d = _brent(m)
        stack.extend((d, m // d))
    pairs = sorted(found.items())
    return Factorization(pairs, [p for p, _ in pairs if not is_certified_prime(p)])


def outside_s_part(x, S) -> SIdeal:
    """Generator of the part of the ideal (x) supported outside S."""
    x = as_rat(x)
    if x == 0:
        raise DomainError("outside_s_part of 0")
    S = PlaceSet.of(S)
    if not is_s_integer(x, S):
        raise DomainError(f"{x} is not an S-integer for S={S}")
    return SIdeal(strip_primes(x.numerator, S))


# ---------------------------------------------------------------------------
# S-units and the unit equation
# ---------------------------------------------------------------------------


def enumerate_s_units(S, bound: int) -> list[Fraction]:
    """All +-prod p^e_p with |e_p| <= bound, sorted by value."""
    if bound < 0:
        raise DomainError("bound must be nonnegative")
    S = PlaceSet.of(S)
    out = []
    for exps in itertools.product(range(-bound, bound + 1), repeat=len(S)):
        u = Fraction(1)
        for p, e in zip(S, exps):
            u *= Fraction(p) ** e
        out.extend((u, -u))
    return sorted(out)


class UnitSolution(NamedTuple):
    values: tuple[Fraction, ...]
    degenerate: bool


def _has_vanishing_subsum(terms: Sequence[Fraction]) -> bool:
    n = len(terms)
    for r in range(1, n):
        for idx in itertools.combinations(range(n), r):
            if sum(terms[i] for i in idx) == 0:
                return True
    return False


def solve_unit_eq(a: Sequence, S, bound: int = DEFAULT_UNIT_BOUND) -> list[UnitSolution]:
    """Every S-unit solution of a_1 x_1 + ... + a_n x_n = 1 with bounded exponents.

    Exhaustive over the first n-1 unknowns; the last one is solved for and
    kept only if it is an S-unit within the same exponent bound.
    """
    a = [as_rat(c) for c in a]
    if not 1 <= len(a) <= 3:
        raise DomainError("solve_unit_eq supports 1 to 3 terms")
    if any(c == 0 for c in a):
        raise DomainError("coefficients must be nonzero")
    S = PlaceSet.of(S)
    units = enumerate_s_units(S, bound)

    def bounded_unit(x: Fraction) -> bool:
        e = s_unit_exponents(x, S) if x != 0 else None
        return e is not None and all(abs(k) <= bound for k in e)

    out = []
    for head in itertools.product(units, repeat=len(a) - 1):
        rest = 1 - sum(c * x for c, x in zip(a, head))
        last = rest / a[-1]
        if not bounded_unit(last):
            continue
        values = head + (last,)
        terms = [c * x for c, x in zip(a, values)]
        out.append(UnitSolution(values, _has_vanishing_subsum(terms)))
    out.sort()
    return out
