"""Homogeneous binary forms with integer coefficients.

A form of degree d is stored as (f_0, ..., f_d), meaning
f_0 X^d + f_1 X^{d-1} Y + ... + f_d Y^d.  Forms are not normalized; callers
that need content 1 (e.g. rational maps) handle it themselves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .arith import as_rat, factor, is_prime, vp
from .errors import DomainError
from .proj import ProjPoint, normalize


@dataclass(frozen=True)
class BinaryForm:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        if not cs:
            raise DomainError("a form needs at least one coefficient")
        if not any(cs):
            raise DomainError("the zero form is not allowed")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def of(cls, *coeffs) -> "BinaryForm":
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __neg__(self):
        return BinaryForm(tuple(-c for c in self.coeffs))

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        _same_degree(self, other)
        return BinaryForm(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return BinaryForm(tuple(other * c for c in self.coeffs))
        if isinstance(other, BinaryForm):
            return BinaryForm(tuple(_poly_mul(self.coeffs, other.coeffs)))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "BinaryForm":
        out = [1]
        for _ in range(k):
            out = _poly_mul(out, self.coeffs)
        return BinaryForm(tuple(out))

    @property
    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "BinaryForm":
        g = self.content
        first = next(c for c in self.coeffs if c)
        if first < 0:
            g = -g
        return BinaryForm(tuple(c // g for c in self.coeffs))

    def __call__(self, x, y) -> Fraction | int:
        return evaluate(self, x, y)

    def __str__(self) -> str:
        d = self.degree
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "".join(
                v + (f"^{e}" if e > 1 else "") for v, e in (("X", d - i), ("Y", i)) if e
            )
            if not mono:
                terms.append(str(c))
            elif abs(c) == 1:
                terms.append(("-" if c < 0 else "") + mono)
            else:
                terms.append(f"{c}{mono}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


X = BinaryForm((1, 0))
Y = BinaryForm((0, 1))


def linear(a, b) -> BinaryForm:
    """aX + bY."""
    return BinaryForm((a, b))


def _same_degree(F: BinaryForm, G: BinaryForm) -> None:
    if F.degree != G.degree:
        raise DomainError(f"degree mismatch: {F.degree} vs {G.degree}")


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# valuations, evaluation, composition
# ---------------------------------------------------------------------------


def vp_form(F: BinaryForm, p: int) -> int:
    return min(vp(c, p) for c in F.coeffs if c)


def evaluate(F: BinaryForm, x, y):
    """F(x, y) by homogeneous Horner.  Integer inputs give an int."""
    if not (isinstance(x, int) and isinstance(y, int)):
        x, y = as_rat(x), as_rat(y)
    d = F.degree
    ypows = [1] * (d + 1)
    for k in range(1, d + 1):
        ypows[k] = ypows[k - 1] * y
    acc = 0
    for i, c in enumerate(F.coeffs):
        acc = acc * x + c * ypows[i]
    return acc


def compose(U: BinaryForm, f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """U(f(X,Y), g(X,Y))."""
    _same_degree(f, g)
    D = U.degree
    fp = [[1]]
    gp = [[1]]
    for _ in range(D):
        fp.append(_poly_mul(fp[-1], f.coeffs))
        gp.append(_poly_mul(gp[-1], g.coeffs))
    out = [0] * (D * f.degree + 1)
    for i, u in enumerate(U.coeffs):
        if u:
            term = _poly_mul(fp[D - i], gp[i])
            for k, t in enumerate(term):
                out[k] += u * t
    return BinaryForm(tuple(out))


def derivative_x(F: BinaryForm) -> list[int]:
    d = F.degree
    return [(d - i) * c for i, c in enumerate(F.coeffs[:-1])]


def derivative_y(F: BinaryForm) -> list[int]:
    return [i * c for i, c in enumerate(F.coeffs) if i > 0]


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------


def sylvester_matrix(f: Sequence[int], g: Sequence[int]) -> list[list[int]]:
    """Sylvester matrix of two coefficient lists read as forms of degrees len-1."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(f) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(g) + [0] * (size - n - 1 - i))
    return rows


def det_bareiss(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Gaussian elimination."""
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            row_i = M[i]
            lead = row_i[k]
            row_k = M[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - lead * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * M[n - 1][n - 1]


def det_cofactor(matrix: Sequence[Sequence[int]]) -> int:
    """Laplace expansion along the first row; an independent check for small sizes."""
    n = len(matrix)
    if n == 0:
        return 1
    if n == 1:
        return matrix[0][0]
    total = 0
    for j, a in enumerate(matrix[0]):
        if a:
            minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
            total += (-1) ** j * a * det_cofactor(minor)
    return total


def _resultant_coeffs(f: Sequence[int], g: Sequence[int]) -> int:
    return det_bareiss(sylvester_matrix(f, g))


def resultant(F: BinaryForm, G: BinaryForm) -> int:
    _same_degree(F, G)
    if F.degree < 1:
        raise DomainError("resultant needs degree >= 1")
    return _resultant_coeffs(F.coeffs, G.coeffs)


def resultant_cofactor(F: BinaryForm, G: BinaryForm) -> int:
    _same_degree(F, G)
    return det_cofactor(sylvester_matrix(F.coeffs, G.coeffs))


# ---------------------------------------------------------------------------
# univariate helpers (coefficients high to low)
# ---------------------------------------------------------------------------


def _trim(a: list) -> list:
    i = 0
    while i < len(a) - 1 and a[i] == 0:
        i += 1
    return a[i:]


def _eval_mod(a: Sequence[int], x: int, m: int) -> int:
    acc = 0
    for c in a:
        acc = (acc * x + c) % m
    return acc


def _deriv(a: Sequence[int]) -> list[int]:
    n = len(a) - 1
    return [(n - i) * c for i, c in enumerate(a[:-1])] or [0]


def _gcd_mod_p(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Monic gcd over F_p; [0] when both inputs vanish."""
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b != [0]:
        inv = pow(b[0], -1, p)
        r = list(a)
        while len(r) >= len(b) and r != [0]:
            q = r[0] * inv % p
            for i in range(len(b)):
                r[i] = (r[i] - q * b[i]) % p
            r = _trim(r[1:] if len(r) > 1 else [0])
        a, b = b, r
    if a == [0]:
        return a
    inv = pow(a[0], -1, p)
    return [c * inv % p for c in a]


def _content(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _prim(a: list[int]) -> list[int]:
    g = _content(a)
    if g == 0:
        return a
    if a[0] < 0:
        g = -g
    return [c // g for c in a]


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    r = list(a)
    lb = b[0]
    while len(r) >= len(b) and r != [0]:
        lr = r[0]
        r = [lb * c for c in r]
        for i in range(len(b)):
            r[i] -= lr * b[i]
        r = _trim(r[1:]) if len(r) > 1 else [0]
    return r


def _int_poly_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd of integer polynomials via the primitive remainder sequence."""
    a, b = _prim(_trim(list(a))), _prim(_trim(list(b)))
    if len(a) < len(b):
        a, b = b, a
    while b != [0]:
        r = _pseudo_rem(a, b)
        a, b = b, (_prim(r) if r != [0] else [0])
    return _prim(a)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    """a / b for integer polynomials known to divide exactly over Q (quotient integral)."""
    a = list(a)
    q = []
    while len(a) >= len(b):
        c = Fraction(a[0], b[0])
        if c.denominator != 1:
            raise ArithmeticError("inexact division")
        c = int(c)
        q.append(c)
        for i in range(len(b)):
            a[i] -= c * b[i]
        a = a[1:]
    if any(a):
        raise ArithmeticError("nonzero remainder")
    return q


# ---------------------------------------------------------------------------
# rational roots
# ---------------------------------------------------------------------------


class Root(NamedTuple):
    point: ProjPoint
    multiplicity: int


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factor(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _roots_by_divisors(g: list[int]) -> set[tuple[int, int]]:
    """Affine rational roots x/y of g (g(0) != 0) via x | g(0), y | lead."""
    found = set()
    lead, const = g[0], g[-1]
    G = BinaryForm(tuple(g))
    for y in _divisors(lead):
        for x0 in _divisors(const):
            if math.gcd(x0, y) != 1:
                continue
            for x in (x0, -x0):
                if evaluate(G, x, y) == 0:
                    found.add((x, y))
    return found


def _rational_reconstruct(r: int, m: int, nbound: int, dbound: int):
    """x/y with x = r*y (mod m), |x| <= nbound, 0 < y <= dbound, if any."""
    r0, r1 = m, r % m
    t0, t1 = 0, 1
    while r1 > nbound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0:
        return None
    x, y = r1, t1
    if y < 0:
        x, y = -x, -y
    if y > dbound or math.gcd(x, y) != 1:
        return None
    return x, y


def _good_prime(g: list[int], start: int):
    """A prime p not dividing lead(g)*g(0) with g squarefree mod p, or None."""
    dg = _deriv(g)
    p = start
    tried = 0
    while tried < 40:
        p += 1
        if not is_prime(p):
            continue
        if g[0] % p == 0 or g[-1] % p == 0:
            continue
        tried += 1
        if len(_gcd_mod_p(g, dg, p)) == 1:
            return p
    return None


def _roots_by_padic(g: list[int]) -> set[tuple[int, int]]:
    """Affine rational roots of a squarefree-mod-p polynomial by Hensel lifting."""
    p = _good_prime(g, max(50, len(g) + 1))
    if p is None:
        sqf = _exact_div(g, _int_poly_gcd(g, _deriv(g)))
        sqf = _prim(sqf)
        p = _good_prime(sqf, max(50, len(sqf) + 1))
        if p is None:  # pragma: no cover - squarefree over Q guarantees a prime exists
            return _roots_by_divisors(sqf)
        g = sqf
    nbound, dbound = abs(g[-1]), abs(g[0])
    bound = 2 * nbound * dbound + 1
    dg = _deriv(g)
    found = set()
    G = BinaryForm(tuple(g))
    for r in range(p):
        if _eval_mod(g, r, p):
            continue
        m = p
        while m <= bound:
            m2 = m * m
            fr = _eval_mod(g, r, m2)
            dr = _eval_mod(dg, r, m2)
            r = (r - fr * pow(dr, -1, m2)) % m2
            m = m2
        cand = _rational_reconstruct(r, m, nbound, dbound)
        if cand is not None and evaluate(G, *cand) == 0:
            found.add(cand)
    return found


def _divide_linear(coeffs: list[int], x: int, y: int) -> list[int] | None:
    """Quotient of the form by (yX - xY) if exact, else None."""
    if y == 0:
        # divide by -Y: root at infinity means leading coefficient 0
        if coeffs[0] != 0:
            return None
        return [-c for c in coeffs[1:]]
    out = []
    rem = list(coeffs)
    for i in range(len(coeffs) - 1):
        q = Fraction(rem[i], y)
        if q.denominator != 1:
            return None
        q = int(q)
        out.append(q)
        rem[i + 1] += q * x
    if rem[-1] != 0:
        return None
    return out


def rational_roots(F: BinaryForm, method: str = "auto") -> list[Root]:
    """All points of P^1(Q) where F vanishes, with multiplicities.

    ``method`` selects how affine roots are located after the roots at
    [1:0] and [0:1] are stripped: "divisors" tests every x/y with x | f_d
    and y | f_0; "padic" lifts roots modulo a good prime and reconstructs;
    "auto" uses divisors while the candidate set is small.
    """
    coeffs = list(F.primitive().coeffs)
    lead_zeros = next(i for i, c in enumerate(coeffs) if c)
    trail_zeros = next(i for i, c in enumerate(reversed(coeffs)) if c)
    core = coeffs[lead_zeros : len(coeffs) - trail_zeros]
    roots = []
    if lead_zeros:
        roots.append(Root(ProjPoint(1, 0), lead_zeros))
    if trail_zeros:
        roots.append(Root(ProjPoint(0, 1), trail_zeros))
    if len(core) > 1:
        if method == "auto":
            small = max(abs(core[0]), abs(core[-1])) < 10**12
            if small and len(_divisors(core[0])) * len(_divisors(core[-1])) <= 2048:
                method = "divisors"
            else:
                method = "padic"
        if method == "divisors":
            affine = _roots_by_divisors(core)
        elif method == "padic":
            affine = _roots_by_padic(core)
        else:
            raise DomainError(f"unknown root-finding method {method!r}")
        for x, y in sorted(affine):
            mult = 0
            rest = core
            while True:
                q = _divide_linear(rest, x, y)
                if q is None:
                    break
                mult += 1
                rest = q
            roots.append(Root(normalize(x, y), mult))
    return sorted(roots)


# ---------------------------------------------------------------------------
# reduction mod p, repeated roots
# ---------------------------------------------------------------------------


def common_root_mod_p(F: BinaryForm, G: BinaryForm, p: int) -> bool:
    """Whether F mod p and G mod p share a root in P^1 over the algebraic closure of F_p."""
    if not is_prime(p):
        raise DomainError(f"{p} is not a prime")
    f = [c % p for c in F.coeffs]
    g = [c % p for c in G.coeffs]
    if not any(f) and not any(g):
        raise DomainError(f"both forms vanish modulo {p}")
    if not any(f) or not any(g):
        # the surviving form has degree >= 1, hence a root over the closure
        return max(F.degree, G.degree) >= 1
    if f[0] == 0 and g[0] == 0:
        return True  # common root [1:0]
    return len(_gcd_mod_p(f, g, p)) > 1


def has_repeated_root(F: BinaryForm) -> bool:
    """Whether F has a root of multiplicity >= 2 over the algebraic closure of Q.

    In characteristic zero a multiple root of F is exactly a common root of
    dF/dX and dF/dY (Euler's identity), so the gcd test reduces to a
    resultant of the two partial derivatives.
    """
    if F.degree < 1:
        raise DomainError("degree must be >= 1")
    if F.degree == 1:
        return False
    fx, fy = derivative_x(F), derivative_y(F)
    if not any(fx) or not any(fy):
        return True
    return _resultant_coeffs(fx, fy) == 0


def squarefree_part(F: BinaryForm) -> BinaryForm:
    """Product of the distinct irreducible factors of F over Q, primitive."""
    coeffs = list(F.primitive().coeffs)
    lead_zeros = next(i for i, c in enumerate(coeffs) if c)
    trail_zeros = next(i for i, c in enumerate(reversed(coeffs)) if c)
    core = coeffs[lead_zeros : len(coeffs) - trail_zeros]
    if len(core) > 1:
        core = _prim(_exact_div(core, _int_poly_gcd(core, _deriv(core))))
    out = list(core)
    if lead_zeros:
        out = [0] + out
    if trail_zeros:
        out = out + [0]
    return BinaryForm(tuple(out))


def random_form(rng, degree: int, bound: int) -> BinaryForm:
    while True:
        cs = tuple(rng.randint(-bound, bound) for _ in range(degree + 1))
        if any(cs):
            return BinaryForm(cs)


__all__ = [
    "BinaryForm",
    "Root",
    "X",
    "Y",
    "common_root_mod_p",
    "compose",
    "det_bareiss",
    "det_cofactor",
    "evaluate",
    "has_repeated_root",
    "linear",
    "rational_roots",
    "resultant",
    "resultant_cofactor",
    "squarefree_part",
    "sylvester_matrix",
    "vp_form",
]
