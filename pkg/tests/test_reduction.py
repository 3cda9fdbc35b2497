import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p1dyn.dynamics import apply_map, conjugate_map, make_map, map_from_coeffs, maps_equal
from p1dyn.errors import DegenerateMapError, DomainError
from p1dyn.forms import BinaryForm, common_root_mod_p, compose, linear, resultant
from p1dyn.proj import IDENTITY, INFINITY, ONE, ZERO, Mobius, mobius_inverse, point
from p1dyn.reduction import (
    NormalFormNF,
    check_n3part1,
    disc,
    good_outside,
    milnor_form,
    nf3_map,
    nf3_params,
    reduction_report,
    resultant_nf3,
    to_normal_form,
    verify_lemma_n34,
    vp_disc,
)

PRIMES = [p for p in range(2, 100) if all(p % q for q in range(2, p))]
PHI1 = make_map([4, -9, 2], [2, -4, 2])
PHI3 = make_map([4, -17, 18], [2, -8, 6])


def psi3(a):
    a = Fraction(a)
    return make_map([a, 1 - a, -1], [a, 0, 0])


def test_vp_disc_examples():
    for p in (2, 3, 5, 7, 97):
        assert vp_disc(psi3(1), p) == 0
    assert vp_disc(PHI1, 2) == 2
    assert vp_disc(make_map([20, -45, 10], [10, -20, 10]), 2) == 2
    assert disc(PHI1) == 36
    with pytest.raises(DomainError):
        vp_disc(PHI1, 6)


def test_reduction_report_examples():
    assert reduction_report(psi3(2), (2,)).good_outside_S
    rep = reduction_report(PHI1, ())
    assert rep.bad_primes_outside_S == [2, 3] and not rep.good_outside_S
    assert reduction_report(PHI3, (2, 3, 5)).good_outside_S
    assert reduction_report(PHI3, (2, 3)).bad_primes_outside_S == [5]
    js = reduction_report(PHI3, (2,)).to_json()
    assert js["disc"] == "60" and js["bad_primes_outside_s"] == [3, 5]


c6 = st.integers(-12, 12)
maps = st.tuples(c6, c6, c6, c6, c6, c6).filter(
    lambda t: any(t[:3]) and any(t[3:]) and resultant(BinaryForm(t[:3]), BinaryForm(t[3:])) != 0
).map(map_from_coeffs)


@settings(max_examples=150)
@given(maps)
def test_definition_equivalence(phi):
    for p in PRIMES:
        assert (vp_disc(phi, p) > 0) == common_root_mod_p(phi.F, phi.G, p)


@settings(max_examples=100)
@given(maps, st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_unimodular_conjugation_keeps_report(phi, a, b, c):
    if a == 0 or (1 + b * c) % a:
        return
    A = Mobius.make(a, b, c, (1 + b * c) // a)
    r1, r2 = reduction_report(phi, ()), reduction_report(conjugate_map(phi, A), ())
    assert (r1.disc, r1.bad_primes_outside_S) == (r2.disc, r2.bad_primes_outside_S)


def test_to_normal_form_psi3():
    for a in (1, 2, -3, Fraction(5, 7)):
        phi = psi3(a)
        nf, A = to_normal_form(phi, ONE, ZERO, INFINITY, ONE)
        assert A == IDENTITY
        # (a, b, c) is only defined up to a common scalar
        assert nf.lam == 1 and nf.c == 0 and nf.a / nf.b == Fraction(a)


def test_to_normal_form_phi3():
    cyc = (ZERO, point(3), INFINITY, point(2))
    nf, A = to_normal_form(PHI3, cyc[3], cyc[0], cyc[1], cyc[2])
    assert nf.lam != 1 and nf.valid
    assert maps_equal(conjugate_map(nf.to_map(), mobius_inverse(A)), PHI3)
    assert (nf.lam, nf.a, nf.b, nf.c) == (-2, 1, 3, -7)
    with pytest.raises(DomainError):
        to_normal_form(PHI3, cyc[0], cyc[0], cyc[1], cyc[2])
    with pytest.raises(DomainError):
        to_normal_form(PHI3, cyc[0], cyc[1], cyc[1], cyc[3])


def test_to_normal_form_round_trip_random():
    rng = random.Random(11)
    done = 0
    while done < 30:
        e = [rng.randint(-4, 4) for _ in range(4)]
        if e[0] * e[3] == e[1] * e[2]:
            continue
        phi = conjugate_map(psi3(rng.choice([1, -1, 2, 3, Fraction(1, 2)])), Mobius.make(*e))
        orbit = [point(rng.randint(-9, 9))]
        for _ in range(3):
            orbit.append(apply_map(phi, orbit[-1]))
        if len(set(orbit[1:])) != 3 or orbit[0] == orbit[1]:
            continue
        try:
            nf, M = to_normal_form(phi, *orbit)
        except DomainError:
            continue  # lam = 0 or oo: eta collides with beta or alpha
        assert maps_equal(conjugate_map(nf.to_map(), mobius_inverse(M)), phi)
        done += 1


def test_normal_form_validity():
    assert not NormalFormNF(Fraction(0), Fraction(1), Fraction(1), Fraction(0)).valid
    with pytest.raises(DomainError):
        NormalFormNF(Fraction(1), Fraction(1), Fraction(2), Fraction(2)).to_map()


def test_milnor_form():
    assert milnor_form(0, 0).coeffs == (1, 0, 0, 0, 0, 1)
    with pytest.raises(DegenerateMapError):
        milnor_form(1, 1)
    assert milnor_form(2, 3).resultant != 0


def test_verify_lemma_n34_examples():
    nf = NormalFormNF(Fraction(1), Fraction(2), Fraction(1), Fraction(0))
    rep = verify_lemma_n34(nf, (2,), IDENTITY)
    assert rep.ok and rep.details["a*lam+c"] == "2"
    cyc = (ZERO, point(3), INFINITY, point(2))
    nf3, A = to_normal_form(PHI3, cyc[3], cyc[0], cyc[1], cyc[2])
    assert verify_lemma_n34(nf3, (2, 3, 5), mobius_inverse(A)).ok
    with pytest.raises(DomainError, match="hypothesis 3"):
        verify_lemma_n34(nf3, (2, 3), mobius_inverse(A))
    with pytest.raises(DomainError, match="hypothesis 1"):
        verify_lemma_n34(NormalFormNF(Fraction(0), Fraction(1), Fraction(1), Fraction(0)), (), IDENTITY)


def test_check_n3part1_identity():
    for a in (1, -1, 2, Fraction(1, 2), -4):
        rep = check_n3part1(a, 0, IDENTITY, (2,))
        assert rep.ok, rep.failures()
    with pytest.raises(DomainError):
        check_n3part1(5, 0, IDENTITY, (2,))
    with pytest.raises(DomainError):
        check_n3part1(0, 1, IDENTITY, (2,))


def test_check_n3part1_nontrivial_conjugator():
    # Psi has bad reduction at 3, its conjugate by A (det 3) does not
    A = Mobius.make(3, 0, -38, 1)
    assert not good_outside(nf3_map(-2, 10), (2,))
    rep = check_n3part1(-2, 10, A, (2,))
    assert rep.ok and rep.details["disc_A"] == "3"
    assert check_n3part1(-8, 10, A, (2,)).ok


def test_nf3_params():
    assert nf3_params(nf3_map(3, -2)) == (3, -2)
    assert nf3_params(nf3_map(Fraction(1, 2), 4)) == (Fraction(1, 2), 4)
    with pytest.raises(DomainError):
        nf3_params(PHI3)


def test_resultant_nf3_examples():
    assert resultant_nf3(1, 2) == -3
    assert resultant_nf3(2, 3) == -20
    assert resultant_nf3(0, 5) == 0


def test_resultant_nf3_random():
    rng = random.Random(2)
    for _ in range(200):
        a = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        c = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        assert resultant_nf3(a, c) == -a * (a + c) * (c - 1)


def test_conjugated_raw_forms_resultant():
    rng = random.Random(4)
    for _ in range(50):
        al = rng.choice([v for v in range(-6, 7) if v])
        be = rng.randint(-6, 6)
        a, c = rng.randint(-8, 8), rng.randint(-8, 8)
        F, G = BinaryForm((a, 1 - a, -1)) if a != 1 else BinaryForm((1, 0, -1)), BinaryForm((a, c, 0)) if (a, c) != (0, 0) else None
        if G is None:
            continue
        # A = (al 0 / be 1): inner substitution (X, -be X + al Y), outer (al F, be F + G)
        x, y = linear(1, 0), linear(-be, al)
        Fc, Gc = compose(F, x, y), compose(G, x, y)
        outer_F = BinaryForm(tuple(al * v for v in Fc.coeffs))
        outer_G = BinaryForm(tuple(be * u + v for u, v in zip(Fc.coeffs, Gc.coeffs))) if any(
            be * u + v for u, v in zip(Fc.coeffs, Gc.coeffs)
        ) else None
        if outer_G is None:
            continue
        assert resultant(outer_F, outer_G) == -(al**6) * a * (a + c) * (c - 1)
