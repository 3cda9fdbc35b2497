import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p1dyn.arith import SIdeal
from p1dyn.dynamics import (
    Cycle,
    apply_map,
    check_cycle_ideal_laws,
    compose_maps,
    conjugacy_via_cycles,
    conjugate_map,
    cycle_ideals,
    exact_period,
    interpolate_quadratic,
    is_cycle,
    make_map,
    map_from_coeffs,
    maps_equal,
    mobius_count_bound,
    orbit,
    period_form,
    periodic_points,
    power_map,
    rational_cycles,
    tuples_equivalent,
)
from p1dyn.errors import DegenerateMapError, DomainError, ResourceError, UnsupportedLengthError
from p1dyn.forms import X, Y, BinaryForm, rational_roots, resultant
from p1dyn.proj import IDENTITY, INFINITY, ONE, ZERO, Mobius, apply_mobius, normalize, is_pgl2_rs, point, points_of_height
from p1dyn.reduction import good_outside

PSI1 = make_map([1, 0, -1], [1, 0, 0])  # (X - Y)(X + Y) : X^2
PHI3 = make_map([4, -17, 18], [2, -8, 6])
PP0 = (ZERO, INFINITY, ONE)
ENGR = (ZERO, point(3), INFINITY, point(2))

c = st.integers(-6, 6)
maps = st.tuples(c, c, c, c, c, c).filter(
    lambda t: any(t[:3]) and any(t[3:]) and resultant(BinaryForm(t[:3]), BinaryForm(t[3:])) != 0
).map(map_from_coeffs)
pts = st.tuples(st.integers(-20, 20), st.integers(-20, 20)).filter(lambda t: t != (0, 0)).map(
    lambda t: normalize(*t)
)
mobius = st.tuples(c, c, c, c).filter(lambda e: e[0] * e[3] != e[1] * e[2]).map(lambda e: Mobius.make(*e))


def psi3(a):
    a = Fraction(a)
    return make_map([a, 1 - a, -1], [a, 0, 0])


def test_make_map_examples():
    phi = make_map(2 * X * X, 2 * Y * Y)
    assert phi.coeffs == (1, 0, 0, 0, 0, 1)
    with pytest.raises(DegenerateMapError):
        make_map(X * X, X * Y)
    assert make_map(BinaryForm((1, 0, -1)), X * X).resultant == 1
    assert make_map([Fraction(1, 2), 0, Fraction(-1, 2)], [Fraction(1, 2), 0, 0]) == PSI1
    assert maps_equal(make_map([3, 0, -3], [3, 0, 0]), PSI1)
    with pytest.raises(DomainError):
        make_map(X, Y * Y)


def test_apply_map_three_cycle():
    assert apply_map(PSI1, ZERO) == INFINITY
    assert apply_map(PSI1, INFINITY) == ONE
    assert apply_map(PSI1, ONE) == ZERO


def test_power_map():
    assert maps_equal(power_map(PHI3, 1), PHI3)
    assert apply_map(power_map(PSI1, 3), ZERO) == ZERO
    assert power_map(PHI3, 2).degree == 4
    with pytest.raises(ResourceError):
        power_map(PHI3, 20)


def test_orbit_examples():
    res = orbit(PSI1, ZERO)
    assert res.tail == () and len(res.cycle) == 3
    assert orbit(PHI3, ZERO).cycle.points == ENGR
    fixed = make_map([1, 0, 0], [0, 0, 1])  # z^2 fixes 1
    assert len(orbit(fixed, ONE).cycle) == 1
    # preperiodic tail: z^2 sends -1 to 1
    res = orbit(fixed, point(-1))
    assert res.tail == (point(-1),) and res.cycle.points == (ONE,)
    res = orbit(fixed, point(2), max_steps=5)
    assert not res.converged
    with pytest.raises(DomainError):
        orbit(fixed, ONE, 0)


def test_periodic_points_examples():
    assert set(PP0) <= set(periodic_points(PSI1, 3))
    assert mobius_count_bound(2, 3) == 6
    assert mobius_count_bound(2, 1) == 3
    assert mobius_count_bound(2, 4) == 12
    assert set(ENGR) <= set(periodic_points(PHI3, 4))
    assert rational_cycles(PHI3, 4) == [Cycle(ENGR).canonical()]


def test_is_cycle_examples():
    assert is_cycle(PSI1, PP0)
    assert is_cycle(PSI1, Cycle(PP0).rotate(1))
    assert not is_cycle(PSI1, tuple(reversed(PP0)))
    assert not is_cycle(PSI1, (ZERO, ZERO))


def test_conjugate_map_examples():
    assert maps_equal(conjugate_map(PHI3, IDENTITY), PHI3)
    branch = make_map([1, -2, 1], [1, -2, 0])  # (X - Y)^2 : X(X - 2Y), v = 1
    assert maps_equal(conjugate_map(branch, Mobius(1, -1, 1, 0)), psi3(-1))
    A = Mobius(2, 1, 1, 1)
    assert maps_equal(conjugate_map(conjugate_map(PHI3, A), Mobius.make(1, -1, -1, 2)), PHI3)


def test_maps_equal_examples():
    assert not maps_equal(PSI1, psi3(2))
    assert maps_equal(PHI3, power_map(PHI3, 1))


@settings(max_examples=100)
@given(maps, mobius, pts)
def test_pointwise_conjugation_law(phi, A, P):
    assert apply_map(conjugate_map(phi, A), apply_mobius(A, P)) == apply_mobius(A, apply_map(phi, P))


@settings(max_examples=25, deadline=None)
@given(maps, st.integers(1, 2), st.integers(1, 2))
def test_semigroup_law(phi, m, n):
    lhs = power_map(phi, m + n)
    rhs = compose_maps(power_map(phi, m), power_map(phi, n))
    assert maps_equal(lhs, rhs)
    for P in points_of_height(3)[:20]:
        assert apply_map(lhs, P) == apply_map(power_map(phi, m), apply_map(power_map(phi, n), P))


@settings(max_examples=30, deadline=None)
@given(maps, st.sampled_from([2, 3, 4, 6]))
def test_exact_period_partition(phi, N):
    roots = {r.point for r in rational_roots(period_form(phi, N))}
    union = set()
    for n in range(1, N + 1):
        if N % n:
            continue
        pp = set(periodic_points(phi, n))
        assert not (pp & union)
        assert len(pp) <= mobius_count_bound(phi.degree, n)
        union |= pp
    assert union == roots


@settings(max_examples=60, deadline=None)
@given(maps, mobius, st.sampled_from([(), (2,), (2, 3), (2, 3, 5)]))
def test_good_reduction_conjugation_invariant(phi, A, S):
    if not is_pgl2_rs(A, S):
        return
    assert good_outside(phi, S) == good_outside(conjugate_map(phi, A), S)


def test_interpolation_examples():
    cons = [(ZERO, INFINITY), (INFINITY, ONE), (ONE, ZERO)]
    sol = interpolate_quadratic(cons)
    assert sol.projective_dimension == 2
    assert sol.contains(PSI1) and sol.contains(psi3(2)) and sol.contains(psi3(Fraction(-7, 3)))
    # extend by two more orbit pairs of PSI1
    extra = [point(2), point(-3)]
    cons5 = cons + [(P, apply_map(PSI1, P)) for P in extra]
    sol5 = interpolate_quadratic(cons5)
    assert sol5.unique_map is not None and maps_equal(sol5.unique_map, PSI1)
    with pytest.raises(DomainError):
        interpolate_quadratic([(ZERO, ONE), (ZERO, INFINITY)])
    contradictory = interpolate_quadratic(cons5 + [(point(5), point(7))])
    assert contradictory.maps == ()


@settings(max_examples=40, deadline=None)
@given(maps, st.lists(pts, min_size=5, max_size=5, unique=True))
def test_five_constraints_at_most_one_map(phi, sources):
    sol = interpolate_quadratic([(P, apply_map(phi, P)) for P in sources])
    assert len(sol.maps) <= 1 or sol.projective_dimension > 0
    if sol.projective_dimension == 0:
        assert sol.unique_map is not None and maps_equal(sol.unique_map, phi)
    assert sol.contains(phi)


def test_cycle_ideals_examples():
    assert cycle_ideals((ZERO, point(12), INFINITY), (2,)) == [SIdeal(3), SIdeal(1)]
    assert cycle_ideals(PP0, (5,)) == [SIdeal(1), SIdeal(1)]
    assert cycle_ideals(ENGR, ()) == [SIdeal(3), SIdeal(1), SIdeal(2)]


def test_cycle_ideal_laws():
    assert check_cycle_ideal_laws(PSI1, PP0, (2, 3)).ok
    assert check_cycle_ideal_laws(PHI3, ENGR, (2, 3, 5)).ok
    quad = make_map([1, 0, -1], [0, 0, 1])  # z^2 - 1
    rep = check_cycle_ideal_laws(quad, (ZERO, point(-1)), ())
    assert rep.ok and rep.ideals == [SIdeal(1)]
    with pytest.raises(DomainError):
        check_cycle_ideal_laws(PHI3, ENGR, (2,))
    with pytest.raises(DomainError):
        check_cycle_ideal_laws(PSI1, tuple(reversed(PP0)), ())


def test_tuples_equivalent_examples():
    A, h = tuples_equivalent(ENGR, Cycle(ENGR).rotate(1), ())
    assert h == 3 and A == IDENTITY
    assert tuples_equivalent((ZERO, INFINITY, ONE), (ZERO, INFINITY, point(3)), ()) is None
    assert tuples_equivalent((ZERO, INFINITY, ONE), (ZERO, INFINITY, point(3)), (3,)) is not None
    with pytest.raises(UnsupportedLengthError):
        tuples_equivalent((ZERO, ONE), (ZERO, ONE), ())


def test_conjugacy_examples():
    rng = random.Random(5)
    for _ in range(10):
        while True:
            e = [rng.randint(-5, 5) for _ in range(4)]
            if e[0] * e[3] != e[1] * e[2]:
                break
        A = Mobius.make(*e)
        res = conjugacy_via_cycles(PHI3, conjugate_map(PHI3, A), 4)
        assert res.found and maps_equal(conjugate_map(PHI3, res.witness), conjugate_map(PHI3, A))
    res = conjugacy_via_cycles(PSI1, psi3(-1), 3)
    assert res.status in ("conjugate", "not-conjugate")
    assert not conjugacy_via_cycles(PSI1, PHI3, 3).found
    assert conjugacy_via_cycles(PHI3, PHI3, 3).status == "inconclusive"
    with pytest.raises(UnsupportedLengthError):
        conjugacy_via_cycles(PSI1, PSI1, 2)


def test_exact_period():
    assert exact_period(PHI3, ZERO, 10) == 4
    assert exact_period(PHI3, ZERO, 3) is None
