import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import int_orbits, padic_digits, poly_orbits, series_digits

from gkt.algebra import FiniteField, Poly, RatFunc, parse_poly, parse_ratfunc
from gkt.local import (
    Component,
    Domain,
    HenselError,
    LocalElem,
    NotIntegral,
    PrecisionExhausted,
    ProdElem,
    Tower,
    convert_rep,
    frac_part,
    hensel_lift,
    orbit_sets_equal,
    periodic_points,
    teichmuller_lift,
)

F2, F3 = FiniteField.prime(2), FiniteField.prime(3)
TH2, TH3 = Poly.theta(F2), Poly.theta(F3)
Z3 = Component.Zp(3)
A2 = Component.Av(F2, TH2)


def R2(text):
    return parse_ratfunc(F2, text)


# -- digits ----------------------------------------------------------------------


@pytest.mark.parametrize("x,digits", [(Fraction(-1, 2), (1, 1, 1, 1)), (Fraction(1, 2), (2, 1, 1, 1))])
def test_digits_of_in_z3(x, digits):
    assert Z3.digits_of(x, 4).digits == digits
    assert padic_digits(x, 3, 4) == digits


def test_digits_of_in_a_theta():
    e = A2.digits_of(R2("1/(theta+1)"), 3)
    assert e.digits == (Poly.const(F2, 1),) * 3
    assert series_digits(R2("1/(theta+1)"), TH2, 3) == e.digits


def test_digits_of_rejects_nonintegral():
    with pytest.raises(NotIntegral, match="not integral at the place"):
        Z3.digits_of(Fraction(1, 3), 4)
    with pytest.raises(NotIntegral):
        A2.digits_of(R2("1/theta"), 4)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4).filter(lambda b: b % 3), st.integers(1, 12))
def test_digits_match_brute_expansion_z3(a, b, N):
    x = Fraction(a, b)
    assert Z3.digits_of(x, N).digits == padic_digits(x, 3, N)


@given(st.lists(st.integers(0, 1), max_size=6), st.lists(st.integers(0, 1), min_size=1, max_size=5), st.integers(1, 8))
def test_digits_match_long_division_a_theta(ncs, dcs, N):
    dcs[0] = 1  # unit denominator
    x = RatFunc(Poly(F2, ncs), Poly(F2, dcs))
    assert A2.digits_of(x, N).digits == series_digits(x, TH2, N)


def test_component_with_e_two_and_custom_digits():
    c = Component.parse("Zp:3:2")
    assert c.pi == 9 and c.size == 9
    bal = Component.parse("Zp:3:S=0|1|-1")
    assert bal.digits_of(Fraction(-1), 3).digits == (-1, 0, 0)
    with pytest.raises(ValueError):
        Component.parse("Zp:3:S=0|1|4")  # 1 and 4 share a residue


def test_local_elem_text_round_trip():
    e = A2.digits_of(R2("theta/(theta+1)"), 5)
    assert LocalElem.parse(e.to_text()) == e
    p = ProdElem((Z3.digits_of(Fraction(1, 2), 4), A2.digits_of(R2("1/(theta+1)"), 4)))
    assert ProdElem.parse(p.to_text()) == p


# -- phi and -phi(-x) --------------------------------------------------------------


def test_phi_examples():
    zero = Z3.digits_of(0, 5)
    assert zero.phi().digits == (0,) * 4
    m1 = Z3.digits_of(-1, 5)
    assert m1.phi().digits == (2,) * 4
    one, z = Poly.const(F2, 1), Poly(F2, ())
    e = LocalElem(A2, (one, z, one, one))
    assert e.phi().digits == (z, one, one)


def test_phi_of_empty_raises():
    with pytest.raises(PrecisionExhausted, match="precision exhausted"):
        LocalElem(Z3, ()).phi()


def test_neg_phi_neg_examples():
    x = Z3.digits_of(Fraction(1, 2), 6)
    assert x.neg_phi_neg().digits == Z3.digits_of(Fraction(1, 2), 5).digits
    y = A2.digits_of(R2("1/(theta+1)"), 6)
    assert y.neg_phi_neg().digits == y.digits[:5]
    assert Z3.digits_of(0, 4).neg_phi_neg().digits == (0, 0, 0)


@given(st.lists(st.integers(0, 2), min_size=2, max_size=20))
def test_shift_identity_z3(ds):
    x = LocalElem(Z3, tuple(ds))
    N = x.prec
    rebuilt = Z3.reduce(ds[0] + 3 * x.phi().value(), N - 1)
    assert rebuilt == Z3.reduce(x.value(), N - 1)


@given(st.lists(st.integers(0, 3), min_size=2, max_size=12))
def test_shift_identity_a_deg2(ds):
    c = Component.Av(F2, parse_poly(F2, "theta^2+theta+1"))
    digs = tuple(c.digit_set[d] for d in ds)
    x = LocalElem(c, digs)
    N = x.prec
    assert c.reduce(digs[0] + c.pi * x.phi().value(), N - 1) == c.reduce(x.value(), N - 1)


@given(st.lists(st.integers(0, 2), min_size=6, max_size=12), st.integers(1, 5), st.data())
def test_phi_is_uniformly_continuous(ds, n, data):
    x = LocalElem(Z3, tuple(ds))
    tail = data.draw(st.lists(st.integers(0, 2), min_size=len(ds) - n, max_size=len(ds) - n))
    y = LocalElem(Z3, tuple(ds[:n]) + tuple(tail))
    assert x.congruent(y, n)
    assert x.phi().congruent(y.phi(), n - 1)


# -- fractional parts --------------------------------------------------------------


def test_frac_part_examples():
    assert frac_part(Z3, Fraction(3, 2)) == Fraction(1, 2)
    assert frac_part(A2, R2("(theta+1)/theta")) == R2("1/theta")
    assert frac_part(A2, R2("theta^3+1")) == RatFunc(Poly(F2, ()))


@given(st.fractions())
def test_frac_part_integer_component(x):
    f = frac_part(Z3, x)
    assert 0 <= f < 1 and (x - f).denominator == 1
    assert frac_part(Z3, f) == f


# -- periodic points ----------------------------------------------------------------


def test_periodic_points_small():
    D = Domain.parse("Zp:3")
    assert sorted(p.x[0] for p in periodic_points(D, 1)) == [0, Fraction(1, 2)]
    D = Domain.parse("Av:2:theta")
    assert {p.x[0] for p in periodic_points(D, 1)} == {RatFunc(Poly(F2, ())), R2("1/(theta+1)")}
    D = Domain.parse("Zp:3,Av:2:theta")
    assert len(periodic_points(D, 1)) == 4


def test_periodic_point_count_and_cap():
    D = Domain.parse("Zp:3,Av:2:theta")
    assert len(periodic_points(D, 3)) == (27 - 1) * 8
    with pytest.raises(ValueError, match="exceeds cap"):
        periodic_points(D, 6, cap=1000)


@pytest.mark.parametrize("dtext", ["Zp:3", "Av:2:theta", "Zp:5", "Av:3:theta+1"])
def test_phi_closure_on_periodic_points(dtext):
    D = Domain.parse(dtext)
    for n in (1, 2, 3):
        pts = {p.words for p in periodic_points(D, n)}
        for w in pts:
            # phi(-x) for -x with word w has word w rotated by one
            assert tuple(t[1:] + t[:1] for t in w) in pts


def test_orbit_sets_examples():
    D = Domain.parse("Zp:3")
    assert orbit_sets_equal(D, (Fraction(0),), 3)
    assert orbit_sets_equal(D, (Fraction(1, 2),), 1)
    assert orbit_sets_equal(D, (Fraction(1, 8),), 2)
    fr, sh = int_orbits(Fraction(1, 8), 3, 2)
    assert fr == sh == {Fraction(1, 8), Fraction(3, 8)}


def test_orbit_sets_rejects_nonperiodic():
    with pytest.raises(ValueError):
        orbit_sets_equal(Domain.parse("Zp:3"), (Fraction(1, 7),), 2)


@pytest.mark.parametrize("p,n", [(3, 3), (5, 2), (2, 5)])
def test_orbit_sets_against_brute_oracle_z(p, n):
    D = Domain.of(Component.Zp(p))
    for pt in periodic_points(D, n):
        fr, sh = int_orbits(pt.x[0], p, n)
        assert fr == sh
        assert orbit_sets_equal(D, pt)


def test_orbit_sets_against_brute_oracle_a():
    v = parse_poly(F2, "theta^2+theta+1")
    D = Domain.of(Component.Av(F2, v))
    for pt in periodic_points(D, 2):
        fr, sh = poly_orbits(pt.x[0], v, 2)
        assert fr == sh
        assert orbit_sets_equal(D, pt)


# -- towers ----------------------------------------------------------------------------


@pytest.mark.parametrize("q,v", [(2, "theta"), (3, "theta"), (3, "theta^2+1"), (2, "theta^2+theta+1")])
def test_ramified_uniformizer_relation(q, v):
    F = FiniteField.prime(q)
    T = Tower.ramified(F, parse_poly(F, v))
    N = 30
    w = T.uniformizer(N)
    assert (w ** (q**T.d - 1) + T.v_elem(N)).valuation() >= N


@pytest.mark.parametrize("kind", ["ramified", "unramified"])
def test_tower_valuation_is_additive(kind):
    T = Tower.ramified(F3, TH3) if kind == "ramified" else Tower.unramified(F3, TH3, 2)
    rng = random.Random(11)
    for _ in range(300):
        N = 20
        a = T.elem([rng.randrange(T.R.order) if k >= 2 else 0 for k in range(N)], N)
        b = T.elem([rng.randrange(T.R.order) if k >= 1 else 0 for k in range(N)], N)
        a = a + T.monomial(rng.randrange(4), 1, N)
        b = b + T.monomial(rng.randrange(4), 1, N)
        va, vb = a.valuation(), b.valuation()
        if va + vb < N:
            assert (a * b).valuation() == va + vb


def test_hensel_square_root_in_ramified_tower():
    T = Tower.ramified(F3, TH3)
    N = 20
    # f = X^2 + theta; x0 = varpi works since varpi^2 = -theta
    f = [T.v_elem(N), T.zero(N), T.one(N)]
    x0 = T.uniformizer(N) + T.monomial(3, 1, N)
    root = hensel_lift(f, x0, N)
    assert (root * root + T.v_elem(N)).valuation() >= N
    assert (root - T.uniformizer(N)).valuation() >= 2


def test_hensel_linear_and_failure():
    T = Tower.unramified(F2, TH2)
    N = 10
    c = T.from_poly(parse_poly(F2, "theta^2+1"), N)
    assert hensel_lift([-c, T.one(N)], T.one(N), N) == c.truncate(N)
    with pytest.raises(HenselError):
        hensel_lift([-c, T.one(N)], T.zero(N), N)  # start not close to the root
    with pytest.raises(HenselError, match="Newton hypothesis"):
        hensel_lift([T.one(N), T.zero(N), T.one(N)], T.zero(N), N)  # X^2 + 1 at 0 over F_2


def test_hensel_one_step_for_unit_derivative():
    # C_{theta+1}(X) = (theta+1) X + X^2 over q = 2; torsion point reducing to 1
    T = Tower.unramified(F2, TH2)
    N = 16
    f = [T.zero(N), T.from_poly(parse_poly(F2, "theta+1"), N), T.one(N)]
    x = hensel_lift(f, T.one(N), N)
    assert x == T.from_poly(parse_poly(F2, "theta+1"), N)


def test_teichmuller_lift_examples():
    T = Tower.unramified(F3, parse_poly(F3, "theta^2+1"))
    N = 12
    assert teichmuller_lift(T, T.zero(N)) == T.zero(N)
    assert teichmuller_lift(T, T.one(N)) == T.one(N)
    for z in T.R.elements():
        start = T.const(z, N) + T.monomial(1, 1, N)
        lift = teichmuller_lift(T, start)
        assert lift == T.const(z, N)


# -- digit form <-> series form ---------------------------------------------------------


def test_convert_examples():
    T = Tower.unramified(F2, TH2)
    x = A2.digits_of(R2("1/(theta+1)"), 3)
    s = convert_rep(x, T)
    assert s == T.from_frac(Poly.const(F2, 1), parse_poly(F2, "theta+1"), 3)
    assert s.coeffs == [1, 1, 1]
    assert convert_rep(s, A2) == x
    assert convert_rep(A2.digits_of(0, 4), T) == T.zero(4)
    assert convert_rep(A2.digits_of(1, 4), T) == T.one(4)


@pytest.mark.parametrize("q,v", [(2, "theta^2+theta+1"), (3, "theta^2+1"), (3, "theta+1")])
def test_convert_round_trip(q, v):
    F = FiniteField.prime(q)
    vp = parse_poly(F, v)
    c = Component.Av(F, vp)
    T = Tower.unramified(F, vp)
    rng = random.Random(q)
    for _ in range(40):
        N = rng.randint(1, 8)
        x = LocalElem(c, tuple(rng.choice(c.digit_set) for _ in range(N)))
        s = convert_rep(x, T)
        assert s == T.from_poly(x.value(), N)
        assert convert_rep(s, c) == x
