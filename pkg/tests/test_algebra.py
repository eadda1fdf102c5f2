import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkt.algebra import (
    FiniteField,
    Poly,
    RatFunc,
    enumerate_monic,
    monic_irreducibles,
    parse_poly,
    parse_ratfunc,
)

F2, F3 = FiniteField.prime(2), FiniteField.prime(3)
F4 = FiniteField.extension(F2, (1, 1, 1))  # zeta^2 + zeta + 1
F9 = FiniteField.extension(F3, (1, 0, 1))  # zeta^2 + 1


def P(F, text):
    return parse_poly(F, text)


def polys(F, max_deg=6):
    return st.lists(st.integers(0, F.order - 1), max_size=max_deg + 1).map(lambda cs: Poly(F, cs))


# -- finite fields -------------------------------------------------------------


def test_f4_zeta_times_zeta_plus_one():
    z = F4([0, 1])
    assert z * (z + F4.one) == F4.one


def test_f4_full_multiplication_table_is_a_group():
    units = list(F4.units())
    for a in units:
        row = {F4.mul(a, b) for b in units}
        assert row == set(units)


def test_f9_zeta_squared_is_minus_one():
    z = F9([0, 1])
    assert z**2 == F9([2])


@pytest.mark.parametrize("E", [F2, F3, F4, F9, FiniteField.extension(F2, (1, 1, 0, 1))])
def test_frobenius_of_zero(E):
    assert E.frobenius(0) == 0


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError, match="division by zero in finite field"):
        F9.inv(0)


def test_cross_field_operation_is_an_error():
    with pytest.raises((TypeError, ValueError)):
        F4.one + F9.one


@given(st.integers(0, 8), st.integers(1, 8))
def test_multiplicative_group_is_cyclic(a, b):
    g = F9.generator()
    assert F9.pow(g, 8) == 1
    assert len({F9.pow(g, k) for k in range(8)}) == 8
    if a:
        assert F9.mul(a, F9.inv(a)) == 1
    assert F9.pow(b, 9) == b


F27 = FiniteField.extension(F3, (1, 2, 0, 1))  # zeta^3 + 2 zeta + 1


@given(st.integers(0, 26))
def test_frobenius_has_order_m(a):
    assert F27.frobenius(a, 3) == a
    assert F27.pow(a, 27) == a


@given(st.integers(0, 26), st.integers(0, 26))
def test_frobenius_is_additive_and_multiplicative(a, b):
    f = F27.frobenius
    assert f(F27.add(a, b)) == F27.add(f(a), f(b))
    assert f(F27.mul(a, b)) == F27.mul(f(a), f(b))


# -- polynomials -----------------------------------------------------------------


def test_char2_square_of_theta_plus_one():
    assert P(F2, "theta+1") ** 2 == P(F2, "theta^2+1")


def test_divmod_exact_factor():
    s, r = divmod(P(F2, "theta^2+theta"), P(F2, "theta"))
    assert s == P(F2, "theta+1") and r.is_zero()


def test_gcd_is_monic():
    g = P(F3, "theta^2-1").gcd(P(F3, "theta-1"))
    assert g == P(F3, "theta+2")
    assert g.is_monic()


def test_divmod_by_zero():
    with pytest.raises(ZeroDivisionError):
        divmod(P(F3, "theta"), Poly(F3, ()))


@given(polys(F3, 8), polys(F3, 5))
def test_divmod_round_trip(f, g):
    if g.is_zero():
        return
    s, r = divmod(f, g)
    assert s * g + r == f
    assert r.is_zero() or r.deg < g.deg


@given(polys(F2, 6), polys(F2, 6), polys(F2, 6))
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


def test_text_forms_round_trip():
    f = P(F3, "theta^2+2*theta+1")
    assert f.to_text() == "1,2,1"
    assert parse_poly(F3, f.to_text()) == f
    assert parse_poly(F3, "theta-1") == P(F3, "2,1")


def test_evaluate_at_field_element():
    f = P(F2, "theta^2+theta+1")
    z = F4([0, 1])
    assert f(z) == F4.zero


# -- monic enumeration and irreducibility ---------------------------------------


def test_enumerate_monic_examples():
    assert enumerate_monic(F2, 0) == [Poly.const(F2, 1)]
    assert enumerate_monic(F2, 1) == [P(F2, "theta"), P(F2, "theta+1")]
    assert enumerate_monic(F3, 1) == [P(F3, "theta"), P(F3, "theta+1"), P(F3, "theta+2")]


@pytest.mark.parametrize("F,i", [(F2, 3), (F3, 2), (F2, 5)])
def test_enumerate_monic_count_and_order(F, i):
    ms = enumerate_monic(F, i)
    assert len(ms) == F.order**i
    assert all(m.is_monic() and m.deg == i for m in ms)
    # constant term fastest
    keys = [tuple(reversed(m.coeffs[:i])) for m in ms]
    assert keys == sorted(keys)


@pytest.mark.parametrize(
    "F,text,expected",
    [(F2, "theta^2+theta+1", True), (F2, "theta^2+1", False), (F3, "theta^2+1", True), (F3, "theta^2-1", False)],
)
def test_irreducibility_examples(F, text, expected):
    assert P(F, text).is_irreducible() is expected


def test_irreducibility_of_constant_raises():
    with pytest.raises(ValueError):
        Poly.const(F3, 2).is_irreducible()


@pytest.mark.parametrize("F", [F2, F3])
def test_irreducible_counts_match_necklace_formula(F):
    q = F.order
    # number of monic irreducibles of degree 1..4
    expected = {2: [2, 1, 2, 3], 3: [3, 3, 8, 18]}[q]
    assert [len(monic_irreducibles(F, d)) for d in range(1, 5)] == expected


@pytest.mark.parametrize("F,v", [(F2, "theta"), (F2, "theta^2+theta+1"), (F3, "theta+1"), (F3, "theta^2+1")])
def test_monic_products_are_units_away_from_v(F, v):
    v = P(F, v)
    for i in range(4):
        acc = Poly.const(F, 1)
        for a in enumerate_monic(F, i):
            if not (a % v).is_zero():
                acc = (acc * a) % v
        assert not acc.is_zero()
        if i == 0:
            assert acc == Poly.const(F, 1)


# -- rational functions ----------------------------------------------------------


def test_ratfunc_parse_and_frac_part():
    x = parse_ratfunc(F2, "(theta+1)/theta")
    assert x.frac_part() == RatFunc(Poly.const(F2, 1), P(F2, "theta"))
    assert parse_ratfunc(F2, "theta^2+1").frac_part() == RatFunc(Poly(F2, ()))


@given(polys(F3, 5), polys(F3, 4))
def test_frac_part_properties(a, b):
    if b.is_zero():
        return
    x = RatFunc(a, b)
    fp = x.frac_part()
    assert fp.frac_part() == fp
    assert (x - fp).is_integral()
    assert fp.num.is_zero() or fp.degree() < 0
