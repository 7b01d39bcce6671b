import pytest
import sympy
from hypothesis import assume, given, strategies as st

from anisotropy.fields import QQ, BinaryExtField, PrimeField
from anisotropy.poly import A, PolyRing, parse_poly
from anisotropy.ratfunc import FactoredFrac, RatFunc, normalize

from oracles import poly_strategy, sym, to_sympy

PV = [A(1, 1), A(1, 2), A(2, 1)]
R = PolyRing(QQ, PV)
R2 = PolyRing(PrimeField(2), PV)
small = poly_strategy(R, max_terms=3, max_exp=2)


def to_sym(f: RatFunc):
    return to_sympy(f.num) / to_sympy(f.den)


def same(expr_a, expr_b):
    return sympy.cancel(expr_a - expr_b) == 0


@given(small, small, small, small)
def test_field_operations_match_sympy(a, b, c, d):
    assume(b and d)
    x, y = RatFunc(a, b), RatFunc(c, d)
    assert same(to_sym(x + y), to_sym(x) + to_sym(y))
    assert same(to_sym(x * y), to_sym(x) * to_sym(y))
    assert same(to_sym(x - y), to_sym(x) - to_sym(y))
    if c:
        assert same(to_sym(x / y), to_sym(x) / to_sym(y))


@given(small, small)
def test_normal_form(a, b):
    assume(b)
    f = RatFunc(a, b)
    assert f.den.leading_coeff() == 1
    g = sympy.gcd(to_sympy(f.num), to_sympy(f.den))
    assert sympy.Poly(g, *map(sym, PV)).is_ground
    assert normalize(f) == f  # idempotent


@given(small, small, st.sampled_from(PV))
def test_quotient_rule_matches_sympy(a, b, v):
    assume(b)
    f = RatFunc(a, b)
    assert same(to_sym(f.diff(v)), sympy.diff(to_sym(f), sym(v)))


def test_examples():
    a, b = R.var(A(1, 1)), R.var(A(1, 2))
    f = RatFunc(a * a - b * b, a - b)
    assert f.is_polynomial() and f.num == a + b
    z = RatFunc(R.zero(), a * b)
    assert z.is_zero() and z.den == R.one()
    with pytest.raises(ZeroDivisionError):
        RatFunc(a, R.zero())


def test_char2_derivatives():
    a, b = R2.var(A(1, 1)), R2.var(A(1, 2))
    assert RatFunc(a * a * b).diff(A(1, 1)).is_zero()
    assert RatFunc(R2.one(), a).diff(A(1, 1)) == RatFunc(R2.one(), a * a)


def test_derivative_over_q():
    a, b = R.var(A(1, 1)), R.var(A(1, 2))
    assert RatFunc(a * a * b).diff(A(1, 1)) == RatFunc(a * b * 2)


# --- factored fractions --------------------------------------------------------------

factors = st.lists(small.filter(lambda p: p and not p.is_constant()), min_size=1, max_size=3)


@given(small, factors, st.lists(st.integers(1, 2), min_size=3, max_size=3), small, factors)
def test_factored_matches_ratfunc(n1, f1, e1, n2, f2):
    x = FactoredFrac(n1, {f: e for f, e in zip(f1, e1)})
    y = FactoredFrac(n2, {f: 1 for f in f2})
    for got, want in [(x + y, x.to_ratfunc() + y.to_ratfunc()), (x * y, x.to_ratfunc() * y.to_ratfunc()),
                      (x - y, x.to_ratfunc() - y.to_ratfunc())]:
        assert got.to_ratfunc() == want
        assert got.reduce().to_ratfunc() == want


@given(small, factors, st.sampled_from(PV))
def test_factored_diff(n, fs, v):
    x = FactoredFrac(n, {f: 2 for f in fs})
    assert x.diff(v).to_ratfunc() == x.to_ratfunc().diff(v)


@given(small, factors)
def test_equality_by_cross_multiplication(n, fs):
    x = FactoredFrac(n, {f: 1 for f in fs})
    prod = R.one()
    for f, e in x.den.items():
        prod = prod * f ** e
    y = FactoredFrac(x.num * prod, {f: 2 * e for f, e in x.den.items()})
    assert x.equals(y)
    assert x.equals(y.reduce())


def test_factored_folds_constants():
    a = R.var(A(1, 1))
    x = FactoredFrac(a, {R.const(2): 1, a * 3: 1})
    assert list(x.den) == [a]
    assert x.to_ratfunc() == RatFunc(R.one(), R.const(6))


def test_factored_over_gf2k():
    F = BinaryExtField(63)
    S = PolyRing(F, PV)
    a, b = S.var(A(1, 1)), S.var(A(1, 2))
    x = FactoredFrac(a, {a + b: 1})
    assert (x + x).is_zero()
    assert (x * x).diff(A(1, 1)).is_zero()
