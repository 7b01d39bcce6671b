from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from anisotropy.fields import (QQ, BinaryExtField, FieldElement, FieldMismatchError, PrimeField,
                               default_reduction_polynomial, derive_seed, field_for_characteristic,
                               field_from_spec, is_prime, make_rng)

P61 = (1 << 61) - 1
FIELDS = [QQ, PrimeField(2), PrimeField(101), PrimeField(P61), BinaryExtField(8, 0x11B), BinaryExtField(63),
          BinaryExtField(5)]


def ref_gf2k_mul(a, b, modulus):
    # shift-and-add with interleaved reduction
    k = modulus.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> k & 1:
            a ^= modulus
    return out


def elements(F):
    if F is QQ:
        return st.fractions(max_denominator=10**6).map(lambda q: QQ._norm(q))
    if isinstance(F, PrimeField):
        return st.integers(0, F.p - 1)
    return st.integers(0, (1 << F.k) - 1)


@pytest.mark.parametrize("F", FIELDS, ids=repr)
@given(data=st.data())
def test_field_axioms(F, data):
    a, b, c = (data.draw(elements(F)) for _ in range(3))
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(a, F.neg(a)) == F.zero
    assert F.sub(F.add(a, b), b) == a
    if not F.is_zero(a):
        assert F.mul(a, F.inv(a)) == F.one
        assert F.div(F.mul(a, b), a) == b


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_inverse_of_zero_is_an_error(F):
    with pytest.raises((ZeroDivisionError, ValueError)):
        F.inv(F.zero)


@given(a=st.integers(0, 255), b=st.integers(0, 255))
def test_gf256_against_shift_and_add(a, b):
    F = BinaryExtField(8, 0x11B)
    assert F.mul(a, b) == ref_gf2k_mul(a, b, 0x11B)


@given(a=st.integers(0, (1 << 63) - 1), b=st.integers(0, (1 << 63) - 1))
def test_gf2_63_against_shift_and_add(a, b):
    F = BinaryExtField(63)
    assert F.mul(a, b) == ref_gf2k_mul(a, b, F.modulus)


def test_aes_field_known_products():
    F = BinaryExtField(8, 0x11B)
    assert F.mul(0x57, 0x83) == 0xC1
    assert F.mul(0x53, 0xCA) == 0x01
    assert F.inv(0x53) == 0xCA


@pytest.mark.parametrize("k", [1, 2, 3, 8, 16, 31, 32, 63])
def test_default_modulus_is_irreducible(k):
    f = default_reduction_polynomial(k)
    x = sympy.Symbol("x")
    coeffs = [(f >> i) & 1 for i in range(k, -1, -1)]
    assert sympy.Poly(coeffs, x, modulus=2).is_irreducible


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        BinaryExtField(4, 0b10101)  # (x^2+x+1)^2


def test_frobenius_in_char_two():
    F = BinaryExtField(63)
    rng = make_rng(3)
    a, b = F.random(rng), F.random(rng)
    s = F.add(a, b)
    assert F.mul(s, s) == F.add(F.mul(a, a), F.mul(b, b))


@given(st.integers(2, 10**5))
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_prime_field_rejects_composite():
    with pytest.raises(ValueError):
        PrimeField(91)


def test_rationals_use_fractions():
    assert QQ.div(1, 3) == Fraction(1, 3)
    assert QQ.mul(Fraction(3, 2), 2) == 3 and type(QQ.mul(Fraction(3, 2), 2)) is int


def test_field_element_wrapping():
    F = PrimeField(7)
    a = F(3)
    assert a * F(5) == F(1)
    assert (a ** -1) * a == 1
    assert isinstance(a + 1, FieldElement)
    with pytest.raises(FieldMismatchError):
        F.validate(PrimeField(11)(2))


@pytest.mark.parametrize("spec,kind", [("QQ", "Rationals"), ("GF(7)", "PrimeField"), ("Fp:13", "PrimeField"),
                                       ("GF(2^16)", "BinaryExtField"), ("GF2^8", "BinaryExtField"),
                                       ("2", "BinaryExtField")])
def test_field_from_spec(spec, kind):
    assert field_from_spec(spec).describe()["kind"] == kind


def test_field_for_characteristic():
    assert field_for_characteristic(0) is QQ
    assert field_for_characteristic(2).order == 1 << 63


def test_seeds_are_deterministic():
    assert derive_seed(5, "a", (1, 2)) == derive_seed(5, "a", (1, 2))
    assert derive_seed(5, "a") != derive_seed(6, "a")
    assert 0 <= derive_seed(0) < 1 << 64
    assert [make_rng(9).getrandbits(63) for _ in range(2)] == [make_rng(9).getrandbits(63)] * 2
    with pytest.raises(ValueError):
        make_rng(-1)


@pytest.mark.parametrize("F", FIELDS, ids=repr)
def test_random_draws_are_reproducible(F):
    xs = [F.random(make_rng(11)) for _ in range(3)]
    assert len(set(map(repr, xs))) == 1
