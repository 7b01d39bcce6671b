"""Exact coefficient fields: the rationals, odd/even prime fields and GF(2^k).

Field elements are stored *raw* (``int`` or ``fractions.Fraction``) inside
polynomials for speed; the owning :class:`Field` object supplies the
arithmetic.  ``field(value)`` wraps a raw value in a :class:`FieldElement`
that supports the usual operators, which is what user-facing code sees.

Random draws
------------
All randomness goes through :func:`make_rng`, a ``random.Random`` (CPython's
MT19937) seeded with a non-negative integer.  Only ``getrandbits`` is used,
whose output for a given integer seed is fixed by CPython's documented
seeding procedure.  The draws are, bit-exactly:

* ``Rationals``: ``getrandbits(63) - 2**62``, an integer in ``[-2**62, 2**62)``.
* ``PrimeField(p)``: repeat ``r = getrandbits(p.bit_length())`` until ``r < p``.
* ``BinaryExtField(k)``: ``getrandbits(k)``, the polynomial basis bit vector.
"""
from __future__ import annotations

import hashlib
import random
from fractions import Fraction
from typing import Iterable

GENERATOR_VERSION = "mt19937-getrandbits/1"

RATIONAL_DRAW_BITS = 63


def make_rng(seed: int) -> random.Random:
    if seed < 0:
        raise ValueError("seeds are non-negative integers")
    return random.Random(seed)


def derive_seed(master: int, *labels) -> int:
    """Deterministic 64-bit child seed for ``(master, *labels)``."""
    digest = hashlib.sha256(repr((master,) + labels).encode()).digest()
    return int.from_bytes(digest[:8], "big")


class FieldMismatchError(ValueError):
    pass


class Field:
    """Base class; concrete fields override the raw operations."""

    characteristic: int
    zero = 0
    one = 1

    # raw arithmetic -------------------------------------------------------
    def from_int(self, n: int):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            e >>= 1
            if e:
                a = self.mul(a, a)
        return result

    def is_zero(self, a) -> bool:
        return a == 0

    def random(self, rng: random.Random):
        raise NotImplementedError

    def to_text(self, a) -> str:
        return str(a)

    def parse(self, text: str):
        raise NotImplementedError

    def validate(self, a):
        """Coerce a raw value (ints allowed everywhere) into canonical form."""
        if isinstance(a, FieldElement):
            if a.field != self:
                raise FieldMismatchError(f"{a.field} element used in {self}")
            return a.value
        if isinstance(a, int):
            return self.from_int(a)
        raise TypeError(f"cannot coerce {a!r} into {self}")

    # polynomial kernel ----------------------------------------------------
    def convolve(self, f: dict, g: dict) -> dict:
        """Product of two term dicts keyed by packed monomials."""
        raise NotImplementedError

    def sum_terms(self, f: dict, g: dict, sign: int = 1) -> dict:
        out = dict(f)
        add = self.add if sign > 0 else self.sub
        for m, c in g.items():
            if m in out:
                v = add(out[m], c)
                if self.is_zero(v):
                    del out[m]
                else:
                    out[m] = v
            else:
                out[m] = c if sign > 0 else self.neg(c)
        return out

    def scale_terms(self, f: dict, c) -> dict:
        if self.is_zero(c):
            return {}
        mul = self.mul
        return {m: mul(v, c) for m, v in f.items()}

    # wrapping -------------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, str):
            return FieldElement(self, self.parse(value))
        return FieldElement(self, self.validate(value))

    def elements(self, values: Iterable) -> list["FieldElement"]:
        return [self(v) for v in values]

    @property
    def order(self) -> int | None:
        """Number of elements, or ``None`` for an infinite field."""
        return None


class Rationals(Field):
    characteristic = 0

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "Rationals()"

    def describe(self) -> dict:
        return {"kind": "Rationals", "draw": "uniform integer in [-2^62, 2^62)"}

    @staticmethod
    def _norm(a):
        if type(a) is Fraction and a.denominator == 1:
            return a.numerator
        return a

    def from_int(self, n):
        return int(n)

    def validate(self, a):
        if isinstance(a, Fraction):
            return self._norm(a)
        return super().validate(a)

    def add(self, a, b):
        return self._norm(a + b)

    def sub(self, a, b):
        return self._norm(a - b)

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return self._norm(a * b)

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in Rationals")
        return self._norm(Fraction(1) / a)

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Rationals")
        return self._norm(Fraction(a) / b)

    def random(self, rng):
        return rng.getrandbits(RATIONAL_DRAW_BITS) - (1 << (RATIONAL_DRAW_BITS - 1))

    def to_text(self, a):
        if isinstance(a, Fraction):
            return f"{a.numerator}/{a.denominator}"
        return str(a)

    def parse(self, text):
        return self._norm(Fraction(text.strip()))

    def convolve(self, f, g):
        acc: dict = {}
        get = acc.get
        for m1, c1 in f.items():
            for m2, c2 in g.items():
                m = m1 + m2
                acc[m] = get(m, 0) + c1 * c2
        norm = self._norm
        return {m: norm(c) for m, c in acc.items() if c != 0}

    def sum_terms(self, f, g, sign=1):
        out = dict(f)
        for m, c in g.items():
            v = out.get(m, 0) + c if sign > 0 else out.get(m, 0) - c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = self._norm(v)
        return out


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField(Field):
    """Integers modulo a prime ``p < 2**62``."""

    def __init__(self, p: int):
        if not (1 < p < (1 << 62)) or not is_prime(p):
            raise ValueError(f"PrimeField needs a prime below 2^62, got {p}")
        self.p = p
        self.characteristic = p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def describe(self) -> dict:
        return {"kind": "PrimeField", "p": self.p}

    @property
    def order(self):
        return self.p

    def from_int(self, n):
        return int(n) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, -1, self.p)

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.p)
        return pow(a, e, self.p)

    def random(self, rng):
        bits = self.p.bit_length()
        while True:
            r = rng.getrandbits(bits)
            if r < self.p:
                return r

    def parse(self, text):
        return int(text.strip(), 0) % self.p

    def convolve(self, f, g):
        acc: dict = {}
        get = acc.get
        for m1, c1 in f.items():
            for m2, c2 in g.items():
                m = m1 + m2
                acc[m] = get(m, 0) + c1 * c2
        p = self.p
        out = {}
        for m, c in acc.items():
            c %= p
            if c:
                out[m] = c
        return out


# --- GF(2)[x] helpers on int bit vectors ---------------------------------

def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit vectors."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


def gf2_mod(a: int, f: int) -> int:
    df = f.bit_length() - 1
    while a.bit_length() - 1 >= df:
        a ^= f << (a.bit_length() - 1 - df)
    return a


def gf2_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, gf2_mod(a, b)
    return a


def gf2_mulmod(a: int, b: int, f: int) -> int:
    return gf2_mod(clmul(a, b), f)


def gf2_is_irreducible(f: int) -> bool:
    """Rabin's test over GF(2) for the polynomial encoded by ``f``."""
    k = f.bit_length() - 1
    if k < 1:
        return False
    if k == 1:
        return True

    def frob_power(e: int) -> int:
        # x^(2^e) mod f
        r = 0b10
        for _ in range(e):
            r = gf2_mulmod(r, r, f)
        return r

    if frob_power(k) != gf2_mod(0b10, f):
        return False
    q = 2
    n = k
    primes = []
    while q * q <= n:
        if n % q == 0:
            primes.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        primes.append(n)
    for q in primes:
        if gf2_gcd(f, frob_power(k // q) ^ 0b10) != 1:
            return False
    return True


def default_reduction_polynomial(k: int) -> int:
    """Lowest-weight irreducible ``x^k + ...`` (trinomial, else pentanomial)."""
    if k == 1:
        return 0b11
    top = 1 << k
    for a in range(1, k):
        f = top | (1 << a) | 1
        if gf2_is_irreducible(f):
            return f
    for a in range(1, k):
        for b in range(1, a):
            for c in range(1, b):
                f = top | (1 << a) | (1 << b) | (1 << c) | 1
                if gf2_is_irreducible(f):
                    return f
    raise ValueError(f"no low-weight irreducible of degree {k}")


_SPREAD8 = []
for _b in range(256):
    _s = 0
    for _i in range(8):
        if _b >> _i & 1:
            _s |= 1 << (8 * _i)
    _SPREAD8.append(_s)
_BITS_TO_ASCII = bytes.maketrans(b"\x00\x01", b"01")


class BinaryExtField(Field):
    """GF(2^k) in polynomial basis; elements are ints below ``2**k``.

    Polynomial products use a spread representation: every bit of a
    coefficient occupies its own byte, so one integer multiplication yields
    per-position popcounts whose low bits are the carry-less product.
    """

    characteristic = 2

    def __init__(self, k: int = 63, modulus: int | None = None):
        if not 1 <= k <= 63:
            raise ValueError("extension degree must lie in 1..63")
        if modulus is None:
            modulus = default_reduction_polynomial(k)
        if modulus.bit_length() - 1 != k or not gf2_is_irreducible(modulus):
            raise ValueError(f"reduction polynomial {modulus:#x} is not irreducible of degree {k}")
        self.k = k
        self.modulus = modulus
        self._mask = (1 << k) - 1
        self._tail_bits = [i for i in range(k) if modulus >> i & 1]
        self._byte_mask = int.from_bytes(b"\x01" * (2 * k + 2), "big")

    def __eq__(self, other):
        return isinstance(other, BinaryExtField) and (other.k, other.modulus) == (self.k, self.modulus)

    def __hash__(self):
        return hash(("GF2k", self.k, self.modulus))

    def __repr__(self):
        return f"BinaryExtField({self.k}, {self.modulus:#x})"

    def describe(self) -> dict:
        return {"kind": "BinaryExtField", "k": self.k, "modulus": hex(self.modulus)}

    @property
    def order(self):
        return 1 << self.k

    def reduce(self, a: int) -> int:
        k, mask, tail = self.k, self._mask, self._tail_bits
        while a >> k:
            hi = a >> k
            a &= mask
            for b in tail:
                a ^= hi << b
        return a

    def from_int(self, n):
        return int(n) & 1

    def add(self, a, b):
        return a ^ b

    sub = add

    def neg(self, a):
        return a

    def mul(self, a, b):
        return self.reduce(clmul(a, b))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(2^k)")
        # extended Euclid in GF(2)[x]
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1:
            shift = r0.bit_length() - r1.bit_length()
            if shift < 0:
                r0, r1 = r1, r0
                s0, s1 = s1, s0
                continue
            r0 ^= r1 << shift
            s0 ^= s1 << shift
        # r0 == 1, s0 * a == 1
        return self.reduce(s0)

    def random(self, rng):
        return rng.getrandbits(self.k)

    def to_text(self, a):
        return hex(a)

    def parse(self, text):
        v = int(text.strip(), 0)
        if v >> self.k:
            raise ValueError(f"{text} does not fit in GF(2^{self.k})")
        return v

    def from_bits(self, a: int) -> int:
        """Raw element from its bit vector (``int`` inputs elsewhere go mod 2)."""
        if not 0 <= a <= self._mask:
            raise ValueError("value outside the field")
        return a

    def spread(self, a: int) -> int:
        s = 0
        shift = 0
        table = _SPREAD8
        while a:
            s |= table[a & 255] << shift
            a >>= 8
            shift += 64
        return s

    def unspread(self, s: int) -> int:
        s &= self._byte_mask
        if not s:
            return 0
        raw = s.to_bytes((s.bit_length() + 7) // 8, "big")
        return self.reduce(int(raw.translate(_BITS_TO_ASCII), 2))

    def convolve(self, f, g):
        spread = self.spread
        sf = [(m, spread(c)) for m, c in f.items()]
        sg = [(m, spread(c)) for m, c in g.items()]
        acc: dict = {}
        get = acc.get
        for m1, c1 in sf:
            for m2, c2 in sg:
                m = m1 + m2
                acc[m] = get(m, 0) ^ (c1 * c2)
        out = {}
        unspread = self.unspread
        for m, s in acc.items():
            c = unspread(s)
            if c:
                out[m] = c
        return out

    def sum_terms(self, f, g, sign=1):
        out = dict(f)
        for m, c in g.items():
            v = out.get(m, 0) ^ c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out


class FieldElement:
    """A raw field value bundled with its field, with operator support."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, int) or (isinstance(other, Fraction) and self.field.characteristic == 0):
            return self.field.validate(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.div(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.value)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field!r}({self.field.to_text(self.value)})"

    def __str__(self):
        return self.field.to_text(self.value)


QQ = Rationals()
GF2 = PrimeField(2)


def field_from_spec(text: str) -> Field:
    """Parse ``QQ``, ``GF(p)`` / ``Fp:p`` or ``GF2^k`` / ``GF(2^k)``."""
    t = text.strip().replace(" ", "")
    if t in ("QQ", "Q", "0", "char0"):
        return QQ
    if t in ("2", "char2"):
        return BinaryExtField(63)
    if t.startswith("GF(2^") and t.endswith(")"):
        return BinaryExtField(int(t[5:-1]))
    if t.startswith("GF2^"):
        return BinaryExtField(int(t[4:]))
    if t.startswith("GF(") and t.endswith(")"):
        return PrimeField(int(t[3:-1]))
    if t.startswith("Fp:"):
        return PrimeField(int(t[3:]))
    raise ValueError(f"unknown field specification {text!r}")


def field_for_characteristic(char: int, *, extension_degree: int = 63) -> Field:
    if char == 0:
        return QQ
    if char == 2:
        return BinaryExtField(extension_degree)
    return PrimeField(char)
