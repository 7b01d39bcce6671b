"""Rational functions over a :class:`PolyRing`.

Two representations live here.  :class:`RatFunc` is the textbook one: a
numerator/denominator pair with the gcd removed and a monic denominator, so
equality is structural.  :class:`FactoredFrac` keeps the denominator as a
product of powers of known polynomials (for mixed volumes these are maximal
minors of the coefficient matrix), which avoids multivariate gcds entirely:
sums use the least common exponent vector, reduction is trial division by the
known factors, and equality is decided by cross-multiplication.
"""
from __future__ import annotations

from typing import Mapping

from .fields import FieldMismatchError
from .poly import MultiPoly, PolyRing, VarId, poly_gcd


class RatFunc:
    """Normalized fraction ``num/den``: gcd 1, ``den`` monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, normalized: bool = False):
        if den is None:
            den = num.ring.one()
        if num.ring != den.ring:
            raise ValueError("numerator and denominator must share a ring")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not normalized:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def field(self):
        return self.num.field

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.ring != self.ring:
                if other.field != self.field:
                    raise FieldMismatchError(f"{self.field} vs {other.field}")
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other, normalized=True) if other.ring == self.ring else RatFunc(other.to_ring(self.ring))
        return RatFunc(self.ring.const(other), normalized=True)

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, normalized=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, normalized=True)

    def __eq__(self, other):
        if isinstance(other, (RatFunc, MultiPoly, int)):
            o = self._lift(other)
            return self.num == o.num and self.den == o.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def variables(self) -> set[VarId]:
        return self.num.variables() | self.den.variables()

    def diff(self, v: VarId) -> "RatFunc":
        """Quotient rule followed by normalization."""
        if v.kind == 1:
            raise ValueError(f"derivative in the Stanley-Reisner variable {v} is not supported")
        dn, dd = self.num._diff(v), self.den._diff(v)
        if dd.is_zero():
            return RatFunc(dn, self.den)
        return RatFunc(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, values: Mapping[VarId, object]):
        F = self.field
        d = self.den.evaluate(values)
        if F.is_zero(d):
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return F.div(self.num.evaluate(values), d)

    def to_text(self) -> str:
        if self.den.is_constant():
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    __str__ = to_text

    def __repr__(self):
        return f"RatFunc({self.to_text()})"


def _normalize(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    F = num.field
    if num.is_zero():
        return num, den.ring.one()
    if not den.is_constant():
        g = poly_gcd(num, den)
        if not g.is_constant():
            num, den = num // g, den // g
    lc = F.inv(den.leading_coeff())
    return num.scale(lc), den.scale(lc)


def normalize(f: RatFunc) -> RatFunc:
    return RatFunc(f.num, f.den)


# --- factored denominators -------------------------------------------------------

class FactoredFrac:
    """``num / prod(f ** e for f, e in den.items())`` with monic nonconstant factors."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: Mapping[MultiPoly, int] | None = None):
        clean: dict[MultiPoly, int] = {}
        F = num.field
        for f, e in (den or {}).items():
            if e < 0:
                raise ValueError("negative factor exponent")
            if e == 0:
                continue
            if f.is_zero():
                raise ZeroDivisionError("zero factor in denominator")
            if f.is_constant():
                num = num.scale(F.inv(F.pow(f.constant_coeff(), e)))
                continue
            lc = f.leading_coeff()
            if lc != F.one:
                num = num.scale(F.inv(F.pow(lc, e)))
                f = f.scale(F.inv(lc))
            clean[f] = clean.get(f, 0) + e
        self.num = num
        self.den = clean if not num.is_zero() else {}

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "FactoredFrac":
        return cls(p)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    @property
    def field(self):
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def _lift(self, other) -> "FactoredFrac":
        if isinstance(other, FactoredFrac):
            return other
        if isinstance(other, MultiPoly):
            return FactoredFrac(other)
        return FactoredFrac(self.ring.const(other))

    @staticmethod
    def _raise(num: MultiPoly, have: Mapping, want: Mapping) -> MultiPoly:
        for f, e in want.items():
            k = e - have.get(f, 0)
            if k > 0:
                num = num * (f ** k)
        return num

    def __add__(self, other):
        o = self._lift(other)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        common = dict(self.den)
        for f, e in o.den.items():
            if e > common.get(f, 0):
                common[f] = e
        num = self._raise(self.num, self.den, common) + self._raise(o.num, o.den, common)
        return FactoredFrac(num, common)

    __radd__ = __add__

    def __neg__(self):
        return FactoredFrac(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        o = self._lift(other)
        den = dict(self.den)
        for f, e in o.den.items():
            den[f] = den.get(f, 0) + e
        return FactoredFrac(self.num * o.num, den)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a factored fraction")
        return FactoredFrac(self.num ** e, {f: k * e for f, k in self.den.items()})

    def scale(self, c) -> "FactoredFrac":
        return FactoredFrac(self.num.scale(c), self.den)

    def reduce(self) -> "FactoredFrac":
        """Cancel denominator factors that divide the numerator."""
        num = self.num
        den = dict(self.den)
        for f in list(den):
            while den[f] > 0:
                q = num.divide_exact(f)
                if q is None:
                    break
                num = q
                den[f] -= 1
        return FactoredFrac(num, den)

    def diff(self, v: VarId) -> "FactoredFrac":
        """Quotient rule over the factored denominator."""
        if v.kind == 1:
            raise ValueError(f"derivative in the Stanley-Reisner variable {v} is not supported")
        moving = [(f, e, f._diff(v)) for f, e in self.den.items()]
        moving = [(f, e, df) for f, e, df in moving if not df.is_zero()]
        dn = self.num._diff(v)
        if not moving:
            return FactoredFrac(dn, self.den)
        F = self.field
        prod_all = self.ring.one()
        for f, _, _ in moving:
            prod_all = prod_all * f
        num = dn * prod_all
        for k, (f, e, df) in enumerate(moving):
            ce = F.from_int(e)
            if F.is_zero(ce):
                continue
            rest = self.ring.one()
            for l, (g, _, _) in enumerate(moving):
                if l != k:
                    rest = rest * g
            num = num - (self.num * df * rest).scale(ce)
        den = dict(self.den)
        for f, _, _ in moving:
            den[f] += 1
        return FactoredFrac(num, den)

    def equals(self, other) -> bool:
        o = self._lift(other)
        common = dict(self.den)
        for f, e in o.den.items():
            if e > common.get(f, 0):
                common[f] = e
        return self._raise(self.num, self.den, common) == self._raise(o.num, o.den, common)

    def __eq__(self, other):
        if isinstance(other, (FactoredFrac, MultiPoly, int)):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def variables(self) -> set[VarId]:
        out = self.num.variables()
        for f in self.den:
            out |= f.variables()
        return out

    def denominator(self) -> MultiPoly:
        d = self.ring.one()
        for f, e in self.den.items():
            d = d * f ** e
        return d

    def to_ratfunc(self) -> RatFunc:
        return RatFunc(self.num, self.denominator())

    def evaluate(self, values: Mapping[VarId, object]):
        F = self.field
        d = F.one
        for f, e in self.den.items():
            d = F.mul(d, F.pow(f.evaluate(values), e))
        if F.is_zero(d):
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return F.div(self.num.evaluate(values), d)

    def to_text(self) -> str:
        if not self.den:
            return self.num.to_text()
        parts = sorted(f"({f.to_text()})" + (f"^{e}" if e > 1 else "") for f, e in self.den.items())
        return f"({self.num.to_text()})/({'*'.join(parts)})"

    __str__ = to_text

    def __repr__(self):
        return f"FactoredFrac({self.to_text()})"
