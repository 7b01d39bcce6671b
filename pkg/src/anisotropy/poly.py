"""Sparse multivariate polynomials with packed monomials.

A :class:`PolyRing` fixes a coefficient field and an ordered tuple of
variables.  Each monomial is packed into one Python ``int``: variable ``k``
occupies a 16-bit slot (the first variable in the most significant slot)
and the total degree sits above all slots.  Integer order on packed
monomials is therefore graded lexicographic order, monomial multiplication
is integer addition, and equality of polynomials is dict equality.
"""
from __future__ import annotations

import heapq
import math
import random
import re
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .fields import Field, FieldElement, FieldMismatchError, PrimeField

SLOT_BITS = 16
MAX_EXPONENT = (1 << (SLOT_BITS - 1)) - 1  # top bit of each slot is a guard


class VarId(NamedTuple):
    """A variable: ``kind`` 0 = parameter ``a[i,j]``, 1 = ``x[j]``, 2 = auxiliary ``t[j]``."""

    kind: int
    i: int
    j: int

    def __str__(self):
        if self.kind == 0:
            return f"a[{self.i},{self.j}]"
        if self.kind == 1:
            return f"x[{self.j}]"
        return f"t[{self.j}]"

    @property
    def is_param(self) -> bool:
        return self.kind == 0

    @property
    def is_x(self) -> bool:
        return self.kind == 1


def A(i: int, j: int) -> VarId:
    return VarId(0, i, j)


def X(j: int) -> VarId:
    return VarId(1, 0, j)


def T(j: int = 0) -> VarId:
    return VarId(2, 0, j)


_VAR_RE = re.compile(r"\s*(?:a\[(\d+),(\d+)\]|a(\d+)_(\d+)|x\[(\d+)\]|x(\d+)|t\[(\d+)\]|t(\d+)?)\s*$")


def parse_var(text: str) -> VarId:
    m = _VAR_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse variable {text!r}")
    g = m.groups()
    if g[0] is not None:
        return A(int(g[0]), int(g[1]))
    if g[2] is not None:
        return A(int(g[2]), int(g[3]))
    if g[4] is not None:
        return X(int(g[4]))
    if g[5] is not None:
        return X(int(g[5]))
    if g[6] is not None:
        return T(int(g[6]))
    return T(int(g[7]) if g[7] else 0)


class PolyRing:
    """``field[variables]`` with a fixed canonical variable order."""

    def __init__(self, field: Field, variables: Iterable[VarId] = ()):
        self.field = field
        self.vars: tuple[VarId, ...] = tuple(sorted(set(variables)))
        self.index = {v: k for k, v in enumerate(self.vars)}
        nv = len(self.vars)
        self.nvars = nv
        self.deg_shift = nv * SLOT_BITS
        self.offsets = tuple((nv - 1 - k) * SLOT_BITS for k in range(nv))
        self.guard = sum(1 << (off + SLOT_BITS - 1) for off in self.offsets)
        self.slot_mask = (1 << SLOT_BITS) - 1
        self._deg_unit = 1 << self.deg_shift
        self._var_mono = tuple((1 << off) + self._deg_unit for off in self.offsets)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.field == other.field and self.vars == other.vars

    def __hash__(self):
        return hash((self.field, self.vars))

    def __repr__(self):
        return f"PolyRing({self.field!r}, [{', '.join(map(str, self.vars))}])"

    # construction --------------------------------------------------------
    def zero(self) -> "MultiPoly":
        return MultiPoly(self, {})

    def one(self) -> "MultiPoly":
        return MultiPoly(self, {0: self.field.one})

    def const(self, c) -> "MultiPoly":
        c = self.field.validate(c)
        return MultiPoly(self, {} if self.field.is_zero(c) else {0: c})

    def raw_const(self, c) -> "MultiPoly":
        return MultiPoly(self, {} if self.field.is_zero(c) else {0: c})

    def var(self, v: VarId) -> "MultiPoly":
        if v not in self.index:
            raise KeyError(f"{v} is not a variable of {self}")
        return MultiPoly(self, {self._var_mono[self.index[v]]: self.field.one})

    def x(self, j: int) -> "MultiPoly":
        return self.var(X(j))

    def a(self, i: int, j: int) -> "MultiPoly":
        return self.var(A(i, j))

    def monomial(self, exps: Mapping[VarId, int]) -> int:
        m = 0
        deg = 0
        for v, e in exps.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e == 0:
                continue
            if e > MAX_EXPONENT:
                raise OverflowError("exponent too large for packed monomials")
            m += e << self.offsets[self.index[v]]
            deg += e
        return m + (deg << self.deg_shift)

    def exponents(self, m: int) -> dict[VarId, int]:
        out = {}
        mask = self.slot_mask
        for v, off in zip(self.vars, self.offsets):
            e = (m >> off) & mask
            if e:
                out[v] = e
        return out

    def exponent(self, m: int, v: VarId) -> int:
        return (m >> self.offsets[self.index[v]]) & self.slot_mask

    def degree_of(self, m: int) -> int:
        return m >> self.deg_shift

    def divides(self, small: int, big: int) -> int | None:
        """``big / small`` as a packed monomial if ``small | big``, else ``None``."""
        d = (big | self.guard) - small
        if d < 0 or (d & self.guard) != self.guard:
            return None
        return d - self.guard

    def from_terms(self, terms: Mapping) -> "MultiPoly":
        """Build from ``{exponent-dict or tuple-of-(var, e): coefficient}``."""
        out: dict = {}
        F = self.field
        for key, c in terms.items():
            exps = dict(key) if not isinstance(key, Mapping) else key
            m = self.monomial(exps)
            c = F.validate(c)
            out[m] = F.add(out[m], c) if m in out else c
        return MultiPoly(self, {m: c for m, c in out.items() if not F.is_zero(c)})

    def with_vars(self, extra: Iterable[VarId]) -> "PolyRing":
        return PolyRing(self.field, self.vars + tuple(extra))

    def union(self, other: "PolyRing") -> "PolyRing":
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        return PolyRing(self.field, self.vars + other.vars)

    def parse(self, text: str) -> "MultiPoly":
        return parse_poly(text, self)


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps packed monomial -> raw coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # basic protocol ------------------------------------------------------
    @property
    def field(self) -> Field:
        return self.ring.field

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def _other(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                if other.ring.field != self.ring.field:
                    raise FieldMismatchError(f"{self.field} vs {other.field}")
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}; coerce with to_ring()")
            return other
        if isinstance(other, (int, FieldElement, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return MultiPoly(self.ring, self.field.sum_terms(self.terms, o.terms, 1))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return MultiPoly(self.ring, self.field.sum_terms(self.terms, o.terms, -1))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        neg = self.field.neg
        return MultiPoly(self.ring, {m: neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if not self.terms or not o.terms:
            return MultiPoly(self.ring, {})
        if len(o.terms) == 1 and 0 in o.terms:
            return MultiPoly(self.ring, self.field.scale_terms(self.terms, o.terms[0]))
        if len(self.terms) == 1 and 0 in self.terms:
            return MultiPoly(self.ring, self.field.scale_terms(o.terms, self.terms[0]))
        if self.total_degree() + o.total_degree() > MAX_EXPONENT:
            raise OverflowError("product degree exceeds packed-monomial range")
        return MultiPoly(self.ring, self.field.convolve(self.terms, o.terms))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> "MultiPoly":
        """Multiply by a raw field value."""
        return MultiPoly(self.ring, self.field.scale_terms(self.terms, c))

    def mul_monomial(self, m: int, c=None) -> "MultiPoly":
        F = self.field
        if c is None:
            return MultiPoly(self.ring, {k + m: v for k, v in self.terms.items()})
        return MultiPoly(self.ring, {k + m: F.mul(v, c) for k, v in self.terms.items()})

    # inspection ----------------------------------------------------------
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.terms) >> self.ring.deg_shift

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {m >> self.ring.deg_shift for m in self.terms}
        if degree is not None:
            return degs <= {degree}
        return len(degs) <= 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_coeff(self):
        return self.terms.get(0, self.field.zero)

    def leading_monomial(self) -> int:
        return max(self.terms)

    def leading_coeff(self):
        return self.terms[max(self.terms)] if self.terms else self.field.zero

    def degree_in(self, v: VarId) -> int:
        if v not in self.ring.index or not self.terms:
            return 0 if self.terms else -1
        off = self.ring.offsets[self.ring.index[v]]
        mask = self.ring.slot_mask
        return max((m >> off) & mask for m in self.terms)

    def variables(self) -> set[VarId]:
        seen = 0
        for m in self.terms:
            seen |= m
        out = set()
        mask = self.ring.slot_mask
        for v, off in zip(self.ring.vars, self.ring.offsets):
            if (seen >> off) & mask:
                out.add(v)
        return out

    def depends_on(self, v: VarId) -> bool:
        if v not in self.ring.index:
            return False
        off = self.ring.offsets[self.ring.index[v]]
        mask = self.ring.slot_mask
        return any((m >> off) & mask for m in self.terms)

    def coefficient(self, exps: Mapping[VarId, int]):
        return self.terms.get(self.ring.monomial(exps), self.field.zero)

    def items(self):
        """``(exponent-dict, raw coefficient)`` in canonical (descending grlex) order."""
        for m in sorted(self.terms, reverse=True):
            yield self.ring.exponents(m), self.terms[m]

    # calculus ------------------------------------------------------------
    def diff(self, v: VarId) -> "MultiPoly":
        """Formal partial derivative in a parameter variable ``a[i,j]``."""
        if v.kind == 1:
            raise ValueError(f"derivative in the Stanley-Reisner variable {v} is not supported")
        return self._diff(v)

    def _diff(self, v: VarId) -> "MultiPoly":
        if v not in self.ring.index:
            return MultiPoly(self.ring, {})
        ring = self.ring
        off = ring.offsets[ring.index[v]]
        mask = ring.slot_mask
        step = (1 << off) + ring._deg_unit
        F = self.field
        out = {}
        if F.characteristic == 0:
            for m, c in self.terms.items():
                e = (m >> off) & mask
                if e:
                    out[m - step] = F.mul(c, e)
        else:
            ch = F.characteristic
            for m, c in self.terms.items():
                e = (m >> off) & mask
                if e and e % ch:
                    out[m - step] = F.mul(c, F.from_int(e))
        return MultiPoly(ring, out)

    # substitution / evaluation --------------------------------------------
    def substitute(self, subs: Mapping[VarId, "MultiPoly"]) -> "MultiPoly":
        """Replace variables by polynomials of the same ring."""
        ring = self.ring
        keys = [v for v in subs if v in ring.index]
        if not keys:
            return self
        for v in keys:
            if subs[v].ring != ring:
                raise ValueError("substituted polynomial must live in the same ring")
        offs = [ring.offsets[ring.index[v]] for v in keys]
        mask = ring.slot_mask
        groups: dict = {}
        for m, c in self.terms.items():
            es = tuple((m >> off) & mask for off in offs)
            rest = m
            dsum = 0
            for e, off in zip(es, offs):
                if e:
                    rest -= e << off
                    dsum += e
            rest -= dsum << ring.deg_shift
            groups.setdefault(es, {})[rest] = c
        powers: dict = {}

        def power(k, e):
            key = (k, e)
            if key not in powers:
                powers[key] = subs[keys[k]] ** e
            return powers[key]

        F = ring.field
        total: dict = {}
        for es, terms in groups.items():
            part = MultiPoly(ring, terms)
            for k, e in enumerate(es):
                if e:
                    part = part * power(k, e)
            total = F.sum_terms(total, part.terms, 1)
        return MultiPoly(ring, total)

    def evaluate(self, values: Mapping[VarId, object]):
        """Evaluate every used variable at raw field values (or FieldElements); returns a raw value."""
        ring, F = self.ring, self.field
        used = self.variables()
        missing = [v for v in used if v not in values]
        if missing:
            raise KeyError(f"no value for {', '.join(map(str, sorted(missing)))}")
        vals = []
        for v, off in zip(ring.vars, ring.offsets):
            if v in used:
                x = values[v]
                vals.append((off, F.validate(x) if isinstance(x, FieldElement) else x))
        mask = ring.slot_mask
        cache: dict = {}
        total = F.zero
        for m, c in self.terms.items():
            t = c
            for off, x in vals:
                e = (m >> off) & mask
                if e:
                    key = (off, e)
                    p = cache.get(key)
                    if p is None:
                        p = cache[key] = F.pow(x, e)
                    t = F.mul(t, p)
            total = F.add(total, t)
        return total

    def __call__(self, **kwargs):
        """``f(a1_2=3, x1=5)`` style evaluation returning a FieldElement."""
        values = {parse_var(k): self.field.validate(v) for k, v in kwargs.items()}
        return FieldElement(self.field, self.evaluate(values))

    def partial_evaluate(self, values: Mapping[VarId, object]) -> "MultiPoly":
        """Set some variables to field values; result stays in the same ring."""
        ring = self.ring
        subs = {v: ring.const(c) if not isinstance(c, MultiPoly) else c for v, c in values.items() if v in ring.index}
        return self.substitute(subs)

    def to_ring(self, ring: PolyRing) -> "MultiPoly":
        """Re-express in another ring over the same field (variables must exist there)."""
        if ring == self.ring:
            return self
        if ring.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {ring.field}")
        src = self.ring
        used = [(v, off) for v, off in zip(src.vars, src.offsets)]
        mask = src.slot_mask
        dst_off = []
        for v, off in used:
            if v in ring.index:
                dst_off.append((off, ring.offsets[ring.index[v]]))
            else:
                dst_off.append((off, None))
        out = {}
        for m, c in self.terms.items():
            nm = 0
            for off, doff in dst_off:
                e = (m >> off) & mask
                if e:
                    if doff is None:
                        raise ValueError(f"variable missing from target ring: {src.vars[[o for o, _ in dst_off].index(off)]}")
                    nm += e << doff
            nm += (m >> src.deg_shift) << ring.deg_shift
            out[nm] = c
        return MultiPoly(ring, out)

    def map_coefficients(self, fn, ring: PolyRing) -> "MultiPoly":
        """Apply ``fn`` (raw -> raw in ``ring.field``) to every coefficient; same variables."""
        if ring.vars != self.ring.vars:
            raise ValueError("map_coefficients keeps the variable set")
        F = ring.field
        out = {}
        for m, c in self.terms.items():
            v = fn(c)
            if not F.is_zero(v):
                out[m] = v
        return MultiPoly(ring, out)

    # division --------------------------------------------------------------
    def divide_exact(self, d: "MultiPoly") -> "MultiPoly | None":
        """Quotient if ``d`` divides ``self`` exactly, else ``None``."""
        d = self._other(d)
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.terms:
            return self
        ring, F = self.ring, self.field
        lm = max(d.terms)
        inv_lc = F.inv(d.terms[lm])
        if len(d.terms) == 1:
            out = {}
            for m, c in self.terms.items():
                q = ring.divides(lm, m)
                if q is None:
                    return None
                out[q] = F.mul(c, inv_lc)
            return MultiPoly(ring, out)
        dtail = [(m, c) for m, c in d.terms.items() if m != lm]
        rem = dict(self.terms)
        heap = [-m for m in rem]
        heapq.heapify(heap)
        inheap = set(rem)
        quot = {}
        divides = ring.divides
        sub, mul, is_zero = F.sub, F.mul, F.is_zero
        while heap:
            m = -heapq.heappop(heap)
            inheap.discard(m)
            c = rem.pop(m, None)
            if c is None:
                continue
            qm = divides(lm, m)
            if qm is None:
                return None
            qc = mul(c, inv_lc)
            quot[qm] = qc
            for dm, dc in dtail:
                nm = qm + dm
                v = sub(rem.get(nm, F.zero), mul(qc, dc))
                if is_zero(v):
                    rem.pop(nm, None)
                else:
                    rem[nm] = v
                    if nm not in inheap:
                        heapq.heappush(heap, -nm)
                        inheap.add(nm)
        return MultiPoly(ring, quot)

    def __floordiv__(self, other):
        q = self.divide_exact(other)
        if q is None:
            raise ValueError("polynomial division is not exact")
        return q

    def monic(self) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.leading_coeff()))

    # text --------------------------------------------------------------------
    def monomial_text(self, m: int) -> str:
        parts = []
        for v, e in self.ring.exponents(m).items():
            parts.append(str(v) if e == 1 else f"{v}^{e}")
        return "*".join(parts)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        F = self.field
        out = []
        for idx, m in enumerate(sorted(self.terms, reverse=True)):
            c = self.terms[m]
            neg = F.characteristic == 0 and c < 0
            if neg:
                c = -c
            mono = self.monomial_text(m)
            ctext = F.to_text(c)
            if not mono:
                body = ctext
            elif ctext == "1" or (F.characteristic == 2 and ctext == "0x1"):
                body = mono
            else:
                body = f"{ctext}*{mono}"
            if idx == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    __str__ = to_text

    def __repr__(self):
        return f"MultiPoly({self.to_text()})"


# --- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(a\[\d+,\d+\]|x\[\d+\]|t\[\d+\]|a\d+_\d+|x\d+|t\d*|0x[0-9a-fA-F]+|\d+(?:/\d+)?|\*\*|[-+*^()])")


def parse_poly(text: str, ring: PolyRing) -> MultiPoly:
    """Parse ``"x1*x2^2 + 3*a[1,2]*x3 - (x1 + x2)^2"`` into ``ring``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    tokens = ["^" if t == "**" else t for t in tokens]
    state = {"i": 0}

    def peek():
        return tokens[state["i"]] if state["i"] < len(tokens) else None

    def take():
        t = tokens[state["i"]]
        state["i"] += 1
        return t

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
        acc = term()
        if sign < 0:
            acc = -acc
        while peek() in ("+", "-"):
            op = take()
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        acc = factor()
        while peek() == "*":
            take()
            acc = acc * factor()
        return acc

    def factor():
        base = atom()
        if peek() == "^":
            take()
            e = take()
            base = base ** int(e)
        return base

    def atom():
        t = take()
        if t == "(":
            v = expr()
            if take() != ")":
                raise ValueError("unbalanced parentheses")
            return v
        if t.startswith("0x"):
            return ring.raw_const(ring.field.parse(t))
        if t[0].isdigit():
            if "/" in t:
                return ring.raw_const(ring.field.parse(t))
            return ring.const(int(t))
        return ring.var(parse_var(t))

    result = expr()
    if state["i"] != len(tokens):
        raise ValueError(f"trailing tokens in {text!r}")
    return result


# --- gcd ----------------------------------------------------------------------

def coefficients_in(f: MultiPoly, v: VarId) -> dict[int, MultiPoly]:
    """View ``f`` as a univariate polynomial in ``v``: ``{power: coefficient}``."""
    ring = f.ring
    off = ring.offsets[ring.index[v]]
    mask = ring.slot_mask
    unit = (1 << off) + ring._deg_unit
    out: dict[int, dict] = {}
    for m, c in f.terms.items():
        e = (m >> off) & mask
        out.setdefault(e, {})[m - e * unit] = c
    return {e: MultiPoly(ring, t) for e, t in out.items()}


def _from_coefficients(coeffs: dict[int, MultiPoly], v: VarId, ring: PolyRing) -> MultiPoly:
    off = ring.offsets[ring.index[v]]
    unit = (1 << off) + ring._deg_unit
    F = ring.field
    total: dict = {}
    for e, c in coeffs.items():
        total = F.sum_terms(total, {m + e * unit: x for m, x in c.terms.items()}, 1)
    return MultiPoly(ring, total)


def _pick_variable(f: MultiPoly, g: MultiPoly) -> VarId | None:
    vf, vg = f.variables(), g.variables()
    common = vf & vg
    if common:
        # smallest degree keeps the PRS short
        return min(common, key=lambda v: (min(f.degree_in(v), g.degree_in(v)), v))
    return None


def content_in(f: MultiPoly, v: VarId) -> MultiPoly:
    g = None
    for c in sorted(coefficients_in(f, v).values(), key=len):
        g = c.monic() if g is None else poly_gcd(g, c)
        if g.is_constant():
            return f.ring.one()
    return g if g is not None else f.ring.zero()


def _prem(a: dict[int, MultiPoly], b: dict[int, MultiPoly]) -> dict[int, MultiPoly]:
    """Pseudo-remainder of univariate coefficient dicts."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: dict[int, MultiPoly] = {}
        for e, c in r.items():
            if e != dr:
                new[e] = c * lb
        for e, c in b.items():
            if e == db:
                continue
            k = e + shift
            val = new.get(k, lb.ring.zero()) - c * lr
            if val:
                new[k] = val
            else:
                new.pop(k, None)
        r = {e: c for e, c in new.items() if c}
    return r


def _scalar_normal(f: MultiPoly) -> MultiPoly:
    """Rescale by a unit: integer primitive over QQ, monic otherwise."""
    if f.field.characteristic != 0 or not f.terms:
        return f.monic()
    cs = [Fraction(c) for c in f.terms.values()]
    den = math.lcm(*(c.denominator for c in cs))
    num = math.gcd(*(c.numerator * (den // c.denominator) for c in cs))
    lead = Fraction(f.terms[max(f.terms)])
    scale = Fraction(den, num) * (1 if lead > 0 else -1)
    return MultiPoly(f.ring, {m: f.field.mul(c, scale) for m, c in f.terms.items()})


_PRIME_FIELD_61 = PrimeField((1 << 61) - 1)


def _image_field(F: Field):
    """Field in which images are computed, and a coefficient map into it."""
    if F.characteristic == 0:
        P = _PRIME_FIELD_61

        def conv(c):
            c = Fraction(c)
            if c.denominator % P.p == 0:
                return None
            return c.numerator % P.p * pow(c.denominator, -1, P.p) % P.p
        return P, conv
    return F, lambda c: c


def _univariate_image(f: MultiPoly, v: VarId, point: dict, P: Field, conv) -> list | None:
    ring = f.ring
    off = ring.offsets[ring.index[v]]
    mask = ring.slot_mask
    others = [(ring.offsets[ring.index[w]], x) for w, x in point.items() if w != v]
    out: dict[int, object] = {}
    for m, c in f.terms.items():
        t = conv(c)
        if t is None:
            return None
        for o, x in others:
            e = (m >> o) & mask
            if e:
                t = P.mul(t, P.pow(x, e))
        e = (m >> off) & mask
        out[e] = P.add(out[e], t) if e in out else t
    deg = max((e for e, c in out.items() if not P.is_zero(c)), default=-1)
    if deg != f.degree_in(v):
        return None  # leading coefficient vanished at the point
    return [out.get(e, P.zero) for e in range(deg + 1)]


def _univariate_gcd_degree(a: list, b: list, P: Field) -> int:
    def trim(p):
        while p and P.is_zero(p[-1]):
            p.pop()
        return p
    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = P.inv(b[-1])
        while len(a) >= len(b):
            q = P.mul(a[-1], inv)
            shift = len(a) - len(b)
            for k, c in enumerate(b):
                a[k + shift] = P.sub(a[k + shift], P.mul(q, c))
            trim(a)
            if not a:
                break
        a, b = b, a
    return len(a) - 1


def _coprime_by_images(f: MultiPoly, g: MultiPoly, common: set) -> bool:
    """True only if ``gcd(f, g)`` is provably constant.

    For a point where the leading coefficients in ``v`` survive, the image of
    the true gcd divides the gcd of the images, so an image gcd of degree 0
    in ``v`` bounds ``deg_v gcd`` by 0.  A false return proves nothing.
    """
    P, conv = _image_field(f.field)
    if P.order is not None and P.order < 1 << 16:
        return False
    rng = random.Random(0x5EED)
    for v in sorted(common):
        done = False
        for _ in range(3):
            point = {w: P.random(rng) for w in common | f.variables() | g.variables()}
            a = _univariate_image(f, v, point, P, conv)
            b = _univariate_image(g, v, point, P, conv)
            if a is None or b is None:
                continue
            if _univariate_gcd_degree(a, b, P) > 0:
                return False
            done = True
            break
        if not done:
            return False
    return True


def _monomial_content(f: MultiPoly) -> MultiPoly:
    ring = f.ring
    exps = None
    for m in f.terms:
        e = ring.exponents(m)
        exps = e if exps is None else {v: min(k, e[v]) for v, k in exps.items() if v in e}
        if not exps:
            break
    return MultiPoly(ring, {ring.monomial(exps or {}): ring.field.one})


def _int_content(f: MultiPoly) -> int:
    return math.gcd(*f.terms.values())


def _int_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """gcd in Z[vars] of integer polynomials, positive leading coefficient."""
    if not f.terms:
        return g if not g.terms or g.terms[max(g.terms)] > 0 else -g
    if not g.terms:
        return f if f.terms[max(f.terms)] > 0 else -f
    c = math.gcd(_int_content(f), _int_content(g))
    if f.is_constant() or g.is_constant():
        return f.ring.const(c)
    f = f.scale(Fraction(1, _int_content(f)))
    g = g.scale(Fraction(1, _int_content(g)))
    h = _heuristic_gcd(f, g)
    if h is None:
        h = _scalar_normal(poly_gcd(f, g))
    return h.scale(c)


def _heuristic_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly | None:
    """Primitive gcd of primitive integer polynomials by integer evaluation.

    ``gcd(f(xi), g(xi))`` is lifted back by balanced xi-adic expansion; when
    xi exceeds twice the smaller coefficient norm plus one, a lift whose
    primitive part divides both inputs is the true gcd.  ``None`` means
    every attempt failed.
    """
    common = f.variables() & g.variables()
    if not common:
        return f.ring.one()
    v = max(common)
    fc, gc = coefficients_in(f, v), coefficients_in(g, v)
    norm = min(max(abs(c) for c in f.terms.values()), max(abs(c) for c in g.terms.values()))
    lead = min(norm // abs(fc[max(fc)].terms[max(fc[max(fc)].terms)]),
               norm // abs(gc[max(gc)].terms[max(gc[max(gc)].terms)]))
    xi = max(2 * norm + 2, min(2 * norm + 29, 99 * math.isqrt(2 * norm + 29)), 2 * lead + 2)
    for _ in range(6):
        fx = sum((c.scale(xi ** e) for e, c in fc.items()), f.ring.zero())
        gx = sum((c.scale(xi ** e) for e, c in gc.items()), f.ring.zero())
        if fx and gx:
            img = _int_gcd(fx, gx)
            coeffs: dict[int, MultiPoly] = {}
            e = 0
            while img:
                low = img.map_coefficients(lambda c: (c + xi // 2) % xi - xi // 2, f.ring)
                if low:
                    coeffs[e] = low
                img = (img - low).scale(Fraction(1, xi))
                e += 1
            h = _from_coefficients(coeffs, v, f.ring)
            if h:
                h = _scalar_normal(h)
                if f.divide_exact(h) is not None and g.divide_exact(h) is not None:
                    return h
        xi = xi * 73794 * math.isqrt(math.isqrt(xi)) // 27011
    return None


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Monic greatest common divisor (leading coefficient 1 in grlex order)."""
    if f.ring != g.ring:
        raise ValueError("gcd of polynomials from different rings")
    if not f.terms:
        return g.monic()
    if not g.terms:
        return f.monic()
    if f.is_constant() or g.is_constant():
        return f.ring.one()
    if len(f) > len(g):
        f, g = g, f
    if g.divide_exact(f) is not None:
        return f.monic()
    mf, mg = _monomial_content(f), _monomial_content(g)
    if len(f) == 1 and len(g) == 1:
        ef, eg = f.ring.exponents(max(mf.terms)), f.ring.exponents(max(mg.terms))
        low = {v: min(k, eg[v]) for v, k in ef.items() if v in eg}
        return MultiPoly(f.ring, {f.ring.monomial(low): f.field.one})
    if not (mf.is_constant() and mg.is_constant()):
        return poly_gcd(mf, mg) * poly_gcd(f // mf, g // mg)
    common = f.variables() & g.variables()
    if not common or _coprime_by_images(f, g, common):
        # a divisor of both only involves shared variables
        return f.ring.one()
    if f.field.characteristic == 0:
        h = _heuristic_gcd(_scalar_normal(f), _scalar_normal(g))
        if h is not None:
            return h.monic()
    v = _pick_variable(f, g)
    # a variable present in only one operand forces the gcd into its content
    for w in sorted(f.variables() ^ g.variables()):
        if f.depends_on(w):
            return poly_gcd(content_in(f, w), g)
        return poly_gcd(f, content_in(g, w))
    cf, cg = content_in(f, v), content_in(g, v)
    c = poly_gcd(cf, cg)
    pf, pg = _scalar_normal(f // cf), _scalar_normal(g // cg)
    a, b = coefficients_in(pf, v), coefficients_in(pg, v)
    if max(a) < max(b):
        a, b = b, a
    while True:
        r = _prem(a, b)
        if not r:
            break
        if max(r) == 0:
            return c.monic()
        rp = _from_coefficients(r, v, f.ring)
        rp = _scalar_normal(rp // content_in(rp, v))
        a, b = b, coefficients_in(rp, v)
    h = _from_coefficients(b, v, f.ring)
    h = h // content_in(h, v)
    return (c * h).monic()


def poly_lcm(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    return (f * (g // poly_gcd(f, g))).monic()
