"""Face monomials, pairing matrices and the diagonalized quadratic form.

The algebra ``Hbar`` is read off from ``W`` alone: a degree-``m`` element is
zero in ``Hbar^m`` exactly when it pairs to zero with every degree ``n-m``
monomial.  Ranks are computed at specialized points; by Schwartz-Zippel one
nonzero minor at a random point certifies the generic rank from below.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import lcm
from typing import Mapping, Sequence

from .complex import SimplicialComplex
from .fields import Field, PrimeField
from .linalg import pivot_rows, rank
from .mixed_volume import MixedVolume, ev_map
from .poly import MultiPoly, PolyRing
from .ratfunc import FactoredFrac

Monomial = tuple[tuple[int, int], ...]  # sorted (vertex, exponent) pairs


def as_monomial(exps: Mapping[int, int]) -> Monomial:
    return tuple(sorted((j, e) for j, e in exps.items() if e))


def merge(a: Monomial, b: Monomial) -> Monomial:
    out = dict(a)
    for j, e in b:
        out[j] = out.get(j, 0) + e
    return as_monomial(out)


def monomial_text(mono: Monomial) -> str:
    if not mono:
        return "1"
    return "*".join(f"x{j}" if e == 1 else f"x{j}^{e}" for j, e in mono)


@dataclass
class MonomialBasis:
    degree: int
    monomials: list[Monomial]
    selected: list[int] = field(default_factory=list)

    @property
    def selected_monomials(self) -> list[Monomial]:
        return [self.monomials[i] for i in self.selected]


def face_monomials(c: SimplicialComplex, m: int) -> MonomialBasis:
    """All degree-``m`` monomials whose support is a face, in canonical order."""
    if m < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for combo in combinations_with_replacement(range(1, c.num_vertices + 1), m):
        if c.is_face(set(combo)):
            exps: dict[int, int] = {}
            for j in combo:
                exps[j] = exps.get(j, 0) + 1
            out.append(as_monomial(exps))
    return MonomialBasis(m, out)


def all_monomials(num_vertices: int, m: int) -> list[Monomial]:
    out = []
    for combo in combinations_with_replacement(range(1, num_vertices + 1), m):
        exps: dict[int, int] = {}
        for j in combo:
            exps[j] = exps.get(j, 0) + 1
        out.append(as_monomial(exps))
    return out


# --- pairing matrices -----------------------------------------------------------------

@dataclass
class GramMatrix:
    rows: list[Monomial]
    cols: list[Monomial]
    entries: list[list]  # raw field values or FactoredFracs

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        n = len(self.rows)
        return all(_eq(self.entries[i][j], self.entries[j][i]) for i in range(n) for j in range(i + 1, n))


def _eq(a, b) -> bool:
    if isinstance(a, FactoredFrac):
        return a.equals(b)
    return a == b


class _Pairing:
    """Memoized ``W(x_A x_B)``."""

    def __init__(self, W: MixedVolume):
        self.W = W
        self.cache: dict[Monomial, object] = {}

    def __call__(self, mono: Monomial):
        out = self.cache.get(mono)
        if out is None:
            out = self.cache[mono] = self.W.evaluate_monomial(dict(mono))
        return out


def gram_matrix(c: SimplicialComplex, W: MixedVolume, m: int, rows: Sequence[Monomial] | None = None,
                cols: Sequence[Monomial] | None = None, power_of_l: int = 0) -> GramMatrix:
    """Entries ``W(l^k x_A x_B)``; ``k = 0`` is the Poincare pairing."""
    n = c.n
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in 0..{n}")
    rows = list(rows if rows is not None else face_monomials(c, m).monomials)
    cols = list(cols if cols is not None else face_monomials(c, n - m - power_of_l).monomials)
    pair = _Pairing(W)
    if power_of_l:
        lk = W.l() ** power_of_l
        entries = []
        for a in rows:
            row = []
            for b in cols:
                row.append(W.evaluate(lk * W.monomial(dict(merge(a, b)))))
            entries.append(row)
        return GramMatrix(rows, cols, entries)
    return GramMatrix(rows, cols, [[pair(merge(a, b)) for b in cols] for a in rows])


def select_basis(c: SimplicialComplex, W: MixedVolume, m: int) -> MonomialBasis:
    """Greedy pivot rows of the (m, n-m) pairing matrix over all face monomials."""
    if W.symbolic:
        raise ValueError("basis selection needs a specialized W")
    basis = face_monomials(c, m)
    g = gram_matrix(c, W, m, basis.monomials)
    basis.selected = pivot_rows(W.field, g.entries)
    return basis


def hbar_dimensions(c: SimplicialComplex, W: MixedVolume, degrees: Sequence[int] | None = None) -> list[int]:
    degrees = list(range(0, c.n + 1)) if degrees is None else list(degrees)
    return [len(select_basis(c, W, m).selected) for m in degrees]


# --- the quadratic form -----------------------------------------------------------------

@dataclass
class DiagonalForm:
    """``Q_l(g) = sum_i d_i z_i(g)^2`` with ``d_i = ev_i(l)^(n-2m)/c_i`` and ``z_i = ev_i``."""

    W: MixedVolume
    m: int
    lpow: list  # ev_i(l)^(n-2m), MultiPoly in the parameter ring
    c: list  # c_i, MultiPoly
    d: list  # raw values (specialized) or FactoredFracs (symbolic)

    @property
    def power(self) -> int:
        return self.W.n - 2 * self.m

    def z(self, i: int, g: MultiPoly) -> MultiPoly:
        p = self.W.pieces[i]
        return ev_map(self.W.coerce(g), {j: p.X[j] for j in p.live_columns}, self.W.matrix.ring)

    def evaluate(self, g: MultiPoly):
        g = self.W.coerce(g)
        _check_degree(g, self.m)
        F = self.W.field
        if not self.W.symbolic:
            total = F.zero
            for i, di in enumerate(self.d):
                zi = self.z(i, g).constant_coeff()
                if not F.is_zero(zi):
                    total = F.add(total, F.mul(di, F.mul(zi, zi)))
            return total
        total = FactoredFrac(self.W.matrix.ring.zero())
        for i, di in enumerate(self.d):
            zi = self.z(i, g)
            if zi:
                total = total + di * (zi * zi)
        return total.reduce()

    def parts(self, g: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
        """``(N, D)`` with ``Q_l(g) = N/D``, ``D = prod c_i`` and no division anywhere."""
        g = self.W.coerce(g)
        ring = self.W.matrix.ring
        D = ring.one()
        for ci in self.c:
            D = D * ci
        N = ring.zero()
        for i in range(len(self.c)):
            zi = self.z(i, g)
            if not zi:
                continue
            rest = ring.one()
            for k, ck in enumerate(self.c):
                if k != i:
                    rest = rest * ck
            N = N + self.lpow[i] * zi * zi * rest
        return N, D


def _check_degree(g: MultiPoly, m: int) -> None:
    ring = g.ring
    for mono in g.terms:
        deg = sum(e for v, e in ring.exponents(mono).items() if v.kind == 1)
        if deg != m:
            raise ValueError(f"expected a polynomial of degree {m} in x, found a term of degree {deg}")


def quadratic_form(c: SimplicialComplex, W: MixedVolume, m: int) -> DiagonalForm:
    n = c.n
    if not 0 <= 2 * m <= n:
        raise ValueError(f"m must satisfy 0 <= 2m <= n = {n}")
    F = W.field
    l = W.l()
    lpow, cs, ds = [], [], []
    for i, p in enumerate(W.pieces):
        el = ev_map(l, {j: p.X[j] for j in p.live_columns}, W.matrix.ring) ** (n - 2 * m)
        lpow.append(el)
        cs.append(p.c)
        if not W.symbolic:
            ds.append(F.div(el.constant_coeff(), p.c.constant_coeff()))
        else:
            scalar = F.one
            den: dict[MultiPoly, int] = {}
            for j in p.columns:
                u, key = p.unit_and_key(j)
                scalar = F.mul(scalar, u)
                if key is not None:
                    den[key] = den.get(key, 0) + 1
            ds.append(FactoredFrac(el.scale(F.inv(scalar)), den))
    return DiagonalForm(W, m, lpow, cs, ds)


def q_direct(W: MixedVolume, g: MultiPoly, m: int):
    """Oracle path for ``Q_l``: expand ``l^(n-2m) g^2`` and apply ``W`` monomial by monomial."""
    g = W.coerce(g)
    return W.evaluate(W.l() ** (W.n - 2 * m) * g * g)


def random_form_element(W: MixedVolume, monomials: Sequence[Monomial], rng: random.Random,
                        ground: Sequence | None = None) -> MultiPoly:
    """Random combination of ``monomials`` with coefficients from ``ground`` (default: the field)."""
    F = W.field
    g = W.xring.zero()
    for mono in monomials:
        cval = F.random(rng) if ground is None else ground[rng.randrange(len(ground))]
        if not F.is_zero(cval):
            g = g + W.monomial(dict(mono)).scale(cval)
    return g


# --- rank checks ------------------------------------------------------------------------

@dataclass
class LefschetzResult:
    m: int
    ranks: list[int]
    expected: list[int]
    passed: bool


def lefschetz_rank_check(c: SimplicialComplex, builders: Sequence, m: int) -> LefschetzResult:
    """Rank of ``W(l^(n-2m) x_a x_b)`` on a selected basis of ``Hbar^m``, one entry per seed.

    ``builders`` yields specialized MixedVolumes (one per seed).
    """
    ranks, expected = [], []
    for W in builders:
        basis = select_basis(c, W, m)
        sel = basis.selected_monomials
        p = c.n - 2 * m
        lp = W.l() ** p
        mat = [[W.evaluate(lp * W.monomial(dict(merge(a, b)))) for b in sel] for a in sel]
        ranks.append(rank(W.field, mat))
        expected.append(len(sel))
    return LefschetzResult(m, ranks, expected, any(r == e for r, e in zip(ranks, expected)))


# --- characteristic 0 -> 2 ----------------------------------------------------------------

class TwoContentError(ValueError):
    code = "two_content"


def clear_denominators(g: MultiPoly) -> MultiPoly:
    dens = [Fraction(c).denominator for c in g.terms.values()]
    k = lcm(*dens) if dens else 1
    return g.scale(k) if k != 1 else g


def specialize_char0_to_char2(g: MultiPoly) -> MultiPoly:
    """Reduce a rational-coefficient polynomial modulo 2, after clearing denominators."""
    if g.field.characteristic != 0:
        raise ValueError("input must have rational coefficients")
    h = clear_denominators(g)
    if h.terms and all(int(c) % 2 == 0 for c in h.terms.values()):
        raise TwoContentError("every coefficient is even; divide out the 2-content first")
    GF2 = PrimeField(2)
    ring = PolyRing(GF2, g.ring.vars)
    return MultiPoly(ring, {m: 1 for m, c in h.terms.items() if int(c) % 2})


def reduce_mod2(g: MultiPoly, field2: Field | None = None) -> MultiPoly:
    """Coefficient-wise reduction of an integer-coefficient polynomial into a char-2 field."""
    F2 = field2 or PrimeField(2)
    if F2.characteristic != 2:
        raise ValueError("target field must have characteristic 2")
    ring = PolyRing(F2, g.ring.vars)
    out = {}
    for m, c in g.terms.items():
        fc = Fraction(c)
        if fc.denominator % 2 == 0:
            raise ValueError("coefficient with an even denominator has no reduction mod 2")
        if fc.numerator % 2:
            out[m] = F2.one
    return MultiPoly(ring, out)


# --- anisotropy spot test -------------------------------------------------------------------

@dataclass
class SpotResult:
    m: int
    trials: int
    distinct: int
    zeros: int  # g with Q_l(g) = 0 at every tried seed
    seeds_used: int
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.zeros == 0


def anisotropy_spot_test(c: SimplicialComplex, builders: Sequence[MixedVolume], m: int, trials: int,
                         rng: random.Random, ground_size: int = 16) -> SpotResult:
    """Draw nonzero ``g`` on a selected basis of ``Hbar^m`` and require ``Q_l(g) != 0`` at some seed."""
    W0 = builders[0]
    basis = select_basis(c, W0, m).selected_monomials
    F = W0.field
    ground = [F.from_bits(k) if hasattr(F, "from_bits") else F.from_int(k) for k in range(ground_size)]
    forms = [quadratic_form(c, W, m) for W in builders]
    for W in builders[1:]:
        # the basis must stay independent at every seed we evaluate at
        g = gram_matrix(c, W, m, basis)
        if rank(F, g.entries) != len(basis):
            raise ValueError("selected basis degenerates at a later seed")
    seen = set()
    zeros = 0
    used = 1
    failures = []
    for _ in range(trials):
        while True:
            coeffs = tuple(rng.randrange(ground_size) for _ in basis)
            if any(coeffs):
                break
        seen.add(coeffs)
        ok = False
        for k, (W, Q) in enumerate(zip(builders, forms)):
            g = W.xring.zero()
            for mono, ci in zip(basis, coeffs):
                if ci:
                    g = g + W.monomial(dict(mono)).scale(ground[ci])
            if not F.is_zero(Q.evaluate(g)):
                ok = True
                used = max(used, k + 1)
                break
        if not ok:
            zeros += 1
            failures.append(" + ".join(f"{F.to_text(ground[ci])}*{monomial_text(mo)}" for mo, ci in zip(basis, coeffs) if ci))
    return SpotResult(m, trials, len(seen), zeros, used, failures)
