"""The mixed-volume functional as a sum of simplex evaluators.

For an oriented pseudo-manifold cut into cone pieces ``Pi = boundary(apex * sigma)``,
each piece carries the signed maximal minors ``X_j`` of the ``n x (n+1)``
coefficient block on its columns ``(apex, sigma)``.  A degree-``n`` polynomial
``f`` in the Stanley-Reisner variables evaluates as

    W(f) = sum over pieces of ev(f) / (X_0 X_1 ... X_n),

where ``ev`` sends ``x_j`` to ``X_j`` for every vertex of the piece and to 0
otherwise.  A fresh apex (column 0) is not a vertex of the complex, so its
variable never occurs in ``f``; an existing vertex used as apex does.

A :class:`GenericMatrix` carries the coefficients ``a[i,j]``.  Entries are
polynomials in a (possibly empty) set of symbolic parameters, so the same code
serves the fully symbolic, hybrid (some parameters symbolic) and specialized
(all parameters drawn from a seeded stream) modes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .complex import ConeDecomposition, Orientation, SimplicialComplex, cone_decomposition, permutation_sign
from .fields import Field, make_rng
from .poly import A, MultiPoly, PolyRing, VarId, X
from .ratfunc import FactoredFrac

MIN_SPECIALIZATION_ORDER = 1 << 16
MAX_REDRAWS = 16


class DegenerateSpecialization(ValueError):
    code = "degenerate_specialization"


class GenericMatrix:
    """Coefficient matrix with rows ``1..n`` and the given columns."""

    def __init__(self, field: Field, n: int, columns: Iterable[int], ring: PolyRing,
                 entries: Mapping[tuple[int, int], MultiPoly], mode: str = "symbolic",
                 values: Mapping[VarId, object] | None = None):
        self.field = field
        self.n = n
        self.columns = tuple(sorted(set(columns)))
        self.ring = ring
        self.entries = dict(entries)
        self.mode = mode
        self.values = dict(values or {})  # specialized parameters, for reports
        for i in range(1, n + 1):
            for j in self.columns:
                if (i, j) not in self.entries:
                    raise ValueError(f"missing matrix entry ({i},{j})")
        self._det: dict[tuple[int, tuple[int, ...]], MultiPoly] = {}
        self._factor: dict[tuple[int, ...], tuple[object, MultiPoly | None]] = {}

    # constructors -----------------------------------------------------------
    @classmethod
    def symbolic(cls, field: Field, n: int, columns: Iterable[int]) -> "GenericMatrix":
        columns = tuple(sorted(set(columns)))
        ring = PolyRing(field, [A(i, j) for i in range(1, n + 1) for j in columns])
        entries = {(i, j): ring.a(i, j) for i in range(1, n + 1) for j in columns}
        return cls(field, n, columns, ring, entries, "symbolic")

    @classmethod
    def draw(cls, field: Field, n: int, columns: Iterable[int], rng: random.Random,
             symbolic: Iterable[VarId] = (), mode: str | None = None) -> "GenericMatrix":
        """Draw every entry row-major from ``rng``, then keep ``symbolic`` variables free."""
        columns = tuple(sorted(set(columns)))
        if field.order is not None and field.order < MIN_SPECIALIZATION_ORDER:
            raise ValueError(f"field {field} is too small for specialization (need at least 2^16 elements)")
        keep = set(symbolic)
        ring = PolyRing(field, keep)
        entries = {}
        values = {}
        for i in range(1, n + 1):
            for j in columns:
                v = field.random(rng)
                if A(i, j) in keep:
                    entries[(i, j)] = ring.a(i, j)
                else:
                    entries[(i, j)] = ring.raw_const(v)
                    values[A(i, j)] = v
        return cls(field, n, columns, ring, entries, mode or ("hybrid" if keep else "specialized"), values)

    @classmethod
    def gauge(cls, field: Field, n: int, columns: Iterable[int], facet: Sequence[int]) -> "GenericMatrix":
        """Symbolic matrix whose ``facet`` columns form the identity block."""
        columns = tuple(sorted(set(columns)))
        facet = tuple(facet)
        if len(facet) != n or not set(facet) <= set(columns):
            raise ValueError("gauge facet must be n of the matrix columns")
        free = [A(i, j) for i in range(1, n + 1) for j in columns if j not in facet]
        ring = PolyRing(field, free)
        entries = {}
        for i in range(1, n + 1):
            for j in columns:
                if j in facet:
                    entries[(i, j)] = ring.one() if facet.index(j) == i - 1 else ring.zero()
                else:
                    entries[(i, j)] = ring.a(i, j)
        return cls(field, n, columns, ring, entries, f"gauge{list(facet)}")

    # minors -------------------------------------------------------------------
    @property
    def is_specialized(self) -> bool:
        return not self.ring.vars

    def det(self, cols: Sequence[int]) -> MultiPoly:
        """Determinant of rows 1..n on the columns ``cols`` in increasing order."""
        s = tuple(sorted(cols))
        if len(set(s)) != len(s):
            raise ValueError("repeated columns in a minor")
        if len(s) != self.n:
            raise ValueError("a maximal minor needs n columns")
        return self._rowdet(self.n, s)

    def _rowdet(self, k: int, s: tuple[int, ...]) -> MultiPoly:
        if k == 0:
            return self.ring.one()
        key = (k, s)
        out = self._det.get(key)
        if out is not None:
            return out
        total = self.ring.zero()
        for c, j in enumerate(s):
            e = self.entries[(k, j)]
            if e.is_zero():
                continue
            sub = self._rowdet(k - 1, s[:c] + s[c + 1:])
            if sub.is_zero():
                continue
            term = e * sub
            total = total + term if (k - 1 + c) % 2 == 0 else total - term
        self._det[key] = total
        return total

    def minor_X(self, columns: Sequence[int], position: int) -> MultiPoly:
        """``(-1)^position`` times the determinant with that column removed, in stored order."""
        cols = tuple(columns)
        if len(set(cols)) != len(cols):
            raise ValueError("repeated columns")
        if len(cols) != self.n + 1 or not 0 <= position <= self.n:
            raise ValueError("need n+1 columns and a position in 0..n")
        rest = cols[:position] + cols[position + 1:]
        sign = (-1) ** position * permutation_sign(rest)
        d = self.det(rest)
        return d if sign > 0 else -d

    def factor(self, cols: Sequence[int]) -> tuple[object, MultiPoly | None]:
        """``det(cols) = unit * key`` with ``key`` monic (or ``None`` when constant)."""
        s = tuple(sorted(cols))
        out = self._factor.get(s)
        if out is None:
            d = self.det(s)
            if d.is_constant():
                out = (d.constant_coeff(), None)
            else:
                lc = d.leading_coeff()
                out = (lc, d.scale(self.field.inv(lc)))
            self._factor[s] = out
        return out

    def entry_text(self) -> list[list[str]]:
        return [[self.entries[(i, j)].to_text() for j in self.columns] for i in range(1, self.n + 1)]


@dataclass
class SimplexEvaluator:
    """One cone piece: its columns (apex first), signed minors ``X`` and ``c = prod X``."""

    columns: tuple[int, ...]
    X: dict[int, MultiPoly]
    c: MultiPoly
    matrix: GenericMatrix = field(repr=False)

    @classmethod
    def build(cls, matrix: GenericMatrix, columns: Sequence[int]) -> "SimplexEvaluator":
        cols = tuple(columns)
        Xs = {j: matrix.minor_X(cols, p) for p, j in enumerate(cols)}
        c = matrix.ring.one()
        for j in cols:
            c = c * Xs[j]
        return cls(cols, Xs, c, matrix)

    @property
    def apex(self) -> int:
        return self.columns[0]

    @property
    def facet_columns(self) -> tuple[int, ...]:
        return self.columns[1:]

    @property
    def live_columns(self) -> tuple[int, ...]:
        """Columns whose x-variable survives ``ev``: all but a fresh apex."""
        return self.columns[1:] if self.apex == 0 else self.columns

    def X_raw(self, j: int):
        return self.X[j].constant_coeff()

    def unit_and_key(self, j: int) -> tuple[object, MultiPoly | None]:
        """``X_j = unit * key`` with ``key`` monic, shared across pieces."""
        p = self.columns.index(j)
        rest = self.columns[:p] + self.columns[p + 1:]
        u, key = self.matrix.factor(rest)
        sign = (-1) ** p * permutation_sign(rest)
        F = self.matrix.field
        return (u if sign > 0 else F.neg(u)), key

    def ev(self, f: MultiPoly, target: PolyRing | None = None) -> MultiPoly:
        """Ring homomorphism ``x_j -> X_j`` on the piece's vertices and ``x_j -> 0`` otherwise."""
        return ev_map(f, {j: self.X[j] for j in self.live_columns}, self.matrix.ring)

    def laurent(self, exps: Mapping[int, int]) -> dict[int, int]:
        """Exponents of ``ev(x^J)/c`` in the minors, or empty if ev vanishes."""
        out = {j: -1 for j in self.columns}
        for j, e in exps.items():
            if j not in out or j == 0:
                return {}
            out[j] += e
        return out


def ev_map(f: MultiPoly, images: Mapping[int, MultiPoly], ring: PolyRing) -> MultiPoly:
    """Substitute ``x_j -> images[j]`` (0 if absent), mapping parameter coefficients into ``ring``."""
    src = f.ring
    F = src.field
    xs = [(v, off) for v, off in zip(src.vars, src.offsets) if v.kind == 1]
    params = [(v, off) for v, off in zip(src.vars, src.offsets) if v.kind != 1]
    mask = src.slot_mask
    groups: dict[tuple, dict] = {}
    for m, c in f.terms.items():
        key = tuple((v.j, (m >> off) & mask) for v, off in xs if (m >> off) & mask)
        if any(j not in images for j, _ in key):
            continue
        pm = 0
        deg = 0
        for v, off in params:
            e = (m >> off) & mask
            if e:
                if v not in ring.index:
                    raise ValueError(f"coefficient variable {v} is not a parameter of the target ring")
                pm += e << ring.offsets[ring.index[v]]
                deg += e
        pm += deg << ring.deg_shift
        g = groups.setdefault(key, {})
        g[pm] = F.add(g[pm], c) if pm in g else c
    total = ring.zero()
    cache: dict = {}
    for key, coeff in groups.items():
        part = MultiPoly(ring, {m: c for m, c in coeff.items() if not F.is_zero(c)})
        for j, e in key:
            p = cache.get((j, e))
            if p is None:
                p = cache[(j, e)] = images[j] ** e
            part = part * p
        total = total + part
    return total


def x_exponents(f_ring: PolyRing, m: int) -> tuple[dict[int, int], int]:
    """Split a packed monomial into its x-exponent dict and parameter part."""
    mask = f_ring.slot_mask
    xs = {}
    rest = m
    deg = 0
    for v, off in zip(f_ring.vars, f_ring.offsets):
        if v.kind == 1:
            e = (m >> off) & mask
            if e:
                xs[v.j] = e
                rest -= e << off
                deg += e
    rest -= deg << f_ring.deg_shift
    return xs, rest


class MixedVolume:
    """``W`` for one decomposition and one coefficient matrix."""

    def __init__(self, complex_: SimplicialComplex, orientation: Orientation,
                 decomposition: ConeDecomposition, matrix: GenericMatrix):
        self.complex = complex_
        self.orientation = orientation
        self.decomposition = decomposition
        self.matrix = matrix
        self.field = matrix.field
        self.n = complex_.n
        self.pieces = [SimplexEvaluator.build(matrix, p.columns) for p in decomposition.pieces]
        x_vars = [X(j) for j in range(1, complex_.num_vertices + 1)]
        self.xring = PolyRing(self.field, list(matrix.ring.vars) + x_vars)
        self._by_vertex: dict[int, list[int]] = {}
        for k, p in enumerate(self.pieces):
            for j in p.live_columns:
                self._by_vertex.setdefault(j, []).append(k)

    @property
    def mode(self) -> str:
        return self.matrix.mode

    @property
    def symbolic(self) -> bool:
        return not self.matrix.is_specialized

    def degenerate_pieces(self) -> list[int]:
        return [k for k, p in enumerate(self.pieces) if p.c.is_zero()]

    # polynomials in x ----------------------------------------------------------
    def x(self, j: int) -> MultiPoly:
        return self.xring.x(j)

    def l(self) -> MultiPoly:
        return sum((self.xring.x(j) for j in range(1, self.complex.num_vertices + 1)), self.xring.zero())

    def theta(self, i: int) -> MultiPoly:
        """``theta_i = sum_j a[i,j] x_j`` over the vertices of the complex."""
        out = self.xring.zero()
        for j in range(1, self.complex.num_vertices + 1):
            out = out + self.matrix.entries[(i, j)].to_ring(self.xring) * self.xring.x(j)
        return out

    def monomial(self, exps: Mapping[int, int]) -> MultiPoly:
        return MultiPoly(self.xring, {self.xring.monomial({X(j): e for j, e in exps.items()}): self.field.one})

    def coerce(self, f: MultiPoly) -> MultiPoly:
        return f if f.ring == self.xring else f.to_ring(self.xring)

    # evaluation ------------------------------------------------------------------
    def pieces_for(self, exps: Mapping[int, int]) -> list[int]:
        support = [j for j, e in exps.items() if e]
        if not support:
            return list(range(len(self.pieces)))
        cand = set(self._by_vertex.get(support[0], ()))
        for j in support[1:]:
            cand &= set(self._by_vertex.get(j, ()))
        return sorted(cand)

    def _piece_monomial(self, k: int, exps: Mapping[int, int]):
        """``ev(x^J)/c`` for piece ``k``: a FactoredFrac (symbolic) or raw value (specialized)."""
        piece = self.pieces[k]
        powers = piece.laurent(exps)
        if not powers:
            return None
        F = self.field
        if not self.symbolic:
            val = F.one
            for j, e in powers.items():
                if e:
                    x = piece.X_raw(j)
                    val = F.mul(val, F.pow(x, e) if e > 0 else F.inv(F.pow(x, -e)))
            return val
        scalar = F.one
        num = self.matrix.ring.one()
        den: dict[MultiPoly, int] = {}
        for j, e in powers.items():
            if not e:
                continue
            u, key = piece.unit_and_key(j)
            scalar = F.mul(scalar, F.pow(u, e) if e > 0 else F.inv(F.pow(u, -e)))
            if key is None:
                continue
            if e > 0:
                num = num * key ** e
            else:
                den[key] = den.get(key, 0) - e
        return FactoredFrac(num.scale(scalar), den)

    def evaluate_monomial(self, exps: Mapping[int, int], reduce: bool = True):
        exps = {j: e for j, e in exps.items() if e}
        if sum(exps.values()) != self.n:
            raise ValueError(f"W is defined on degree {self.n}, got degree {sum(exps.values())}")
        F = self.field
        if not self.symbolic:
            total = F.zero
            for k in self.pieces_for(exps):
                v = self._piece_monomial(k, exps)
                if v is not None:
                    total = F.add(total, v)
            return total
        total = FactoredFrac(self.matrix.ring.zero())
        for k in self.pieces_for(exps):
            v = self._piece_monomial(k, exps)
            if v is not None:
                total = total + v
        return total.reduce() if reduce else total

    def evaluate(self, f: MultiPoly, reduce: bool = True):
        """``W(f)`` for ``f`` homogeneous of degree n in the x-variables (parameter coefficients allowed)."""
        f = self.coerce(f)
        ring = self.xring
        groups: dict[tuple, dict] = {}
        for m, c in f.terms.items():
            xs, rest = x_exponents(ring, m)
            if sum(xs.values()) != self.n:
                raise ValueError(f"W is defined on degree {self.n} in x; got a term of degree {sum(xs.values())}")
            groups.setdefault(tuple(sorted(xs.items())), {})[rest] = c
        F = self.field
        if not self.symbolic:
            total = F.zero
            for key, coeff in groups.items():
                w = self.evaluate_monomial(dict(key))
                if F.is_zero(w):
                    continue
                cval = MultiPoly(ring, coeff).constant_coeff()
                total = F.add(total, F.mul(cval, w))
            return total
        prm = self.matrix.ring
        total = FactoredFrac(prm.zero())
        for key, coeff in groups.items():
            w = self.evaluate_monomial(dict(key), reduce=False)
            if w.is_zero():
                continue
            cpoly = MultiPoly(ring, coeff).to_ring(prm)
            total = total + w * cpoly
        return total.reduce() if reduce else total

    def evaluate_via_ev(self, f: MultiPoly):
        """Oracle path: apply each piece's evaluation homomorphism to the whole of ``f``."""
        f = self.coerce(f)
        F = self.field
        if not self.symbolic:
            total = F.zero
            for p in self.pieces:
                e = p.ev(f).constant_coeff()
                total = F.add(total, F.div(e, p.c.constant_coeff()))
            return total
        total = FactoredFrac(self.matrix.ring.zero())
        for p in self.pieces:
            den: dict[MultiPoly, int] = {}
            scalar = F.one
            for j in p.columns:
                u, key = p.unit_and_key(j)
                scalar = F.mul(scalar, u)
                if key is not None:
                    den[key] = den.get(key, 0) + 1
            total = total + FactoredFrac(p.ev(f).scale(F.inv(scalar)), den)
        return total.reduce()

    def piece_values(self, f: MultiPoly) -> list:
        """Per-piece summands ``ev(f)/c`` (field values or FactoredFracs)."""
        f = self.coerce(f)
        out = []
        F = self.field
        for p in self.pieces:
            if not self.symbolic:
                out.append(F.div(p.ev(f).constant_coeff(), p.c.constant_coeff()))
            else:
                out.append(FactoredFrac(p.ev(f), {}) * FactoredFrac(self.matrix.ring.one(), _den_of(p)))
        return out


def _den_of(p: SimplexEvaluator) -> dict:
    return {p.c.monic(): 1} if not p.c.is_constant() else {}


# --- builders ----------------------------------------------------------------------

@dataclass(frozen=True)
class MixedVolumeConfig:
    """How to realize the coefficient matrix."""

    mode: str = "symbolic"  # symbolic | specialized | hybrid | gauge
    seed: int | None = None
    symbolic_vars: tuple[VarId, ...] = ()
    gauge_facet: tuple[int, ...] | None = None
    decomposition: str | int = "fresh_apex"


def matrix_columns(c: SimplicialComplex, decomposition: str | int = "fresh_apex") -> tuple[int, ...]:
    cols = tuple(range(1, c.num_vertices + 1))
    return (0,) + cols if decomposition in ("fresh_apex", "fresh", 0) else cols


def build_mixed_volume(c: SimplicialComplex, orientation: Orientation, field: Field,
                       config: MixedVolumeConfig = MixedVolumeConfig(),
                       matrix: GenericMatrix | None = None) -> MixedVolume:
    """Build ``W``; specialized and hybrid modes redraw on a vanishing ``c`` up to 16 times."""
    d = cone_decomposition(c, orientation, config.decomposition)
    n = c.n
    if matrix is not None:
        mv = MixedVolume(c, orientation, d, matrix)
        if mv.degenerate_pieces():
            raise DegenerateSpecialization("supplied matrix gives a vanishing c")
        return mv
    cols = tuple(range(0, c.num_vertices + 1))
    if config.mode == "symbolic":
        used = matrix_columns(c, config.decomposition)
        return MixedVolume(c, orientation, d, GenericMatrix.symbolic(field, n, used))
    if config.mode == "gauge":
        facet = config.gauge_facet or c.facets[0]
        return MixedVolume(c, orientation, d, GenericMatrix.gauge(field, n, cols, facet))
    if config.mode in ("specialized", "hybrid"):
        if config.seed is None:
            raise ValueError("specialized mode needs a seed")
        rng = make_rng(config.seed)
        for attempt in range(MAX_REDRAWS):
            m = GenericMatrix.draw(field, n, cols, rng, config.symbolic_vars)
            mv = MixedVolume(c, orientation, d, m)
            if not mv.degenerate_pieces():
                mv.redraws = attempt
                return mv
        raise DegenerateSpecialization(f"c vanished on {MAX_REDRAWS} draws; the field is too small")
    raise ValueError(f"unknown mode {config.mode!r}")


def rebase(mv: MixedVolume, decomposition: str | int) -> MixedVolume:
    """Same coefficient matrix, different cone decomposition."""
    d = cone_decomposition(mv.complex, mv.orientation, decomposition)
    return MixedVolume(mv.complex, mv.orientation, d, mv.matrix)


def check_apex_independence(mv: MixedVolume, monomials: Iterable[Mapping[int, int]], seeds: Sequence[int] = (1, 2)) -> bool:
    """Compare ``W(x_J)`` after two random specializations of the apex column."""
    if mv.decomposition.apex != 0:
        raise ValueError("apex independence concerns the fresh-apex decomposition")
    ring = mv.matrix.ring
    apex_vars = [v for v in ring.vars if v.kind == 0 and v.j == 0]
    if not apex_vars:
        raise ValueError("apex variables must be symbolic")
    draws = []
    for s in seeds:
        rng = make_rng(s)
        draws.append({v: ring.raw_const(mv.field.random(rng)) for v in apex_vars})
    for exps in monomials:
        w = mv.evaluate_monomial(exps)
        vals = [_substitute_frac(w, sub) for sub in draws]
        if not vals[0].equals(vals[1]):
            return False
    return True


def _substitute_frac(w: FactoredFrac, sub: Mapping[VarId, MultiPoly]) -> FactoredFrac:
    den = {}
    num = w.num.substitute(sub)
    for f, e in w.den.items():
        g = f.substitute(sub)
        if g.is_zero():
            raise DegenerateSpecialization("apex specialization kills a denominator factor")
        den[g] = den.get(g, 0) + e
    return FactoredFrac(num, den)


def apex_variables(mv: MixedVolume) -> list[VarId]:
    return [v for v in mv.matrix.ring.vars if v.j == mv.decomposition.apex and v.kind == 0]
