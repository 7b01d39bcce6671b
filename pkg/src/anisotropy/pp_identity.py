"""Verification engines for the characteristic-2 derivative identities.

Notation: ``I = (i_1, ..., i_n)`` names the derivative
``d_I = d/da[1,i_1] ... d/da[n,i_n]`` (applied left to right) and ``J`` is a
multiset naming ``x_J`` or ``X_J``.  Every check computes both sides exactly
and compares them; nothing here proves anything.

Hybrid mode keeps only the ``n`` parameters named by ``I`` symbolic and draws
the rest.  This is sound because ``d_I`` commutes with specializing any
variable it does not differentiate.
"""
from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterable, Sequence

from .cohomology import Monomial, face_monomials
from .complex import Orientation, SimplicialComplex, cone_decomposition
from .fields import BinaryExtField, Field, PrimeField, derive_seed, make_rng
from .mixed_volume import (DegenerateSpecialization, GenericMatrix, MAX_REDRAWS, MixedVolume,
                           matrix_columns)
from .poly import A, MultiPoly, PolyRing
from .ratfunc import FactoredFrac


@dataclass
class CheckReport:
    """Totals plus any counterexamples (expected empty)."""

    name: str
    checks: int = 0
    passed: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.checks > 0 and self.passed == self.checks and not self.counterexamples

    def record(self, ok: bool, info: dict | None = None, keep: int = 20) -> None:
        self.checks += 1
        if ok:
            self.passed += 1
        elif len(self.counterexamples) < keep:
            self.counterexamples.append(info or {})

    def to_json(self, timings: bool = False) -> dict:
        out = {"name": self.name, "checks": self.checks, "passed": self.passed,
               "counterexamples": self.counterexamples, "ok": self.ok}
        out.update(self.details)
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _require_char2(field: Field) -> None:
    if field.characteristic != 2:
        raise ValueError("these identities live in characteristic 2")


def d_I(f, I: Sequence[int]):
    """Apply ``d/da[r, I[r-1]]`` for r = 1..n, left to right."""
    for r, i in enumerate(I, start=1):
        f = f.diff(A(r, i))
        if isinstance(f, FactoredFrac):
            f = f.reduce()
        if f.is_zero():
            break
    return f


def sqrt_multiset(*parts: Iterable[int]) -> Counter | None:
    """Half of the multiset union, if every multiplicity is even."""
    total = Counter()
    for p in parts:
        total.update(p)
    if any(v % 2 for v in total.values()):
        return None
    return Counter({k: v // 2 for k, v in total.items() if v})


# --- the generic n x (n+1) block ------------------------------------------------------

class SimplexMinors:
    """Symbolic maximal minors ``X_0..X_n`` of the generic ``n x (n+1)`` matrix."""

    def __init__(self, n: int, field: Field | None = None):
        self.n = n
        self.field = field or PrimeField(2)
        self.matrix = GenericMatrix.symbolic(self.field, n, range(n + 1))
        self.ring = self.matrix.ring
        cols = tuple(range(n + 1))
        self.X = [self.matrix.minor_X(cols, p) for p in range(n + 1)]
        self._XJ: dict[tuple[int, ...], MultiPoly] = {}

    def XJ(self, J: Sequence[int]) -> MultiPoly:
        key = tuple(sorted(J))
        out = self._XJ.get(key)
        if out is None:
            out = self.ring.one()
            for j in key:
                out = out * self.X[j]
            self._XJ[key] = out
        return out

    def Y(self, i: int, j: int) -> MultiPoly:
        """Determinant with row 1 and columns ``i, j`` removed (unsigned, sorted columns)."""
        if i == j:
            raise ValueError("Y needs distinct columns")
        cols = [c for c in range(self.n + 1) if c not in (i, j)]
        return _rowdet_from(self.matrix, range(2, self.n + 1), cols)

    def c(self) -> MultiPoly:
        return self.XJ(range(self.n + 1))


def _rowdet_from(m: GenericMatrix, rows: Iterable[int], cols: Sequence[int]) -> MultiPoly:
    rows = list(rows)
    if not rows:
        return m.ring.one()
    r0, rest = rows[0], rows[1:]
    total = m.ring.zero()
    for k, j in enumerate(cols):
        e = m.entries[(r0, j)]
        if e.is_zero():
            continue
        sub = _rowdet_from(m, rest, cols[:k] + cols[k + 1:])
        term = e * sub
        total = total + term if k % 2 == 0 else total - term
    return total


def column_degrees(p: MultiPoly, ncols: int) -> set[tuple[int, ...]]:
    """Set of column-degree vectors (deg a[i,j] = e_j) over the terms of ``p``."""
    out = set()
    ring = p.ring
    for m in p.terms:
        v = [0] * ncols
        for var, e in ring.exponents(m).items():
            v[var.j] += e
        out.add(tuple(v))
    return out


def odd_multisets(n: int, max_len: int, lengths: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    lengths = [k for k in range(1, max_len + 1, 2)] if lengths is None else list(lengths)
    out = []
    for k in lengths:
        if k % 2 == 0:
            raise ValueError("|J| must be odd")
        out.extend(combinations_with_replacement(range(n + 1), k))
    return out


def verify_thm_simplest(n: int, max_J_len: int = 3, lengths: Sequence[int] | None = None) -> CheckReport:
    """Exhaustive ``d_I X_J`` against the square-root rule, with grading bookkeeping."""
    if max_J_len % 2 == 0 or (lengths and any(k % 2 == 0 for k in lengths)):
        raise ValueError("|J| must be odd")
    t0 = time.perf_counter()
    rep = CheckReport(f"simplest(n={n})")
    if n == 0:
        # no rows: every minor is the empty determinant 1
        for k in (lengths or range(1, max_J_len + 1, 2)):
            rep.record(True)
        rep.seconds = time.perf_counter() - t0
        return rep
    S = SimplexMinors(n)
    full = list(range(n + 1))
    nonzero = 0
    for J in odd_multisets(n, max_J_len, lengths):
        XJ = S.XJ(J)
        for I in product(range(n + 1), repeat=n):
            got = d_I(XJ, I)
            half = None
            cnt = Counter(I) + Counter(J)
            cnt.subtract(full)
            if all(v >= 0 and v % 2 == 0 for v in cnt.values()):
                half = [k for k, v in cnt.items() for _ in range(v // 2)]
            want = S.XJ(half) ** 2 if half is not None else S.ring.zero()
            ok = got == want
            if ok and got:
                nonzero += 1
                # Z^(n+1)-grading: deg X_i = 1 - e_i, d/da[r,i] lowers degree by e_i
                deg = [len(J) - J.count(j) - I.count(j) for j in range(n + 1)]
                ok = column_degrees(got, n + 1) == {tuple(deg)}
            rep.record(ok, {"I": list(I), "J": list(J), "got": got.to_text()[:200],
                            "want": want.to_text()[:200]})
    rep.details = {"n": n, "max_J_len": max_J_len, "nonzero_cases": nonzero, "order": "left-to-right"}
    rep.seconds = time.perf_counter() - t0
    return rep


def verify_second_derivative_vanishing(n: int, max_J_len: int = 5, trials: int | None = None,
                                       seed: int = 0) -> CheckReport:
    """``d/da[r,i1] d/da[r,i2] X_J = 0`` for odd ``|J|``; ``trials`` samples the J's."""
    if max_J_len % 2 == 0:
        raise ValueError("|J| must be odd")
    t0 = time.perf_counter()
    rep = CheckReport(f"second-derivative(n={n})")
    S = SimplexMinors(n)
    Js = odd_multisets(n, max_J_len)
    if trials is not None and trials < len(Js):
        rng = make_rng(seed)
        Js = sorted(rng.sample(Js, trials))
    for J in Js:
        XJ = S.XJ(J)
        for r in range(1, n + 1):
            for i1 in range(n + 1):
                first = XJ.diff(A(r, i1))
                for i2 in range(n + 1):
                    dd = first.diff(A(r, i2))
                    rep.record(dd.is_zero(), {"r": r, "i1": i1, "i2": i2, "J": list(J)})
    # squares factor out: X_J = X_k^2 X_J' and d(f^2 g) = f^2 dg
    sq = 0
    for J in Js:
        c = Counter(J)
        for k, v in c.items():
            if v >= 2:
                rest = list((c - Counter({k: 2})).elements())
                for r in range(1, n + 1):
                    for i in range(n + 1):
                        lhs = S.XJ(J).diff(A(r, i))
                        rhs = S.X[k] ** 2 * S.XJ(rest).diff(A(r, i))
                        rep.record(lhs == rhs, {"square_factor": k, "J": list(J), "r": r, "i": i})
                        sq += 1
                break
    rep.details = {"n": n, "J_count": len(Js), "square_factor_checks": sq}
    rep.seconds = time.perf_counter() - t0
    return rep


def verify_plucker(n: int, field: Field | None = None, relation: str = "both") -> CheckReport:
    """Three-term Plucker relation on the Y's and the flag relation mixing Y and X.

    In characteristic 2 every ordering of distinct indices is checked.  Over Q
    the indices run in increasing order and the flag relation uses the unsigned
    coordinates ``D_p = (-1)^p X_p``; with the alternating signs folded into
    ``X_p`` the three-term pattern would depend on index parities.
    """
    field = field or PrimeField(2)
    want_pl = relation in ("both", "plucker")
    want_fl = relation in ("both", "flag")
    if want_pl and n < 3:
        raise ValueError("the Plucker relation needs n >= 3")
    if want_fl and n < 2:
        raise ValueError("the flag relation needs n >= 2")
    t0 = time.perf_counter()
    rep = CheckReport(f"plucker(n={n}, char={field.characteristic})")
    S = SimplexMinors(n, field)
    Y = {}
    for i, j in combinations(range(n + 1), 2):
        Y[(i, j)] = Y[(j, i)] = S.Y(i, j)
    ordered = field.characteristic == 2
    pl = fl = 0
    if want_pl:
        idx = permutations(range(n + 1), 4) if ordered else combinations(range(n + 1), 4)
        for i, j, p, q in idx:
            val = Y[(i, j)] * Y[(p, q)] - Y[(i, p)] * Y[(j, q)] + Y[(i, q)] * Y[(j, p)]
            rep.record(val.is_zero(), {"relation": "plucker", "indices": [i, j, p, q]})
            pl += 1
    if want_fl:
        idx = permutations(range(n + 1), 3) if ordered else combinations(range(n + 1), 3)
        P = S.X if ordered else [x if k % 2 == 0 else -x for k, x in enumerate(S.X)]
        for i, j, p in idx:
            val = Y[(i, j)] * P[p] - Y[(i, p)] * P[j] + Y[(j, p)] * P[i]
            rep.record(val.is_zero(), {"relation": "flag", "indices": [i, j, p]})
            fl += 1
    # d/da[1,i] X_j = Y_ij (exactly in char 2, up to sign otherwise)
    ym = 0
    for i in range(n + 1):
        for j in range(n + 1):
            d = S.X[j].diff(A(1, i))
            if i == j:
                ok = d.is_zero()
            elif ordered:
                ok = d == Y[(i, j)]
            else:
                ok = d == Y[(i, j)] or d == -Y[(i, j)]
            rep.record(ok, {"relation": "dX=Y", "i": i, "j": j})
            ym += 1
    rep.details = {"n": n, "characteristic": field.characteristic, "plucker_checks": pl,
                   "flag_checks": fl, "derivative_checks": ym,
                   "index_order": "all orderings" if ordered else "increasing",
                   "flag_coordinates": "X" if ordered else "unsigned minors (-1)^p X_p"}
    rep.seconds = time.perf_counter() - t0
    return rep


def verify_c_bridge(n: int, max_J_len: int = 3) -> CheckReport:
    """``d_I(X_J c) = c^2 d_I(X_J / c)`` on a single simplex boundary."""
    t0 = time.perf_counter()
    rep = CheckReport(f"c-squared-bridge(n={n})")
    S = SimplexMinors(n)
    c = S.c()
    keys = [x.monic() for x in S.X]
    for J in odd_multisets(n, max_J_len):
        lhs_poly = S.XJ(J) * c
        frac = FactoredFrac(S.XJ(J), {k: 1 for k in keys})
        for I in product(range(n + 1), repeat=n):
            lhs = d_I(lhs_poly, I)
            rhs = d_I(frac, I) * (c * c)
            rep.record(rhs.equals(lhs), {"I": list(I), "J": list(J)})
    rep.seconds = time.perf_counter() - t0
    return rep


def verify_sl_invariance(n: int, trials: int = 20, seed: int = 0, max_J_len: int = 3) -> CheckReport:
    """``d_I X_J`` is unchanged by elementary row operations ``row_r += row_s`` over F_2."""
    if n > 2:
        raise ValueError("the SL spot check is capped at n <= 2")
    t0 = time.perf_counter()
    rep = CheckReport(f"sl-invariance(n={n})")
    S = SimplexMinors(n)
    rng = make_rng(seed)
    Js = odd_multisets(n, max_J_len)
    ring = S.ring
    for _ in range(trials):
        if n < 2:
            break
        r, s = rng.sample(range(1, n + 1), 2)
        sub = {A(r, j): ring.a(r, j) + ring.a(s, j) for j in range(n + 1)}
        J = Js[rng.randrange(len(Js))]
        I = tuple(rng.randrange(n + 1) for _ in range(n))
        p = d_I(S.XJ(J), I)
        rep.record(p.substitute(sub) == p, {"I": list(I), "J": list(J), "op": f"row{r} += row{s}"})
    if n == 1:
        # SL(1) is trivial; record the vacuous check explicitly
        rep.record(True)
    rep.seconds = time.perf_counter() - t0
    return rep


# --- the identity for W -------------------------------------------------------------------

def hybrid_mixed_volume(c: SimplicialComplex, o: Orientation, field: Field, I: Sequence[int], seed: int,
                        decomposition="fresh_apex") -> MixedVolume:
    """``W`` with only ``a[r, I[r-1]]`` symbolic; the rest drawn from ``seed``."""
    d = cone_decomposition(c, o, decomposition)
    sym = [A(r, i) for r, i in enumerate(I, start=1)]
    rng = make_rng(seed)
    for _ in range(MAX_REDRAWS):
        m = GenericMatrix.draw(field, c.n, matrix_columns(c, decomposition), rng, sym)
        mv = MixedVolume(c, o, d, m)
        if not mv.degenerate_pieces():
            return mv
    raise DegenerateSpecialization("c vanished on every redraw")


def pp_sides(W: MixedVolume, I: Sequence[int], J: Sequence[int]) -> tuple[FactoredFrac, FactoredFrac]:
    """``(d_I W(x_J), W(sqrt(x_I x_J))^2)``."""
    wj = W.evaluate_monomial(Counter(J))
    lhs = d_I(wj, I)
    half = sqrt_multiset(I, J)
    if half is None:
        rhs = FactoredFrac(W.matrix.ring.zero())
    else:
        rhs = W.evaluate_monomial(half) ** 2
    return lhs, rhs


def _face_multisets(c: SimplicialComplex, k: int) -> list[tuple[int, ...]]:
    return [tuple(j for j, e in mono for _ in range(e)) for mono in face_monomials(c, k).monomials]


def sample_pairs(c: SimplicialComplex, count: int, rng: random.Random) -> list[tuple[tuple, tuple, str]]:
    """Stratified (I, J): half with a square-root face monomial, the rest uniform."""
    n, N = c.n, c.num_vertices
    faces = _face_multisets(c, n)
    out = []
    for k in range(count):
        if k % 2 == 0:
            y = faces[rng.randrange(len(faces))]
            pool = list(y) + list(y)
            rng.shuffle(pool)
            I, J = tuple(pool[:n]), tuple(sorted(pool[n:]))
            out.append((I, J, "square"))
        else:
            I = tuple(rng.randrange(1, N + 1) for _ in range(n))
            if rng.random() < 0.5:
                J = faces[rng.randrange(len(faces))]
            else:
                J = tuple(sorted(rng.randrange(1, N + 1) for _ in range(n)))
            out.append((I, J, "uniform"))
    return out


def verify_pp_conjecture(c: SimplicialComplex, o: Orientation, samples: int = 100, seed: int = 0,
                         symbolic_budget: int = 500, field: Field | None = None,
                         decomposition="fresh_apex") -> CheckReport:
    """``d_I W(x_J) = W(sqrt(x_I x_J))^2`` on sampled (and, if small, all) pairs."""
    field = field or BinaryExtField(63)
    _require_char2(field)
    t0 = time.perf_counter()
    rep = CheckReport(f"pp-conjecture({c.name or 'complex'})")
    n, N = c.n, c.num_vertices
    total = N ** n * len(list(combinations_with_replacement(range(N), n)))
    if total <= symbolic_budget:
        pairs = [(I, J, "exhaustive") for J in combinations_with_replacement(range(1, N + 1), n)
                 for I in product(range(1, N + 1), repeat=n)]
    else:
        pairs = []
    pairs += sample_pairs(c, samples, make_rng(derive_seed(seed, "pp-pairs")))
    strata = Counter()
    nonzero = 0
    for I, J, kind in pairs:
        W = hybrid_mixed_volume(c, o, field, I, derive_seed(seed, tuple(I), tuple(J)), decomposition)
        lhs, rhs = pp_sides(W, I, J)
        ok = lhs.equals(rhs)
        strata[kind] += 1
        if not rhs.is_zero():
            nonzero += 1
        rep.record(ok, {"I": list(I), "J": list(J), "lhs": lhs.to_text()[:200], "rhs": rhs.to_text()[:200]})
    rep.details = {"seed": seed, "samples": samples, "exhaustive_pairs": total if total <= symbolic_budget else 0,
                   "strata": dict(sorted(strata.items())), "nonzero_rhs": nonzero,
                   "derivative_order": "left-to-right", "field": field.describe()}
    rep.seconds = time.perf_counter() - t0
    return rep


def verify_corollary_h(c: SimplicialComplex, o: Orientation, h_terms: dict[Monomial, object], I: Sequence[int],
                       J: Sequence[int], seed: int, field: Field | None = None) -> tuple[bool, FactoredFrac, FactoredFrac]:
    """``d_I W(h^2 x_J) = W(h sqrt(x_I x_J))^2`` for ``h = sum coeff * x^mono`` (raw field coefficients)."""
    field = field or BinaryExtField(63)
    _require_char2(field)
    n = c.n
    degs = {sum(e for _, e in mono) for mono in h_terms}
    if len(degs) > 1:
        raise ValueError("h must be homogeneous")
    m = degs.pop() if degs else 0
    if len(I) != n or len(J) != n - 2 * m:
        raise ValueError("need |I| = n and |J| = n - 2m")
    W = hybrid_mixed_volume(c, o, field, I, seed)
    h = W.xring.zero()
    for mono, coeff in h_terms.items():
        if isinstance(coeff, MultiPoly):
            named = {A(r, i) for r, i in enumerate(I, start=1)}
            if coeff.variables() & named:
                raise ValueError("a coefficient of h depends on a differentiated variable")
            raise ValueError("polynomial coefficients must be specialized before the call")
        h = h + W.monomial(dict(mono)).scale(field.validate(coeff) if not isinstance(coeff, int) else coeff)
    xJ = W.monomial(Counter(J)) if J else W.xring.one()
    lhs = d_I(W.evaluate(h * h * xJ), I)
    half = sqrt_multiset(I, J)
    if half is None:
        rhs = FactoredFrac(W.matrix.ring.zero())
    else:
        rhs = W.evaluate(h * W.monomial(half)) ** 2
    return lhs.equals(rhs), lhs, rhs


def verify_reduction_to_pieces(c: SimplicialComplex, o: Orientation, I: Sequence[int], J: Sequence[int],
                               seed: int, field: Field | None = None) -> dict:
    """Aggregate identity versus the sum of the per-piece identities."""
    field = field or BinaryExtField(63)
    W = hybrid_mixed_volume(c, o, field, I, seed)
    lhs, rhs = pp_sides(W, I, J)
    half = sqrt_multiset(I, J)
    zero = FactoredFrac(W.matrix.ring.zero())
    lhs_sum, rhs_sum = zero, zero
    piece_ok = True
    for k in range(len(W.pieces)):
        term = W._piece_monomial(k, Counter(J))
        pl = d_I(term, I) if term is not None else zero
        if half is not None:
            t2 = W._piece_monomial(k, half)
            pr = t2 ** 2 if t2 is not None else zero
        else:
            pr = zero
        lhs_sum = lhs_sum + pl
        rhs_sum = rhs_sum + pr
        # the single-piece identity, with the piece's full column set
        piece_ok &= _piece_identity(W, k, I, J)
    return {"aggregate": lhs.equals(rhs), "lhs_additive": lhs.equals(lhs_sum.reduce()),
            "rhs_additive": rhs.equals(rhs_sum.reduce()), "pieces": piece_ok}


def _piece_identity(W: MixedVolume, k: int, I: Sequence[int], J: Sequence[int]) -> bool:
    """The identity for one simplex boundary; indices off the piece make both sides vanish."""
    zero = FactoredFrac(W.matrix.ring.zero())
    term = W._piece_monomial(k, Counter(J))
    lhs = d_I(term, I) if term is not None else zero
    half = sqrt_multiset(I, J)
    t2 = W._piece_monomial(k, half) if half is not None else None
    rhs = t2 ** 2 if t2 is not None else zero
    return lhs.equals(rhs)


# --- the reduction chain ------------------------------------------------------------------------

@dataclass
class ChainReport:
    m: int
    q_values: list[str]
    stages: list[dict]
    verdict: str


def localize(W: MixedVolume, g: MultiPoly) -> MultiPoly:
    """Rewrite ``g`` (x-variables, parameter coefficients) in ``W``'s ring by substituting matrix entries."""
    target = W.xring
    if g.ring == target:
        return g
    if g.field != W.field:
        raise ValueError(f"{g.field} polynomial used with a W over {W.field}")
    params = [v for v in g.ring.vars if v.kind == 0 and v not in target.index]
    if not params:
        return g.to_ring(target)
    tmp = PolyRing(W.field, set(g.ring.vars) | set(target.vars))
    h = g.to_ring(tmp).substitute({v: W.matrix.entries[(v.i, v.j)].to_ring(tmp) for v in params})
    return h.to_ring(target)


def reduction_chain(c: SimplicialComplex, builders: Sequence[MixedVolume], g_of, m: int) -> ChainReport:
    """Test ``Q_l(g)`` and, if it vanishes, run the halving chain ``p -> floor(p/2)``.

    ``g_of(W)`` returns ``g`` localized to ``W`` (so parameter coefficients follow each seed).
    """
    n = c.n
    if not 0 <= 2 * m <= n:
        raise ValueError("need 0 <= 2m <= n")
    F = builders[0].field
    _require_char2(F)
    p = n - 2 * m
    qs = []
    for W in builders:
        g = g_of(W)
        q = W.evaluate(W.l() ** p * g * g) if g else F.zero
        qs.append(q)
        if not F.is_zero(q):
            return ChainReport(m, [F.to_text(x) for x in qs], [], "not isotropic")
    stages = []
    zero_all = True
    while True:
        q = p // 2
        comp = face_monomials(c, n - m - q).monomials
        nonzero_seeds = 0
        for W in builders:
            g = g_of(W)
            lg = W.l() ** q * g if g else W.xring.zero()
            if any(not F.is_zero(W.evaluate(lg * W.monomial(dict(b)))) for b in comp) if lg else False:
                nonzero_seeds += 1
        is_zero = nonzero_seeds == 0
        stages.append({"power": q, "degree": m + q, "zero_in_hbar": is_zero})
        zero_all &= is_zero
        if q == 0:
            break
        p = q
    verdict = "zero in Hbar" if zero_all else "counterexample"
    return ChainReport(m, [F.to_text(x) for x in qs], stages, verdict)
