"""Property checks over whole complexes, shared by the CLI, the tests and the scripts."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .cohomology import (all_monomials, anisotropy_spot_test, face_monomials, hbar_dimensions,
                         lefschetz_rank_check, q_direct, quadratic_form, random_form_element,
                         reduce_mod2, specialize_char0_to_char2)
from .complex import Orientation, SimplicialComplex, compute_orientation
from .fields import QQ, BinaryExtField, Field, PrimeField, derive_seed, make_rng
from .mixed_volume import (DegenerateSpecialization, GenericMatrix, MixedVolume, MixedVolumeConfig,
                           apex_variables, build_mixed_volume, check_apex_independence, rebase)
from .poly import A, MultiPoly, PolyRing, T, X
from .pp_identity import localize
from .ratfunc import FactoredFrac

# Symbolic work on generic 4x4 minors is beyond desk scale; above this n the
# symbolic checks run in the identity-block gauge only.
FULL_SYMBOLIC_MAX_N = 3


@dataclass
class Outcome:
    name: str
    ok: bool
    checks: int = 0
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self, timings: bool = False) -> dict:
        out = {"name": self.name, "ok": self.ok, "checks": self.checks}
        out.update(self.details)
        if timings:
            out["seconds"] = round(self.seconds, 3)
        return out


def _equal(a, b) -> bool:
    if isinstance(a, FactoredFrac):
        return a.equals(b)
    return a == b


def _is_zero(F: Field, w) -> bool:
    return w.is_zero() if isinstance(w, FactoredFrac) else F.is_zero(w)


def degree_n_face_monomials(c: SimplicialComplex) -> list[dict[int, int]]:
    return [dict(m) for m in face_monomials(c, c.n).monomials]


def orientation_for(c: SimplicialComplex, field: Field) -> Orientation:
    return compute_orientation(c, 2 if field.characteristic == 2 else 0)


def symbolic_modes(c: SimplicialComplex) -> list[str]:
    return ["gauge", "symbolic"] if c.n <= FULL_SYMBOLIC_MAX_N else ["gauge"]


# --- additivity across decompositions ---------------------------------------------------------

def cross_decomposition(c: SimplicialComplex, field: Field, mode: str = "gauge", seed: int | None = None) -> Outcome:
    """``W`` via the fresh apex equals ``W`` via every existing vertex, on all degree-n face monomials."""
    t0 = time.perf_counter()
    o = orientation_for(c, field)
    W = build_mixed_volume(c, o, field, MixedVolumeConfig(mode, seed=seed))
    others = [rebase(W, v) for v in c.vertices]
    checks = 0
    bad = []
    for e in degree_n_face_monomials(c):
        w0 = W.evaluate_monomial(e)
        for Wv in others:
            checks += 1
            if not _equal(w0, Wv.evaluate_monomial(e)):
                bad.append({"monomial": e, "apex": Wv.decomposition.apex})
    return Outcome(f"cross-decomposition[{mode}]", not bad, checks,
                   {"complex": c.name, "field": field.describe(), "seed": seed, "failures": bad[:10]},
                   time.perf_counter() - t0)


def ideal_annihilation(c: SimplicialComplex, field: Field, mode: str = "gauge", seed: int | None = None) -> Outcome:
    """``W(theta_i g) = 0`` and ``W(non-face) = 0`` for the fresh apex and every vertex apex."""
    t0 = time.perf_counter()
    o = orientation_for(c, field)
    W = build_mixed_volume(c, o, field, MixedVolumeConfig(mode, seed=seed))
    n = c.n
    gs = face_monomials(c, n - 1).monomials
    nonfaces = [dict(m) for m in all_monomials(c.num_vertices, n) if not c.is_face({j for j, _ in m})]
    checks = 0
    bad = []
    for Wd in [W] + [rebase(W, v) for v in c.vertices]:
        for i in range(1, n + 1):
            th = Wd.theta(i)
            for g in gs:
                checks += 1
                if not _is_zero(field, Wd.evaluate(th * Wd.monomial(dict(g)))):
                    bad.append({"theta": i, "g": dict(g), "apex": Wd.decomposition.apex})
        for e in nonfaces:
            checks += 1
            if not _is_zero(field, Wd.evaluate_monomial(e)):
                bad.append({"nonface": e, "apex": Wd.decomposition.apex})
    return Outcome(f"ideal-annihilation[{mode}]", not bad, checks,
                   {"complex": c.name, "field": field.describe(), "nonface_monomials": len(nonfaces),
                    "failures": bad[:10]}, time.perf_counter() - t0)


def apex_independence(c: SimplicialComplex, field: Field) -> Outcome:
    """Fully symbolic ``W`` values carry no apex variable once reduced, and agree under two apex draws."""
    t0 = time.perf_counter()
    o = orientation_for(c, field)
    W = build_mixed_volume(c, o, field, MixedVolumeConfig("symbolic"))
    apex = set(apex_variables(W))
    mons = degree_n_face_monomials(c)
    checks = 0
    bad = []
    for e in mons:
        w = W.evaluate_monomial(e)
        checks += 1
        if w.variables() & apex:
            bad.append(e)
    draws_agree = check_apex_independence(W, mons)
    return Outcome("apex-independence", not bad and draws_agree, checks + 1,
                   {"complex": c.name, "apex_variables": sorted(map(str, apex)),
                    "two_draws_agree": draws_agree, "failures": bad[:10]}, time.perf_counter() - t0)


# --- ranks and the quadratic form --------------------------------------------------------------

def specialized(c: SimplicialComplex, field: Field, seed: int) -> MixedVolume:
    return build_mixed_volume(c, orientation_for(c, field), field, MixedVolumeConfig("specialized", seed=seed))


def rank_profile(c: SimplicialComplex, field: Field, seeds=(1, 2)) -> Outcome:
    t0 = time.perf_counter()
    Ws = [specialized(c, field, s) for s in seeds]
    dims = [hbar_dimensions(c, W) for W in Ws]
    lef = [lefschetz_rank_check(c, Ws, m) for m in range(0, c.n // 2 + 1)]
    stable = all(d == dims[0] for d in dims)
    palin = dims[0] == dims[0][::-1]
    ok = stable and all(r.passed for r in lef)
    return Outcome("rank-profile", ok, len(seeds) * (c.n + 1) + len(lef),
                   {"complex": c.name, "field": field.describe(), "seeds": list(seeds),
                    "hbar_dimensions": dims[0], "seed_stable": stable, "palindromic": palin,
                    "lefschetz": [{"m": r.m, "ranks": r.ranks, "expected": r.expected, "pass": r.passed} for r in lef]},
                   time.perf_counter() - t0)


def diagonal_vs_direct(c: SimplicialComplex, field: Field, count: int = 100, seed: int = 0) -> Outcome:
    """``Q_l`` through the diagonal form against ``W(l^(n-2m) g^2)`` for random ``g``."""
    t0 = time.perf_counter()
    W = specialized(c, field, derive_seed(seed, "diag", c.name))
    rng = make_rng(derive_seed(seed, "diag-g", c.name))
    forms = {m: quadratic_form(c, W, m) for m in range(0, c.n // 2 + 1)}
    bases = {m: face_monomials(c, m).monomials for m in forms}
    bad = 0
    nonzero = 0
    for _ in range(count):
        m = rng.randrange(len(forms))
        g = random_form_element(W, bases[m], rng)
        a, b = forms[m].evaluate(g), q_direct(W, g, m)
        bad += a != b
        nonzero += not field.is_zero(a)
    return Outcome("diagonal-vs-direct", bad == 0, count,
                   {"complex": c.name, "field": field.describe(), "mismatches": bad, "nonzero_values": nonzero},
                   time.perf_counter() - t0)


def anisotropy_suite(c: SimplicialComplex, trials: int = 200, seed: int = 0, seeds=(1, 2, 3),
                     field: Field | None = None) -> Outcome:
    t0 = time.perf_counter()
    field = field or BinaryExtField(63)
    Ws = [specialized(c, field, derive_seed(seed, "aniso", c.name, s)) for s in seeds]
    results = []
    for m in range(0, c.n // 2 + 1):
        r = anisotropy_spot_test(c, Ws, m, trials, make_rng(derive_seed(seed, "aniso-g", c.name, m)))
        results.append(r)
    ok = all(r.passed for r in results)
    return Outcome("anisotropy-spot", ok, sum(r.trials for r in results),
                   {"complex": c.name, "field": field.describe(),
                    "by_degree": [{"m": r.m, "trials": r.trials, "distinct": r.distinct, "zeros": r.zeros,
                                   "seeds_needed": r.seeds_used, "failures": r.failures[:5]} for r in results],
                    "note": "finite-field search cannot decide anisotropy; this only rules out zeros at random points"},
                   time.perf_counter() - t0)


# --- characteristic 0 -> 2 ----------------------------------------------------------------------

def _random_int_poly(ring: PolyRing, rng: random.Random, variables, terms: int, max_deg: int, bound: int) -> MultiPoly:
    out = ring.zero()
    for _ in range(terms):
        exps = {}
        for _ in range(rng.randint(0, max_deg)):
            v = rng.choice(variables)
            exps[v] = exps.get(v, 0) + 1
        out = out + MultiPoly(ring, {ring.monomial(exps): ring.field.one}).scale(ring.field.from_int(rng.randint(-bound, bound)))
    return out


def matched_t_matrices(c: SimplicialComplex, rng: random.Random, degree: int = 2, bound: int = 3,
                       field2: Field | None = None) -> tuple[GenericMatrix, GenericMatrix]:
    """``a[i,j] -> p_ij(t)`` with ``p_ij`` in Z[t] and, on the other side, ``p_ij mod 2``."""
    field2 = field2 or PrimeField(2)
    n = c.n
    cols = tuple(range(0, c.num_vertices + 1))
    R0 = PolyRing(QQ, [T()])
    R2 = PolyRing(field2, [T()])
    t0, t2 = R0.var(T()), R2.var(T())
    e0, e2 = {}, {}
    for i in range(1, n + 1):
        for j in cols:
            coeffs = [rng.randint(-bound, bound) for _ in range(degree + 1)]
            e0[(i, j)] = sum((t0 ** k * cf for k, cf in enumerate(coeffs)), R0.zero())
            e2[(i, j)] = sum((t2 ** k * (cf % 2) for k, cf in enumerate(coeffs)), R2.zero())
    return (GenericMatrix(QQ, n, cols, R0, e0, "univariate-t"),
            GenericMatrix(field2, n, cols, R2, e2, "univariate-t mod 2"))


def specialization_commutation(c: SimplicialComplex, trials: int = 50, seed: int = 0, m: int = 1) -> Outcome:
    """``Q_l(g) mod 2 = Q_l(g mod 2)`` under matched specializations ``a -> p(t)``."""
    t0 = time.perf_counter()
    rng = make_rng(derive_seed(seed, "2to0", c.name))
    o = compute_orientation(c, 0)
    for _ in range(16):
        M0, M2 = matched_t_matrices(c, rng)
        try:
            W0 = build_mixed_volume(c, o, QQ, matrix=M0)
            W2 = build_mixed_volume(c, Orientation(o.ordered_facets, 2), M2.field, matrix=M2)
        except DegenerateSpecialization:
            continue
        break
    else:
        raise DegenerateSpecialization("no matched specialization keeps every c nonzero mod 2")
    Q0, Q2 = quadratic_form(c, W0, m), quadratic_form(c, W2, m)
    params = [A(i, j) for i in range(1, c.n + 1) for j in range(1, c.num_vertices + 1)]
    gring = PolyRing(QQ, params + [X(j) for j in range(1, c.num_vertices + 1)])
    mons = face_monomials(c, m).monomials
    bad = []
    structural = 0
    for k in range(trials):
        while True:
            g = gring.zero()
            for mono in mons:
                coeff = _random_int_poly(gring, rng, params[:6], rng.randint(1, 3), 2, 3)
                g = g + coeff * MultiPoly(gring, {gring.monomial({X(j): e for j, e in mono}): 1})
            if g and any(int(v) % 2 for v in g.terms.values()):
                break
        gbar = specialize_char0_to_char2(g)
        N0, D0 = Q0.parts(localize(W0, g))
        N2, D2 = Q2.parts(localize(W2, gbar))
        n0, d0 = reduce_mod2(N0), reduce_mod2(D0)
        same = n0.terms == N2.terms and d0.terms == D2.terms
        structural += same
        # the division-free parts agree with the reduced form on each side
        q0 = Q0.evaluate(localize(W0, g))
        q2 = Q2.evaluate(localize(W2, gbar))
        ok = (same and not d0.is_zero()
              and q0.equals(FactoredFrac(N0, {D0: 1}))
              and q2.equals(FactoredFrac(N2, {D2: 1})))
        if not ok:
            bad.append(k)
    return Outcome("char0-to-char2", not bad, trials,
                   {"complex": c.name, "m": m, "structural_matches": structural, "failures": bad[:10],
                    "specialization": "a[i,j] -> p_ij(t), p_ij in Z[t] of degree 2 with coefficients in [-3,3]"},
                   time.perf_counter() - t0)

