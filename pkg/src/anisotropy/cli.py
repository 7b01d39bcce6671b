"""Command-line front end: ``anisotropy <command> [complex] [options]``.

Every command prints one JSON report (or writes it to ``--out``) and exits 0
exactly when all of its checks pass.  Errors become a report with an
``error.code`` field and exit status 2.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from . import checks
from .cohomology import (TwoContentError, face_monomials, gram_matrix, hbar_dimensions, monomial_text,
                         q_direct, quadratic_form, random_form_element)
from .complex import (ComplexError, NonOrientableError, SimplicialComplex, classify_pseudomanifold,
                      compute_orientation, cone_decomposition, fundamental_cycle, load_complex,
                      orientation_from_lists, signed_census, validate)
from .fields import (GENERATOR_VERSION, Field, FieldMismatchError, derive_seed, field_for_characteristic,
                     field_from_spec, make_rng)
from .homology import LemmaViolation, classify_sphere, reduced_homology
from .mixed_volume import DegenerateSpecialization, MixedVolumeConfig, apex_variables, build_mixed_volume
from .linalg import rank
from . import pp_identity as pp

SCHEMA_VERSION = 1
SEED_ENV = "ANISOTROPY_SEED"

EXPLAIN = {
    "validate": "Checks that the facet list is a well-formed antichain of vertex sets and reports purity.",
    "classify": "Decides the pseudo-manifold property and whether every link has the homology of a sphere "
                "over Z, over F_p for several primes, and over Q.",
    "homology": "Reduced simplicial homology from Smith normal forms of the boundary matrices.",
    "orient": "Finds facet orderings whose induced ridge signs cancel; in characteristic 2 any ordering works.",
    "decompose": "Cones every facet from a new vertex (or from an existing vertex) and checks that the signed "
                 "boundary of the pieces is the fundamental cycle.",
    "mixedvol": "Evaluates the degree-n functional W on a monomial as a sum of simplex contributions, "
                "each a Laurent monomial in signed maximal minors of the coefficient matrix.",
    "gram": "Matrix of the pairing W(x_A x_B) between degree m and degree n-m face monomials.",
    "hvector": "Dimensions of the quotient algebra read off from pairing ranks, next to the h-vector.",
    "lefschetz": "Rank of the form W(l^(n-2m) x_A x_B) on a selected basis; full rank means multiplication "
                 "by a power of the generic linear form is an isomorphism in that degree.",
    "quadform": "Evaluates Q_l(g) = W(l^(n-2m) g^2) through the diagonal form sum_i d_i ev_i(g)^2 and directly; "
                "optionally searches random points for a zero.  A finite-field search cannot prove anisotropy.",
    "specialize": "Reduces an integer-coefficient quadratic form value modulo 2 and compares it with the value "
                  "computed directly in characteristic 2.",
    "reduce-check": "For g with Q_l(g) = 0 in characteristic 2, repeatedly halves the exponent of l and tests "
                    "whether l^q g vanishes in the quotient algebra.",
    "verify-pp": "In characteristic 2, the derivative of W(x_J) along a_{1,i_1}..a_{n,i_n} equals the square of "
                 "W at the square root of x_I x_J (zero when no square root exists).  Other modes check the single "
                 "simplex case, the h-weighted variant, the Plucker relations and second derivatives.",
    "verify-additivity": "W does not depend on the cone decomposition, kills the linear system of parameters "
                         "and every non-face monomial, and the derivative identity splits over the pieces.",
    "corpus": "Lists the bundled triangulations.",
}


@dataclass
class RunConfig:
    command: str
    complex: str | None = None
    field_spec: str = "GF(2^63)"
    seed: int = 0
    options: dict = field(default_factory=dict)
    timings: bool = False


class Reporter:
    def __init__(self, cfg: RunConfig, fld: Field | None):
        self.cfg = cfg
        self.field = fld
        self.results: dict = {}
        self.checks: list[dict] = []
        self.timings: dict = {}

    def check(self, name: str, ok: bool, **details) -> bool:
        self.checks.append({"name": name, "ok": bool(ok), **details})
        return ok

    def add(self, outcome, key: str | None = None):
        data = outcome.to_json(self.cfg.timings)
        self.checks.append({"name": outcome.name if key is None else key, "ok": outcome.ok,
                            **{k: v for k, v in data.items() if k not in ("name", "ok")}})
        return outcome.ok

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def document(self) -> dict:
        config = {"seed": self.cfg.seed, "generator": GENERATOR_VERSION, "options": self.cfg.options}
        if self.cfg.complex is not None:
            config["complex"] = self.cfg.complex
        if self.field is not None:
            config["field"] = self.field.describe()
        doc = {"schema_version": SCHEMA_VERSION, "command": self.cfg.command, "config": config,
               "results": self.results, "checks": self.checks, "ok": self.ok}
        if self.cfg.timings:
            doc["timings"] = self.timings
        return doc


# --- inputs ------------------------------------------------------------------------------

def corpus_names() -> list[str]:
    root = resources.files("anisotropy") / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_complex(arg: str) -> tuple[SimplicialComplex, list | None]:
    """A path to a JSON file, or the name of a bundled complex."""
    p = Path(arg)
    if p.exists():
        return load_complex(p)
    name = arg[:-5] if arg.endswith(".json") else arg
    if name in corpus_names():
        with resources.as_file(resources.files("anisotropy") / "corpus" / f"{name}.json") as f:
            return load_complex(f)
    raise ComplexError("not_found", f"no file or bundled complex named {arg!r}")


def parse_monomial(text: str) -> dict[int, int]:
    out: Counter = Counter()
    for factor in text.replace(" ", "").split("*"):
        if not factor or factor == "1":
            continue
        base, _, exp = factor.partition("^")
        if not base.startswith("x"):
            raise ValueError(f"expected a monomial in x1, x2, ...; got {factor!r}")
        j = int(base[1:].strip("[]"))
        out[j] += int(exp or 1)
    return dict(out)


def select_field(args) -> Field:
    if getattr(args, "field", None):
        return field_from_spec(args.field)
    return field_for_characteristic(args.char, extension_degree=args.ext_degree)


def orientation(c: SimplicialComplex, stored, fld: Field):
    char = 2 if fld.characteristic == 2 else 0
    if stored and char == 0:
        return orientation_from_lists(c, stored, 0)
    return compute_orientation(c, char)


def text_of(fld: Field, w) -> str:
    return w.to_text() if hasattr(w, "to_text") else fld.to_text(w)


# --- commands ----------------------------------------------------------------------------

def cmd_validate(args, rep: Reporter):
    c, _ = resolve_complex(args.complex)
    v = validate(c)
    rep.results = {"name": c.name, "num_vertices": c.num_vertices, **asdict(v), "f_vector": c.f_vector()}
    rep.check("well_formed", True)


def cmd_classify(args, rep: Reporter):
    c, _ = resolve_complex(args.complex)
    pm = classify_pseudomanifold(c)
    sphere = classify_sphere(c)
    try:
        compute_orientation(c, 0)
        orientable = True
    except NonOrientableError:
        orientable = False
    rep.results = {"name": c.name, "pseudo_manifold": pm.is_pm, "strongly_connected": pm.strongly_connected,
                   "ridge_violations": [{"ridge": list(r), "facets": k} for r, k in pm.ridge_violations],
                   "orientable": orientable if pm.is_pm else None, "sphere": sphere.to_json()}
    rep.check("ring_implications", True)


def cmd_homology(args, rep: Reporter):
    c, _ = resolve_complex(args.complex)
    out = {}
    for ring in args.ring:
        groups = reduced_homology(c, ring)
        label = ring.upper()
        out[label] = [{"degree": g.degree, "rank": g.rank, "torsion": list(g.torsion),
                       "text": g.to_text("Z" if label == "Z" else label)} for g in groups]
    rep.results = {"name": c.name, "reduced_homology": out}
    rep.check("computed", True)


def cmd_orient(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    char = 2 if args.char == 2 else 0
    o = orientation_from_lists(c, stored, 0) if stored and char == 0 else compute_orientation(c, char)
    rep.results = {"name": c.name, "characteristic": char, "ordered_facets": [list(f) for f in o.ordered_facets]}
    rep.check("orientation", True)


def cmd_decompose(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    o = orientation(c, stored, fld)
    d = cone_decomposition(c, o, _apex(args.apex))
    census = signed_census(d, o.characteristic)
    target = fundamental_cycle(c, o)
    rep.results = {"name": c.name, "apex": d.apex, "pieces": [{"facet": list(p.facet), "columns": list(p.columns)}
                                                              for p in d.pieces]}
    rep.check("boundary_is_fundamental_cycle", census == target)


def _apex(text):
    if text in (None, "fresh", "fresh_apex"):
        return "fresh_apex"
    return int(text)


def _mv_config(mode: str, seed: int, decomposition) -> MixedVolumeConfig:
    if mode.startswith("seed:"):
        return MixedVolumeConfig("specialized", seed=int(mode[5:]), decomposition=decomposition)
    if mode == "specialized":
        return MixedVolumeConfig("specialized", seed=seed, decomposition=decomposition)
    return MixedVolumeConfig(mode, decomposition=decomposition)


def cmd_mixedvol(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    o = orientation(c, stored, fld)
    deco = _apex(args.apex)
    W = build_mixed_volume(c, o, fld, _mv_config(args.mode, args.seed, deco))
    exps = parse_monomial(args.monomial)
    if sum(exps.values()) != c.n:
        raise ValueError(f"W is defined on degree {c.n}; the monomial has degree {sum(exps.values())}")
    t0 = time.perf_counter()
    w = W.evaluate_monomial(exps)
    rep.timings["evaluate"] = round(time.perf_counter() - t0, 3)
    rep.results = {"name": c.name, "monomial": args.monomial, "mode": W.mode, "decomposition": str(deco),
                   "value": text_of(fld, w)}
    if W.symbolic and W.decomposition.apex == 0 and W.mode == "symbolic":
        left = sorted(map(str, w.variables() & set(apex_variables(W))))
        rep.results["apex_variables_remaining"] = left
        rep.check("apex_independent", not left)
    if W.symbolic:
        rep.check("nonzero_on_face" if c.is_face(set(exps)) else "zero_off_face",
                  (not w.is_zero()) == c.is_face(set(exps)))
    else:
        rep.check("computed", True)


def _specialized(c, stored, fld, seed):
    o = orientation(c, stored, fld)
    return build_mixed_volume(c, o, fld, MixedVolumeConfig("specialized", seed=seed))


def cmd_gram(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    W = _specialized(c, stored, fld, args.seed)
    g = gram_matrix(c, W, args.m)
    r = rank(fld, g.entries) if g.rows and g.cols else 0
    rep.results = {"name": c.name, "m": args.m, "rows": [monomial_text(a) for a in g.rows],
                   "cols": [monomial_text(b) for b in g.cols],
                   "entries": [[fld.to_text(x) for x in row] for row in g.entries], "rank": r}
    if 2 * args.m == c.n:
        rep.check("symmetric", g.is_symmetric())
    else:
        rep.check("computed", True)


def cmd_hvector(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    seeds = [args.seed, derive_seed(args.seed, "second")]
    dims = [hbar_dimensions(c, _specialized(c, stored, fld, s)) for s in seeds]
    h = c.h_vector()
    rep.results = {"name": c.name, "f_vector": c.f_vector(), "h_vector": h, "hbar_dimensions": dims[0],
                   "equals_h_vector": dims[0] == h, "palindromic": dims[0] == dims[0][::-1]}
    rep.check("seed_stable", dims[0] == dims[1], seeds=seeds)


def cmd_lefschetz(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    seeds = (args.seed, derive_seed(args.seed, "second"))
    out = checks.rank_profile(c, fld, seeds)
    rep.results = {k: v for k, v in out.to_json().items() if k not in ("name", "ok", "checks")}
    rep.add(out)


def cmd_quadform(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    W = _specialized(c, stored, fld, args.seed)
    m = args.m
    Q = quadratic_form(c, W, m)
    rep.results = {"name": c.name, "m": m, "power_of_l": c.n - 2 * m,
                   "diagonal": [fld.to_text(d) for d in Q.d]}
    if args.g:
        g = W.xring.parse(args.g)
        a, b = Q.evaluate(g), q_direct(W, g, m)
        rep.results["value"] = fld.to_text(a)
        rep.check("diagonal_equals_direct", a == b)
    if args.random:
        rng = make_rng(derive_seed(args.seed, "quadform"))
        mons = face_monomials(c, m).monomials
        bad = sum(Q.evaluate(g) != q_direct(W, g, m) for g in (random_form_element(W, mons, rng) for _ in range(args.random)))
        rep.check("diagonal_equals_direct_random", bad == 0, trials=args.random, mismatches=bad)
    if args.spot:
        if fld.characteristic != 2:
            raise ValueError("the spot test runs in characteristic 2")
        out = checks.anisotropy_suite(c, args.spot, args.seed, field=fld)
        rep.add(out)
    if not rep.checks:
        rep.check("computed", True)


def cmd_specialize(args, rep: Reporter):
    c, _ = resolve_complex(args.complex)
    rep.add(checks.specialization_commutation(c, args.trials, args.seed, args.m))


def cmd_reduce_check(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    seeds = [derive_seed(args.seed, "chain", k) for k in range(args.seeds)]
    Ws = [_specialized(c, stored, fld, s) for s in seeds]
    out = pp.reduction_chain(c, Ws, lambda W: W.xring.parse(args.g), args.m)
    rep.results = {"name": c.name, "g": args.g, "m": out.m, "q_values": out.q_values,
                   "stages": out.stages, "verdict": out.verdict}
    rep.check("no_counterexample", out.verdict != "counterexample")


def cmd_verify_pp(args, rep: Reporter):
    mode = args.mode
    fld = rep.field
    if mode == "simplest":
        for n in args.n:
            r = pp.verify_thm_simplest(n, args.max_j, args.lengths)
            _add_report(rep, r)
    elif mode == "second-deriv":
        for n in args.n:
            _add_report(rep, pp.verify_second_derivative_vanishing(n, args.max_j, args.samples or None, args.seed))
    elif mode == "plucker":
        for n in args.n:
            _add_report(rep, pp.verify_plucker(n, fld))
    elif mode == "conjecture":
        c, stored = resolve_complex(_need(args.complex))
        o = orientation(c, stored, fld)
        _add_report(rep, pp.verify_pp_conjecture(c, o, args.samples or 100, args.seed, field=fld))
    elif mode == "corollary":
        c, stored = resolve_complex(_need(args.complex))
        o = orientation(c, stored, fld)
        _add_report(rep, _corollary(c, o, fld, args.samples or 20, args.seed))
    else:
        raise ValueError(f"unknown mode {mode!r}")


def _need(x):
    if x is None:
        raise ValueError("this mode needs a complex")
    return x


def _corollary(c, o, fld, samples, seed):
    rep = pp.CheckReport(f"h-weighted({c.name})")
    rng = make_rng(derive_seed(seed, "corollary"))
    n, N = c.n, c.num_vertices
    t0 = time.perf_counter()
    for k in range(samples):
        m = rng.randint(1, n // 2) if n >= 2 else 0
        mons = face_monomials(c, m).monomials
        h = {mono: fld.random(rng) for mono in rng.sample(mons, min(len(mons), rng.randint(1, 3)))}
        I = tuple(rng.randrange(1, N + 1) for _ in range(n))
        J = tuple(sorted(rng.randrange(1, N + 1) for _ in range(n - 2 * m)))
        ok, lhs, rhs = pp.verify_corollary_h(c, o, h, I, J, derive_seed(seed, I, J, k), fld)
        rep.record(ok, {"I": list(I), "J": list(J), "h": {monomial_text(a): fld.to_text(b) for a, b in h.items()}})
    rep.seconds = time.perf_counter() - t0
    return rep


def _add_report(rep: Reporter, r):
    data = r.to_json(rep.cfg.timings)
    rep.results.setdefault("reports", []).append(data)
    rep.check(r.name, r.ok, checks=r.checks, counterexamples=len(r.counterexamples))


def cmd_verify_additivity(args, rep: Reporter):
    c, stored = resolve_complex(args.complex)
    fld = rep.field
    modes = [args.mode] if args.mode else (checks.symbolic_modes(c) if fld.characteristic == 2 else ["specialized"])
    for mode in modes:
        seed = args.seed if mode == "specialized" else None
        rep.add(checks.cross_decomposition(c, fld, mode, seed), f"cross_decomposition[{mode}]")
        rep.add(checks.ideal_annihilation(c, fld, mode, seed), f"ideal_annihilation[{mode}]")
    if fld.characteristic == 2 and args.pieces:
        o = orientation(c, stored, fld)
        rng = make_rng(derive_seed(args.seed, "pieces"))
        bad = 0
        for I, J, _ in pp.sample_pairs(c, args.pieces, rng):
            r = pp.verify_reduction_to_pieces(c, o, I, J, derive_seed(args.seed, I, J), fld)
            bad += not (r["aggregate"] and r["pieces"])
        rep.check("identity_splits_over_pieces", bad == 0, samples=args.pieces, failures=bad)


def cmd_corpus(args, rep: Reporter):
    out = []
    for name in corpus_names():
        c, _ = resolve_complex(name)
        pm = classify_pseudomanifold(c) if c.is_pure else None
        out.append({"name": name, "num_vertices": c.num_vertices, "facets": len(c.facets),
                    "dimension": c.dimension, "pseudo_manifold": bool(pm and pm.is_pm)})
    rep.results = {"complexes": out}
    rep.check("listed", True)


COMMANDS = {
    "validate": cmd_validate, "classify": cmd_classify, "homology": cmd_homology, "orient": cmd_orient,
    "decompose": cmd_decompose, "mixedvol": cmd_mixedvol, "gram": cmd_gram, "hvector": cmd_hvector,
    "lefschetz": cmd_lefschetz, "quadform": cmd_quadform, "specialize": cmd_specialize,
    "reduce-check": cmd_reduce_check, "verify-pp": cmd_verify_pp, "verify-additivity": cmd_verify_additivity,
    "corpus": cmd_corpus,
}
NEEDS_COMPLEX = set(COMMANDS) - {"verify-pp", "corpus"}
FIELD_FREE = {"validate", "classify", "homology", "orient", "corpus", "specialize"}


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get(SEED_ENV, "0"))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--char", type=int, choices=(0, 2), default=2, help="characteristic")
    common.add_argument("--field", help="explicit field: QQ, GF(p), GF(2^k)")
    common.add_argument("--ext-degree", type=int, default=63, help="k for GF(2^k) when --char 2")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")
    common.add_argument("--explain", action="store_true", help="print what the command checks and exit")

    p = argparse.ArgumentParser(prog="anisotropy", description="Stanley-Reisner rings of pseudo-manifolds: "
                                "mixed volumes, pairings and characteristic-2 quadratic forms.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, with_complex=True, optional_complex=False):
        sp = sub.add_parser(name, parents=[common], help=EXPLAIN[name].split(".")[0])
        if with_complex:
            sp.add_argument("complex", nargs="?" if optional_complex else None,
                            help="JSON file or bundled corpus name")
        return sp

    add("validate")
    add("classify")
    sp = add("homology")
    sp.add_argument("--ring", action="append", default=None, help="Z, Q, F2, F3, ... (repeatable)")
    add("orient")
    sp = add("decompose")
    sp.add_argument("--apex", default="fresh", help="'fresh' or an existing vertex")
    sp = add("mixedvol")
    sp.add_argument("--monomial", required=True, help="e.g. x1*x2*x3 or x1^2*x2")
    sp.add_argument("--mode", default="symbolic", help="symbolic | gauge | specialized | seed:S")
    sp.add_argument("--apex", default="fresh")
    sp = add("gram")
    sp.add_argument("--m", type=int, default=1)
    add("hvector")
    add("lefschetz")
    sp = add("quadform")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--g", help="degree-m polynomial in x1..xN")
    sp.add_argument("--random", type=int, default=0, help="compare diagonal and direct on K random g")
    sp.add_argument("--spot", type=int, default=0, help="anisotropy spot test with K random g per degree")
    sp = add("specialize")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--trials", type=int, default=20)
    sp = add("reduce-check")
    sp.add_argument("--g", required=True)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--seeds", type=int, default=2, help="number of specialized points")
    sp = add("verify-pp", optional_complex=True)
    sp.add_argument("--complex", dest="complex_opt")
    sp.add_argument("--mode", required=True, choices=["simplest", "conjecture", "corollary", "plucker", "second-deriv"])
    sp.add_argument("--n", type=int, action="append", help="simplex dimension (repeatable)")
    sp.add_argument("--samples", type=int, default=0)
    sp.add_argument("--max-j", type=int, default=3)
    sp.add_argument("--lengths", type=int, nargs="*")
    sp = add("verify-additivity")
    sp.add_argument("--mode", choices=["symbolic", "gauge", "specialized"])
    sp.add_argument("--pieces", type=int, default=0, help="sampled (I, J) for the per-piece split")
    add("corpus", with_complex=False)
    return p


def run(argv=None) -> tuple[dict, int, str | None]:
    args = build_parser().parse_args(argv)
    if args.explain:
        return {"command": args.command, "explain": EXPLAIN[args.command]}, 0, args.out
    if args.command == "verify-pp":
        args.complex = args.complex or args.complex_opt
        args.n = args.n or [1, 2]
    if args.command == "homology":
        args.ring = args.ring or ["Z", "Q", "F2"]
    options = {k: v for k, v in sorted(vars(args).items())
               if k not in ("command", "complex", "complex_opt", "seed", "out", "timings", "explain",
                            "field", "char", "ext_degree")}
    fld = None if args.command in FIELD_FREE else select_field(args)
    cfg = RunConfig(args.command, getattr(args, "complex", None), str(fld) if fld else "", args.seed,
                    options, args.timings)
    rep = Reporter(cfg, fld)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, rep)
    except (ComplexError, NonOrientableError, DegenerateSpecialization, TwoContentError, FieldMismatchError,
            LemmaViolation, ValueError) as e:
        code = getattr(e, "code", None) or type(e).__name__
        doc = rep.document()
        doc["ok"] = False
        doc["error"] = {"code": code, "message": str(e)}
        return doc, 2, args.out
    rep.timings["total"] = round(time.perf_counter() - t0, 3)
    doc = rep.document()
    return doc, 0 if rep.ok else 1, args.out


def main(argv=None) -> int:
    doc, status, out = run(argv)
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
