"""Independent reference computations used by the tests."""
from itertools import combinations_with_replacement

import sympy
from hypothesis import strategies as st

from anisotropy.fields import QQ, PrimeField
from anisotropy.linalg import nullspace
from anisotropy.poly import A, X, MultiPoly, PolyRing

VARS = [A(1, 1), A(1, 2), A(2, 1), X(1), X(2)]


def sym(v):
    return sympy.Symbol(str(v).replace("[", "_").replace("]", "").replace(",", "_"))


def to_sympy(f: MultiPoly):
    out = 0
    for exps, c in f.items():
        term = sympy.Integer(c) if isinstance(c, int) else sympy.Rational(c.numerator, c.denominator)
        for v, e in exps.items():
            term *= sym(v) ** e
        out += term
    return sympy.expand(out)


def poly_strategy(ring: PolyRing, max_terms=5, max_exp=3, coeff=st.integers(-6, 6)):
    nv = len(ring.vars)
    mono = st.tuples(*[st.integers(0, max_exp)] * nv)
    return st.dictionaries(mono, coeff, max_size=max_terms).map(
        lambda d: ring.from_terms({tuple(zip(ring.vars, k)): c for k, c in d.items()}))


def all_degree_monomials(N, d):
    out = []
    for combo in combinations_with_replacement(range(1, N + 1), d):
        e = {}
        for j in combo:
            e[j] = e.get(j, 0) + 1
        out.append(tuple(sorted(e.items())))
    return out


def w_by_linear_algebra(c, W):
    """``W`` on degree-n monomials from its defining properties alone.

    Unknowns are the values on all degree-n monomials; equations say that
    non-faces vanish and that ``theta_i * m`` vanishes for every degree-(n-1)
    monomial ``m``.  The solution space must be a line; it is scaled to agree
    with ``W`` on the first facet.  Needs a specialized ``W``.
    """
    F = W.field
    n, N = c.n, c.num_vertices
    cols = all_degree_monomials(N, n)
    index = {m: k for k, m in enumerate(cols)}
    rows = []
    for m in cols:
        if not c.is_face({j for j, _ in m}):
            r = [F.zero] * len(cols)
            r[index[m]] = F.one
            rows.append(r)
    a = {(i, j): W.matrix.entries[(i, j)].constant_coeff() for i in range(1, n + 1) for j in range(1, N + 1)}
    for m in all_degree_monomials(N, n - 1):
        for i in range(1, n + 1):
            r = [F.zero] * len(cols)
            for j in range(1, N + 1):
                e = dict(m)
                e[j] = e.get(j, 0) + 1
                k = index[tuple(sorted(e.items()))]
                r[k] = F.add(r[k], a[(i, j)])
            rows.append(r)
    ns = nullspace(F, rows)
    assert len(ns) == 1, f"solution space has dimension {len(ns)}"
    v = ns[0]
    first = tuple((j, 1) for j in c.facets[0])
    scale = F.div(W.evaluate_monomial(dict(first)), v[index[first]])
    return {m: F.mul(scale, v[index[m]]) for m in cols}


def sympy_rank(matrix, p=None):
    if not matrix or not matrix[0]:
        return 0
    M = sympy.Matrix(matrix)
    if p is None:
        return M.rank()
    from sympy.polys.matrices import DomainMatrix
    return DomainMatrix.from_Matrix(M).convert_to(sympy.GF(p)).rank()
