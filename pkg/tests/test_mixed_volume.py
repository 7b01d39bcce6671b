import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from anisotropy.complex import Orientation, SimplicialComplex, compute_orientation, permutation_sign
from anisotropy.fields import QQ, BinaryExtField, PrimeField, make_rng
from anisotropy.linalg import determinant
from anisotropy.mixed_volume import (DegenerateSpecialization, GenericMatrix, MixedVolumeConfig, SimplexEvaluator,
                                     build_mixed_volume, check_apex_independence, rebase)
from anisotropy.poly import A
from anisotropy.ratfunc import FactoredFrac

from conftest import PSEUDO_MANIFOLDS, SPHERES, corpus
from oracles import all_degree_monomials, sym, to_sympy, w_by_linear_algebra

GF = BinaryExtField(63)
TRIANGLE = SimplicialComplex.from_facets([[1, 2], [2, 3], [1, 3]])
TWO_POINTS = SimplicialComplex.from_facets([[1], [2]])


def fields_for(name):
    return [GF] if name == "rp2_6" else [QQ, GF]


def specialized(c, F, seed=7, decomposition="fresh_apex"):
    char = 2 if F.characteristic == 2 else 0
    o = compute_orientation(c, char)
    return build_mixed_volume(c, o, F, MixedVolumeConfig("specialized", seed, decomposition=decomposition))


def symbolic(c, F=QQ, decomposition="fresh_apex", mode="symbolic"):
    char = 2 if F.characteristic == 2 else 0
    return build_mixed_volume(c, compute_orientation(c, char), F, MixedVolumeConfig(mode, decomposition=decomposition))


def face_monomials(c):
    return [dict(m) for m in all_degree_monomials(c.num_vertices, c.n) if c.is_face([j for j, _ in m])]


# minors -----------------------------------------------------------------------------

def test_minor_examples():
    m1 = GenericMatrix.symbolic(QQ, 1, [0, 1])
    assert m1.minor_X((0, 1), 0) == m1.ring.a(1, 1)
    assert m1.minor_X((0, 1), 1) == -m1.ring.a(1, 0)
    m2 = GenericMatrix.symbolic(QQ, 2, [0, 1, 2])
    a = m2.ring.a
    assert m2.minor_X((0, 1, 2), 0) == a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)
    with pytest.raises(ValueError):
        m2.minor_X((0, 1, 1), 0)


def test_identity_block_minors():
    cols = (0, 1, 2, 3)
    block = [[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 1, 1]]
    ring = GenericMatrix.symbolic(QQ, 3, cols).ring
    m = GenericMatrix(QQ, 3, cols, ring, {(i + 1, j): ring.const(block[i][j]) for i in range(3) for j in cols})
    for p in range(4):
        rest = [k for k in cols if k != p]
        want = (-1) ** p * sympy.Matrix([[row[k] for k in rest] for row in block]).det()
        got = m.minor_X(cols, p).constant_coeff()
        assert got == want and got in (0, 1, -1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_symbolic_minors_match_sympy(n):
    cols = tuple(range(n + 1))
    m = GenericMatrix.symbolic(QQ, n, cols)
    for p in range(n + 1):
        rest = cols[:p] + cols[p + 1:]
        want = (-1) ** p * sympy.Matrix(n, n, lambda i, k: sym(A(i + 1, rest[k]))).det()
        assert to_sympy(m.minor_X(cols, p)) == sympy.expand(want)


@given(st.permutations(range(4)), st.integers(0, 3))
def test_minor_order_convention(perm, p):
    m = GenericMatrix.symbolic(QQ, 3, range(4))
    cols = tuple(perm)
    rest = cols[:p] + cols[p + 1:]
    want = (-1) ** p * sympy.Matrix(3, 3, lambda i, k: sym(A(i + 1, rest[k]))).det()
    assert to_sympy(m.minor_X(cols, p)) == sympy.expand(want)


@given(st.integers(0, 2**32))
def test_evaluator_annihilates_theta(seed):
    rnd = make_rng(seed)
    m = GenericMatrix.draw(QQ, 3, range(5), rnd)
    e = SimplexEvaluator.build(m, (0, 3, 1, 4))
    for i in range(1, 4):
        total = sum(m.entries[(i, j)].constant_coeff() * e.X_raw(j) for j in e.columns)
        assert total == 0


# building -------------------------------------------------------------------------------

def test_build_counts():
    assert len(symbolic(TRIANGLE).pieces) == 3
    assert [p.columns[0] for p in symbolic(TRIANGLE).pieces] == [0, 0, 0]
    tet = corpus("boundary_simplex_3")
    assert len(symbolic(tet, decomposition=1).pieces) == 1
    assert len(specialized(corpus("octahedron"), QQ).pieces) == 8


def test_small_field_rejected():
    with pytest.raises(ValueError):
        specialized(TRIANGLE, BinaryExtField(8))
    with pytest.raises(ValueError):
        specialized(TRIANGLE, PrimeField(101))


def test_degenerate_matrix_rejected():
    o = compute_orientation(TRIANGLE, 0)
    ring = GenericMatrix.symbolic(QQ, 2, [0, 1, 2, 3]).ring
    zero = GenericMatrix(QQ, 2, [0, 1, 2, 3], ring, {(i, j): ring.zero() for i in (1, 2) for j in range(4)})
    with pytest.raises(DegenerateSpecialization):
        build_mixed_volume(TRIANGLE, o, QQ, matrix=zero)


def test_wrong_degree_rejected():
    W = specialized(TRIANGLE, QQ)
    with pytest.raises(ValueError):
        W.evaluate_monomial({1: 1})
    with pytest.raises(ValueError):
        W.evaluate(W.x(1) ** 3)


# values --------------------------------------------------------------------------------

def test_single_piece_examples():
    o = Orientation(TWO_POINTS.facets, 0)
    W = build_mixed_volume(TWO_POINTS, o, QQ, MixedVolumeConfig(decomposition=1))
    (piece,) = W.pieces
    got = W.evaluate_monomial({1: 1})
    assert got.equals(FactoredFrac(W.matrix.ring.one(), {piece.X[2]: 1}))
    assert piece.X[2] == -W.matrix.ring.a(1, 1)
    tet = corpus("boundary_simplex_3")
    W = symbolic(tet, decomposition=1)
    (piece,) = W.pieces
    f = W.coerce(W.x(2) * W.x(3) * W.x(4)) * piece.X[1].to_ring(W.xring)
    assert W.evaluate(f).equals(FactoredFrac(W.matrix.ring.one()))


@pytest.mark.parametrize("name", SPHERES)
def test_facet_normalization(name):
    c = corpus(name)
    for F in (QQ, GF):
        W = specialized(c, F)
        o = W.orientation
        for facet, ordered in zip(c.facets, o.ordered_facets):
            d = W.matrix.det(facet)
            signed = d.constant_coeff() if permutation_sign(ordered) > 0 else F.neg(d.constant_coeff())
            w = W.evaluate_monomial({j: 1 for j in facet})
            assert F.mul(w, signed) == F.one


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS)
def test_matches_linear_algebra_oracle(name):
    c = corpus(name)
    for F in fields_for(name):
        W = specialized(c, F, seed=11)
        want = w_by_linear_algebra(c, W)
        for m, v in want.items():
            assert W.evaluate_monomial(dict(m)) == v


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS)
def test_cross_decomposition_specialized(name):
    c = corpus(name)
    for F in fields_for(name):
        W = specialized(c, F, seed=5)
        for v in c.vertices:
            Wv = rebase(W, v)
            for m in face_monomials(c):
                assert Wv.evaluate_monomial(m) == W.evaluate_monomial(m)


def test_cross_decomposition_symbolic_triangle():
    W = symbolic(TRIANGLE)
    for v in (1, 2, 3):
        Wv = rebase(W, v)
        for m in face_monomials(TRIANGLE):
            assert Wv.evaluate_monomial(m).equals(W.evaluate_monomial(m))


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS)
def test_ideal_annihilation(name):
    c = corpus(name)
    for F in fields_for(name):
        W = specialized(c, F, seed=3)
        for m in all_degree_monomials(c.num_vertices, c.n):
            if not c.is_face([j for j, _ in m]):
                assert F.is_zero(W.evaluate_monomial(dict(m)))
        for g in all_degree_monomials(c.num_vertices, c.n - 1):
            gp = W.monomial(dict(g))
            for i in range(1, c.n + 1):
                assert F.is_zero(W.evaluate(W.theta(i) * gp))


def test_gauge_is_substituted_symbolic():
    c = corpus("bipyramid")
    S = symbolic(c, QQ)
    G = symbolic(c, QQ, mode="gauge")
    facet = c.facets[0]
    sub = {A(i, j): S.matrix.ring.const(int(facet.index(j) == i - 1)) for i in range(1, c.n + 1) for j in facet}
    for m in face_monomials(c)[:6]:
        s = S.evaluate_monomial(m)
        num = s.num.substitute(sub).to_ring(G.matrix.ring)
        den = {f.substitute(sub).to_ring(G.matrix.ring): e for f, e in s.den.items()}
        assert FactoredFrac(num, den).equals(G.evaluate_monomial(m))


@given(st.integers(0, 2**32))
@settings(max_examples=10)
def test_left_multiplication_scales_by_det(seed):
    c = corpus("octahedron")
    W = specialized(c, QQ, seed=seed % 1000 + 1)
    rnd = random.Random(seed)
    n = c.n
    B = [[rnd.randint(-5, 5) for _ in range(n)] for _ in range(n)]
    dB = determinant(QQ, B)
    if dB == 0:
        return
    M = W.matrix
    ring = M.ring
    entries = {(i, j): ring.raw_const(sum(B[i - 1][k] * M.entries[(k + 1, j)].constant_coeff() for k in range(n)))
               for i in range(1, n + 1) for j in M.columns}
    BM = GenericMatrix(QQ, n, M.columns, ring, entries, "specialized")
    W2 = build_mixed_volume(c, W.orientation, QQ, matrix=BM)
    for m in face_monomials(c):
        assert W2.evaluate_monomial(m) == Fraction(W.evaluate_monomial(m)) / dB


@pytest.mark.parametrize("name", SPHERES)
def test_orientation_flip(name):
    c = corpus(name)
    W = specialized(c, QQ)
    o2 = W.orientation.reversed()
    W2 = build_mixed_volume(c, o2, QQ, matrix=W.matrix)
    for m in face_monomials(c):
        assert W2.evaluate_monomial(m) == -W.evaluate_monomial(m)
    Wc = specialized(c, GF)
    Wc2 = build_mixed_volume(c, Wc.orientation.reversed(), GF, matrix=Wc.matrix)
    for m in face_monomials(c):
        assert Wc2.evaluate_monomial(m) == Wc.evaluate_monomial(m)


def random_x_poly(W, rnd, deg, terms=4):
    f = W.xring.zero()
    N = W.complex.num_vertices
    for _ in range(terms):
        exps = {}
        for _ in range(deg):
            j = rnd.randint(1, N)
            exps[j] = exps.get(j, 0) + 1
        f = f + W.monomial(exps).scale(W.field.from_int(rnd.randint(-3, 3)) if W.field is QQ else W.field.random(rnd))
    return f


@given(st.integers(0, 2**32))
@settings(max_examples=25)
def test_ev_homomorphism(seed):
    rnd = random.Random(seed)
    c = corpus("octahedron")
    for F in (QQ, GF):
        W = specialized(c, F, seed=seed % 97 + 1)
        p = W.pieces[rnd.randrange(len(W.pieces))]
        f, g = random_x_poly(W, rnd, 1), random_x_poly(W, rnd, 2)
        assert p.ev(f * g) == p.ev(f) * p.ev(g)
        assert p.ev(f + W.xring.one()) == p.ev(f) + W.matrix.ring.one()
        assert p.ev(W.xring.one()) == W.matrix.ring.one()
        j = next(j for j in c.vertices if j not in p.columns)
        assert p.ev(W.x(j)).is_zero()
        k = p.facet_columns[0]
        assert p.ev(W.x(k) ** 2) == p.ev(W.x(k)) ** 2


@given(st.integers(0, 2**32))
@settings(max_examples=20)
def test_evaluate_matches_ev_sum(seed):
    rnd = random.Random(seed)
    c = corpus("bipyramid")
    for F in (QQ, GF):
        W = specialized(c, F, seed=seed % 89 + 1)
        f = random_x_poly(W, rnd, c.n, terms=6)
        assert W.evaluate(f) == W.evaluate_via_ev(f)
        total = F.zero
        for v in W.piece_values(f):
            total = F.add(total, v)
        assert total == W.evaluate(f)


def test_evaluate_matches_ev_sum_symbolic():
    W = symbolic(TRIANGLE)
    rnd = random.Random(4)
    for _ in range(5):
        f = random_x_poly(W, rnd, 2)
        assert W.evaluate(f).equals(W.evaluate_via_ev(f))


def test_apex_independence_examples():
    assert check_apex_independence(symbolic(TRIANGLE), [{1: 1, 2: 1}, {1: 2}])
    bip = corpus("bipyramid")
    W = symbolic(bip, GF)
    faces = face_monomials(bip)
    assert check_apex_independence(W, [{1: 1, 2: 1, 3: 1}] + faces[:3])
    nonface = next(dict(m) for m in all_degree_monomials(5, 3) if not bip.is_face([j for j, _ in m]))
    assert check_apex_independence(W, [nonface])
    with pytest.raises(ValueError):
        check_apex_independence(rebase(W, 1), [nonface])


def test_fresh_apex_value_has_no_apex_variables():
    W = symbolic(TRIANGLE)
    for m in face_monomials(TRIANGLE):
        w = W.evaluate_monomial(m)
        assert not any(v.j == 0 for v in w.num.variables() | {x for f in w.den for x in f.variables()})
