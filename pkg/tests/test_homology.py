from itertools import combinations

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from anisotropy.complex import SimplicialComplex
from anisotropy.homology import (LemmaViolation, SphereClassification, _torsion_primes, boundary_matrices,
                                 check_lemma_implications, classify_sphere, euler_characteristic, parse_ring,
                                 rank_mod_p, reduced_euler_from_homology, reduced_homology, smith_normal_form)

from conftest import PSEUDO_MANIFOLDS, SPHERES, corpus
from oracles import sympy_rank

TRIANGLE = SimplicialComplex.from_facets([[1, 2], [2, 3], [1, 3]])
RP2 = corpus("rp2_6")

int_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def det(m):
    return sympy.Matrix(m).det()


# boundary matrices -----------------------------------------------------------

def test_boundary_examples():
    cc = boundary_matrices(TRIANGLE)
    assert cc.boundaries[0] == [[1, 1, 1]]
    assert all(abs(x) <= 1 for row in cc.boundaries[1] for x in row)
    assert len(cc.boundaries[1]) == 3 and len(cc.boundaries[1][0]) == 3
    edge = boundary_matrices(SimplicialComplex.from_facets([[1, 2]]))
    assert edge.boundaries[1] == [[-1], [1]]
    tet = boundary_matrices(corpus("boundary_simplex_3"))
    assert [tet.shape(d) for d in (0, 1, 2)] == [(1, 4), (4, 6), (6, 4)]


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS)
def test_boundary_squares_to_zero(name):
    cc = boundary_matrices(corpus(name))
    for d in range(1, cc.top + 1):
        a, b = sympy.Matrix(cc.boundaries[d - 1]), sympy.Matrix(cc.boundaries[d])
        assert (a * b).is_zero_matrix


# Smith normal form -----------------------------------------------------------------

def test_snf_examples():
    assert smith_normal_form([[2, 0], [0, 3]]).diagonal == (1, 6)
    z = smith_normal_form([[0, 0], [0, 0]])
    assert z.diagonal == (0, 0) and z.rank == 0
    s = smith_normal_form(boundary_matrices(TRIANGLE).boundaries[1])
    assert s.invariant_factors == (1, 1) and s.rank == 2


@given(int_matrices)
def test_snf_matches_sympy(m):
    got = smith_normal_form(m, transforms=True)
    want = sympy_snf(sympy.Matrix(m), domain=sympy.ZZ)
    k = min(len(m), len(m[0]))
    assert list(got.diagonal) == [abs(want[i, i]) for i in range(k)]
    d = list(got.diagonal)
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert d[:len(nz)] == nz
    U, V = [list(r) for r in got.left], [list(r) for r in got.right]
    assert abs(det(U)) == 1 and abs(det(V)) == 1
    D = matmul(matmul(U, m), V)
    assert all(D[i][j] == (d[i] if i == j else 0) for i in range(len(m)) for j in range(len(m[0])))
    assert got.rank == sympy_rank(m)


@given(int_matrices, st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_p_matches_sympy(m, p):
    assert rank_mod_p(m, p) == sympy_rank(m, p)


# homology -----------------------------------------------------------------------------

def groups_text(groups, ring="Z"):
    return {g.degree: g.to_text(ring) for g in groups}


def test_homology_examples():
    octa = reduced_homology(corpus("octahedron"), "Z")
    assert groups_text(octa) == {-1: "0", 0: "0", 1: "0", 2: "Z"}
    rp = reduced_homology(RP2, "Z")
    assert groups_text(rp) == {-1: "0", 0: "0", 1: "Z/2", 2: "0"}
    rp2 = reduced_homology(RP2, "F2")
    assert [g.rank for g in rp2] == [0, 0, 1, 1]
    assert [g.rank for g in reduced_homology(RP2, "Q")] == [0, 0, 0, 0]
    assert [g.rank for g in reduced_homology(RP2, "Fp:3")] == [0, 0, 0, 0]


def test_parse_ring():
    assert parse_ring("Z") == ("Z", 0)
    assert parse_ring("qq") == ("Q", 0)
    assert parse_ring("F2") == ("F", 2)
    assert parse_ring("GF(7)") == ("F", 7)
    with pytest.raises(ValueError):
        parse_ring("F4")
    with pytest.raises(ValueError):
        parse_ring("R")


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS + ["bowtie", "three_sheets"])
@pytest.mark.parametrize("ring", ["Z", "Q", "F2", "F3"])
def test_euler_characteristic(name, ring):
    c = corpus(name)
    assert reduced_euler_from_homology(reduced_homology(c, ring)) == euler_characteristic(c) - 1


@pytest.mark.parametrize("name", PSEUDO_MANIFOLDS + ["bowtie", "three_sheets"])
def test_field_ranks_match_sympy(name):
    c = corpus(name)
    cc = boundary_matrices(c)
    for p, ring in [(None, "Q"), (2, "F2"), (3, "F3")]:
        groups = reduced_homology(c, ring)
        for g in groups:
            d = g.degree
            dim_c = len(cc.simplices[d])
            r_out = sympy_rank(cc.boundaries[d], p) if d in cc.boundaries else 0
            r_in = sympy_rank(cc.boundaries[d + 1], p) if d + 1 in cc.boundaries else 0
            assert g.rank == dim_c - r_out - r_in


# sphere classification ---------------------------------------------------------------------

@pytest.mark.parametrize("name", SPHERES)
def test_spheres_classified(name):
    s = classify_sphere(corpus(name))
    assert s.over_Z and s.over_Q and all(s.over_Fp.values())
    assert s.witness is None
    assert set(s.over_Fp) >= {2, 3, 5}


def test_rp2_classification():
    s = classify_sphere(RP2)
    assert not s.over_Z and not s.over_Q and not s.over_Fp[2]
    assert s.over_Fp[3] is False  # the empty face already fails over every field here
    assert s.witness["face"] == []


def test_octahedron_link_homology():
    c = corpus("octahedron")
    for tau in c.face_set:
        if not tau:
            continue
        lk = c.link(tau)
        dim = c.n - 2 - (len(tau) - 1)
        ranks = [g.rank for g in reduced_homology(lk, "Z")]
        assert ranks[dim + 1] == 1 and sum(ranks) == 1


def test_lemma_violations_detected():
    with pytest.raises(LemmaViolation):
        check_lemma_implications(SphereClassification(True, {2: False}, True))
    with pytest.raises(LemmaViolation):
        check_lemma_implications(SphereClassification(False, {2: True}, False))
    check_lemma_implications(SphereClassification(False, {2: False, 3: True}, True))


def test_torsion_primes():
    assert _torsion_primes(2 * 9 * 49 * 11) == {2, 3, 7, 11}
    assert _torsion_primes(1) == set()
    assert sorted(classify_sphere(corpus("boundary_simplex_2")).over_Fp) == [2, 3, 5]


@given(st.integers(2, 3), st.integers(4, 7), st.randoms(use_true_random=False))
def test_random_complexes_euler_and_lemma(n, N, rnd):
    pool = list(combinations(range(1, N + 1), n))
    facets = rnd.sample(pool, rnd.randint(1, min(10, len(pool))))
    c = SimplicialComplex.from_facets(facets, N)
    for ring in ("Z", "Q", "F2"):
        assert reduced_euler_from_homology(reduced_homology(c, ring)) == euler_characteristic(c) - 1
    classify_sphere(c)  # raises LemmaViolation on an inconsistent verdict
