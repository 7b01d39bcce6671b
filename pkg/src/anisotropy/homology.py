"""Reduced simplicial homology over Z, F_p and Q, and homology-sphere tests.

Chains use the sorted-vertex sign convention: removing the vertex in position
``k`` of a sorted simplex contributes ``(-1)^k``.  The chain complex is
augmented, so degree -1 is spanned by the empty simplex.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .complex import SimplicialComplex
from .fields import PrimeField, is_prime

DEFAULT_PRIMES = (2, 3, 5)


class LemmaViolation(AssertionError):
    """A coefficient-ring implication between sphere tests failed."""


@dataclass(frozen=True)
class ChainComplex:
    simplices: dict[int, list[tuple[int, ...]]]  # degree -> sorted simplices
    boundaries: dict[int, list[list[int]]]  # degree d -> matrix C_d -> C_{d-1}

    @property
    def top(self) -> int:
        return max(self.simplices)

    def shape(self, d: int) -> tuple[int, int]:
        return len(self.simplices.get(d - 1, [])), len(self.simplices.get(d, []))


def boundary_matrices(c: SimplicialComplex) -> ChainComplex:
    simplices = {-1: [()]}
    for d in range(0, c.dimension + 1):
        simplices[d] = c.faces(d)
    boundaries = {}
    for d in range(0, c.dimension + 1):
        index = {s: i for i, s in enumerate(simplices[d - 1])}
        mat = [[0] * len(simplices[d]) for _ in simplices[d - 1]]
        for j, s in enumerate(simplices[d]):
            for k in range(len(s)):
                mat[index[s[:k] + s[k + 1:]]][j] += (-1) ** k
        boundaries[d] = mat
    cc = ChainComplex(simplices, boundaries)
    for d in range(1, c.dimension + 1):
        if not _composes_to_zero(cc.boundaries[d - 1], cc.boundaries[d]):
            raise AssertionError(f"boundary maps do not compose to zero in degree {d}")
    return cc


def _composes_to_zero(a: list[list[int]], b: list[list[int]]) -> bool:
    if not a or not b:
        return True
    cols = list(zip(*b))
    return all(sum(x * y for x, y in zip(row, col)) == 0 for row in a for col in cols)


# --- Smith normal form -----------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    diagonal: tuple[int, ...]  # invariant factors, length min(rows, cols), trailing zeros kept
    rank: int
    left: tuple[tuple[int, ...], ...] | None = None
    right: tuple[tuple[int, ...], ...] | None = None

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.diagonal if d)


def smith_normal_form(matrix: list[list[int]], transforms: bool = False) -> SmithForm:
    """Smith form by pivoting on the smallest nonzero entry; optionally ``U M V = D``."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    m = [list(r) for r in matrix]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    V = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        if U:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        if V:
            for r in V:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row dst -= k * row src
        m[dst] = [x - k * y for x, y in zip(m[dst], m[src])]
        if U:
            U[dst] = [x - k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for r in m:
            r[dst] -= k * r[src]
        if V:
            for r in V:
                r[dst] -= k * r[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = m[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = m[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    add_row(i, t, m[i][t] // p)
                    if m[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if m[t][j]:
                    add_col(j, t, m[t][j] // p)
                    if m[t][j]:
                        dirty = True
            if not dirty:
                # divisibility: p must divide every remaining entry
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], -1)
                continue
            # move the smallest entry of row/column t to the pivot
            cand = [(abs(m[i][t]), i, t) for i in range(t, rows) if m[i][t]]
            cand += [(abs(m[t][j]), t, j) for j in range(t, cols) if m[t][j]]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            if U:
                U[t] = [-x for x in U[t]]
        t += 1
    diag = tuple(m[i][i] for i in range(min(rows, cols)))
    r = sum(1 for d in diag if d)
    if transforms:
        return SmithForm(diag, r, tuple(map(tuple, U)), tuple(map(tuple, V)))
    return SmithForm(diag, r)


def rank_mod_p(matrix: list[list[int]], p: int) -> int:
    F = PrimeField(p)
    rows = [[x % p for x in r] for r in matrix]
    rk = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = F.inv(rows[rk][c])
        for i in range(rk + 1, len(rows)):
            if rows[i][c]:
                f = rows[i][c] * inv % p
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rk])]
        rk += 1
    return rk


# --- homology --------------------------------------------------------------------

@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_text(self, ring: str = "Z") -> str:
        parts = [ring if self.rank == 1 else f"{ring}^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def parse_ring(ring) -> tuple[str, int]:
    """``"Z"``, ``"Q"``, ``"F2"``/``"Fp:3"``/``("F", 5)`` -> (kind, p)."""
    if isinstance(ring, tuple):
        return ring
    s = str(ring).strip().upper()
    if s in ("Z", "ZZ"):
        return ("Z", 0)
    if s in ("Q", "QQ"):
        return ("Q", 0)
    for prefix in ("FP:", "GF(", "F"):
        if s.startswith(prefix):
            p = int(s[len(prefix):].rstrip(")"))
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            return ("F", p)
    raise ValueError(f"unknown coefficient ring {ring!r}")


def reduced_homology(c: SimplicialComplex, ring="Z", chain: ChainComplex | None = None) -> list[HomologyGroup]:
    """Reduced homology in degrees -1..dim."""
    kind, p = parse_ring(ring)
    cc = chain or boundary_matrices(c)
    top = cc.top
    ranks = {}
    torsion = {}
    for d in range(0, top + 1):
        mat = cc.boundaries[d]
        if kind == "F":
            ranks[d] = rank_mod_p(mat, p)
        else:
            snf = smith_normal_form(mat)
            ranks[d] = snf.rank
            torsion[d] = tuple(x for x in snf.invariant_factors if x > 1)
    out = []
    for d in range(-1, top + 1):
        dim_c = len(cc.simplices[d])
        free = dim_c - ranks.get(d, 0) - ranks.get(d + 1, 0)
        tors = torsion.get(d + 1, ()) if kind == "Z" else ()
        out.append(HomologyGroup(d, free, tors))
    return out


def is_sphere_homology(groups: list[HomologyGroup], dim: int) -> bool:
    for g in groups:
        want = 1 if g.degree == dim else 0
        if g.rank != want or g.torsion:
            return False
    return dim <= max((g.degree for g in groups), default=-1)


@dataclass
class SphereClassification:
    over_Z: bool
    over_Fp: dict[int, bool]
    over_Q: bool
    witness: dict | None = None
    witnesses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "over_Z": self.over_Z,
            "over_Fp": {str(p): v for p, v in sorted(self.over_Fp.items())},
            "over_Q": self.over_Q,
            "witness": self.witness,
        }


def _torsion_primes(n: int) -> set[int]:
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def classify_sphere(c: SimplicialComplex, primes=None) -> SphereClassification:
    """Check the link condition for every face (including the empty one) over Z, F_p, Q."""
    c.require_pure()
    n = c.n
    faces = sorted(c.face_set, key=lambda f: (len(f), f))
    link_data = []
    found_primes = set()
    for tau in faces:
        lk = c.link(tau)
        cc = boundary_matrices(lk)
        snfs = {d: smith_normal_form(cc.boundaries[d]) for d in cc.boundaries}
        for s in snfs.values():
            for x in s.invariant_factors:
                if x > 1:
                    found_primes |= _torsion_primes(x)
        link_data.append((tau, lk, cc, snfs))
    primes = sorted(set(primes or DEFAULT_PRIMES) | found_primes)
    witnesses: dict = {}
    result = {"Z": True, "Q": True}
    result.update({p: True for p in primes})
    for tau, lk, cc, snfs in link_data:
        dim = n - 2 - (len(tau) - 1)
        for key in ["Z", "Q"] + primes:
            if not result[key]:
                continue
            ring = ("F", key) if isinstance(key, int) else (key, 0)
            groups = reduced_homology(lk, ring, cc)
            if not is_sphere_homology(groups, dim):
                result[key] = False
                bad = next(g for g in groups if g.rank != (1 if g.degree == dim else 0) or g.torsion)
                witnesses[key] = {
                    "face": list(tau),
                    "degree": bad.degree,
                    "rank": bad.rank,
                    "torsion": list(bad.torsion),
                    "ring": "Z" if key == "Z" else "Q" if key == "Q" else f"F{key}",
                }
    over_fp = {p: result[p] for p in primes}
    out = SphereClassification(result["Z"], over_fp, result["Q"], None, witnesses)
    for key in ["Z", "Q"] + primes:
        if key in witnesses:
            out.witness = witnesses[key]
            break
    check_lemma_implications(out)
    return out


def check_lemma_implications(s: SphereClassification) -> None:
    if s.over_Z and (not s.over_Q or not all(s.over_Fp.values())):
        raise LemmaViolation("a Z-homology sphere failed over another ring")
    if any(s.over_Fp.values()) and not s.over_Q:
        raise LemmaViolation("an F_p-homology sphere failed over Q")


def euler_characteristic(c: SimplicialComplex) -> int:
    return sum((-1) ** d * len(c.faces(d)) for d in range(0, c.dimension + 1))


def reduced_euler_from_homology(groups: list[HomologyGroup]) -> int:
    return sum((-1) ** g.degree * g.rank for g in groups)
