"""Simplicial complexes given by their facets.

Vertices are 1-based; index 0 is reserved for the fresh cone apex.  A complex
is an immutable value: facets are stored as sorted tuples in canonical order.
"""
from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Sequence


class ComplexError(ValueError):
    """Malformed facet data; ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class NonOrientableError(ValueError):
    code = "non_orientable"


def permutation_sign(seq: Sequence[int]) -> int:
    """Parity of the permutation sorting ``seq`` (distinct entries)."""
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _check_facets(facets: Iterable[Iterable[int]], num_vertices: int | None) -> tuple[tuple[int, ...], ...]:
    out = []
    for raw in facets:
        f = list(raw)
        if any(not isinstance(v, int) or isinstance(v, bool) for v in f):
            raise ComplexError("bad_vertex", f"non-integer vertex in facet {f}")
        if len(set(f)) != len(f):
            raise ComplexError("repeated_vertex", f"facet {f} repeats a vertex")
        if num_vertices is not None and any(v < 1 or v > num_vertices for v in f):
            raise ComplexError("index_out_of_range", f"facet {f} has a vertex outside 1..{num_vertices}")
        out.append(tuple(sorted(f)))
    uniq = sorted(set(out), key=lambda t: (len(t), t))
    sets = [frozenset(f) for f in uniq]
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            if sets[a] < sets[b]:
                raise ComplexError("not_antichain", f"facet {uniq[a]} is contained in facet {uniq[b]}")
    if len(uniq) != len(out):
        raise ComplexError("duplicate_facet", "a facet is listed twice")
    return tuple(sorted(uniq))


@dataclass(frozen=True)
class SimplicialComplex:
    num_vertices: int
    facets: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]], num_vertices: int | None = None, name: str = "") -> "SimplicialComplex":
        facets = [list(f) for f in facets]
        if num_vertices is None:
            num_vertices = max((max(f) for f in facets if f), default=0)
        return cls(num_vertices, _check_facets(facets, num_vertices), name)

    # basic shape ----------------------------------------------------------
    @cached_property
    def is_pure(self) -> bool:
        return len({len(f) for f in self.facets}) <= 1

    @property
    def n(self) -> int:
        """Facet cardinality (dimension + 1); requires purity."""
        if not self.is_pure:
            raise ComplexError("not_pure", "complex is not pure")
        return len(self.facets[0]) if self.facets else 0

    @property
    def dimension(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for f in self.facets for v in f}))

    @cached_property
    def face_set(self) -> frozenset[tuple[int, ...]]:
        out = set()
        for f in self.facets:
            for k in range(len(f) + 1):
                out.update(combinations(f, k))
        return frozenset(out)

    def faces(self, dim: int) -> list[tuple[int, ...]]:
        """Faces of dimension ``dim`` (``dim = -1`` gives the empty face)."""
        return sorted(f for f in self.face_set if len(f) == dim + 1)

    def is_face(self, face: Iterable[int]) -> bool:
        return tuple(sorted(face)) in self.face_set

    def f_vector(self) -> list[int]:
        return [len(self.faces(d)) for d in range(-1, self.dimension + 1)]

    def h_vector(self) -> list[int]:
        """``h_k = sum_i (-1)^(k-i) C(n-i, k-i) f_(i-1)`` for ``k = 0..n``."""
        f = self.f_vector()
        n = self.n
        return [sum((-1) ** (k - i) * comb(n - i, k - i) * f[i] for i in range(k + 1)) for k in range(n + 1)]

    def require_pure(self) -> None:
        if not self.is_pure:
            raise ComplexError("not_pure", "operation requires a pure complex")

    # links ------------------------------------------------------------------
    def link(self, face: Iterable[int] = ()) -> "SimplicialComplex":
        """Link of ``face``, with vertices relabelled 1..k in increasing order."""
        tau = tuple(sorted(face))
        if tau not in self.face_set:
            raise ComplexError("not_a_face", f"{list(tau)} is not a face")
        if not tau:
            return self
        ts = set(tau)
        rest = [tuple(v for v in f if v not in ts) for f in self.facets if ts.issubset(f)]
        verts = sorted({v for f in rest for v in f})
        relabel = {v: k + 1 for k, v in enumerate(verts)}
        return SimplicialComplex(len(verts), tuple(sorted(tuple(relabel[v] for v in f) for f in rest)))

    # pseudo-manifold structure ------------------------------------------------
    @cached_property
    def ridge_map(self) -> dict[tuple[int, ...], list[int]]:
        """Ridge -> indices of facets containing it."""
        out: dict[tuple[int, ...], list[int]] = defaultdict(list)
        for idx, f in enumerate(self.facets):
            for k in range(len(f)):
                out[f[:k] + f[k + 1:]].append(idx)
        return dict(out)

    def dual_graph_components(self) -> int:
        if not self.facets:
            return 0
        adj = defaultdict(set)
        for idxs in self.ridge_map.values():
            for a in idxs:
                adj[a].update(idxs)
        seen = {0}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for b in adj[a] - seen:
                seen.add(b)
                queue.append(b)
        comps = 1
        remaining = set(range(len(self.facets))) - seen
        while remaining:
            comps += 1
            start = remaining.pop()
            queue = deque([start])
            while queue:
                a = queue.popleft()
                for b in adj[a] & remaining:
                    remaining.discard(b)
                    queue.append(b)
        return comps

    def to_json(self) -> dict:
        return {"num_vertices": self.num_vertices, "facets": [list(f) for f in self.facets]}


@dataclass(frozen=True)
class ValidationReport:
    pure: bool
    dimension: int
    antichain: bool
    num_facets: int


def validate(complex_: SimplicialComplex | Iterable[Iterable[int]]) -> ValidationReport:
    """Validate a complex or a raw facet list (raises :class:`ComplexError` on malformed data)."""
    if not isinstance(complex_, SimplicialComplex):
        complex_ = SimplicialComplex.from_facets(complex_)
    return ValidationReport(complex_.is_pure, complex_.dimension, True, len(complex_.facets))


@dataclass(frozen=True)
class PseudoManifoldReport:
    is_pm: bool
    ridge_violations: tuple[tuple[tuple[int, ...], int], ...]
    strongly_connected: bool


def classify_pseudomanifold(c: SimplicialComplex) -> PseudoManifoldReport:
    c.require_pure()
    bad = tuple(sorted((r, len(idx)) for r, idx in c.ridge_map.items() if len(idx) != 2))
    connected = c.dual_graph_components() == 1
    return PseudoManifoldReport(not bad and connected and bool(c.facets), bad, connected)


# --- orientation ---------------------------------------------------------------

@dataclass(frozen=True)
class Orientation:
    """One ordered vertex list per facet, aligned with ``complex.facets``."""

    ordered_facets: tuple[tuple[int, ...], ...]
    characteristic: int

    def signs(self) -> tuple[int, ...]:
        return tuple(permutation_sign(f) for f in self.ordered_facets)

    def reversed(self) -> "Orientation":
        """The opposite global orientation (first two vertices swapped in every facet)."""
        return Orientation(tuple(_flip(f) for f in self.ordered_facets), self.characteristic)

    def to_json(self) -> list[list[int]]:
        return [list(f) for f in self.ordered_facets]


def _flip(f: tuple[int, ...]) -> tuple[int, ...]:
    if len(f) < 2:
        raise NonOrientableError("cannot reverse the orientation of a 0-simplex by reordering")
    return (f[1], f[0]) + f[2:]


def induced_ridge_sign(ordered: Sequence[int], vertex: int) -> int:
    """Sign of the boundary orientation on ``ordered`` minus ``vertex``, relative to sorted order."""
    k = list(ordered).index(vertex)
    rest = [v for v in ordered if v != vertex]
    return (-1) ** k * permutation_sign(rest)


def orientation_violations(c: SimplicialComplex, o: Orientation) -> list[tuple[int, ...]]:
    """Ridges whose two induced orientations fail to be opposite (empty in char 2)."""
    if o.characteristic == 2:
        return []
    bad = []
    for ridge, idxs in c.ridge_map.items():
        if len(idxs) != 2:
            continue
        s = []
        for idx in idxs:
            f = o.ordered_facets[idx]
            (v,) = set(f) - set(ridge)
            s.append(induced_ridge_sign(f, v))
        if s[0] != -s[1]:
            bad.append(ridge)
    return sorted(bad)


def compute_orientation(c: SimplicialComplex, characteristic: int = 0) -> Orientation:
    """Identity orderings in char 2; sign propagation over the dual graph otherwise."""
    if characteristic not in (0, 2):
        raise ValueError("characteristic must be 0 or 2")
    report = classify_pseudomanifold(c)
    if not report.is_pm:
        raise ComplexError("not_pseudomanifold", "orientation requires a pseudo-manifold")
    if characteristic == 2:
        return Orientation(c.facets, 2)
    eps: dict[int, int] = {0: 1}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        fa = c.facets[a]
        for k in range(len(fa)):
            ridge = fa[:k] + fa[k + 1:]
            (b,) = [i for i in c.ridge_map[ridge] if i != a]
            fb = c.facets[b]
            kb = next(i for i, v in enumerate(fb) if v not in ridge)
            # induced sign eps * (-1)^(position of removed vertex in sorted facet)
            want = -eps[a] * (-1) ** k * (-1) ** kb
            if b in eps:
                if eps[b] != want:
                    raise NonOrientableError(f"orientation propagation is contradictory at ridge {list(ridge)}")
            else:
                eps[b] = want
                queue.append(b)
    ordered = tuple(f if eps[i] == 1 else _flip(f) for i, f in enumerate(c.facets))
    return Orientation(ordered, 0)


def orientation_from_lists(c: SimplicialComplex, lists: Sequence[Sequence[int]], characteristic: int = 0) -> Orientation:
    """Adopt a user-supplied orientation after checking it is one."""
    by_set = {frozenset(f): i for i, f in enumerate(c.facets)}
    ordered: list = [None] * len(c.facets)
    for lst in lists:
        idx = by_set.get(frozenset(lst))
        if idx is None or len(set(lst)) != len(lst):
            raise ComplexError("bad_orientation", f"{list(lst)} is not an ordering of a facet")
        ordered[idx] = tuple(lst)
    if any(o is None for o in ordered):
        raise ComplexError("bad_orientation", "orientation does not cover every facet")
    o = Orientation(tuple(ordered), characteristic)
    bad = orientation_violations(c, o)
    if bad:
        raise ComplexError("bad_orientation", f"induced orientations agree on ridge {list(bad[0])}")
    return o


# --- cone decompositions -------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    facet: tuple[int, ...]
    columns: tuple[int, ...]  # (apex, oriented facet)


@dataclass(frozen=True)
class ConeDecomposition:
    apex: int
    mode: str
    pieces: tuple[Piece, ...]
    n: int


def cone_decomposition(c: SimplicialComplex, o: Orientation, mode: str | int = "fresh_apex") -> ConeDecomposition:
    """``"fresh_apex"`` cones every facet from vertex 0; an int ``v`` cones the facets missing ``v`` from ``v``."""
    c.require_pure()
    if mode in ("fresh_apex", 0, "fresh"):
        pieces = tuple(Piece(f, (0,) + of) for f, of in zip(c.facets, o.ordered_facets))
        return ConeDecomposition(0, "fresh_apex", pieces, c.n)
    if isinstance(mode, str) and mode.startswith("at_vertex"):
        mode = int(mode.split(":")[-1].strip("()"))
    v = int(mode)
    if v not in c.vertices:
        raise ComplexError("not_a_vertex", f"{v} is not a vertex of the complex")
    pieces = tuple(Piece(f, (v,) + of) for f, of in zip(c.facets, o.ordered_facets) if v not in f)
    return ConeDecomposition(v, f"at_vertex({v})", pieces, c.n)


def signed_census(d: ConeDecomposition, characteristic: int = 0) -> dict[tuple[int, ...], int]:
    """Total boundary of the pieces as a chain on sorted (n-1)-simplices."""
    out: dict[tuple[int, ...], int] = defaultdict(int)
    for p in d.pieces:
        cols = p.columns
        for k in range(len(cols)):
            rest = cols[:k] + cols[k + 1:]
            out[tuple(sorted(rest))] += (-1) ** k * permutation_sign(rest)
    mod = 2 if characteristic == 2 else 0
    return {f: (v % 2 if mod else v) for f, v in out.items() if (v % 2 if mod else v)}


def fundamental_cycle(c: SimplicialComplex, o: Orientation) -> dict[tuple[int, ...], int]:
    if o.characteristic == 2:
        return {f: 1 for f in c.facets}
    return {f: permutation_sign(of) for f, of in zip(c.facets, o.ordered_facets)}


# --- file io --------------------------------------------------------------------

def load_complex(path: str | Path) -> tuple[SimplicialComplex, list | None]:
    """Read the JSON complex format; returns the complex and any stored orientation lists."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ComplexError("bad_json", f"{path}: {exc}") from None
    return complex_from_json(data, name=path.stem)


def complex_from_json(data: dict, name: str = "") -> tuple[SimplicialComplex, list | None]:
    if not isinstance(data, dict) or "facets" not in data or "num_vertices" not in data:
        raise ComplexError("schema", "expected an object with 'num_vertices' and 'facets'")
    nv = data["num_vertices"]
    if not isinstance(nv, int) or nv < 1:
        raise ComplexError("schema", "'num_vertices' must be a positive integer")
    facets = data["facets"]
    if not isinstance(facets, list) or not all(isinstance(f, list) for f in facets):
        raise ComplexError("schema", "'facets' must be a list of lists")
    c = SimplicialComplex.from_facets(facets, nv, name=data.get("name", name))
    orient = data.get("orientation")
    return c, orient
