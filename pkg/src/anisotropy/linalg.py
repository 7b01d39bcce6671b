"""Exact dense linear algebra over a :class:`~anisotropy.fields.Field` (raw values)."""
from __future__ import annotations

from typing import Sequence

from .fields import Field


class RowBasis:
    """Incremental row-echelon basis; ``add`` reports whether a row was independent."""

    def __init__(self, field: Field, width: int):
        self.field = field
        self.width = width
        self.rows: list[tuple[int, list]] = []  # (pivot column, normalized row)

    def reduce(self, row: Sequence) -> list:
        F = self.field
        r = list(row)
        for piv, b in self.rows:
            c = r[piv]
            if not F.is_zero(c):
                r = [F.sub(x, F.mul(c, y)) for x, y in zip(r, b)]
        return r

    def add(self, row: Sequence) -> bool:
        F = self.field
        r = self.reduce(row)
        for piv, x in enumerate(r):
            if not F.is_zero(x):
                inv = F.inv(x)
                self.rows.append((piv, [F.mul(y, inv) for y in r]))
                return True
        return False

    def __len__(self):
        return len(self.rows)


def pivot_rows(field: Field, matrix: Sequence[Sequence]) -> list[int]:
    """Indices of the greedy (first-come) maximal independent set of rows."""
    if not matrix:
        return []
    basis = RowBasis(field, len(matrix[0]))
    return [i for i, row in enumerate(matrix) if basis.add(row)]


def rank(field: Field, matrix: Sequence[Sequence]) -> int:
    return len(pivot_rows(field, matrix))


def determinant(field: Field, matrix: Sequence[Sequence]):
    F = field
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("determinant of a non-square matrix")
    m = [list(r) for r in matrix]
    det = F.one
    for col in range(n):
        piv = next((r for r in range(col, n) if not F.is_zero(m[r][col])), None)
        if piv is None:
            return F.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = F.neg(det)
        p = m[col][col]
        det = F.mul(det, p)
        inv = F.inv(p)
        for r in range(col + 1, n):
            c = m[r][col]
            if not F.is_zero(c):
                f = F.mul(c, inv)
                m[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[r], m[col])]
    return det


def solve(field: Field, matrix: Sequence[Sequence], rhs: Sequence) -> list | None:
    """One solution of ``matrix @ x = rhs`` (free variables set to zero), or ``None``."""
    F = field
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not F.is_zero(aug[i][c])), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = F.inv(aug[r][c])
        aug[r] = [F.mul(x, inv) for x in aug[r]]
        for i in range(rows):
            if i != r and not F.is_zero(aug[i][c]):
                f = aug[i][c]
                aug[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if not F.is_zero(aug[i][cols]):
            return None
    x = [F.zero] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][cols]
    return x


def nullspace(field: Field, matrix: Sequence[Sequence]) -> list[list]:
    """Basis of ``{x : matrix @ x = 0}``."""
    F = field
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    m = [list(r) for r in matrix]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not F.is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = F.inv(m[r][c])
        m[r] = [F.mul(x, inv) for x in m[r]]
        for i in range(rows):
            if i != r and not F.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * cols
        v[fc] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = F.neg(m[i][fc])
        basis.append(v)
    return basis
