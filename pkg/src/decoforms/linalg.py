"""Exact rational linear algebra and rational subspaces of Q^n."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .upoly import det_bareiss


def det_int(matrix) -> int:
    return det_bareiss(matrix)


def rref(matrix):
    """Reduced row echelon form over Q; returns ``(rows, pivot_columns)``."""
    m = [[Fraction(v) for v in r] for r in matrix]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    row = 0
    for col in range(ncols):
        pr = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[row], m[pr] = m[pr], m[row]
        piv = m[row][col]
        m[row] = [v / piv for v in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return m[:row], pivots


def rank(matrix) -> int:
    return len(rref(matrix)[1])


def _primitive_int(vec):
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(v).denominator for v in vec), 1)
    ints = [int(Fraction(v) * den) for v in vec]
    g = reduce(math.gcd, (abs(v) for v in ints), 0)
    return [v // g for v in ints] if g else ints


def nullspace(matrix, ncols: int | None = None):
    """Integer basis of ``{x in Q^n : M x = 0}``."""
    if ncols is None:
        ncols = len(matrix[0])
    rows, pivots = rref(matrix) if matrix else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(rows, pivots):
            v[p] = -r[f]
        basis.append(_primitive_int(v))
    return basis


def hermite_normal_form(rows):
    """Row-style Hermite normal form of an integer matrix (zero rows dropped)."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        # gcd-eliminate column c below row r
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return [row for row in a[:r] if any(row)]


@dataclass(frozen=True)
class RationalSubspace:
    """A subspace of Q^n stored by a canonical integer basis.

    The basis is the Hermite normal form of the primitive rows of the
    reduced echelon basis, which makes equal subspaces compare equal.
    """
    n: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, vectors: Sequence[Sequence[int]], n: int | None = None) -> "RationalSubspace":
        vectors = [list(v) for v in vectors]
        if n is None:
            if not vectors:
                raise ValueError("ambient dimension needed for an empty span")
            n = len(vectors[0])
        if not vectors:
            return cls(n, ())
        rows, _ = rref(vectors)
        prim = [_primitive_int(r) for r in rows]
        return cls(n, tuple(tuple(r) for r in hermite_normal_form(prim)))

    @classmethod
    def zero(cls, n: int) -> "RationalSubspace":
        return cls(n, ())

    @classmethod
    def kernel(cls, matrix, n: int) -> "RationalSubspace":
        return cls.span(nullspace(matrix, n) if matrix else [[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def constraints(self):
        """Integer rows whose common kernel is this subspace."""
        if not self.basis:
            return [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        return nullspace([list(b) for b in self.basis], self.n)

    def intersect(self, other: "RationalSubspace") -> "RationalSubspace":
        return RationalSubspace.kernel(self.constraints() + other.constraints(), self.n)

    def contains(self, v) -> bool:
        return all(sum(c * x for c, x in zip(row, v)) == 0 for row in self.constraints())

    def to_json(self):
        return {"n": self.n, "dim": self.dim, "basis": [list(b) for b in self.basis]}
