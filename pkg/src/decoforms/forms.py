"""Integer homogeneous forms: evaluation, content, unimodular substitution.

Polynomials are kept as ``{exponent_tuple: int}`` dictionaries while being
built; a :class:`Form` freezes one into a sorted tuple of terms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, Sequence

from .errors import FormError, HomogeneityError, ZeroFormError

Exp = tuple[int, ...]


def _term_key(exp: Exp):
    # graded order, larger powers of the earlier variables first
    return (-sum(exp), tuple(-e for e in exp))


@dataclass(frozen=True)
class Form:
    n: int
    d: int
    terms: tuple[tuple[Exp, int], ...]

    is_zero = False

    def __post_init__(self):
        if self.n < 1:
            raise FormError("a form needs at least one variable")
        if not self.terms:
            raise ZeroFormError("the zero polynomial is not a form")
        for exp, c in self.terms:
            if len(exp) != self.n:
                raise FormError(f"exponent {exp} has wrong length for n={self.n}")
            if min(exp) < 0:
                raise FormError(f"negative exponent in {exp}")
            if sum(exp) != self.d:
                raise HomogeneityError(f"monomial {exp} has degree {sum(exp)}, expected {self.d}")
            if c == 0:
                raise FormError("explicit zero coefficient")

    @classmethod
    def from_dict(cls, coeffs: Mapping[Exp, int], n: int | None = None) -> "Form":
        items = [(tuple(int(e) for e in k), int(v)) for k, v in coeffs.items() if v != 0]
        if not items:
            raise ZeroFormError("the zero polynomial is not a form")
        if n is None:
            n = len(items[0][0])
        degrees = {sum(k) for k, _ in items}
        if len(degrees) > 1:
            by_deg = {}
            for k, _ in items:
                by_deg.setdefault(sum(k), k)
            a, b = list(by_deg.values())[:2]
            raise HomogeneityError(
                f"not homogeneous: monomials {a} (degree {sum(a)}) and {b} (degree {sum(b)})")
        items.sort(key=lambda kv: _term_key(kv[0]))
        return cls(n, degrees.pop(), tuple(items))

    @property
    def coeffs(self) -> dict[Exp, int]:
        return dict(self.terms)

    def __getitem__(self, exp: Exp) -> int:
        return self.coeffs.get(tuple(exp), 0)

    def __call__(self, point):
        return evaluate(self, point)

    def __str__(self):
        from .parser import render_form
        return render_form(self)

    def leading_coefficient(self) -> int:
        return self.terms[0][1]

    @property
    def content(self) -> int:
        return reduce(math.gcd, (abs(c) for _, c in self.terms))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, data) -> "Form":
        if isinstance(data, str):
            data = json.loads(data)
        f = cls.from_dict({tuple(t["exp"]): int(t["coef"]) for t in data["terms"]}, n=data["n"])
        if f.d != data["d"]:
            raise FormError(f"declared degree {data['d']} does not match terms ({f.d})")
        return f

    def binary_coefficients(self) -> list[int]:
        """Coefficients ``c_i`` of ``x^i y^(d-i)``, index ``i`` from 0 to d."""
        if self.n != 2:
            raise FormError("binary_coefficients needs n = 2")
        out = [0] * (self.d + 1)
        for (i, _), c in self.terms:
            out[i] = c
        return out

    @classmethod
    def from_binary(cls, coeffs: Sequence[int]) -> "Form":
        d = len(coeffs) - 1
        return cls.from_dict({(i, d - i): c for i, c in enumerate(coeffs)}, n=2)


@dataclass(frozen=True)
class ZeroForm:
    """Marker returned when a restriction vanishes identically."""
    n: int
    d: int

    is_zero = True


@dataclass(frozen=True)
class UnimodularMap:
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise FormError("unimodular map must be a square matrix")
        from .linalg import det_int
        if abs(det_int(rows)) != 1:
            raise FormError(f"matrix {rows} is not in GL_n(Z)")

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, n: int) -> "UnimodularMap":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "UnimodularMap") -> "UnimodularMap":
        a, b = self.matrix, other.matrix
        n = len(a)
        return UnimodularMap(tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)))

    def apply(self, point: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r[j] * point[j] for j in range(len(point))) for r in self.matrix)


# --- sparse multivariate polynomial helpers ------------------------------

def poly_mul(p: Mapping[Exp, int], q: Mapping[Exp, int]) -> dict[Exp, int]:
    out: dict[Exp, int] = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def poly_add(p, q, scale=1):
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + scale * c
    return {e: c for e, c in out.items() if c != 0}


def poly_pow(p, k: int, nvars: int):
    result = {(0,) * nvars: 1}
    base = dict(p)
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def substitute_linear(coeffs: Mapping[Exp, int], rows: Sequence[Sequence[int]]) -> dict[Exp, int]:
    """Replace variable ``x_i`` by ``sum_j rows[i][j] * t_j`` and expand."""
    m = len(rows[0])
    linear = []
    for r in rows:
        lin = {}
        for j, v in enumerate(r):
            if v:
                e = [0] * m
                e[j] = 1
                lin[tuple(e)] = v
        linear.append(lin)
    cache: dict[tuple[int, int], dict] = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            cache[key] = poly_pow(linear[i], k, m)
        return cache[key]

    out: dict[Exp, int] = {}
    for exp, c in coeffs.items():
        term = {(0,) * m: c}
        for i, k in enumerate(exp):
            if k:
                term = poly_mul(term, power(i, k))
                if not term:
                    break
        out = poly_add(out, term)
    return out


# --- operations -----------------------------------------------------------

def evaluate(F: Form, a: Sequence[int]) -> int:
    if len(a) != F.n:
        raise FormError(f"point of length {len(a)} given for a form in {F.n} variables")
    total = 0
    for exp, c in F.terms:
        term = c
        for x, e in zip(a, exp):
            if e:
                term *= x ** e
        total += term
    return total


def content_and_primitive(F: Form) -> tuple[int, Form]:
    g = F.content
    if F.leading_coefficient() < 0:
        g = -g
    prim = Form(F.n, F.d, tuple((e, c // g) for e, c in F.terms))
    return g, prim


def apply_unimodular(F: Form, T: UnimodularMap | Sequence[Sequence[int]]) -> Form:
    """Return ``G(X) = F(T X)``."""
    if not isinstance(T, UnimodularMap):
        T = UnimodularMap(T)
    if T.n != F.n:
        raise FormError(f"{T.n}x{T.n} map applied to a form in {F.n} variables")
    return Form.from_dict(substitute_linear(F.coeffs, T.matrix), n=F.n)


def restrict_to_subspace(F: Form, S) -> Form | ZeroForm:
    """Substitute ``x = sum_k t_k b_k`` for the integer basis ``b_k`` of ``S``.

    ``S`` may be a :class:`~decoforms.linalg.RationalSubspace` or a plain list
    of basis vectors.
    """
    basis = [list(v) for v in getattr(S, "basis", S)]
    k = len(basis)
    if k == 0 or k >= F.n:
        raise FormError(f"restriction needs a subspace of dimension 1..{F.n - 1}, got {k}")
    if any(len(v) != F.n for v in basis):
        raise FormError("basis vectors have the wrong length")
    rows = [[basis[j][i] for j in range(k)] for i in range(F.n)]
    out = substitute_linear(F.coeffs, rows)
    if not out:
        return ZeroForm(k, F.d)
    return Form.from_dict(out, n=k)


def scale_point(a: Iterable[int], k: int) -> tuple[int, ...]:
    return tuple(k * x for x in a)
