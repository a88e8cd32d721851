"""Exact univariate polynomial arithmetic over Z and Q.

A polynomial is a list of coefficients, lowest degree first.  Functions
return trimmed lists; the zero polynomial is ``[]``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p) -> int:
    return len(trim(p)) - 1


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def padd(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def psub(p, q):
    return padd(p, [-c for c in q])


def pscale(p, c):
    return trim([c * a for a in p])


def pmul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def ppow(p, k):
    out = [1]
    for _ in range(k):
        out = pmul(out, p)
    return out


def pderiv(p):
    return trim([i * p[i] for i in range(1, len(p))])


def pdivmod(p, q):
    """Division with remainder over Q."""
    q = trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(p)]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    if len(r) - 1 < dq:
        return [], trim(r)
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quot[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def exact_div(p, q):
    """Quotient ``p / q`` over Z; raises ``ArithmeticError`` unless exact."""
    quot, rem = pdivmod(p, q)
    if rem or any(c.denominator != 1 for c in quot):
        raise ArithmeticError("inexact polynomial division")
    return [int(c) for c in quot]


def divides(q, p) -> bool:
    try:
        exact_div(p, q)
    except ArithmeticError:
        return False
    return True


def content(p) -> int:
    return reduce(math.gcd, (abs(int(c)) for c in p), 0)


def primitive(p):
    """Primitive integer polynomial with positive leading coefficient."""
    p = trim(p)
    if not p:
        return []
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in p):
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(c).denominator for c in p), 1)
        p = [int(Fraction(c) * den) for c in p]
    p = [int(c) for c in p]
    g = content(p)
    if p[-1] < 0:
        g = -g
    return [c // g for c in p]


def pgcd(p, q):
    """Primitive gcd of two integer polynomials."""
    a, b = trim(p), trim(q)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, primitive(r) if r else []
    return primitive(a) if a else []


def squarefree_decomposition(p):
    """Yun's algorithm: list of ``(g_k, k)`` with ``prim(p) = prod g_k^k``.

    Every ``g_k`` is primitive with positive leading coefficient; factors of
    degree zero are omitted.
    """
    f = primitive(p)
    out = []
    if degree(f) <= 0:
        return out
    a = pgcd(f, pderiv(f))
    b = exact_div(f, a)
    c = exact_div(pderiv(f), a)
    d = psub(c, pderiv(b))
    k = 1
    while degree(b) > 0:
        g = pgcd(b, d)
        if degree(g) > 0:
            out.append((g, k))
        b = exact_div(b, g)
        c = exact_div(d, g)
        d = psub(c, pderiv(b))
        k += 1
    return out


def _sign(v):
    return (v > 0) - (v < 0)


def _sign_at_infinity(p, positive: bool):
    lead = p[-1]
    deg = len(p) - 1
    s = _sign(lead)
    if not positive and deg % 2:
        s = -s
    return s


def sturm_sequence(p):
    p = trim(p)
    seq = [p, pderiv(p)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = pdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def count_real_roots(p, lo=None, hi=None) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (unbounded by default)."""
    seq = sturm_sequence(p)

    def variations(x, positive=True):
        if x is None:
            signs = [_sign_at_infinity(s, positive) for s in seq]
        else:
            signs = [_sign(peval(s, Fraction(x))) for s in seq]
        signs = [s for s in signs if s]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    return variations(lo, positive=False) - variations(hi, positive=True)


def taylor_shift(p, a):
    """Coefficients of ``p(x + a)``."""
    out = []
    for c in reversed(p):
        out = padd(pmul(out, [a, 1]), [c])
    return out


def difference(p):
    """Coefficients of ``p(x + 1) - p(x)``."""
    return psub(taylor_shift(p, 1), p)


def det_bareiss(matrix) -> int:
    """Exact integer determinant by fraction-free elimination."""
    m = [list(r) for r in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def resultant(f: Sequence[int], g: Sequence[int]) -> int:
    """Resultant via the Sylvester determinant."""
    f, g = trim(f), trim(g)
    if not f or not g:
        return 0
    m, n = len(f) - 1, len(g) - 1
    if m == 0 and n == 0:
        return 1
    if m == 0:
        return f[0] ** n
    if n == 0:
        return g[0] ** m
    size = m + n
    rows = []
    fh = list(reversed(f))
    gh = list(reversed(g))
    for i in range(n):
        rows.append([0] * i + fh + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gh + [0] * (size - n - 1 - i))
    return det_bareiss(rows)
