"""Exact counts of integer points with ``|F(x)| <= m``.

The workhorse is a per-fiber counter: with all but one variable fixed, F is
an integer polynomial ``p`` in the last variable, and the integers ``k`` in a
range with ``|p(k)| <= m`` are counted by cutting the range into runs on
which ``p`` is monotone and binary searching inside each run.  Monotone runs
of ``p`` are the sign runs of the forward difference ``p(k+1) - p(k)``, which
are in turn found from the monotone runs of that difference, so everything
reduces to exact integer evaluations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import upoly
from .errors import PreconditionError, ResourceError
from .factorization import factor_form
from .forms import Form, UnimodularMap
from .invariants import QuadraticPower, classify_type
from .roots import aberth, polish_real_root
from .volume import sup_norm_radius

DEFAULT_BUDGET = 10**9


@dataclass(frozen=True)
class CountResult:
    N: int
    Nstar: int
    m: int
    B: int | None = None
    certified_total: bool = False
    scan_bound: int | None = None

    @property
    def zeros(self) -> int:
        return self.N - self.Nstar

    def to_json(self) -> dict:
        return {"N": self.N, "Nstar": self.Nstar, "m": self.m, "B": self.B,
                "certified_total": self.certified_total, "scan_bound": self.scan_bound}


# --- one-dimensional kernel ---------------------------------------------------

def _first_true(pred, lo, hi):
    """Smallest k in [lo, hi] with pred(k), assuming pred is monotone; hi+1 if none."""
    while lo <= hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid - 1
        else:
            lo = mid + 1
    return lo


def monotone_runs(p, lo, hi):
    """Partition [lo, hi] into ``(a, b, increasing)`` runs where ``p`` is monotone."""
    if lo > hi:
        return []
    if upoly.degree(p) <= 0 or lo == hi:
        return [(lo, hi, True)]
    dp = upoly.difference(p)
    runs = []
    for a, b, nonneg in sign_runs(dp, lo, hi - 1):
        runs.append((a, b, nonneg))
    a, b, inc = runs[-1]
    runs[-1] = (a, hi, inc)
    return runs


def sign_runs(q, lo, hi):
    """Partition [lo, hi] into ``(a, b, nonneg)`` runs of constant sign class of ``q``."""
    if lo > hi:
        return []
    if upoly.degree(q) <= 0:
        c = q[0] if q else 0
        return [(lo, hi, c >= 0)]
    out = []
    for a, b, inc in monotone_runs(q, lo, hi):
        if inc:
            cut = _first_true(lambda k: upoly.peval(q, k) >= 0, a, b)
            pieces = [(a, cut - 1, False), (cut, b, True)]
        else:
            cut = _first_true(lambda k: upoly.peval(q, k) < 0, a, b)
            pieces = [(a, cut - 1, True), (cut, b, False)]
        for s, e, cls in pieces:
            if s > e:
                continue
            if out and out[-1][2] == cls and out[-1][1] == s - 1:
                out[-1] = (out[-1][0], e, cls)
            else:
                out.append((s, e, cls))
    return out


def _count_le(p, a, b, inc, t, strict=False):
    """Number of k in [a, b] with p(k) <= t (or < t), p monotone on [a, b]."""
    if strict:
        test = lambda k: upoly.peval(p, k) < t
    else:
        test = lambda k: upoly.peval(p, k) <= t
    if inc:
        return _first_true(lambda k: not test(k), a, b) - a
    return b - _first_true(test, a, b) + 1


def count_fiber(p, m, lo, hi):
    """``(#{k: |p(k)| <= m}, #{k: p(k) = 0})`` over integers k in [lo, hi]."""
    p = upoly.trim(list(p))
    if lo > hi:
        return 0, 0
    if not p:
        return hi - lo + 1, hi - lo + 1
    total = zeros = 0
    for a, b, inc in monotone_runs(p, lo, hi):
        total += _count_le(p, a, b, inc, m) - _count_le(p, a, b, inc, -m, strict=True)
        zeros += _count_le(p, a, b, inc, 0) - _count_le(p, a, b, inc, 0, strict=True)
    return total, zeros


# --- box counts --------------------------------------------------------------------

def _fiber_poly(terms, prefix):
    k = len(prefix)
    d = max(e[k] for e, _ in terms)
    out = [0] * (d + 1)
    for e, c in terms:
        v = c
        for xi, ei in zip(prefix, e):
            if ei:
                v *= xi ** ei
        out[e[k]] += v
    return out


def _interval_bounds(terms, prefix, B):
    """Integer bounds of F over the box with the remaining coordinates in [-B, B]."""
    k = len(prefix)
    lo = hi = 0
    for e, c in terms:
        v = c
        for xi, ei in zip(prefix, e):
            if ei:
                v *= xi ** ei
        rest = sum(e[k:])
        if rest == 0:
            lo += v
            hi += v
            continue
        mag = abs(v) * B ** rest
        if all(ei % 2 == 0 for ei in e[k:]) and v > 0:
            hi += mag
        elif all(ei % 2 == 0 for ei in e[k:]):
            lo -= mag
        else:
            lo -= mag
            hi += mag
    return lo, hi


def _orient(F: Form) -> Form:
    """Move the variable with the largest leading coefficient to the last slot."""
    n, d = F.n, F.d
    best = max(range(n), key=lambda i: (abs(F[tuple(d if j == i else 0 for j in range(n))]), i == n - 1))
    if best == n - 1:
        return F
    perm = list(range(n))
    perm[best], perm[n - 1] = perm[n - 1], perm[best]
    return Form.from_dict({tuple(e[perm[j]] for j in range(n)): c for e, c in F.terms}, n=n)


def count_box(F: Form, m: int, B: int, budget: int = DEFAULT_BUDGET) -> CountResult:
    """Points with ``|F| <= m`` and ``max|x_i| <= B``."""
    if m < 0 or B < 0:
        raise ValueError("m and B must be non-negative")
    m, B = int(m), int(B)
    G = _orient(F)
    n = G.n
    fibers = (2 * B + 1) ** (n - 1)
    if fibers > budget:
        raise ResourceError(f"box enumeration needs {fibers} fibers, budget is {budget}")
    terms = G.terms
    total = zeros = 0

    def walk(prefix):
        nonlocal total, zeros
        if len(prefix) == n - 1:
            t, z = count_fiber(_fiber_poly(terms, prefix), m, -B, B)
            total += t
            zeros += z
            return
        if prefix:
            lo, hi = _interval_bounds(terms, prefix, B)
            if lo > m or hi < -m:
                return
        for x in range(-B, B + 1):
            walk(prefix + (x,))

    walk(())
    return CountResult(total, total - zeros, m, B)


def count_box_naive(F: Form, m: int, B: int) -> CountResult:
    import itertools
    total = zeros = 0
    for x in itertools.product(range(-B, B + 1), repeat=F.n):
        v = F(x)
        if abs(v) <= m:
            total += 1
            zeros += v == 0
    return CountResult(total, total - zeros, m, B)


def count_total_bounded(F: Form, m: int, budget: int = DEFAULT_BUDGET) -> CountResult:
    try:
        B = sup_norm_radius(F, m)
    except PreconditionError:
        raise PreconditionError("count_total_bounded needs a certified bounded region") from None
    r = count_box(F, m, B, budget)
    return CountResult(r.N, r.Nstar, r.m, None, True, None)


# --- Thue inequalities ---------------------------------------------------------

def _convergents(theta, q_max):
    """Continued-fraction convergents ``(p, q)`` of an mpf with ``0 < q <= q_max``."""
    out = []
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    x = theta
    while True:
        a = int(mpmath.floor(x))
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > q_max:
            break
        out.append((h1, k1))
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def thue_constants(F: Form, m: int, bits: int = 113):
    """``(Y0, C, real_roots)`` such that every solution with ``|y| > Y0`` has
    ``x/y`` close enough to a real root to be a convergent."""
    c = F.binary_coefficients()
    d = F.d
    f = list(c)  # F(t, 1) lowest degree first
    ad = abs(c[-1])
    roots = aberth(f, bits)
    C = 0.0
    min_im = math.inf
    for i, ti in enumerate(roots):
        prod = 1.0
        for j, tj in enumerate(roots):
            if j != i:
                prod *= float(abs(ti - tj))
        C = max(C, 2 ** (d - 1) / (ad * prod))
    nreal = upoly.count_real_roots(upoly.trim(f))
    ordered = sorted(roots, key=lambda z: abs(float(z.imag)))
    real = sorted(float(z.real) for z in ordered[:nreal])
    for z in ordered[nreal:]:
        min_im = min(min_im, abs(float(z.imag)))
    Y0 = (2 * C * m) ** (1.0 / (d - 2)) if m > 0 else 0.0
    if min_im < math.inf and m > 0:
        Y0 = max(Y0, (C * m / min_im) ** (1.0 / d))
    return Y0, C, real


def count_total_thue(F: Form, m: int, q_max: int | None = None) -> CountResult:
    if F.n != 2 or F.d < 3:
        raise PreconditionError("Thue counting needs a binary form of degree >= 3")
    if classify_type(F) != "finite":
        raise PreconditionError("Thue counting needs a form of finite type")
    m = int(m)
    c = F.binary_coefficients()
    d = F.d
    Y0, C, real = thue_constants(F, m)
    Ymax = int(math.floor(Y0))
    if q_max is None:
        q_max = max(10**12, int(10**6 * (Y0 + 1)))
    q_max = int(q_max)

    total = zeros = 0
    cmax = max(abs(v) for v in c[:-1])
    for y in range(-Ymax, Ymax + 1):
        xb = 1 + (cmax * max(1, abs(y)) ** d + m) // abs(c[-1])
        p = [c[i] * y ** (d - i) for i in range(d + 1)]
        t, z = count_fiber(p, m, -xb, xb)
        total += t
        zeros += z

    found = set()
    certified = q_max >= 10**6 * Y0
    bits = max(256, 4 * q_max.bit_length() + 64)
    f = list(c)
    for r in real:
        theta = polish_real_root(f, r, bits)
        with mpmath.workprec(bits):
            convs = _convergents(theta, q_max)
        values = []
        for pp, qq in convs:
            v = abs(F((pp, qq)))
            values.append(v)
            if v == 0 or v > m:
                continue
            g = Ymax // qq + 1
            while g ** d * v <= m:
                found.add((g * pp, g * qq))
                found.add((-g * pp, -g * qq))
                g += 1
        if len(values) < 2 or any(v <= m for v in values[-2:]):
            certified = False
    total += len(found)
    return CountResult(total, total - zeros, m, None, certified, None if certified else q_max)


# --- definite quadratic powers ------------------------------------------------

def reduce_definite_quadratic(A: int, B: int, C: int):
    """Gauss reduction; returns ``(r, s, t, T)`` with ``G(T X) = r x^2 + s x y + t y^2``.

    Negative definite input is reduced through ``-G`` and the reduced
    coefficients are negated back, so ``|s| <= |r| <= |t|``.
    """
    if B * B - 4 * A * C >= 0:
        raise ValueError("quadratic form is not definite")
    if A < 0:
        r, s, t, T = reduce_definite_quadratic(-A, -B, -C)
        return -r, -s, -t, T
    T = UnimodularMap.identity(2)
    swap = UnimodularMap(((0, -1), (1, 0)))
    while True:
        k = (A - B) // (2 * A)
        if k:
            B, C = B + 2 * A * k, A * k * k + B * k + C
            T = T @ UnimodularMap(((1, k), (0, 1)))
        if A > C or (A == C and B < 0):
            A, B, C = C, -B, A
            T = T @ swap
            continue
        return A, B, C, T


def _count_quadratic_le(r, s, t, Q):
    """Integer points with ``0 < r x^2 + s x y + t y^2 <= Q`` for a reduced positive form."""
    if Q < 1:
        return 0
    D = 4 * r * t - s * s
    ymax = math.isqrt(4 * r * Q // D) + 1
    count = 0
    G = lambda x, y: r * x * x + s * x * y + t * y * y
    for y in range(-ymax, ymax + 1):
        disc = 4 * r * Q - D * y * y
        if disc < 0:
            continue
        root = math.isqrt(disc)
        lo = (-s * y - root) // (2 * r) - 1
        hi = (-s * y + root) // (2 * r) + 1
        while lo <= hi and G(lo, y) > Q:
            lo += 1
        while hi >= lo and G(hi, y) > Q:
            hi -= 1
        if lo <= hi:
            count += hi - lo + 1
    return count - 1  # the origin


def count_quadratic_power(qp: QuadraticPower, m: int) -> CountResult:
    m = int(m)
    h, k = abs(qp.h), qp.k
    if m < h:
        return CountResult(1, 0, m, None, True, None)
    Q = int(round((Fraction(m, h)) ** (1.0 / k)))
    while Q > 0 and Q ** k * h > m:
        Q -= 1
    while (Q + 1) ** k * h <= m:
        Q += 1
    r, s, t, _ = reduce_definite_quadratic(qp.A, qp.B, qp.C)
    if r < 0:
        r, s, t = -r, -s, -t
    n = _count_quadratic_le(r, s, t, Q)
    return CountResult(n + 1, n, m, None, True, None)


def count_total(F: Form, m: int, budget: int = DEFAULT_BUDGET, q_max: int | None = None) -> CountResult:
    """Dispatch to the best exact total counter for F."""
    from .invariants import detect_quadratic_power
    from .volume import is_region_bounded
    if F.n == 2:
        qp = detect_quadratic_power(F)
        if qp is not None:
            return count_quadratic_power(qp, m)
    if is_region_bounded(F) == "bounded":
        return count_total_bounded(F, m, budget)
    if F.n == 2 and F.d >= 3 and classify_type(F) == "finite":
        return count_total_thue(F, m, q_max)
    raise PreconditionError("no exact total count available: region unbounded and not a Thue inequality")
