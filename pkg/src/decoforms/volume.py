"""Volumes of ``{|F| <= m}`` and its ball/box truncations.

For binary forms everything is a one-dimensional angular integral; in polar
coordinates the region along direction ``u`` is the segment of radius
``min(R(u), (m/|F(u)|)^(1/d))``, where ``R`` is the truncation radius
(infinite, the ball radius, or the distance to the box face), so the area is
``int_0^pi r(phi)^2 dphi``.  Real linear factors make ``|F(u)|^(-2/d)``
singular at their zero angles; those are integrated with algebraic endpoint
weights.  For ``n >= 3`` the same radial formula is averaged over uniform
random directions.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, optimize

from . import upoly
from .errors import DivergenceError, PreconditionError
from .factorization import FactorSystem, factor_form
from .forms import Form

DEFAULT_TOL = 1e-6
MC_BATCHES = 32
MC_BATCH_SIZE = 4096


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    abs_error: float
    method: str
    effort: int
    seed: int | None = None

    def to_json(self) -> dict:
        return {"value": self.value, "abs_error": self.abs_error, "method": self.method,
                "effort": self.effort, "seed": self.seed}


def _form_of(F) -> Form:
    if isinstance(F, Form):
        return F
    if isinstance(F, FactorSystem):
        return F.parent
    return F.form


# --- boundedness -------------------------------------------------------------

def _interval_eval(terms, box):
    tlo = thi = Fraction(0)
    for exp, c in terms:
        lo = hi = Fraction(c)
        for (a, b), e in zip(box, exp):
            if not e:
                continue
            pa, pb = a ** e, b ** e
            if e % 2 == 0:
                ilo, ihi = (Fraction(0) if a <= 0 <= b else min(pa, pb)), max(pa, pb)
            else:
                ilo, ihi = pa, pb
            cands = (lo * ilo, lo * ihi, hi * ilo, hi * ihi)
            lo, hi = min(cands), max(cands)
        tlo += lo
        thi += hi
    return tlo, thi


def _partial_terms(terms, i):
    out = []
    for exp, c in terms:
        if exp[i]:
            e = list(exp)
            e[i] -= 1
            out.append((tuple(e), c * exp[i]))
    return out


def _point_eval(terms, x):
    total = Fraction(0)
    for exp, c in terms:
        v = Fraction(c)
        for xi, e in zip(x, exp):
            if e:
                v *= xi ** e
        total += v
    return total


def min_abs_on_cube(F, max_boxes: int = 20000, max_depth: int = 60, tighten: int = 2000):
    """Certified lower bound for ``|F|`` on the boundary of ``[-1, 1]^n``.

    Returns ``(status, bound)`` with status ``bounded`` (bound > 0 is a
    rigorous lower bound), ``unbounded`` (a zero or a sign change was found,
    so F vanishes on some real direction) or ``unknown``.  By symmetry only
    the faces ``x_k = 1`` are searched; their union is connected.

    Boxes whose interval enclosure may contain zero are split first
    (breadth first).  Once all remaining boxes exclude zero the box with the
    weakest bound is refined until the bound is within a factor of two of
    the smallest sampled value or ``tighten`` extra splits are spent.
    """
    F = _form_of(F)
    n = F.n
    terms = F.terms
    one = Fraction(1)
    ub = None
    sign = 0

    def sample(box):
        nonlocal ub, sign
        mid = [(a + b) / 2 for a, b in box]
        v = _point_eval(terms, mid)
        if v == 0:
            return False
        s = 1 if v > 0 else -1
        if sign and s != sign:
            return False
        sign = s
        ub = abs(v) if ub is None else min(ub, abs(v))
        return True

    heap = []
    counter = 0
    grads = [_partial_terms(terms, i) for i in range(n)]

    def enclose(box):
        lo, hi = _interval_eval(terms, box)
        mid = [(a + b) / 2 for a, b in box]
        c = _point_eval(terms, mid)
        slack = Fraction(0)
        for i, (a, b) in enumerate(box):
            if a == b or not grads[i]:
                continue
            glo, ghi = _interval_eval(grads[i], box)
            slack += max(abs(glo), abs(ghi)) * (b - a) / 2
        return max(lo, c - slack), min(hi, c + slack)

    def push(box, depth):
        nonlocal counter
        lo, hi = enclose(box)
        key = min(abs(lo), abs(hi)) if (lo > 0 or hi < 0) else Fraction(-1)
        heapq.heappush(heap, (key, counter, box, depth))
        counter += 1

    for k in range(n):
        box = [(-one, one)] * n
        box[k] = (one, one)
        if not sample(box):
            return "unbounded", Fraction(0)
        push(box, 0)
    splits = 0
    tightening = 0
    while heap:
        key, _, box, depth = heap[0]
        if key >= 0:
            if key * 2 >= ub or tightening >= tighten or depth >= max_depth:
                break
            tightening += 1
        elif depth >= max_depth or splits >= max_boxes:
            return "unknown", None
        heapq.heappop(heap)
        splits += 1
        w, i = max((b - a, i) for i, (a, b) in enumerate(box))
        a, b = box[i]
        mid = (a + b) / 2
        for part in ((a, mid), (mid, b)):
            child = list(box)
            child[i] = part
            if not sample(child):
                return "unbounded", Fraction(0)
            push(child, depth + 1)
    return "bounded", heap[0][0]


def is_region_bounded(F) -> str:
    F = _form_of(F)
    if F.n == 2:
        c = F.binary_coefficients()
        if c[-1] == 0:
            return "unbounded"
        return "unbounded" if upoly.count_real_roots(upoly.trim(c)) else "bounded"
    status, _ = min_abs_on_cube(F)
    return status


def sup_norm_radius(F, m) -> int:
    """Largest sup-norm of any integer point with ``|F| <= m`` (bounded forms)."""
    status, lb = min_abs_on_cube(F)
    if status != "bounded":
        raise PreconditionError("the region {|F| <= m} is not certified bounded")
    d = _form_of(F).d
    B = int((Fraction(m) / lb) ** (1.0 / d)) + 1
    while B > 0 and lb * B ** d > m:
        B -= 1
    while lb * (B + 1) ** d <= m:
        B += 1
    return B


# --- binary quadrature ---------------------------------------------------------

def _angle_groups(fs: FactorSystem):
    """Zero angles in [0, pi) of the real factors with multiplicities."""
    groups: dict[float, int] = {}
    for f in fs.factors[: fs.r1]:
        p, q = f.coeffs[0].real, f.coeffs[1].real
        ang = math.atan2(p, -q) % math.pi
        if ang > math.pi - 1e-15:
            ang = 0.0
        key = next((k for k in groups if abs(k - ang) < 1e-13), ang)
        groups[key] = groups.get(key, 0) + 1
    return sorted(groups.items())


class _BinaryProfile:
    """Fast evaluation of ``log|F(cos phi, sin phi)|`` from the linear factors."""

    def __init__(self, fs: FactorSystem):
        self.fs = fs
        self.d = fs.d
        self.angles = _angle_groups(fs)
        real = fs.factors[: fs.r1]
        self.log_real_norms = sum(math.log(f.norm) for f in real)
        self.complex_vecs = np.array([f.coeffs for f in fs.factors[fs.r1:]], dtype=complex).reshape(-1, 2)

    def log_complex(self, phi):
        phi = np.asarray(phi, dtype=float)
        u = np.stack([np.cos(phi), np.sin(phi)])
        if len(self.complex_vecs) == 0:
            return np.zeros_like(phi)
        vals = self.complex_vecs @ u
        return np.sum(np.log(np.abs(vals)), axis=0)

    def log_abs(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = self.log_complex(phi) + self.log_real_norms
        for ang, mult in self.angles:
            with np.errstate(divide="ignore"):
                out = out + mult * np.log(np.abs(np.sin(phi - ang)))
        return out


def _check_integrable(fs: FactorSystem):
    d = fs.d
    for ang, mult in _angle_groups(fs):
        if 2 * mult >= d:
            raise DivergenceError(
                f"real linear factor of multiplicity {mult} >= d/2 makes the volume infinite")


def _binary_VF(fs: FactorSystem, tol: float) -> VolumeEstimate:
    _check_integrable(fs)
    prof = _BinaryProfile(fs)
    d = fs.d
    expo = -2.0 / d
    angles = prof.angles
    total = 0.0
    err = 0.0
    evals = 0
    if not angles:
        f = lambda phi: math.exp(expo * float(prof.log_abs(phi)))
        val, e, info = integrate.quad(f, 0.0, math.pi, epsabs=tol, epsrel=1e-13, limit=500, full_output=1)[:3]
        return VolumeEstimate(val, e, "quadrature", info["neval"])
    cuts = [a for a, _ in angles]
    mults = [m for _, m in angles]
    k = len(cuts)
    for idx in range(k):
        a = cuts[idx]
        b = cuts[idx + 1] if idx + 1 < k else cuts[0] + math.pi
        left_m = mults[idx]
        right_m = mults[(idx + 1) % k]
        same = k == 1

        def g(phi, a=a, b=b, left_m=left_m, right_m=right_m, same=same):
            s = prof.log_complex(phi) + prof.log_real_norms
            for j, (ang, mult) in enumerate(angles):
                sv = abs(math.sin(phi - ang))
                if j == idx or (same and j == 0):
                    # divide out the endpoint power absorbed by the weight
                    w = phi - a
                    if same:
                        w *= b - phi
                    s += mult * (math.log(sv / w) if sv > 0 and w > 0 else (-math.log(b - a) if same else 0.0))
                elif j == (idx + 1) % k:
                    w = b - phi
                    s += mult * (math.log(sv / w) if sv > 0 and w > 0 else 0.0)
                else:
                    s += mult * math.log(sv)
            return math.exp(expo * float(s))

        alpha = expo * left_m
        beta = expo * right_m
        val, e, info = integrate.quad(g, a, b, weight="alg", wvar=(alpha, beta),
                                      epsabs=tol / k, epsrel=1e-13, limit=500, full_output=1)[:3]
        total += val
        err += e
        evals += info["neval"]
    return VolumeEstimate(total, err, "quadrature", evals)


def _box_radius(phi):
    return 1.0 / np.maximum(np.abs(np.cos(phi)), np.abs(np.sin(phi)))


def _binary_truncated(fs: FactorSystem, m: float, B: float, tol: float, box: bool) -> VolumeEstimate:
    prof = _BinaryProfile(fs)
    d = fs.d
    logm = math.log(m)

    def logR(phi):
        phi = np.asarray(phi, dtype=float)
        base = np.full_like(phi, math.log(B))
        return base + np.log(_box_radius(phi)) if box else base

    def h(phi):
        # > 0 where the level set is inside the truncation
        return prof.log_abs(phi) + d * logR(phi) - logm

    def integrand(phi):
        lr = float(logR(phi))
        with np.errstate(divide="ignore"):
            la = float(prof.log_abs(phi))
        lf = (logm - la) / d if np.isfinite(la) else math.inf
        return math.exp(2 * min(lr, lf))

    breaks = {0.0, math.pi}
    if box:
        breaks |= {math.pi / 4, math.pi / 2, 3 * math.pi / 4}
    for ang, _ in prof.angles:
        breaks.add(ang)
    grid = np.linspace(0.0, math.pi, 4097)[:-1] + math.pi / 8192 / 3
    with np.errstate(divide="ignore"):
        hv = h(grid)
    hv = np.where(np.isfinite(hv), hv, -1e300)
    for i in range(len(grid)):
        j = (i + 1) % len(grid)
        if (hv[i] > 0) != (hv[j] > 0):
            lo, hi = grid[i], grid[j] if j else grid[0] + math.pi
            f = lambda t: float(np.nan_to_num(h(t % math.pi), neginf=-1e300))
            try:
                breaks.add(optimize.brentq(f, lo, hi, xtol=1e-15) % math.pi)
            except ValueError:
                breaks.add(0.5 * (lo + hi) % math.pi)
    pts = sorted(breaks)
    total = 0.0
    err = 0.0
    evals = 0
    pieces = max(1, len(pts) - 1)
    for a, b in zip(pts, pts[1:]):
        if b - a < 1e-15:
            continue
        val, e, info = integrate.quad(integrand, a, b, epsabs=tol / pieces, epsrel=1e-12,
                                      limit=200, full_output=1)[:3]
        total += val
        err += e
        evals += info["neval"]
    return VolumeEstimate(total, err, "quadrature", evals)


# --- Monte Carlo -----------------------------------------------------------------

def _numeric_form(F: Form):
    exps = np.array([e for e, _ in F.terms], dtype=float)
    coefs = np.array([float(c) for _, c in F.terms])
    return exps, coefs


def _eval_numeric(exps, coefs, X):
    # X: (N, n) -> F values
    logs = np.ones((X.shape[0], len(coefs)))
    for j in range(X.shape[1]):
        logs *= X[:, j:j + 1] ** exps[None, :, j]
    return logs @ coefs


def _sphere_area(n):
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def _monte_carlo(F: Form, radial, seed: int, batches: int = MC_BATCHES,
                 batch_size: int = MC_BATCH_SIZE) -> VolumeEstimate:
    n = F.n
    exps, coefs = _numeric_form(F)
    streams = np.random.SeedSequence(seed).spawn(batches)
    means = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        U = rng.standard_normal((batch_size, n))
        U /= np.linalg.norm(U, axis=1)[:, None]
        vals = np.abs(_eval_numeric(exps, coefs, U))
        means.append(float(np.mean(radial(U, vals) ** n)))
    means = np.array(means)
    scale = _sphere_area(n) / n
    est = float(np.median(means)) * scale
    mad = float(np.median(np.abs(means - np.median(means))))
    se = 1.4826 * mad * math.sqrt(math.pi / 2) / math.sqrt(batches) * scale
    return VolumeEstimate(est, 3 * se, "monte-carlo", batches * batch_size, seed)


# --- public API ---------------------------------------------------------------------

def volume_VF(F, tol: float = DEFAULT_TOL, seed: int = 0, method: str = "auto") -> VolumeEstimate:
    """Volume of ``{|F| <= 1}``; ``method`` is ``auto``, ``quadrature`` or ``monte-carlo``."""
    form = _form_of(F)
    if method not in ("auto", "quadrature", "monte-carlo"):
        raise ValueError(f"unknown method {method!r}")
    if form.n == 2 and method != "monte-carlo":
        return _binary_VF(factor_form(F), tol)
    if method == "quadrature":
        raise PreconditionError("quadrature is only available for binary forms")
    if form.n == 2:
        _check_integrable(factor_form(F))
    d = form.d

    def radial(U, vals):
        with np.errstate(divide="ignore"):
            return vals ** (-1.0 / d)

    return _monte_carlo(form, radial, seed)


def volume_region(F, m: float, B: float, tol: float = DEFAULT_TOL, seed: int = 0) -> VolumeEstimate:
    """Volume of ``{|F(x)| <= m, ||x|| <= B}``."""
    if m <= 0 or B <= 0:
        raise ValueError("m and B must be positive")
    form = _form_of(F)
    if form.n == 2:
        return _binary_truncated(factor_form(F), m, B, tol, box=False)
    d = form.d

    def radial(U, vals):
        with np.errstate(divide="ignore"):
            return np.minimum(B, (m / vals) ** (1.0 / d))

    return _monte_carlo(form, radial, seed)


def volume_box(F, m: float, B: float, tol: float = DEFAULT_TOL, seed: int = 0) -> VolumeEstimate:
    """Volume of ``{|F(x)| <= m, max|x_i| <= B}``."""
    if m <= 0 or B <= 0:
        raise ValueError("m and B must be positive")
    form = _form_of(F)
    if form.n == 2:
        return _binary_truncated(factor_form(F), m, B, tol, box=True)
    d = form.d

    def radial(U, vals):
        R = B / np.max(np.abs(U), axis=1)
        with np.errstate(divide="ignore"):
            return np.minimum(R, (m / vals) ** (1.0 / d))

    return _monte_carlo(form, radial, seed)


def definite_quadratic_volume(A: int, B: int, C: int) -> VolumeEstimate:
    disc = 4 * A * C - B * B
    if disc <= 0:
        raise PreconditionError("quadratic form is not definite")
    v = 2 * math.pi / math.sqrt(disc)
    return VolumeEstimate(v, 4 * np.finfo(float).eps * v, "closed-form", 0)
