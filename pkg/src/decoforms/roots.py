"""Simultaneous complex root finding (Aberth-Ehrlich iteration)."""
from __future__ import annotations

import math
import random

import mpmath

from .errors import PrecisionError

MAX_ITER = 200
PRECISIONS = (53, 113, 256)


def _horner_with_derivative(coeffs, z):
    # coeffs highest degree first
    p = coeffs[0]
    dp = 0
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _at_rounding_floor(coeffs, z, bits):
    """Backward-error stop: every residual is within rounding of its evaluation."""
    eps = mpmath.mpf(2) ** (-bits + 4)
    for w in z:
        aw = abs(w)
        bound = 0
        for c in coeffs:
            bound = bound * aw + abs(c)
        if abs(_horner_with_derivative(coeffs, w)[0]) > eps * bound:
            return False
    return True


def aberth(poly, bits: int = 53, seed: int = 0, max_iter: int = MAX_ITER):
    """All complex roots of an integer polynomial given lowest degree first.

    Returns a list of ``mpmath.mpc`` computed at ``bits`` of working
    precision.  The start points are a perturbed circle whose radius comes
    from the Fujiwara bound; the perturbation uses a fixed seed so results
    are reproducible.
    """
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    deg = len(poly) - 1
    if deg < 1:
        return []
    with mpmath.workprec(bits + 10):
        coeffs = [mpmath.mpf(c) for c in reversed(poly)]
        lead = coeffs[0]
        if deg == 1:
            return [mpmath.mpc(-coeffs[1] / lead)]
        fuj = max(abs(coeffs[k] / lead) ** (mpmath.mpf(1) / k) for k in range(1, deg + 1))
        radius = max(fuj, mpmath.mpf(1) / 2)
        rng = random.Random(seed)
        z = [
            radius * mpmath.expj(2 * mpmath.pi * (k + 0.5 * rng.random()) / deg + 0.4)
            for k in range(deg)
        ]
        tol = mpmath.mpf(2) ** (-(bits - 6)) if bits > 53 else mpmath.mpf("1e-14")
        for _ in range(max_iter):
            scale = max(abs(w) for w in z) or mpmath.mpf(1)
            biggest = 0
            new = list(z)
            for i in range(deg):
                p, dp = _horner_with_derivative(coeffs, z[i])
                if p == 0:
                    continue
                ratio = p / dp if dp != 0 else mpmath.mpc(radius)
                s = sum(1 / (z[i] - z[j]) for j in range(deg) if j != i and z[i] != z[j])
                denom = 1 - ratio * s
                w = ratio / denom if denom != 0 else ratio
                new[i] = z[i] - w
                biggest = max(biggest, abs(w))
            z = new
            if biggest <= tol * scale or _at_rounding_floor(coeffs, z, bits):
                break
        else:
            residual = max(abs(_horner_with_derivative(coeffs, w)[0]) for w in z)
            raise PrecisionError(
                f"Aberth iteration did not converge in {max_iter} steps (residual {mpmath.nstr(residual, 5)})")
        # a few Newton steps tighten the last digits
        for i in range(deg):
            for _ in range(2):
                p, dp = _horner_with_derivative(coeffs, z[i])
                if dp == 0 or p == 0:
                    break
                z[i] -= p / dp
    with mpmath.workprec(bits):
        return [mpmath.mpc(w) for w in z]


def polish_real_root(poly, approx, bits: int):
    """Refine a simple real root to ``bits`` of precision by Newton's method."""
    coeffs = list(reversed(poly))
    with mpmath.workprec(bits + 20):
        x = mpmath.mpf(approx)
        for _ in range(4 + int(math.log2(max(bits, 2)))):
            p, dp = _horner_with_derivative([mpmath.mpf(c) for c in coeffs], x)
            if dp == 0:
                break
            step = p / dp
            x -= step
            if step == 0 or abs(step) < mpmath.mpf(2) ** (-bits - 10) * max(1, abs(x)):
                break
    with mpmath.workprec(bits):
        return +x
