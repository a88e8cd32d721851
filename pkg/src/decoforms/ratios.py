"""Empirical probes of the factor-product ratio inequalities.

For a point ``x`` and an n-tuple of linear factors the ratio is
``prod |L_ij(x)| / |det(L_i1, ..., L_in)|``.  We record its minimum over a
tuple family together with two candidate right-hand sides, and estimate the
smallest constants that make the inequalities hold on a random sample.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .factorization import FactorSystem, factor_form
from .invariants import (compute_aF_bF_cF, detect_quadratic_power,
                         form_height, tuple_families)


@dataclass
class RatioSample:
    point: tuple
    tuple: tuple
    ratio: float
    rhs_lemma1: float | None = None
    rhs_lemma2: float | None = None
    G: object = None
    d0: int | None = None

    @property
    def quotient1(self):
        if not self.rhs_lemma1:
            return None
        return self.ratio / self.rhs_lemma1

    @property
    def quotient2(self):
        if not self.rhs_lemma2:
            return None
        return self.ratio / self.rhs_lemma2


def _family(fs: FactorSystem, family: str):
    tf = tuple_families(fs)
    key = family.replace("'", "prime").replace("Iprimeprime", "Iprime")
    tuples = {"Iprime": tf.Iprime, "I": tf.I, "J": tf.J}.get(key)
    if tuples is None:
        raise ValueError(f"unknown tuple family {family!r}")
    return tuples


def _ratio_table(fs: FactorSystem, tuples):
    M = fs.matrix()
    idx = np.array(tuples, dtype=int)
    dets = np.abs(np.linalg.det(M[idx]))
    return idx, dets


def min_product_ratio(fs: FactorSystem, x, family: str = "J", _table=None) -> RatioSample:
    """Minimising tuple and ratio over the family ``I'`` or ``J``."""
    tuples = _family(fs, family) if _table is None else None
    if _table is None:
        if not tuples:
            raise PreconditionError(f"tuple family {family} is empty")
        _table = _ratio_table(fs, tuples)
    idx, dets = _table
    vals = np.abs(fs.matrix() @ np.asarray(x, dtype=complex))
    ratios = np.prod(vals[idx], axis=1) / dets
    k = int(np.argmin(ratios))
    return RatioSample(tuple(float(v) for v in x), tuple(int(i) for i in idx[k]), float(ratios[k]))


def _invariants(fs):
    tf = tuple_families(fs)
    aF, _, cF = compute_aF_bF_cF(tf, fs, len(tf.Iprime) < math.comb(fs.d, fs.n))
    return tf, float(aF), float(cF), form_height(fs)


def lemma2_divisor(fs: FactorSystem, a):
    """Largest primitive divisor of F not vanishing at the integer point ``a``.

    Returns ``(G, d0)`` where ``G`` is a list of ``(irreducible index,
    multiplicity)`` pairs.
    """
    G = []
    d0 = 0
    for k, fj in enumerate(fs.irreducible):
        if fj.poly(tuple(int(v) for v in a)) != 0:
            G.append((k, fj.multiplicity))
            d0 += fj.degree * fj.multiplicity
    return G, d0


def _divisor_value(fs, G, a):
    v = 1
    for k, mult in G:
        v *= fs.irreducible[k].poly(tuple(int(t) for t in a)) ** mult
    return abs(v)


@dataclass
class LemmaConstants:
    C1_hat: float
    C2_hat: float
    witness1: RatioSample | None
    witness2: RatioSample | None
    samples: list = field(default_factory=list)


def estimate_lemma_constants(fs, sample_count: int = 10000, seed: int = 0,
                             r_max: float = 1e6, keep: int = 0) -> LemmaConstants:
    """Largest observed ratio/rhs quotients over random points.

    Points are uniform directions times log-uniform radii in ``[1, r_max]``.
    The first quotient uses real points and the family J; the second uses
    the same points rounded to integers, skipping zeros of F, and the family
    ``I'``.
    """
    if not isinstance(fs, FactorSystem):
        fs = factor_form(fs)
    if fs.n == 2 and detect_quadratic_power(fs) is not None:
        raise PreconditionError("the ratio inequalities exclude powers of definite quadratics")
    tf, aF, cF, H = _invariants(fs)
    if not tf.J or not tf.Iprime:
        raise PreconditionError("tuple family is empty")
    n, d = fs.n, fs.d
    tabJ = _ratio_table(fs, tf.J)
    tabI = _ratio_table(fs, tf.Iprime)
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((sample_count, n))
    U /= np.linalg.norm(U, axis=1)[:, None]
    R = np.exp(rng.uniform(0.0, math.log(r_max), sample_count))
    X = U * R[:, None]
    M = fs.matrix()
    C1 = C2 = 0.0
    w1 = w2 = None
    kept = []
    for x in X:
        s = min_product_ratio(fs, x, "J", tabJ)
        Fx = float(np.prod(np.abs(M @ x)))
        norm = float(np.linalg.norm(x))
        if Fx > 0:
            s.rhs_lemma1 = (Fx / norm ** (d - n * aF)) ** (1.0 / aF) * H ** cF
            q = s.ratio / s.rhs_lemma1
            if q > C1:
                C1, w1 = q, s
        a = np.rint(x).astype(np.int64)
        Fa = abs(fs.parent(tuple(int(v) for v in a)))
        if Fa:
            t = min_product_ratio(fs, a.astype(float), "I'", tabI)
            G, d0 = lemma2_divisor(fs, a)
            Ga = _divisor_value(fs, G, a)
            t.G, t.d0 = G, d0
            t.rhs_lemma2 = Fa ** (1.0 / d) * Ga ** ((n - 1) / d0) / H ** (1.0 / d)
            q = t.ratio / t.rhs_lemma2
            if q > C2:
                C2, w2 = q, t
            if len(kept) < keep:
                s.rhs_lemma2, s.G, s.d0 = t.rhs_lemma2, G, d0
        if len(kept) < keep:
            kept.append(s)
    return LemmaConstants(C1, C2, w1, w2, kept)


def write_witness_csv(samples, path_or_file):
    """CSV with point coordinates, ratio, rhs, quotient and tuple indices."""
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh)
        n = len(samples[0].point) if samples else 0
        w.writerow([f"x{i + 1}" for i in range(n)] + ["ratio", "rhs", "quotient", "tuple"])
        for s in samples:
            if s is None:
                continue
            rhs = s.rhs_lemma1 if s.rhs_lemma1 is not None else s.rhs_lemma2
            q = s.ratio / rhs if rhs else ""
            w.writerow([f"{v:.12g}" for v in s.point]
                       + [f"{s.ratio:.12g}", "" if rhs is None else f"{rhs:.12g}",
                          q if q == "" else f"{q:.12g}", " ".join(map(str, s.tuple))])
    finally:
        if own:
            fh.close()
