"""Linear-factor decompositions, rational factorization and norm forms.

Binary forms are factored numerically (Aberth roots of the dehomogenized
polynomial) and every rational factor found from root clusters is
confirmed by exact division, so the rational factorization is exact even
though the linear factors are floating point.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import mpmath
import numpy as np

from . import upoly
from .errors import FormError, PrecisionError, UnsupportedInputError
from .forms import Form, content_and_primitive, evaluate, poly_mul, poly_pow
from .linalg import RationalSubspace
from .parser import parse_polynomial
from .roots import PRECISIONS, aberth

SEED = 20240601


@dataclass(frozen=True)
class LinearFactor:
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if not any(self.coeffs):
            raise FormError("zero linear factor")

    @property
    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coeffs)

    def __call__(self, x):
        return sum(c * v for c, v in zip(self.coeffs, x))


@dataclass(frozen=True)
class IrreducibleFactor:
    """One ``F_j`` of the rational factorization together with its multiplicity.

    ``field_matrix`` writes one linear factor of ``F_j`` in coordinates over
    a Q-basis of its coefficient field (one row per basis element); its
    rational null space is the vanishing subspace ``A_j``.
    """
    poly: Form
    multiplicity: int
    factor_indices: tuple[int, ...]
    field_matrix: tuple[tuple[int, ...], ...]

    @property
    def degree(self) -> int:
        return self.poly.d

    @property
    def weight(self) -> int:
        return self.degree * self.multiplicity

    @property
    def vanishing_subspace(self) -> RationalSubspace:
        return vanishing_subspace(self)


@dataclass(frozen=True)
class FactorSystem:
    parent: Form
    factors: tuple[LinearFactor, ...]
    r1: int
    r2: int
    precision_bits: int = 53
    owner: tuple[int, ...] = ()
    C0: int = 1
    irreducible: tuple[IrreducibleFactor, ...] = ()

    def __post_init__(self):
        if len(self.factors) != self.r1 + 2 * self.r2:
            raise FormError("factor count does not match r1 + 2*r2")

    @property
    def n(self) -> int:
        return self.parent.n

    @property
    def d(self) -> int:
        return len(self.factors)

    @property
    def pairing(self) -> dict[int, int]:
        out = {}
        for i in range(self.r1, self.r1 + self.r2):
            out[i] = i + self.r2
            out[i + self.r2] = i
        return out

    def matrix(self) -> np.ndarray:
        return np.array([f.coeffs for f in self.factors], dtype=complex)

    def expand(self) -> dict:
        """Numerical coefficients of the product of all linear factors."""
        n = self.n
        out = {(0,) * n: 1 + 0j}
        for f in self.factors:
            nxt: dict = {}
            for e, c in out.items():
                for i, a in enumerate(f.coeffs):
                    if a:
                        e2 = tuple(v + (k == i) for k, v in enumerate(e))
                        nxt[e2] = nxt.get(e2, 0) + c * a
            out = nxt
        return out

    def real_factor_indices(self) -> list[int]:
        return list(range(self.r1))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "r1": self.r1,
            "r2": self.r2,
            "precision_bits": self.precision_bits,
            "factors": [[[repr(c.real), repr(c.imag)] for c in f.coeffs] for f in self.factors],
            "C0": str(self.C0),
            "irreducible": [
                {"form": fj.poly.to_json(), "multiplicity": fj.multiplicity,
                 "factor_indices": list(fj.factor_indices)}
                for fj in self.irreducible
            ],
        }


@dataclass(frozen=True)
class NumberFieldSpec:
    minpoly: tuple[int, ...]          # lowest degree first, monic
    coeff_exprs: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mp = upoly.trim(self.minpoly)
        if len(mp) < 2:
            raise FormError("minimal polynomial must have degree >= 1")
        if mp[-1] != 1:
            raise FormError("minimal polynomial must be monic")
        if upoly.degree(upoly.pgcd(mp, upoly.pderiv(mp))) > 0:
            raise FormError("minimal polynomial is not squarefree")
        r = len(mp) - 1
        reduced = []
        for c in self.coeff_exprs:
            c = upoly.trim(c)
            if len(c) > r:
                _, rem = upoly.pdivmod(c, mp)
                c = [int(v) for v in rem]
            reduced.append(tuple(c))
        object.__setattr__(self, "minpoly", tuple(mp))
        object.__setattr__(self, "coeff_exprs", tuple(reduced))

    @property
    def r(self) -> int:
        return len(self.minpoly) - 1

    @property
    def n(self) -> int:
        return len(self.coeff_exprs)

    @classmethod
    def from_json(cls, data) -> "NumberFieldSpec":
        if isinstance(data, str):
            data = json.loads(data)

        def uni(text):
            p = parse_polynomial(str(text), ["t"])
            deg = max((e[0] for e in p), default=0)
            out = [0] * (deg + 1)
            for (e,), c in p.items():
                out[e] = c
            return upoly.trim(out)

        return cls(tuple(uni(data["minpoly"])), tuple(tuple(uni(c)) for c in data["coeffs"]))

    def embeddings(self, bits: int = 113):
        return _conjugate_ordered_roots(list(self.minpoly), bits)


@dataclass(frozen=True)
class NormForm:
    form: Form
    factor_system: FactorSystem
    spec: NumberFieldSpec

    @property
    def C0(self) -> int:
        return self.factor_system.C0

    @property
    def irreducible(self):
        return self.factor_system.irreducible


# --- roots ---------------------------------------------------------------

def _conjugate_ordered_roots(poly, bits):
    """Roots of a squarefree polynomial as ``(reals, upper_half)``.

    The number of real roots is fixed exactly by a Sturm count, so the
    split between real and non-real roots never depends on a tolerance.
    """
    roots = aberth(poly, bits, seed=SEED)
    nreal = upoly.count_real_roots(poly)
    roots.sort(key=lambda z: abs(z.imag))
    reals = sorted(mpmath.mpf(z.real) for z in roots[:nreal])
    rest = list(roots[nreal:])
    upper = [z for z in rest if z.imag > 0]
    lower = [z for z in rest if z.imag < 0]
    if len(upper) != len(lower):
        raise PrecisionError("non-real roots do not pair into conjugates")
    used = set()
    pairs = []
    for z in sorted(upper, key=lambda w: (float(w.real), float(w.imag))):
        j = min((k for k in range(len(lower)) if k not in used),
                key=lambda k: abs(lower[k] - mpmath.conj(z)))
        used.add(j)
        # symmetrize so the pair is exactly conjugate
        pairs.append((z + mpmath.conj(lower[j])) / 2)
    return reals, pairs


def _cluster_error_ok(lc, roots, bits):
    mag = abs(lc) * math.prod(1 + float(abs(r)) for r in roots)
    return mag * len(roots) * 2.0 ** (-bits) * 1e4 < 1e-2


def _split_irreducible(g, bits):
    """Split a squarefree primitive polynomial into Q-irreducible factors.

    Returns a list of ``(h, real_roots, upper_roots)``.
    """
    reals, upper = _conjugate_ordered_roots(g, bits)
    units = [(r,) for r in reals] + [(z, mpmath.conj(z)) for z in upper]
    if not _cluster_error_ok(g[-1], [z for u in units for z in u], bits):
        raise PrecisionError(f"{bits}-bit roots cannot resolve integer coefficients")
    current = list(g)
    found = []
    size = 1
    with mpmath.workprec(bits):
        while upoly.degree(current) >= 2 * size:
            hit = None
            for count in range(1, size + 1):
                for combo in itertools.combinations(range(len(units)), count):
                    if sum(len(units[k]) for k in combo) != size:
                        continue
                    cand = [mpmath.mpc(current[-1])]
                    for k in combo:
                        for z in units[k]:
                            cand = _mul_linear(cand, z)
                    rounded = []
                    for c in cand:
                        ci = int(mpmath.nint(c.real))
                        if abs(c - ci) > 1e-2:
                            break
                        rounded.append(ci)
                    else:
                        h = upoly.primitive(rounded)
                        if upoly.divides(h, current):
                            hit = (combo, h)
                            break
                if hit:
                    break
            if hit is None:
                size += 1
                continue
            combo, h = hit
            current = upoly.primitive(upoly.exact_div(current, h))
            chosen = [units[k] for k in combo]
            found.append((h, [u[0] for u in chosen if len(u) == 1], [u[0] for u in chosen if len(u) == 2]))
            units = [u for k, u in enumerate(units) if k not in combo]
    if upoly.degree(current) >= 1:
        found.append((upoly.primitive(current), [u[0] for u in units if len(u) == 1],
                      [u[0] for u in units if len(u) == 2]))
    return found


def _mul_linear(poly, root):
    # poly lowest degree first; multiply by (t - root)
    out = [mpmath.mpc(0)] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] += c
        out[i] -= c * root
    return out


def _homogenize(h) -> Form:
    deg = len(h) - 1
    return Form.from_dict({(i, deg - i): c for i, c in enumerate(h)}, n=2)


Y_FORM = Form.from_dict({(0, 1): 1}, n=2)


def _factor_binary_at(F: Form, bits: int) -> FactorSystem:
    coeffs = F.binary_coefficients()
    f = upoly.trim(coeffs)
    e = F.d - (len(f) - 1)
    pieces = []  # (Form, multiplicity, real roots, upper roots, field matrix, kind)
    if e:
        pieces.append((Y_FORM, e, None, None, ((0, 1),)))
    for g, k in upoly.squarefree_decomposition(f):
        for h, reals, upper in _split_irreducible(g, bits):
            if len(h) == 2:
                fm = ((h[1], h[0]),)
            else:
                fm = ((1, 0), (0, -1))
            pieces.append((_homogenize(h), k, reals, upper, fm))

    # exact verification of F = C0 * prod F_j^l_j
    prod = {(0, 0): 1}
    for form, mult, *_ in pieces:
        prod = poly_mul(prod, poly_pow(form.coeffs, mult, 2))
    lead_exp, lead_c = F.terms[0]
    if lead_exp not in prod or lead_c % prod[lead_exp]:
        raise PrecisionError("rational factorization failed exact verification")
    C0 = lead_c // prod[lead_exp]
    if {ex: C0 * c for ex, c in prod.items()} != F.coeffs:
        raise PrecisionError("rational factorization failed exact verification")

    # linear factors: x - theta*y per finite root, y for the root at infinity
    scale_const = mpmath.mpf(C0)
    real_entries, pair_entries = [], []
    for j, (form, mult, reals, upper, _) in enumerate(pieces):
        if reals is None:
            real_entries += [((mpmath.mpf(0), mpmath.mpf(1)), j)] * mult
            continue
        scale_const *= mpmath.mpf(form.leading_coefficient()) ** mult
        for r in reals:
            real_entries += [((mpmath.mpf(1), -r), j)] * mult
        for z in upper:
            pair_entries += [((mpmath.mpc(1), -z), j)] * mult

    d = F.d
    with mpmath.workprec(bits):
        s = abs(scale_const) ** (mpmath.mpf(1) / d)
        negative = scale_const < 0
    real_vecs = [[complex(s * c) for c in v] for v, _ in real_entries]
    pair_vecs = [[complex(s * c) for c in v] for v, _ in pair_entries]
    conj_vecs = [[c.conjugate() for c in v] for v in pair_vecs]
    if negative:
        if real_vecs:
            real_vecs[0] = [-c for c in real_vecs[0]]
        else:
            pair_vecs[0] = [1j * c for c in pair_vecs[0]]
            conj_vecs[0] = [1j * c for c in conj_vecs[0]]
    vecs = real_vecs + pair_vecs + conj_vecs
    owner = [j for _, j in real_entries] + [j for _, j in pair_entries] * 2
    factors = tuple(LinearFactor(tuple(v)) for v in vecs)

    irreducible = []
    for j, (form, mult, _, _, fm) in enumerate(pieces):
        idx = tuple(i for i, o in enumerate(owner) if o == j)
        irreducible.append(IrreducibleFactor(form, mult, idx, fm))
    return FactorSystem(F, factors, len(real_vecs), len(pair_vecs), bits,
                        tuple(owner), C0, tuple(irreducible))


@lru_cache(maxsize=4096)
def factor_binary(F: Form) -> FactorSystem:
    """Linear factors ``x - theta*y`` (and ``y``) whose product is ``F``.

    Runs the precision ladder 53 -> 113 -> 256 bits until the rational
    factorization built from the roots verifies exactly.
    """
    if F.n != 2:
        raise UnsupportedInputError("factor_binary needs a binary form")
    last = None
    for bits in PRECISIONS:
        try:
            return _factor_binary_at(F, bits)
        except PrecisionError as exc:
            last = exc
    raise PrecisionError(f"could not factor {F} at any precision: {last}")


def factor_form(F) -> FactorSystem:
    """Factor system for a binary form or for a built norm form."""
    if isinstance(F, NormForm):
        return F.factor_system
    if isinstance(F, FactorSystem):
        return F
    if F.n == 2:
        return factor_binary(F)
    raise UnsupportedInputError(
        "linear factorization in n >= 3 variables is only available for norm forms")


def rational_factorization(F) -> tuple[int, list[IrreducibleFactor]]:
    fs = factor_form(F)
    return fs.C0, list(fs.irreducible)


def vanishing_subspace(fj: IrreducibleFactor) -> RationalSubspace:
    return RationalSubspace.kernel([list(r) for r in fj.field_matrix], fj.poly.n)


# --- norm forms ----------------------------------------------------------

def _eval_mp(poly, z):
    acc = mpmath.mpc(0)
    for c in reversed(poly):
        acc = acc * z + c
    return acc


def _verification_points(n, count):
    return [[((k + 2) * (j + 1) ** 2 + 3 * j + k) % 11 - 5 for j in range(n)] for k in range(count)]


def norm_value(spec: NumberFieldSpec, a: Sequence[int]) -> int:
    """Exact ``N(sum a_i alpha_i)`` as the resultant with the minimal polynomial."""
    g = [0] * spec.r
    for ai, c in zip(a, spec.coeff_exprs):
        for k, v in enumerate(c):
            g[k] += ai * v
    return upoly.resultant(list(spec.minpoly), upoly.trim(g))


def _build_norm_form_at(spec: NumberFieldSpec, bits: int) -> NormForm:
    n, r = spec.n, spec.r
    if r < n:
        raise FormError(f"field degree {r} is smaller than the number of variables {n}")
    reals, upper = spec.embeddings(bits)
    with mpmath.workprec(bits):
        roots = [mpmath.mpc(x) for x in reals] + list(upper) + [mpmath.conj(z) for z in upper]
        forms = [[_eval_mp(list(c), z) for c in spec.coeff_exprs] for z in roots]
        prod = {(0,) * n: mpmath.mpc(1)}
        for L in forms:
            nxt: dict = {}
            for e, c in prod.items():
                for i, a in enumerate(L):
                    if a != 0:
                        e2 = tuple(v + (k == i) for k, v in enumerate(e))
                        nxt[e2] = nxt.get(e2, 0) + c * a
            prod = nxt
        coeffs = {}
        worst = 0.0
        for e, c in prod.items():
            ci = int(mpmath.nint(c.real))
            worst = max(worst, float(abs(c - ci)))
            if ci:
                coeffs[e] = ci
    if worst > 0.1:
        raise PrecisionError(f"norm form coefficients are {worst:.3g} away from integers")
    F = Form.from_dict(coeffs, n=n)
    for a in _verification_points(n, n + 3):
        if evaluate(F, a) != norm_value(spec, a):
            raise RuntimeError(f"norm form disagrees with the exact norm at {a}")

    vecs = [[complex(v) for v in L] for L in forms]
    factors = tuple(LinearFactor(tuple(v)) for v in vecs)
    nreal = len(reals)
    fj = _norm_form_irreducible(F, spec, forms, bits)
    fs = FactorSystem(F, factors, nreal, len(upper), bits, (0,) * r, fj[0], (fj[1],))
    return NormForm(F, fs, spec)


def _norm_form_irreducible(F, spec, forms, bits):
    """Return ``(C0, IrreducibleFactor)`` with ``F = C0 * G^l``."""
    n, r = spec.n, spec.r
    k = next(i for i, c in enumerate(spec.coeff_exprs) if c)
    with mpmath.workprec(bits):
        normed = [[v / L[k] for v in L] for L in forms]
        classes: list[list[int]] = []
        for i, v in enumerate(normed):
            for cls in classes:
                w = normed[cls[0]]
                if max(abs(a - b) for a, b in zip(v, w)) < mpmath.mpf(10) ** -8 * max(1, max(abs(a) for a in w)):
                    cls.append(i)
                    break
            else:
                classes.append([i])
        d1 = len(classes)
        if r % d1 or any(len(c) != r // d1 for c in classes):
            raise PrecisionError("embedded linear forms do not split into equal proportionality classes")
        mult = r // d1
        g = {(0,) * n: mpmath.mpc(1)}
        for cls in classes:
            L = normed[cls[0]]
            nxt: dict = {}
            for e, c in g.items():
                for i, a in enumerate(L):
                    if a != 0:
                        e2 = tuple(v + (kk == i) for kk, v in enumerate(e))
                        nxt[e2] = nxt.get(e2, 0) + c * a
            g = nxt
    _, Fprim = content_and_primitive(F)
    lead_key = tuple(d1 * mult if i == k else 0 for i in range(n))
    lead_val = abs(Fprim[lead_key])
    lc = round(lead_val ** (1.0 / mult))
    for cand in (lc - 1, lc, lc + 1):
        if cand > 0 and cand ** mult == lead_val:
            lc = cand
            break
    else:
        raise PrecisionError("leading coefficient is not a perfect power")
    gint = {}
    with mpmath.workprec(bits):
        for e, c in g.items():
            v = c * lc
            vi = int(mpmath.nint(v.real))
            if abs(v - vi) > 1e-3:
                raise PrecisionError("irreducible norm-form factor is not integral")
            if vi:
                gint[e] = vi
    G = Form.from_dict(gint, n=n)
    _, G = content_and_primitive(G)
    power = poly_pow(G.coeffs, mult, n)
    lead_exp, lead_c = F.terms[0]
    if lead_c % power[lead_exp]:
        raise PrecisionError("norm form is not a constant times a power of its factor")
    C0 = lead_c // power[lead_exp]
    if {e: C0 * c for e, c in power.items()} != F.coeffs:
        raise PrecisionError("norm form factorization failed exact verification")
    field_matrix = tuple(
        tuple((spec.coeff_exprs[i][row] if row < len(spec.coeff_exprs[i]) else 0) for i in range(n))
        for row in range(r)
    )
    return C0, IrreducibleFactor(G, mult, tuple(range(r)), field_matrix)


def build_norm_form(spec: NumberFieldSpec) -> NormForm:
    last = None
    for bits in (113, 256, 512):
        try:
            return _build_norm_form_at(spec, bits)
        except PrecisionError as exc:
            last = exc
    raise PrecisionError(f"norm form could not be built: {last}")
