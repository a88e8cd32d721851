"""Heights, discriminants, tuple families and the exponents a_F, b_F, c_F, d_F."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import InvariantUndefinedError, PreconditionError, ResourceError
from .factorization import FactorSystem, IrreducibleFactor, factor_form, vanishing_subspace
from .forms import Form, UnimodularMap
from .linalg import RationalSubspace

REL_TOL = 1e-10
WARN_TOL = 1e-6
TUPLE_GUARD = 30


def _unit_rows(fs: FactorSystem) -> np.ndarray:
    M = fs.matrix()
    return M / np.linalg.norm(M, axis=1)[:, None]


def _rank(rows: np.ndarray) -> int:
    if rows.shape[0] == 0:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(s > REL_TOL * max(s[0], 1e-300)))


# --- heights ---------------------------------------------------------------

def form_height(fs: FactorSystem) -> float:
    return math.prod(f.norm for f in fs.factors)


def height_after(fs: FactorSystem, T) -> float:
    """Height of ``F o T`` computed from the transformed factor vectors."""
    M = fs.matrix() @ np.array(T, dtype=float)
    return float(np.prod(np.linalg.norm(M, axis=1)))


def _elementary_moves(n):
    for i in range(n):
        for j in range(n):
            if i != j:
                for s in (1, -1):
                    E = np.eye(n, dtype=np.int64)
                    E[i, j] = s          # x_i <- x_i + s*x_j
                    yield E
    for i, j in itertools.combinations(range(n), 2):
        P = np.eye(n, dtype=np.int64)
        P[[i, j]] = P[[j, i]]
        yield P


def minimize_height_heuristic(F, budget: int = 200) -> tuple[float, UnimodularMap]:
    """Greedy descent of ``H(F o T)`` over shears and swaps.

    Only an upper bound on the minimum over GL_n(Z) is claimed.
    """
    fs = factor_form(F)
    n = fs.n
    T = np.eye(n, dtype=np.int64)
    best = form_height(fs)
    for _ in range(budget):
        step = None
        for E in _elementary_moves(n):
            cand = T @ E
            h = height_after(fs, cand)
            if h < best * (1 - 1e-12) and (step is None or h < step[0]):
                step = (h, cand)
        if step is None:
            break
        best, T = step
    return best, UnimodularMap(tuple(tuple(int(v) for v in r) for r in T))


def linear_form_height(fj: IrreducibleFactor) -> float:
    """Absolute height of a linear factor of ``F_j``: ``H(F_j)^(1/d_j)``."""
    return form_height(factor_form(fj.poly)) ** (1.0 / fj.degree)


# --- discriminant ----------------------------------------------------------

@dataclass(frozen=True)
class Discriminant:
    value: complex
    integer: int | None
    residual: float

    @property
    def is_zero(self) -> bool:
        if self.integer is not None:
            return self.integer == 0
        return self.value == 0


def discriminant(fs: FactorSystem) -> Discriminant:
    """Product of determinants over all ordered n-tuples of distinct factors.

    The n! orderings of one index set contribute ``det^(n!)`` times the sign
    ``(-1)^(n!/2)``, so only increasing tuples are enumerated.
    """
    n, d = fs.n, fs.d
    M = fs.matrix()
    nf = math.factorial(n)
    sign = -1 if (nf // 2) % 2 else 1
    with mpmath.workdps(40):
        acc = mpmath.mpc(sign) ** math.comb(d, n)
        for combo in itertools.combinations(range(d), n):
            det = complex(np.linalg.det(M[list(combo)])) if n > 2 else (
                M[combo[0], 0] * M[combo[1], 1] - M[combo[0], 1] * M[combo[1], 0])
            acc *= mpmath.mpc(det) ** nf
        value = complex(acc)
        if acc == 0:
            return Discriminant(0j, 0, 0.0)
        nearest = int(mpmath.nint(acc.real))
        residual = float(abs(acc - nearest) / max(1, abs(acc)))
    return Discriminant(value, nearest if residual < WARN_TOL else None, residual)


# --- tuple families ----------------------------------------------------------

@dataclass
class TupleFamily:
    n: int
    d: int
    I: list[tuple[int, ...]]
    Iprime: list[tuple[int, ...]]
    J: list[tuple[int, ...]]
    warnings: list[str] = field(default_factory=list)


class _SpanOracle:
    def __init__(self, fs: FactorSystem):
        self.U = _unit_rows(fs)
        self.Uc = self.U.conj()
        self.d = fs.d
        self._count_cache: dict = {}

    def in_span(self, vec, idx) -> bool:
        base = self.U[list(idx)]
        return _rank(np.vstack([base, vec[None, :]])) == _rank(base)

    def proportional(self, u, v) -> bool:
        return _rank(np.vstack([u[None, :], v[None, :]])) < 2

    def count_in_span(self, idx) -> int:
        key = frozenset(idx)
        if key not in self._count_cache:
            base = self.U[list(idx)]
            r = _rank(base)
            self._count_cache[key] = sum(
                1 for i in range(self.d) if _rank(np.vstack([base, self.U[i][None, :]])) == r)
        return self._count_cache[key]


def tuple_families(fs: FactorSystem) -> TupleFamily:
    n, d = fs.n, fs.d
    if d > TUPLE_GUARD:
        raise ResourceError(f"tuple enumeration refused for d = {d} > {TUPLE_GUARD}")
    U = _unit_rows(fs)
    oracle = _SpanOracle(fs)
    warnings = []
    Iprime = []
    for combo in itertools.combinations(range(d), n):
        det = abs(np.linalg.det(U[list(combo)]))
        if det > REL_TOL:
            Iprime.append(combo)
            if det < WARN_TOL:
                warnings.append(f"ill-conditioned factor tuple {combo}: |det| = {det:.3g}")
    I = [p for c in Iprime for p in itertools.permutations(c)]
    J = []
    for t in I:
        ok = True
        for j in range(n - 1):
            cur = U[t[j]]
            if oracle.proportional(U[t[j + 1]], cur.conj()):
                continue
            if oracle.in_span(cur.conj(), t[:j + 1]):
                continue
            ok = False
            break
        if ok:
            J.append(t)
    return TupleFamily(n, d, I, Iprime, J, warnings)


def compute_aF_bF_cF(tf: TupleFamily, fs: FactorSystem, disc_is_zero: bool):
    """Return ``(a_F, b_F, c_F)`` as exact rationals (b_F an int).

    b_F is the maximum of b(L_i) over all d factors.
    """
    if not tf.J:
        raise InvariantUndefinedError("J(F) is empty, a_F is undefined")
    n, d = tf.n, tf.d
    oracle = _SpanOracle(fs)
    aF = Fraction(0)
    for t in tf.J:
        for j in range(1, n):
            aF = max(aF, Fraction(oracle.count_in_span(t[:j]), j))
    b = [0] * d
    for t in tf.I:
        for i in t:
            b[i] += 1
    bF = max(b)
    if not disc_is_zero:
        cF = Fraction(math.comb(d - 1, n - 1) - 1)
    else:
        cF = Fraction(bF, math.factorial(n)) / aF * (d - (n - 1) * aF) - 1 / aF
    return aF, bF, cF


# --- d_F and type ------------------------------------------------------------

def compute_dF(factors: Sequence[IrreducibleFactor]) -> int:
    spaces = [vanishing_subspace(f) for f in factors]
    weights = [f.weight for f in factors]
    if all(s.is_zero() for s in spaces):
        return 0
    best = 0

    def grow(start, current: RationalSubspace, weight):
        nonlocal best
        best = max(best, weight)
        for k in range(start, len(spaces)):
            inter = current.intersect(spaces[k])
            if not inter.is_zero():
                grow(k + 1, inter, weight + weights[k])

    for k, s in enumerate(spaces):
        if not s.is_zero():
            grow(k + 1, s, weights[k])
    return best


@dataclass(frozen=True)
class QuadraticPower:
    h: int
    k: int
    A: int
    B: int
    C: int

    def __post_init__(self):
        if self.h == 0 or self.k < 1 or self.B * self.B - 4 * self.A * self.C >= 0:
            raise PreconditionError("not a power of a definite quadratic form")

    @property
    def d(self) -> int:
        return 2 * self.k

    def form(self) -> Form:
        from .forms import poly_pow
        q = {(2, 0): self.A, (1, 1): self.B, (0, 2): self.C}
        q = {e: c for e, c in q.items() if c}
        return Form.from_dict({e: self.h * c for e, c in poly_pow(q, self.k, 2).items()}, n=2)


def detect_quadratic_power(F) -> QuadraticPower | None:
    fs = factor_form(F)
    if fs.n != 2 or len(fs.irreducible) != 1:
        return None
    fj = fs.irreducible[0]
    if fj.degree != 2:
        return None
    A, B, C = fj.poly[(2, 0)], fj.poly[(1, 1)], fj.poly[(0, 2)]
    if B * B - 4 * A * C >= 0:
        return None
    return QuadraticPower(fs.C0, fj.multiplicity, A, B, C)


def volume_is_finite(fs: FactorSystem) -> bool:
    if fs.n != 2:
        raise PreconditionError("volume finiteness test is exact only for binary forms")
    d = fs.d
    for fj in fs.irreducible:
        has_real = any(i < fs.r1 for i in fj.factor_indices)
        if has_real and 2 * fj.multiplicity >= d:
            return False
    return True


def classify_type(F, fs: FactorSystem | None = None) -> str:
    """One of ``finite``, ``essentially-finite``, ``neither``, ``quadratic-power``, ``unknown``."""
    if fs is None:
        try:
            fs = factor_form(F)
        except Exception:
            fs = None
    form = F.form if hasattr(F, "form") else (fs.parent if fs is not None else F)
    if form.n == 2:
        fs = fs or factor_form(form)
        if not volume_is_finite(fs):
            return "neither"
        if detect_quadratic_power(fs) is not None:
            return "quadratic-power"
        spaces = [vanishing_subspace(f) for f in fs.irreducible]
        if all(s.is_zero() for s in spaces):
            return "finite"
        inter = spaces[0]
        for s in spaces[1:]:
            inter = inter.intersect(s)
        return "essentially-finite" if inter.is_zero() else "neither"
    from .volume import is_region_bounded
    return "finite" if is_region_bounded(form) == "bounded" else "unknown"


# --- constants and bound calculators -----------------------------------------

def beta(x: float, y: float) -> float:
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def bean_thunder_Cn(n: int) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    q = n + 1
    total = 2.0 / n
    for k in range(1, n):
        total *= beta(1 / q, k / q) + beta((n - k) / q, k / q) + beta((n - k) / q, 1 / q)
    return total


def evertse_norm_form_bound(n: int, d: int, m: float) -> float:
    if not (d > n >= 2) or m < 1:
        raise ValueError("need d > n >= 2 and m >= 1")
    harmonic = sum(1.0 / k for k in range(2, n))
    log_val = ((n + 1) ** 3 / 3) * math.log(16 * d) + (n * (n - 1) / 2) * math.log1p(math.log(m)) \
        + ((n + harmonic) / d) * math.log(m)
    return math.exp(log_val)


def subspace_count_bound(n: int, delta: float, D: float) -> float:
    """Number of exceptional subspaces; may overflow to ``inf`` for large n."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if D < 1:
        raise ValueError("D must be at least 1")
    log4D = math.log(4 * D)
    log_val = 60 * n * n * math.log(2) - 7 * n * math.log(delta) + math.log(log4D) + math.log(math.log(log4D))
    try:
        return math.exp(log_val)
    except OverflowError:
        return math.inf


# --- report ------------------------------------------------------------------

@dataclass
class InvariantReport:
    H: float
    H0_upper: float
    disc: Discriminant
    aF: Fraction | None
    bF: int | None
    cF: Fraction | None
    dF: int | None
    type_class: str
    Cn: float
    n: int
    d: int
    quadratic_power: QuadraticPower | None = None
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        def num(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return int(v) if v.denominator == 1 else float(v)
            return v

        out = {
            "H": self.H,
            "H0_upper": self.H0_upper,
            "disc_re": self.disc.value.real,
            "disc_im": self.disc.value.imag,
            "disc_int": None if self.disc.integer is None else str(self.disc.integer),
            "aF": num(self.aF),
            "bF": self.bF,
            "cF": num(self.cF),
            "dF": self.dF,
            "type_class": self.type_class,
            "Cn": self.Cn,
            "warnings": list(self.warnings),
        }
        return out


def analyze(F, budget: int = 200) -> InvariantReport:
    fs = factor_form(F)
    form = fs.parent
    warnings = []
    disc = discriminant(fs)
    if disc.integer is None:
        warnings.append(f"discriminant not integral within tolerance (relative residual {disc.residual:.3g})")
    H = form_height(fs)
    H0, _ = minimize_height_heuristic(fs, budget)
    tf = tuple_families(fs)
    warnings += tf.warnings
    disc_zero = len(tf.Iprime) < math.comb(fs.d, fs.n)
    aF = bF = cF = None
    if tf.J:
        aF, bF, cF = compute_aF_bF_cF(tf, fs, disc_zero)
        warnings.append("b_F is the maximum of b(L_i) over all d linear factors")
    else:
        warnings.append("J(F) is empty; a_F, b_F, c_F undefined")
    dF = compute_dF(fs.irreducible) if fs.irreducible else None
    tclass = classify_type(F, fs)
    if tclass == "unknown":
        warnings.append("type could not be decided for this form")
    return InvariantReport(H, min(H, H0), disc, aF, bF, cF, dF, tclass, bean_thunder_Cn(fs.n),
                           fs.n, fs.d, detect_quadratic_power(fs) if fs.n == 2 else None, warnings)
