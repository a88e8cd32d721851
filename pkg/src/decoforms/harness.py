"""Sweeps, exponent fits and the verification checks used by the CLI."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .counting import count_box, count_total, count_total_thue
from .errors import (DivergenceError, InsufficientDataError, PreconditionError,
                     ResourceError, UnsupportedInputError)
from .factorization import factor_form
from .forms import Form
from .invariants import (bean_thunder_Cn, classify_type, detect_quadratic_power,
                         discriminant, form_height)
from .volume import min_abs_on_cube, volume_box, volume_region, volume_VF

EXIT_PASS, EXIT_FAIL, EXIT_PRECONDITION, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass(frozen=True)
class SweepRecord:
    m: int
    Nstar: int
    VFm: float
    err: float
    bound: float | None = None

    def row(self):
        g = lambda v: "" if v is None else f"{v:.12g}"
        return [str(self.m), str(self.Nstar), g(self.VFm), g(self.err), g(self.bound)]


@dataclass(frozen=True)
class FitResult:
    slope: float
    stderr: float
    intercept: float
    points_used: int
    dropped: int = 0

    def to_json(self):
        return {"slope": self.slope, "stderr": self.stderr, "intercept": self.intercept,
                "points_used": self.points_used, "dropped": self.dropped}


def fit_exponent(series) -> FitResult:
    """Least-squares slope of ``ln err`` against ``ln m``; zero errors are dropped."""
    pts = [(m, e) for m, e in series if e > 0]
    if len(pts) < 3:
        raise InsufficientDataError(f"need at least 3 positive errors, got {len(pts)}")
    x = np.log([float(m) for m, _ in pts])
    y = np.log([float(e) for _, e in pts])
    res = stats.linregress(x, y)
    return FitResult(float(res.slope), float(res.stderr), float(res.intercept), len(pts),
                     len(series) - len(pts))


def geometric_grid(m_min: int, m_max: int, ratio: float = 10.0):
    out = []
    m = float(m_min)
    while m <= m_max * (1 + 1e-12):
        out.append(int(round(m)))
        m *= ratio
    return out


def cor4_bound(F: Form, m, fs=None):
    if F.n != 2 or F.d < 3:
        return None
    fs = fs or factor_form(F)
    if discriminant(fs).is_zero:
        return None
    return m ** (1.0 / (F.d - 1)) * form_height(fs) ** (F.d - 2)


def cmd_sweep(F: Form, m_grid, mode: str = "total-bounded", B: int | None = None,
              tol: float = 1e-8, q_max=None, budget: int = 10**9):
    """Counts and volume terms over a grid of thresholds, plus an exponent fit."""
    m_grid = [int(m) for m in m_grid]
    if len(m_grid) < 3:
        raise ValueError("a sweep needs at least 3 grid values")
    if sorted(m_grid) != m_grid:
        raise ValueError("the m grid must be ascending")
    if mode not in ("total-bounded", "thue", "box"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    fs = factor_form(F)
    n, d = F.n, F.d
    VF = volume_VF(fs, tol).value if mode != "box" else None
    records = []
    for m in m_grid:
        if mode == "box":
            b = B if B is not None else max(1, math.ceil(m ** (1.0 / d)))
            c = count_box(F, m, b, budget)
            vm = volume_box(fs, m, b, tol).value
        elif mode == "thue":
            c = count_total_thue(F, m, q_max)
            vm = VF * m ** (n / d)
        else:
            c = count_total(F, m, budget, q_max)
            vm = VF * m ** (n / d)
        records.append(SweepRecord(m, c.Nstar, vm, abs(c.Nstar - vm), cor4_bound(F, m, fs)))
    try:
        fit = fit_exponent([(r.m, r.err) for r in records])
    except InsufficientDataError:
        fit = None
    return records, fit


def sweep_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "Nstar", "VFm", "err", "bound"])
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


# --- verification checks ----------------------------------------------------------

@dataclass
class VerifyReport:
    check: str
    passed: bool
    data: dict = field(default_factory=dict)
    message: str = ""
    exit_code: int = EXIT_PASS

    def to_json(self):
        return {"check": self.check, "passed": self.passed, "exit_code": self.exit_code,
                "message": self.message, "data": self.data}


def verify_lemma9(F: Form, m: int = 6, B: int = 2, **_):
    n, d = F.n, F.d
    bound = d * n * (2 * B + 1) ** (n - 1)
    c = count_box(F, m, B)
    vol = volume_box(F, m, B, tol=0.01 * bound)
    gap = abs(c.N - vol.value)
    data = {"N_box": c.N, "Vol_box": vol.value, "abs_error": vol.abs_error, "gap": gap, "bound": bound}
    return gap <= bound, data


def verify_eq36(F: Form, m_grid=(16,), K: float = 10.0, **_):
    qp = detect_quadratic_power(F)
    if qp is None:
        raise PreconditionError("eq36 needs a power of a definite quadratic form")
    disc = 4 * qp.A * qp.C - qp.B ** 2
    h = abs(qp.h)
    rows = []
    ok = True
    for m in m_grid:
        c = count_total(F, m)
        main = 2 * math.pi / math.sqrt(disc) * (m / h) ** (2.0 / qp.d)
        scale = (m / h) ** (1.0 / qp.d)
        dev = abs(c.Nstar - main)
        ok &= dev <= K * scale
        rows.append({"m": m, "Nstar": c.Nstar, "main": main, "dev": dev, "allowed": K * scale})
    return ok, {"K": K, "rows": rows}


def verify_bean_thunder(F: Form, slack: float = 1e-3, tol: float = 1e-9, **_):
    fs = factor_form(F)
    disc = discriminant(fs)
    if disc.is_zero:
        raise PreconditionError("bean-thunder needs a non-zero discriminant")
    if classify_type(F, fs) == "neither":
        raise PreconditionError("bean-thunder needs a finite volume")
    n, d = F.n, F.d
    VF = volume_VF(fs, tol)
    expo = math.factorial(d - n) / math.factorial(d)
    absdisc = abs(disc.integer) if disc.integer is not None else abs(disc.value)
    lhs = float(absdisc) ** expo * VF.value
    Cn = bean_thunder_Cn(n)
    return lhs <= Cn + slack, {"abs_disc": str(absdisc), "VF": VF.value, "lhs": lhs, "Cn": Cn}


def verify_cor4(F: Form, m_grid=None, slack: float = 0.15, tol: float = 1e-8, **kw):
    if F.n != 2 or F.d < 3:
        raise PreconditionError("cor4 needs a binary form of degree >= 3")
    if discriminant(factor_form(F)).is_zero:
        raise PreconditionError("cor4 needs a non-zero discriminant")
    grid = list(m_grid) if m_grid else geometric_grid(10**3, 10**7, 10**0.5)
    mode = "total-bounded" if min_abs_on_cube(F)[0] == "bounded" else "thue"
    records, fit = cmd_sweep(F, grid, mode, tol=tol)
    if fit is None:
        raise InsufficientDataError("too few non-zero errors to fit an exponent")
    limit = 1.0 / (F.d - 1) + slack
    return fit.slope <= limit, {"slope": fit.slope, "stderr": fit.stderr, "limit": limit,
                                "points": [r.__dict__ for r in records]}


def verify_eq3_homogeneity(F: Form, m_values=(2, 10), tol: float = 1e-9, seed: int = 0, **_):
    status, lb = min_abs_on_cube(F)
    if status != "bounded":
        raise PreconditionError("eq3-homogeneity needs a bounded region")
    n, d = F.n, F.d
    VF = volume_VF(F, tol, seed)
    rows = []
    ok = True
    for m in m_values:
        # the region lies in the ball of radius sqrt(n) * sup-norm radius
        R = math.sqrt(n) * (m / float(lb)) ** (1.0 / d) * 1.001 + 1
        vol = volume_region(F, m, R, tol, seed)
        target = VF.value * m ** (n / d)
        err = vol.abs_error + VF.abs_error * m ** (n / d)
        dev = abs(vol.value - target)
        ok &= dev <= 3 * err + 1e-12 * target
        rows.append({"m": m, "volume": vol.value, "VFm": target, "dev": dev, "combined_error": err})
    return ok, {"rows": rows}


CHECKS = {
    "lemma9": verify_lemma9,
    "eq36": verify_eq36,
    "bean-thunder": verify_bean_thunder,
    "cor4": verify_cor4,
    "eq3-homogeneity": verify_eq3_homogeneity,
}


def cmd_verify(check: str, F: Form, **params) -> VerifyReport:
    if check not in CHECKS:
        raise ValueError(f"unknown check {check!r}; choose from {sorted(CHECKS)}")
    try:
        passed, data = CHECKS[check](F, **params)
    except (PreconditionError, DivergenceError, UnsupportedInputError, InsufficientDataError) as exc:
        return VerifyReport(check, False, {}, str(exc), EXIT_PRECONDITION)
    except ResourceError as exc:
        return VerifyReport(check, False, {}, str(exc), EXIT_RESOURCE)
    return VerifyReport(check, bool(passed), data, "pass" if passed else "fail",
                        EXIT_PASS if passed else EXIT_FAIL)
