import cmath
import json

import numpy as np
import pytest
from hypothesis import given

from decoforms import (NumberFieldSpec, RationalSubspace, UnsupportedInputError, build_norm_form,
                       factor_form, parse_form, rational_factorization, vanishing_subspace)
from decoforms.factorization import norm_value
from decoforms.forms import poly_mul, poly_pow

from conftest import binary_forms

P = parse_form


def _newton_cuberoot2():
    t = 1.0
    for _ in range(60):
        t -= (t ** 3 - 2) / (3 * t * t)
    return t


def test_sum_of_squares_factors():
    fs = factor_form(P("x^2 + y^2"))
    assert (fs.r1, fs.r2) == (0, 1)
    a, b = fs.factors
    # proportional to x + iy and x - iy
    assert abs(a.coeffs[1] / a.coeffs[0] - 1j * np.sign((a.coeffs[1] / a.coeffs[0]).imag)) < 1e-12
    assert abs(b.coeffs[0] - a.coeffs[0].conjugate()) < 1e-12
    assert abs(b.coeffs[1] - a.coeffs[1].conjugate()) < 1e-12


def test_three_rational_lines():
    fs = factor_form(P("x*y*(x+y)"))
    assert (fs.r1, fs.r2) == (3, 0)
    ratios = sorted(round(f.coeffs[0].real / f.norm, 9) for f in fs.factors)
    assert len(fs.irreducible) == 3


def test_cube_root_factor():
    fs = factor_form(P("x^3 - 2*y^3"))
    assert (fs.r1, fs.r2) == (1, 1)
    L = fs.factors[0]
    root = -L.coeffs[1].real / L.coeffs[0].real
    assert root == pytest.approx(_newton_cuberoot2(), abs=1e-12)


@pytest.mark.parametrize("text,C0,expected", [
    ("x^4 - y^4", 1, {("x - y", 1), ("x + y", 1), ("x^2 + y^2", 1)}),
    ("2*x^3 + 4*y^3", 2, {("x^3 + 2*y^3", 1)}),
    ("x^2*y^2", 1, {("x", 1), ("y", 1)}),
])
def test_rational_factorization(text, C0, expected):
    c, parts = rational_factorization(P(text))
    assert c == C0
    got = {(f.poly, f.multiplicity) for f in parts}
    want = set()
    for t, l in expected:
        want.add((P(t), 2 if text == "x^2*y^2" else l))
    assert got == want


@pytest.mark.parametrize("text,basis", [
    ("x", [[0, 1]]),
    ("x^2 + y^2", []),
    ("x^3 + 2*y^3", []),
    ("3*x - 2*y", [[2, 3]]),
])
def test_vanishing_subspace(text, basis):
    (fj,) = rational_factorization(P(text))[1]
    assert vanishing_subspace(fj) == RationalSubspace.span(basis, 2)


def _expand(fs):
    return fs.expand()


@given(binary_forms(min_degree=1, max_degree=6))
def test_reexpansion(F):
    fs = factor_form(F)
    scale = max(1.0, np.prod([f.norm for f in fs.factors]))
    for exp, c in _expand(fs).items():
        assert abs(c - F[exp]) <= 1e-9 * scale
    assert fs.d == fs.r1 + 2 * fs.r2
    for i in range(fs.r1, fs.r1 + fs.r2):
        j = i + fs.r2
        u, v = np.conj(fs.factors[i].vector), fs.factors[j].vector
        if fs.r1 == 0 and i == 0 and F((1, 0)) < 0:
            # a negative definite form is not a product of conjugate pairs;
            # the first pair carries the sign
            assert np.allclose(u, -v)
        else:
            assert np.allclose(u, v)


@given(binary_forms(min_degree=1, max_degree=6))
def test_rational_factorization_is_exact(F):
    C0, parts = rational_factorization(F)
    acc = {(0, 0): C0}
    for f in parts:
        acc = poly_mul(acc, poly_pow(f.poly.coeffs, f.multiplicity, 2))
    assert {e: c for e, c in acc.items() if c} == F.coeffs
    assert sum(f.degree * f.multiplicity for f in parts) == F.d
    seen = sorted(i for f in parts for i in f.factor_indices)
    assert seen == list(range(F.d))


@given(binary_forms(min_degree=1, max_degree=6))
def test_linear_factors_of_a_factor_share_subspace(F):
    fs = factor_form(F)
    for f in fs.irreducible:
        A = vanishing_subspace(f)
        # every real point of A is a common zero of the factor's linear forms
        for v in A.basis:
            for i in f.factor_indices:
                assert abs(fs.factors[i](v)) < 1e-8 * fs.factors[i].norm * max(1, np.linalg.norm(v))


@pytest.mark.parametrize("minpoly,coeffs,expected", [
    ("t^2+1", ["1", "t"], "x^2 + y^2"),
    ("t^3-2", ["1", "t", "t^2"], "x^3 + 2*y^3 + 4*z^3 - 6*x*y*z"),
    ("t^3-2", ["1", "t"], "x^3 + 2*y^3"),
])
def test_norm_forms(minpoly, coeffs, expected):
    nf = build_norm_form(NumberFieldSpec.from_json({"minpoly": minpoly, "coeffs": coeffs}))
    assert nf.form == P(expected)


def test_norm_form_random_points_exact():
    import random
    spec = NumberFieldSpec.from_json({"minpoly": "t^4-2*t+5", "coeffs": ["1", "t", "t^2-t", "3"]})
    nf = build_norm_form(spec)
    rng = random.Random(7)
    for _ in range(20):
        a = tuple(rng.randint(-50, 50) for _ in range(4))
        assert nf.form(a) == norm_value(spec, a)


def test_norm_form_power_structure():
    nf = build_norm_form(NumberFieldSpec.from_json({"minpoly": "t^2-2", "coeffs": ["t", "t"]}))
    assert nf.C0 == -2
    (g,) = nf.irreducible
    assert g.poly == P("x + y") and g.multiplicity == 2


def test_ternary_needs_norm_provenance():
    with pytest.raises(UnsupportedInputError):
        factor_form(P("x^2 + y^2 + z^2"))


def test_factor_system_json():
    data = factor_form(P("x^3 - 2*y^3")).to_json()
    json.dumps(data)
    assert data["precision_bits"] >= 53
    assert len(data["factors"]) == 3
