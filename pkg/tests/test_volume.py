import math

import pytest
from hypothesis import given, settings, strategies as st

from decoforms import (DivergenceError, apply_unimodular, classify_type, is_region_bounded,
                       parse_form, volume_box, volume_region, volume_VF)
from decoforms.volume import definite_quadratic_volume, min_abs_on_cube, sup_norm_radius

from conftest import binary_forms, gl2

P = parse_form


@pytest.mark.parametrize("text,value", [
    ("x^2 + y^2", math.pi),
    ("x^2 + x*y + y^2", 2 * math.pi / math.sqrt(3)),
    ("(x^2+y^2)^2", math.pi),
    ("x^2 + 3*x*y + 5*y^2", 2 * math.pi / math.sqrt(11)),
])
def test_VF_definite(text, value):
    est = volume_VF(P(text), tol=1e-10)
    assert est.method == "quadrature"
    assert est.value == pytest.approx(value, abs=1e-10)
    assert est.abs_error <= 1e-10


def test_VF_with_real_singularities():
    # three rational lines: the extremal value for cubics
    C2 = 3 * math.gamma(1 / 3) ** 2 / math.gamma(2 / 3)
    assert volume_VF(P("x*y*(x+y)"), 1e-10).value == pytest.approx(C2, abs=1e-9)
    # x^3 - y^3 is the same up to scaling: B(1/3, 1/3)
    B = math.gamma(1 / 3) ** 2 / math.gamma(2 / 3)
    assert volume_VF(P("x^3 - y^3"), 1e-10).value == pytest.approx(B, abs=1e-9)
    assert volume_VF(P("x^3 + 2*y^3"), 1e-10).value == pytest.approx(B / 2 ** (1 / 3), abs=1e-9)


@pytest.mark.parametrize("text", ["x^2*y^2", "x^3*(x+y)", "x*y"])
def test_divergent(text):
    with pytest.raises(DivergenceError):
        volume_VF(P(text))


def test_closed_form_error():
    est = definite_quadratic_volume(1, 1, 1)
    assert est.method == "closed-form"
    assert 0 <= est.abs_error <= 1e-12 * est.value
    assert est.value == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-15)


@pytest.mark.parametrize("m,B", [(1, 2), (4, 1)])
def test_region_disc(m, B):
    assert volume_region(P("x^2 + y^2"), m, B).value == pytest.approx(math.pi, abs=1e-8)


def test_region_against_grid(goldens):
    F = P("x*y*(x+y)")
    est = volume_region(F, 1, 10)
    assert est.value == pytest.approx(goldens["riemann_ball_xyxy_m1_B10"], rel=1e-3)
    assert est.value < volume_VF(F).value


@pytest.mark.parametrize("m,B,value", [(100, 1, 4.0), (1, 1, math.pi)])
def test_box_disc(m, B, value):
    assert volume_box(P("x^2 + y^2"), m, B).value == pytest.approx(value, abs=1e-8)


def test_box_against_grid(goldens):
    est = volume_box(P("x^3 + 2*y^3"), 6, 2)
    assert 0 < est.value < 16
    assert est.value == pytest.approx(goldens["riemann_box_x3_2y3_m6_B2"], rel=1e-3)


@pytest.mark.parametrize("text,status", [
    ("(x^2+y^2)^2", "bounded"),
    ("x^3 + 2*y^3", "unbounded"),
    ("x^2 + y^2 + z^2", "bounded"),
    ("x^3 - 6*x*y*z + 2*y^3 + 4*z^3", "unbounded"),
    ("x^4 + y^4 + z^4 - x*y*z^2", "bounded"),
])
def test_boundedness(text, status):
    assert is_region_bounded(P(text)) == status


def test_cube_lower_bound_is_valid():
    status, lb = min_abs_on_cube(P("x^2 + y^2 + z^2"))
    assert status == "bounded" and 0 < lb <= 1
    assert sup_norm_radius(P("x^2 + y^2"), 16) == 4


DEFINITE = ["x^2 + y^2", "x^4 + y^4", "(x^2+y^2)*(x^2+2*y^2)", "x^2 + x*y + y^2",
            "3*x^2 - 2*x*y + 5*y^2", "x^6 + y^6", "(x^2+y^2)^2", "x^4 + x*y^3 + y^4",
            "2*x^4 - x^3*y + 3*y^4", "x^4 + 2*x^2*y^2 + 7*y^4"]


@pytest.mark.parametrize("text", DEFINITE)
@pytest.mark.parametrize("m", [2, 10])
def test_homogeneity(text, m):
    F = P(text)
    VF = volume_VF(F, 1e-9)
    R = math.sqrt(2) * sup_norm_radius(F, m) + 2
    est = volume_region(F, m, R, 1e-9)
    assert abs(est.value - VF.value * m ** (2 / F.d)) <= 3 * (est.abs_error + VF.abs_error * m) + 1e-12


@settings(max_examples=25)
@given(binary_forms(min_degree=3, max_degree=4, full=True), st.integers(1, 50), st.integers(1, 6))
def test_monotone(F, m, B):
    a = volume_region(F, m, B).value
    assert volume_region(F, m + 5, B).value >= a - 1e-5
    assert volume_region(F, m, B + 1).value >= a - 1e-5


@settings(max_examples=25)
@given(binary_forms(min_degree=3, max_degree=5, full=True), gl2())
def test_unimodular_invariance(F, T):
    if classify_type(F) == "neither":
        return
    a = volume_VF(F, 1e-9)
    b = volume_VF(apply_unimodular(F, T), 1e-9)
    assert abs(a.value - b.value) <= 10 * (a.abs_error + b.abs_error) + 1e-7 * a.value


CORPUS = ["x^3 + 2*y^3", "x^2 + y^2", "x*y*(x+y)", "x^4 + y^4", "x^3 - 3*x*y^2 + y^3",
          "x*(x^2+y^2)", "(x^2+y^2)*(x^2+2*y^2)", "x^5 + 3*y^5", "x^4 - 2*y^4", "x^2 + x*y + y^2"]


@pytest.mark.parametrize("text", CORPUS)
def test_quadrature_vs_monte_carlo(text):
    F = P(text)
    q = volume_VF(F, 1e-9)
    mc = volume_VF(F, seed=11, method="monte-carlo")
    assert abs(q.value - mc.value) <= 3 * (q.abs_error + mc.abs_error) + 1e-12


def test_monte_carlo_ternary_reproducible():
    F = P("x^2 + y^2 + z^2")
    a = volume_VF(F, seed=4)
    assert a.to_json() == volume_VF(F, seed=4).to_json()
    assert a.value == pytest.approx(4 * math.pi / 3, rel=1e-12)
    G = P("x^4 + y^4 + z^4")
    est = volume_VF(G, seed=1)
    assert est.method == "monte-carlo" and est.seed == 1 and est.abs_error > 0
    box = volume_box(G, 1, 10, seed=1)
    assert box.value == pytest.approx(est.value, rel=1e-12)


def test_json_keys():
    assert list(volume_VF(P("x^2 + y^2")).to_json()) == ["value", "abs_error", "method", "effort", "seed"]
