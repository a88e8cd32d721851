import pytest
from hypothesis import given, settings, strategies as st

from decoforms import (Form, PreconditionError, QuadraticPower, ResourceError, apply_unimodular,
                       count_box, count_quadratic_power, count_total, count_total_bounded,
                       count_total_thue, is_region_bounded, parse_form, reduce_definite_quadratic)
from decoforms.counting import count_box_naive, count_fiber
from decoforms.forms import content_and_primitive

from conftest import binary_forms, gl2

P = parse_form


@pytest.mark.parametrize("text,m,B,N,Nstar", [
    ("x^3 + 2*y^3", 6, 2, 11, 10),
    ("x*y*(x+y)", 2, 1, 9, 2),
    ("x^2 + y^2", 4, 2, 13, 12),
])
def test_box_examples(text, m, B, N, Nstar):
    r = count_box(P(text), m, B)
    assert (r.N, r.Nstar) == (N, Nstar)
    assert r == count_box_naive(P(text), m, B)


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=6), st.integers(0, 200),
       st.integers(-40, 0), st.integers(0, 40))
def test_fiber_matches_loop(p, m, lo, hi):
    ref_total = sum(1 for k in range(lo, hi + 1) if abs(sum(c * k ** i for i, c in enumerate(p))) <= m)
    ref_zero = sum(1 for k in range(lo, hi + 1) if sum(c * k ** i for i, c in enumerate(p)) == 0)
    assert count_fiber(p, m, lo, hi) == (ref_total, ref_zero)


@settings(max_examples=80)
@given(binary_forms(min_degree=1, max_degree=6), st.integers(0, 100), st.integers(0, 12))
def test_box_matches_naive(F, m, B):
    assert count_box(F, m, B) == count_box_naive(F, m, B)


@pytest.mark.parametrize("text,m,B", [
    ("x^2 + y^2 + z^2", 10, 3),
    ("x^3 - 6*x*y*z + 2*y^3 + 4*z^3", 20, 4),
    ("x*y*z", 3, 3),
    ("x^2*y - 3*z^3 + x*y*z", 15, 4),
])
def test_ternary_box_matches_naive(text, m, B):
    assert count_box(P(text), m, B) == count_box_naive(P(text), m, B)


def test_box_budget():
    with pytest.raises(ResourceError):
        count_box(P("x^2 + y^2 + z^2"), 1, 100, budget=1000)


def test_counts_invariants():
    r = count_box(P("x*y*(x+y)"), 2, 3)
    assert r.Nstar <= r.N
    assert r.N - r.Nstar == sum(1 for x in range(-3, 4) for y in range(-3, 4) if x * y * (x + y) == 0)


@pytest.mark.parametrize("text,m,Nstar", [("(x^2+y^2)^2", 16, 12), ("(x^2+y^2)^2", 1, 4), ("x^4 + y^4", 1, 4)])
def test_total_bounded(text, m, Nstar):
    r = count_total_bounded(P(text), m)
    assert r.Nstar == Nstar and r.N == Nstar + 1 and r.certified_total


def test_total_bounded_rejects_unbounded():
    with pytest.raises(PreconditionError):
        count_total_bounded(P("x^3 + 2*y^3"), 5)


def test_total_bounded_ternary():
    r = count_total_bounded(P("x^2 + y^2 + z^2"), 3)
    assert r.Nstar == 26


@settings(max_examples=30)
@given(st.sampled_from(["x^2 + y^2", "(x^2+y^2)*(x^2+2*y^2)", "x^4 + x*y^3 + y^4", "3*x^2 + x*y + y^2"]),
       gl2(), st.integers(1, 300))
def test_total_count_is_unimodular_invariant(text, T, m):
    F = P(text)
    assert count_total_bounded(apply_unimodular(F, T), m).Nstar == count_total_bounded(F, m).Nstar


@pytest.mark.parametrize("text,m", [("6*x^2 + 6*y^2", 100), ("-4*x^4 - 4*y^4", 77), ("10*(x^2+x*y+y^2)^2", 999)])
def test_content_scaling(text, m):
    F = P(text)
    c, G = content_and_primitive(F)
    assert count_total_bounded(F, m).Nstar == count_total_bounded(G, m // abs(c)).Nstar


@pytest.mark.parametrize("m", [1, 6, 100])
def test_thue_matches_grid(goldens, m):
    r = count_total_thue(P("x^3 + 2*y^3"), m)
    assert r.Nstar == goldens["thue_x3_2y3"][str(m)]
    assert r.N == r.Nstar + 1
    assert r.certified_total


def test_thue_small_cases(goldens):
    assert count_total_thue(P("x^3 + 2*y^3"), 1).Nstar == 4
    assert count_total_thue(P("x^3 + 2*y^3"), 6).Nstar == count_box(P("x^3 + 2*y^3"), 6, 50).Nstar
    assert count_total_thue(P("x^3 - 2*y^3"), 1).Nstar == goldens["thue_x3_m2y3_m1"]


def test_thue_far_solution_found():
    # x^3 - 2 y^3 = -1 has no large solutions, but x^3 + 2y^3 = -3 does at (5, -4)
    r = count_total_thue(P("x^3 + 2*y^3"), 3)
    assert r.Nstar == count_box(P("x^3 + 2*y^3"), 3, 50).Nstar


@pytest.mark.parametrize("text,m", [("x^3 - 3*x*y^2 + y^3", 30), ("x^4 - 2*y^4", 50), ("2*x^3 + x*y^2 - 5*y^3", 40)])
def test_thue_against_box(text, m):
    assert count_total_thue(P(text), m).Nstar == count_box(P(text), m, 150).Nstar


def test_thue_uncertified_when_qmax_small():
    r = count_total_thue(P("x^3 + 2*y^3"), 6, q_max=50)
    assert not r.certified_total and r.scan_bound == 50


def test_thue_preconditions():
    with pytest.raises(PreconditionError):
        count_total_thue(P("x*y*(x+y)"), 5)
    with pytest.raises(PreconditionError):
        count_total_thue(P("x^2 + y^2"), 5)


@pytest.mark.parametrize("abc,out", [((1, 3, 5), (1, 1, 3)), ((1, 0, 1), (1, 0, 1)), ((2, 2, 3), (2, 2, 3))])
def test_reduction_examples(abc, out):
    r, s, t, T = reduce_definite_quadratic(*abc)
    assert (r, s, t) == out
    G = Form.from_dict({(2, 0): abc[0], (1, 1): abc[1], (0, 2): abc[2]})
    assert apply_unimodular(G, T) == Form.from_dict({(2, 0): r, (1, 1): s, (0, 2): t})


def test_reduction_identity_when_reduced():
    assert reduce_definite_quadratic(1, 0, 1)[3].matrix == ((1, 0), (0, 1))


def test_reduction_rejects_indefinite():
    with pytest.raises(ValueError):
        reduce_definite_quadratic(1, 3, 1)


@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(-40, 40), st.booleans())
def test_reduction_properties(A, B, C, negative):
    if B * B - 4 * A * C >= 0 or A == 0:
        return
    r, s, t, T = reduce_definite_quadratic(A, B, C)
    assert abs(s) <= abs(r) <= abs(t)
    assert s * s - 4 * r * t == B * B - 4 * A * C
    G = Form.from_dict({e: c for e, c in {(2, 0): A, (1, 1): B, (0, 2): C}.items() if c})
    assert apply_unimodular(G, T) == Form.from_dict({e: c for e, c in {(2, 0): r, (1, 1): s, (0, 2): t}.items() if c})


@pytest.mark.parametrize("h,k,m,Nstar", [(1, 2, 16, 12), (1, 2, 1, 4), (3, 2, 2, 0)])
def test_quadratic_power_examples(h, k, m, Nstar):
    assert count_quadratic_power(QuadraticPower(h, k, 1, 0, 1), m).Nstar == Nstar


@settings(max_examples=40)
@given(st.integers(-3, 3).filter(bool), st.integers(1, 3), st.integers(1, 5), st.integers(-4, 4),
       st.integers(1, 5), st.integers(1, 3000))
def test_quadratic_power_matches_enumeration(h, k, A, B, C, m):
    if B * B - 4 * A * C >= 0:
        return
    qp = QuadraticPower(h, k, A, B, C)
    assert count_quadratic_power(qp, m).Nstar == count_total_bounded(qp.form(), m).Nstar


def test_gauss_circle_goldens(goldens):
    for m, value in goldens["gauss_circle_sq"].items():
        assert count_total(P("(x^2+y^2)^2"), int(m)).Nstar == value


def test_json_keys():
    assert list(count_box(P("x^2+y^2"), 1, 1).to_json()) == ["N", "Nstar", "m", "B", "certified_total", "scan_bound"]
