import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decoforms.errors import PreconditionError
from decoforms.factorization import factor_form
from decoforms.parser import parse_form
from decoforms.ratios import (_invariants, estimate_lemma_constants, lemma2_divisor, min_product_ratio,
                              write_witness_csv)


def fs_of(text):
    return factor_form(parse_form(text))


CUBIC = fs_of("x^3 + 2*y^3")
FORMS = {t: fs_of(t) for t in ["x^3 + 2*y^3", "x*y*(x+y)", "x^4 - 3*x*y^3 + y^4"]}


def test_cubic_ratio_at_unit_vector():
    s = min_product_ratio(CUBIC, (1, 0), "I'")
    assert s.ratio == pytest.approx(1 / (2 ** (1 / 3) * math.sqrt(3)), rel=1e-9)
    assert s.ratio == pytest.approx(0.4583, abs=1e-4)


def test_three_lines_ratio():
    s = min_product_ratio(fs_of("x*y*(x+y)"), (1, 1), "I'")
    assert s.ratio == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("text,x", [("x*y*(x+y)", (0, 5)), ("x^3 - y^3", (2, 2)), ("(x-2*y)*(x^2+y^2)", (2, 1))])
def test_ratio_vanishes_on_zero_of_form(text, x):
    fs = fs_of(text)
    for fam in ("I'", "J"):
        assert min_product_ratio(fs, x, fam).ratio == pytest.approx(0.0, abs=1e-12)


def test_unknown_family():
    with pytest.raises(ValueError):
        min_product_ratio(CUBIC, (1, 0), "K")


points = st.tuples(st.floats(-50, 50), st.floats(-50, 50)).filter(lambda p: math.hypot(*p) > 1e-3)


@pytest.mark.parametrize("text", list(FORMS))
@given(x=points, lam=st.floats(0.01, 100))
def test_ratio_scales_with_degree_n(text, x, lam):
    fs = FORMS[text]
    a = min_product_ratio(fs, x, "J").ratio
    b = min_product_ratio(fs, (lam * x[0], lam * x[1]), "J").ratio
    assert b == pytest.approx(lam ** 2 * a, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("text", list(FORMS))
@given(x=points)
def test_J_minimum_dominates_Iprime_minimum(text, x):
    fs = FORMS[text]
    assert min_product_ratio(fs, x, "J").ratio >= min_product_ratio(fs, x, "I'").ratio * (1 - 1e-12)


def test_quotient1_is_scale_invariant():
    res = estimate_lemma_constants(CUBIC, 50, seed=3, keep=50)
    _, aF, cF, H = _invariants(CUBIC)
    d, n = 3, 2
    for s in res.samples[:20]:
        if s.rhs_lemma1 is None:
            continue
        for lam in (0.1, 7.0):
            x = np.array(s.point) * lam
            r = min_product_ratio(CUBIC, x, "J").ratio
            Fx = abs(CUBIC.parent(tuple(x)))
            rhs = (Fx / np.linalg.norm(x) ** (d - n * aF)) ** (1 / aF) * H ** cF
            assert r / rhs == pytest.approx(s.quotient1, rel=1e-8)


def test_constants_positive_and_monotone_in_sample_count():
    prev1 = prev2 = 0.0
    for count in (100, 1000, 4000):
        res = estimate_lemma_constants(CUBIC, count, seed=11)
        assert res.C1_hat > 0 and res.C2_hat > 0
        assert res.C1_hat >= prev1 and res.C2_hat >= prev2
        prev1, prev2 = res.C1_hat, res.C2_hat


def test_C1_stable_across_seeds():
    vals = [estimate_lemma_constants(CUBIC, 10**4, seed=s).C1_hat for s in (1, 2, 3)]
    assert max(vals) <= 1.1 * min(vals)


def test_witness_is_argmax():
    res = estimate_lemma_constants(CUBIC, 500, seed=5)
    assert res.witness1.quotient1 == pytest.approx(res.C1_hat)
    assert res.witness2.quotient2 == pytest.approx(res.C2_hat)


def test_quadratic_power_rejected():
    with pytest.raises(PreconditionError):
        estimate_lemma_constants(fs_of("(x^2+y^2)^2"), 10)


def test_lemma2_divisor_drops_vanishing_factor():
    fs = fs_of("x*(x^2+y^2)")
    G, d0 = lemma2_divisor(fs, (0, 3))
    assert d0 == 2
    G, d0 = lemma2_divisor(fs, (1, 3))
    assert d0 == 3


def test_witness_csv():
    res = estimate_lemma_constants(CUBIC, 20, seed=0, keep=5)
    buf = io.StringIO()
    write_witness_csv(res.samples, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["x1", "x2", "ratio", "rhs", "quotient", "tuple"]
    assert len(rows) == 6
    for r in rows[1:]:
        assert float(r[2]) >= 0
        assert len(r[5].split()) == 2
