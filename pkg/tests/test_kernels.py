import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from absmom import kernels
from absmom.kernels import StripError

from .conftest import FROZEN

EVAL = {"g": kernels.eval_g, "h": kernels.eval_h, "q": kernels.eval_q}
CONSTANT = {"g": kernels.lemma1_constant, "h": kernels.lemma2_constant, "q": kernels.lemma4_constant}


@pytest.mark.parametrize("row", FROZEN["kernels"], ids=lambda r: f"{r['kind']}{r['n']}@{r['t']:g}")
def test_kernel_matches_extended_precision(row):
    got = EVAL[row["kind"]](row["n"], row["t"])
    assert got == pytest.approx(row["value"], rel=1e-13, abs=0.0)


@pytest.mark.parametrize("row", FROZEN["mellin"], ids=lambda r: f"{r['kind']}{r['n']}@{r['s']:g}")
def test_constant_matches_reflection_form(row):
    assert CONSTANT[row["kind"]](row["n"], row["s"]) == pytest.approx(row["value"], rel=1e-12)


@pytest.mark.parametrize("row", FROZEN["mellin_quadrature"], ids=lambda r: r["kind"])
def test_constant_matches_direct_quadrature(row):
    assert CONSTANT[row["kind"]](row["n"], row["s"]) == pytest.approx(row["value"], rel=1e-12)


def test_named_values(frozen):
    assert kernels.eval_h(1, 0.1) == pytest.approx(frozen["named"]["kernel_h1_at_0_1"], rel=1e-14)
    assert kernels.lemma1_constant(0, 1.0) == pytest.approx(math.pi / 2, rel=1e-14)


@pytest.mark.parametrize("kind,n,s", [("g", 0, 0.0), ("g", 0, 2.0), ("g", 1, 1.9), ("q", 1, 1.0),
                                      ("q", 0, 1.2), ("h", 0, 1.0), ("h", 0, -1.0), ("h", 1, 0.0), ("h", 2, 3.0)])
def test_constant_rejects_strip_boundaries(kind, n, s):
    with pytest.raises(StripError):
        CONSTANT[kind](n, s)


def test_orders_must_be_nonnegative_integers():
    with pytest.raises(ValueError):
        kernels.eval_g(-1, 1.0)
    with pytest.raises(ValueError):
        kernels.eval_q(1.5, 1.0)


def test_gen_binomial():
    assert kernels.gen_binomial(1.5, 0) == 1.0
    assert kernels.gen_binomial(1.5, 1) == 1.5
    assert kernels.gen_binomial(1.5, 2) == pytest.approx(0.375, rel=1e-15)
    assert kernels.gen_binomial(3.0, 5) == 0.0
    assert kernels.gen_binomial(5.0, 2) == 10.0


def _repeated_integral(kind, n, t):
    # r(t) = int_0^t (t-u)^m/m! w(u) du, the integral form of each remainder
    m, w = {"g": (2 * n + 1, math.cos), "h": (2 * n, math.cos), "q": (n, lambda u: math.exp(-u))}[kind]
    val, _ = integrate.quad(lambda u: (t - u) ** m / math.factorial(m) * w(u), 0.0, t,
                            epsabs=0, epsrel=1e-12, limit=200)
    return val


@pytest.mark.parametrize("kind,n", [("g", 0), ("g", 1), ("g", 2), ("h", 1), ("h", 2), ("q", 0), ("q", 2), ("q", 4)])
@pytest.mark.parametrize("t", [0.3, 1.7, 4.0, 9.5])
def test_integral_form_of_remainder(kind, n, t):
    expect = _repeated_integral(kind, n, t)
    assert EVAL[kind](n, t) == pytest.approx(expect, rel=1e-9, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 6), t=st.floats(0.0, 200.0))
def test_nonnegative(n, t):
    assert kernels.eval_g(n, t) >= 0
    assert kernels.eval_q(n, t) >= 0
    if n >= 1:
        assert kernels.eval_h(n, t) >= 0


@settings(max_examples=100, deadline=None)
@given(n=st.integers(0, 6), t=st.floats(1e-3, 60.0))
def test_g_even_and_h_odd(n, t):
    assert kernels.eval_g(n, -t) == kernels.eval_g(n, t)
    if n >= 1:
        assert kernels.eval_h(n, -t) == -kernels.eval_h(n, t)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 6), t=st.floats(1e-4, 30.0))
def test_kernel_bounded_by_leading_term(n, t):
    # alternating remainders never exceed their first omitted term
    lead_g = t ** (2 * n + 2) / math.factorial(2 * n + 2)
    lead_q = t ** (n + 1) / math.factorial(n + 1)
    assert kernels.eval_g(n, t) <= lead_g * (1 + 1e-12)
    assert kernels.eval_q(n, t) <= lead_q * (1 + 1e-12)


def test_vectorised_matches_scalar():
    t = np.linspace(0.0, 30.0, 97)
    for n in range(4):
        vec = kernels.eval_g(n, t)
        assert vec.shape == t.shape
        assert all(vec[i] == kernels.eval_g(n, float(t[i])) for i in range(0, 97, 8))


def test_series_and_direct_agree_where_direct_is_well_conditioned():
    # the direct formula is exact enough for low orders; higher orders lose digits to cancellation
    t = np.linspace(0.5, 4.0, 351)
    for n in range(2):
        for series, direct in ((kernels.eval_g, kernels.eval_g_direct), (kernels.eval_q, kernels.eval_q_direct)):
            a, b = series(n, t), direct(n, t)
            assert np.max(np.abs(a - b) / a) < 1e-12


def test_monotone_on_grid():
    t = np.linspace(0.0, 80.0, 8001)
    for n in range(1, 7):
        assert np.all(np.diff(kernels.eval_g(n, t)) >= 0)
        assert np.all(np.diff(kernels.eval_h(n, t)) >= 0)
