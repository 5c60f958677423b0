import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from absmom import translated
from absmom.corpus import get_distribution
from absmom.translated import MuntzCondition, TranslationError

from .conftest import rel_err

EXP = get_distribution("exponential", rate=1.0)
GAMMA2 = get_distribution("gamma", alpha=2.0, beta=1.0)

# first primes, typed out independently of the sieve
KNOWN_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def test_primes_prefix():
    assert translated.primes(25) == KNOWN_PRIMES
    big = translated.primes(1000)
    assert len(big) == 1000 and big[-1] == 7919
    assert all(_is_prime(p) for p in big)
    assert sorted(set(big)) == big
    assert translated.primes(0) == []


@pytest.mark.parametrize("kind,cond", [("primes", MuntzCondition.DIVERGENT), ("reciprocal_primes", MuntzCondition.VANISHING),
                                       ("harmonic-to-limit", MuntzCondition.CONVERGENT)])
def test_sequences_valid(kind, cond):
    seq = translated.make_sequence(kind, 30, limit=2.0)
    v = np.array(seq.values)
    assert seq.condition is cond
    assert np.all(v > 0) and len(set(v)) == v.size
    assert seq.trend_consistent()


def test_sequence_errors():
    with pytest.raises(TranslationError):
        translated.make_sequence("primes", 0)
    with pytest.raises(TranslationError):
        translated.make_sequence("custom", 3, values=[1.0, 1.0, 2.0], condition="divergent")
    with pytest.raises(TranslationError):
        translated.make_sequence("custom", 2, values=[1.0, -2.0], condition="divergent")
    with pytest.raises(TranslationError):
        translated.make_sequence("fibonacci", 3)


def test_named_translated_value(frozen):
    assert rel_err(translated.translated_moment(EXP, 0.5, 1.0).value, frozen["named"]["translated_exp_half_a1"]) < 1e-9
    assert rel_err(frozen["named"]["e_times_upper_gamma"], frozen["named"]["translated_exp_half_a1"]) < 1e-14


@pytest.mark.parametrize("spec", [EXP, GAMMA2, get_distribution("gamma", alpha=0.5, beta=1.0),
                                  get_distribution("uniform", a=0.0, b=1.0)], ids=lambda s: s.label)
@pytest.mark.parametrize("s", [0.5, 1.5, 2.7])
@pytest.mark.parametrize("a", [0.3, 2.0, 17.0])
def test_routes_agree(spec, s, a):
    dens = translated.translated_moment(spec, s, a, route="density").value
    lst = translated.translated_moment(spec, s, a, route="lst").value
    assert rel_err(lst, dens) < 1e-5


@settings(max_examples=15, deadline=None)
@given(s=st.floats(0.2, 3.5), a=st.lists(st.floats(0.0, 50.0), min_size=2, max_size=6, unique=True))
def test_strictly_increasing_in_shift(s, a):
    a = sorted(a)
    if min(np.diff(a)) < 1e-3:
        return
    vals = [translated.translated_moment(GAMMA2, s, x).value for x in a]
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


def test_integer_power_exact():
    # E[(X+a)^2] = m2 + 2 a m1 + a^2
    assert translated.translated_moment(GAMMA2, 2.0, 3.0).value == pytest.approx(6 + 12 + 9, rel=1e-14)


def test_profile_monotone():
    prof = translated.translated_profile(EXP, 1.5, translated.make_sequence("primes", 6))
    assert prof.doubled is not None and prof.monotone()
    assert [a for a, _ in prof.entries] == [2, 3, 5, 7, 11, 13]


def test_self_discrimination():
    seq = translated.make_sequence("primes", 10)
    rep = translated.discriminate(EXP, get_distribution("gamma", alpha=1.0, beta=1.0), 0.5, seq, 1e-8)
    assert rep.max_discrepancy < 1e-8
    assert rep.first_index is None


def test_distinct_laws_separate():
    seq = translated.make_sequence("primes", 10)
    b = (1.5 * math.gamma(1.5)) ** 2
    rep = translated.discriminate(EXP, get_distribution("uniform", a=0.0, b=b), 0.5, seq, 1e-6, with_h_distance=True)
    assert rep.base_discrepancy < 1e-9
    assert rep.first_index is not None and rep.first_index <= 10
    assert rep.h_distance is not None and rep.h_distance > 0


def test_richardson_removes_first_order_error():
    a = 32.0 * 2.0 ** np.arange(6)
    vals = 3.0 + 5.0 / a + 7.0 / a**2
    value, err, _ = translated.richardson(vals, 2.0)
    assert abs(value - 3.0) < 1e-9
    assert err >= 0


def test_extraction_gamma():
    first = translated.extract_integer_moments(GAMMA2, 1.5, 1)
    second = translated.extract_integer_moments(GAMMA2, 2.5, 2)
    assert abs(first.moments[0] - 2.0) < 1e-3
    assert abs(second.moments[0] - 2.0) < 1e-2 and abs(second.moments[1] - 6.0) < 1e-2
    assert first.converged and second.converged


@pytest.mark.parametrize("s,n", [(1.5, 1), (2.5, 2)])
def test_extraction_error_shrinks_with_schedule(s, n):
    # each schedule ends 4x further out than the last; past a ~ 1e3 the a^(l+1)
    # amplification of rounding in E[(X+a)^s] takes over, so the sweep stops at 1024
    estimates, actual = [], []
    for top in (64.0, 256.0, 1024.0):
        sched = top / 2.0 ** np.arange(5, -1, -1)
        rep = translated.extract_integer_moments(GAMMA2, s, n, sched)
        estimates.append(max(rep.errors))
        actual.append(max(abs(m - e) for m, e in zip(rep.moments, (2.0, 6.0))))
    assert estimates[0] > estimates[1] > estimates[2]
    assert actual[0] > actual[1] > actual[2]


def test_extraction_argument_checks():
    with pytest.raises(TranslationError):
        translated.extract_integer_moments(GAMMA2, 1.0, 1)
    with pytest.raises(TranslationError):
        translated.extract_integer_moments(GAMMA2, 1.5, 1, [1.0, 2.0, 5.0])
    with pytest.raises(TranslationError):
        translated.extract_integer_moments(get_distribution("pareto", alpha=1.5), 1.6, 1)


def test_shift_must_be_nonnegative():
    with pytest.raises(TranslationError):
        translated.translated_moment(EXP, 0.5, -1.0)
