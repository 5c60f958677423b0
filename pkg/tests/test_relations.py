import math

import numpy as np
import pytest

from absmom import relations
from absmom.corpus import get_distribution
from absmom.quadrature import integrate_interval
from absmom.relations import RelationError

from .conftest import rel_err

EXP = get_distribution("exponential", rate=1.0)
POSITIVE = [("exponential", {"rate": 1.0}), ("gamma", {"alpha": 0.5, "beta": 1.0}),
            ("gamma", {"alpha": 2.0, "beta": 1.0}), ("half-cauchy", {"scale": 1.0})]


def _spec(entry):
    return get_distribution(entry[0], **entry[1])


@pytest.mark.parametrize("s", np.linspace(-0.8, 0.8, 9))
def test_reciprocal_sine_exponential_full_interval(s):
    r = relations.reciprocal_sine(EXP, s)
    assert rel_err(r.lhs, 1 / math.cos(s * math.pi / 2)) < 1e-6
    assert rel_err(r.lhs, r.rhs) < 1e-6


@pytest.mark.parametrize("s", [-0.5, 0.25, 0.5])
def test_reciprocal_sine_gamma_half(s, frozen):
    r = relations.reciprocal_sine(get_distribution("gamma", alpha=0.5, beta=1.0), s)
    if s == -0.5:
        # E[X^-1/2] is infinite for gamma(1/2); both sides must say so
        assert r.lhs == math.inf and r.rhs == math.inf
        return
    assert rel_err(r.lhs, r.rhs) < 1e-6
    if s == 0.5:
        assert rel_err(r.lhs, frozen["named"]["gamma_half_sine_reciprocal_half"]) < 1e-6


@pytest.mark.parametrize("entry", POSITIVE, ids=lambda e: e[0] + str(e[1]))
def test_derived_densities_have_unit_mass(entry):
    spec = _spec(entry)
    assert abs(relations.sine_density(spec).total_mass().value - 1) < 1e-5
    if spec.closed_moment(1.0) < math.inf:
        assert abs(relations.length_biased_density(spec).total_mass().value - 1) < 1e-5
        assert abs(relations.equilibrium_complement(relations.equilibrium_lst(spec, 1)).total_mass().value - 1) < 1e-5
    assert abs(relations.exp_mixture_distribution(spec).total_mass().value - 1) < 1e-5


def test_sine_density_nonnegative():
    d = relations.sine_density(get_distribution("gamma", alpha=2.0, beta=1.0))
    assert np.all(d(np.geomspace(1e-4, 1e3, 300)) >= -1e-12)


def test_sine_density_rejects_unflagged_law():
    with pytest.raises(RelationError):
        relations.sine_density(get_distribution("gamma", alpha=3.0, beta=1.0))


def test_polya_reciprocal(frozen):
    r = relations.polya_reciprocal(get_distribution("polya"), 0.5)
    assert rel_err(r.lhs, frozen["named"]["polya_reciprocal_half"]) < 1e-6
    assert rel_err(r.rhs, frozen["named"]["polya_reciprocal_half_closed"]) < 1e-6


def test_polya_check_rejects_non_polya():
    with pytest.raises(RelationError):
        relations.check_polya_type(get_distribution("normal"))


@pytest.mark.parametrize("entry", POSITIVE[:3], ids=lambda e: e[0] + str(e[1]))
@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 1.5, 1.9])
def test_length_biased(entry, s):
    r = relations.length_biased_relation(_spec(entry), s)
    assert rel_err(r.lhs, r.rhs) < 1e-5


@pytest.mark.parametrize("rate", [1.0, 2.5])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_equilibrium_of_exponential_is_exponential(rate, n):
    eq = relations.equilibrium_lst(get_distribution("exponential", rate=rate), n)
    lam = np.concatenate([[0.0], np.geomspace(1e-6, 1e4, 200)])
    assert np.max(np.abs(eq.lst(lam) - rate / (rate + lam))) < 1e-9
    assert np.max(np.abs(eq.complement(lam) - lam / (rate + lam))) < 1e-9


def test_uniform_first_equilibrium(frozen):
    eq = relations.equilibrium_lst(get_distribution("uniform", a=0.0, b=1.0), 1)
    assert abs(eq.lst(1.0) - frozen["named"]["uniform_equilibrium_lst_1"]) < 1e-9
    for lam in (0.1, 1.0, 10.0):
        direct = integrate_interval(lambda x: np.exp(-lam * x) * 2.0 * (1.0 - x), 0.0, 1.0).value
        assert abs(eq.lst(lam) - direct) < 1e-6


@pytest.mark.parametrize("entry", [("gamma", {"alpha": 2.0, "beta": 1.0}), ("uniform", {"a": 0.0, "b": 1.0})],
                         ids=lambda e: e[0])
def test_mean_chain(entry):
    spec = _spec(entry)
    m = [1.0] + list(spec.integer_moments[:4])
    eq = relations.equilibrium_lst(spec, 4)
    for k in range(4):
        assert eq.mean_chain[k] == m[k + 1] / ((k + 1) * m[k])


def test_equilibrium_order_bounds():
    for n in (0, 5, 1.5):
        with pytest.raises(RelationError):
            relations.equilibrium_lst(EXP, n)


@pytest.mark.parametrize("s,expected", [(0.5, math.pi / 2), (1.0, 1.0), (1.5, None)])
def test_equilibrium_reciprocal_exponential(s, expected):
    r = relations.equilibrium_reciprocal(EXP, 1, s)
    assert rel_err(r.lhs, r.rhs) < 1e-5
    if expected is not None:
        assert rel_err(r.lhs, expected) < 1e-5


@pytest.mark.parametrize("s", np.linspace(1.1, 2.9, 9))
def test_equilibrium_reciprocal_full_interval(s):
    r = relations.equilibrium_reciprocal(get_distribution("gamma", alpha=2.0, beta=1.0), 2, s)
    assert rel_err(r.lhs, r.rhs) < 1e-5


@pytest.mark.parametrize("entry", POSITIVE[:3] + [("uniform", {"a": 0.0, "b": 1.0})], ids=lambda e: e[0] + str(e[1]))
@pytest.mark.parametrize("s", [-0.5, 0.25, 0.5, 0.85])
def test_exp_mixture(entry, s):
    spec = _spec(entry)
    r = relations.exp_mixture_relation(spec, s)
    if spec.closed_moment(s) == math.inf:
        assert r.lhs == math.inf and r.rhs == math.inf
    else:
        assert rel_err(r.lhs, r.rhs) < 1e-5


def test_exp_mixture_infinite_at_one():
    r = relations.exp_mixture_relation(EXP, 1.0)
    assert r.lhs == math.inf and r.rhs == math.inf


def test_relations_need_nonnegative_support():
    with pytest.raises(RelationError):
        relations.equilibrium_lst(get_distribution("normal"), 1)


def test_interval_endpoints_rejected():
    with pytest.raises(RelationError):
        relations.reciprocal_sine(EXP, 1.0)
    with pytest.raises(RelationError):
        relations.length_biased_relation(EXP, 0.0)
    with pytest.raises(RelationError):
        relations.equilibrium_reciprocal(EXP, 1, 2.0)
