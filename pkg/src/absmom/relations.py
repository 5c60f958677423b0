"""Distributions derived from a base law and their reciprocal moment identities.

Each identity links a moment of a derived variable ``Y`` to ``E[X^s]`` of the
base variable times an explicit constant.  The two sides are always computed
by different routes: the derived side by quadrature of the derived density or
distribution function, the base side from the closed form when the catalog has
one and from density quadrature otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .corpus import DistributionSpec, Support, oracle_moment
from .engine import ENGINE_CONFIG, EngineError, MissingInputError, ResidualKind, build_residual, residual_integral
from .quadrature import IntegralResult, IntegrandProfile, QuadratureConfig, integrate_halfline, integrate_improper

__all__ = [
    "RelationError",
    "DerivedKind",
    "DerivedDensity",
    "EquilibriumSpec",
    "RelationCheck",
    "sine_density",
    "length_biased_density",
    "equilibrium_lst",
    "equilibrium_complement",
    "exp_mixture_distribution",
    "check_polya_type",
    "reciprocal_sine",
    "polya_reciprocal",
    "length_biased_relation",
    "equilibrium_reciprocal",
    "exp_mixture_relation",
]

_MAX_EQUILIBRIUM_ORDER = 4
# distribution-function representations are read off at this multiple of 1/scale
_FAR = 1e8


class RelationError(EngineError):
    """The base distribution does not meet the preconditions of an identity."""


class DerivedKind(str, enum.Enum):
    SINE = "sine_g"
    LENGTH_BIASED = "length_biased_g"
    EQUILIBRIUM_COMPLEMENT = "equilibrium_complement"
    EXP_MIXTURE = "exp_mixture"


@dataclass(frozen=True)
class DerivedDensity:
    """A law built from ``source``.

    ``evaluator`` is a density when ``cumulative`` is false and a
    distribution function otherwise.  ``scale`` is a typical magnitude of the
    derived variable.
    """

    source: DistributionSpec
    kind: DerivedKind
    evaluator: Callable[[np.ndarray], np.ndarray]
    scale: float
    cumulative: bool = False

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))

    def total_mass(self, cfg: QuadratureConfig = ENGINE_CONFIG) -> IntegralResult:
        """Mass of the law: the density integral, or ``G(far) - G(0)``."""
        c = self.scale
        if self.cumulative:
            # G(far) can still be short of its limit for power-law tails; Aitken over three decades
            g0, g1, g2 = (float(v) for v in self.evaluator(np.array([0.01, 0.1, 1.0]) * _FAR * c))
            d1, d2 = g1 - g0, g2 - g1
            if d2 != 0.0 and d1 != d2 and 0.0 < d2 / d1 < 1.0:
                limit = g2 + d2 * d2 / (d1 - d2)
                return IntegralResult(limit, abs(limit - g2))
            return IntegralResult(g2, abs(d2))
        res = integrate_improper(lambda u: self.evaluator(u * c), cfg)
        return res.scaled(c)


def _log_constant(n: int, m: float) -> float:
    return math.lgamma(n + 1.0) - math.log(m)


def _positive_moment(spec: DistributionSpec, k: int) -> float:
    m = spec.integer_moment(k)
    if m is None:
        res = oracle_moment(spec, float(k))
        m = math.inf if res.infinite else res.value
    if not (math.isfinite(m) and m > 0):
        raise RelationError(f"m_{k} of {spec.label} must be finite and positive, got {m}")
    return m


def _require_nonnegative(spec: DistributionSpec):
    if spec.support is Support.REAL_LINE:
        raise RelationError(f"{spec.label} is not a nonnegative law")


def _require_positive(spec: DistributionSpec):
    _require_nonnegative(spec)
    if any(x == 0 for x, _ in spec.atoms):
        raise RelationError(f"{spec.label} has an atom at zero")


def sine_density(spec: DistributionSpec) -> DerivedDensity:
    """``g(t) = (2/pi) E[sin(tX)] / t``, a density when ``E[sin(tX)] >= 0``."""
    _require_positive(spec)
    if not spec.sin_positivity_flag:
        raise RelationError(f"E[sin(tX)] is not known to be nonnegative for {spec.label}")
    if spec.cf is None:
        raise MissingInputError(f"{spec.label} has no characteristic function")
    cf = spec.cf

    def g(t):
        return (2.0 / math.pi) * np.imag(cf(t)) / t

    return DerivedDensity(spec, DerivedKind.SINE, g, 1.0 / spec.scale)


def length_biased_density(spec: DistributionSpec) -> DerivedDensity:
    """``g(y) = (2/pi) (1 - E[cos(yX)]) / (m_1 y^2)``.

    The numerator comes from the even CF residual, so it keeps full relative
    accuracy as ``y -> 0``.
    """
    _require_nonnegative(spec)
    m1 = _positive_moment(spec, 1)
    resid = build_residual(spec, ResidualKind.EVEN, 0)

    def g(y):
        return (2.0 / (math.pi * m1)) * resid(y) / (y * y)

    return DerivedDensity(spec, DerivedKind.LENGTH_BIASED, g, 1.0 / spec.scale)


@dataclass(frozen=True)
class EquilibriumSpec:
    """The ``n``-th order equilibrium law of ``base``, through its LST.

    ``mean_chain[k]`` is the mean of the ``k``-th order equilibrium law
    (order 0 being the base law itself), ``m_{k+1} / ((k+1) m_k)``.
    """

    base: DistributionSpec
    order: int
    mean_chain: tuple[float, ...]
    lower: object = field(repr=False)
    upper: object = field(repr=False)

    @property
    def scale(self) -> float:
        return self.base.scale

    def _factor(self, lam):
        n = self.order
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(_log_constant(n, self.upper.moments[n]) - n * np.log(lam))

    def lst(self, lam):
        """``L_(n)(lam) = n! Q_{n-1}(lam) / (m_n lam^n)``, equal to 1 at 0."""
        lam = np.asarray(lam, dtype=float)
        flat = np.atleast_1d(lam).ravel()
        out = np.ones_like(flat)
        pos = flat > 0
        if np.any(pos):
            x = flat[pos]
            out[pos] = self._factor(x) * self.lower(x)
        return out.reshape(lam.shape) if lam.ndim else float(out[0])

    def complement(self, lam):
        """``1 - L_(n)(lam) = n! Q_n(lam) / (m_n lam^n)``, free of cancellation."""
        lam = np.asarray(lam, dtype=float)
        flat = np.atleast_1d(lam).ravel()
        out = np.zeros_like(flat)
        pos = flat > 0
        if np.any(pos):
            x = flat[pos]
            out[pos] = self._factor(x) * self.upper(x)
        return out.reshape(lam.shape) if lam.ndim else float(out[0])


def equilibrium_lst(spec: DistributionSpec, n: int) -> EquilibriumSpec:
    """Equilibrium law of order ``n`` (``1 <= n <= 4``) of a nonnegative law."""
    if int(n) != n or not 1 <= n <= _MAX_EQUILIBRIUM_ORDER:
        raise RelationError(f"equilibrium order must be an integer in [1, {_MAX_EQUILIBRIUM_ORDER}], got {n!r}")
    n = int(n)
    _require_nonnegative(spec)
    moments = [1.0] + [_positive_moment(spec, k) for k in range(1, n + 1)]
    chain = tuple(moments[k + 1] / ((k + 1) * moments[k]) for k in range(n))
    lower = build_residual(spec, ResidualKind.LAPLACE, n - 1)
    upper = build_residual(spec, ResidualKind.LAPLACE, n)
    return EquilibriumSpec(spec, n, chain, lower, upper)


def equilibrium_complement(eq: EquilibriumSpec) -> DerivedDensity:
    """The distribution function ``G = 1 - L_(n)`` on ``(0, inf)``."""
    return DerivedDensity(eq.base, DerivedKind.EQUILIBRIUM_COMPLEMENT, eq.complement, 1.0 / eq.scale, True)


def exp_mixture_distribution(spec: DistributionSpec) -> DerivedDensity:
    """The distribution function ``H = 1 - L`` of ``E / X`` with ``E`` standard exponential."""
    _require_positive(spec)
    resid = build_residual(spec, ResidualKind.LAPLACE, 0)
    return DerivedDensity(spec, DerivedKind.EXP_MIXTURE, resid, 1.0 / spec.scale, True)


@dataclass
class RelationCheck:
    """Both sides of a reciprocal identity.

    ``lhs`` is the moment of the derived variable; ``rhs`` is the constant
    times ``base_moment``.  Infinite sides are ``math.inf``.
    """

    name: str
    s: float
    lhs: float
    rhs: float
    constant: float
    base_moment: float
    lhs_error: float = 0.0
    rhs_error: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def pair(self) -> tuple[float, float]:
        return self.lhs, self.rhs

    @property
    def infinite(self) -> bool:
        return math.isinf(self.lhs) or math.isinf(self.rhs)

    @property
    def discrepancy(self) -> float:
        if math.isinf(self.lhs) and math.isinf(self.rhs):
            return 0.0
        return abs(self.lhs - self.rhs)

    def agrees(self, rtol: float) -> bool:
        if self.infinite:
            return math.isinf(self.lhs) and math.isinf(self.rhs)
        return self.discrepancy <= rtol * max(abs(self.rhs), abs(self.lhs))


def _base_moment(spec: DistributionSpec, s: float) -> tuple[float, float]:
    """``E[X^s]`` from the closed form if present, else density quadrature."""
    if s == 0:
        return 1.0, 0.0
    if spec.closed_moment is not None:
        return float(spec.closed_moment(s)), 0.0
    res = oracle_moment(spec, s)
    return (math.inf, 0.0) if res.infinite else (res.value, res.error_estimate)


def _finite(res: IntegralResult) -> tuple[float, float]:
    if res.diverged:
        return math.inf, 0.0
    return res.value, res.error_estimate


def reciprocal_sine(spec: DistributionSpec, s: float, cfg: QuadratureConfig = ENGINE_CONFIG) -> RelationCheck:
    """``E[Y^-s] = E[X^s] / (Gamma(s+1) cos(s pi/2))`` for ``Y`` with the sine density."""
    if not -1.0 < s < 1.0:
        raise RelationError(f"s={s} outside (-1, 1)")
    g = sine_density(spec)
    c = spec.scale
    base, base_err = _base_moment(spec, s)
    constant = 1.0 / (math.gamma(s + 1.0) * math.cos(s * math.pi / 2.0))
    if s == 0:
        mass = g.total_mass(cfg)
        lhs, lhs_err = _finite(mass)
    else:
        # t = u / c: int t^-s g(t) dt = c^(s-1) int u^-s g(u/c) du
        res = integrate_improper(lambda u: u ** (-s) * g(u / c), cfg, zero_exponent_hint=-s)
        lhs, lhs_err = _finite(res.scaled(c ** (s - 1.0)))
    return RelationCheck("reciprocal_sine", s, lhs, constant * base, constant, base, lhs_err, constant * base_err)


def check_polya_type(spec: DistributionSpec, points: int = 801, tol: float = 1e-12) -> None:
    """Finite check that the CF is real, even, decreasing and convex on ``t >= 0``.

    Raises :class:`RelationError` naming the first failed property.
    """
    if spec.cf is None:
        raise MissingInputError(f"{spec.label} has no characteristic function")
    t = np.linspace(0.0, 8.0 / spec.scale, points)
    phi = np.asarray(spec.cf(t))
    if abs(phi[0] - 1.0) > tol:
        raise RelationError(f"cf(0) = {phi[0]} is not 1")
    if np.max(np.abs(np.imag(phi))) > tol:
        raise RelationError(f"{spec.label} has a complex CF; not of Polya type")
    if np.max(np.abs(np.asarray(spec.cf(-t)) - phi)) > tol:
        raise RelationError(f"CF of {spec.label} is not even")
    re = np.real(phi)
    if np.min(re) < -tol:
        raise RelationError(f"CF of {spec.label} takes negative values")
    if np.max(np.diff(re)) > tol:
        raise RelationError(f"CF of {spec.label} is not nonincreasing on t >= 0")
    if np.min(np.diff(re, 2)) < -tol:
        raise RelationError(f"CF of {spec.label} is not convex on t >= 0")


def _polya_base_moment(spec: DistributionSpec, s: float, cfg) -> tuple[float, float]:
    """``E[X^s]`` for ``X`` with distribution function ``1 - cf`` on ``(0, inf)``."""
    if s == 0:
        return 1.0, 0.0
    c = spec.scale

    def phi(x):
        return np.real(spec.cf(x))

    # E[X^s] = s int x^(s-1) phi  (s > 0)  or  -s int x^(s-1) (1 - phi)  (s < 0); x = u / c
    if s > 0:
        res = integrate_halfline(lambda u: u ** (s - 1.0) * phi(u / c), IntegrandProfile(s - 1.0), cfg)
    else:
        res = integrate_halfline(lambda u: u ** (s - 1.0) * (1.0 - phi(u / c)), IntegrandProfile(s), cfg)
    value, err = _finite(res)
    factor = abs(s) * c ** (-s)
    return value * factor, err * factor


def polya_reciprocal(spec: DistributionSpec, s: float, cfg: QuadratureConfig = ENGINE_CONFIG) -> RelationCheck:
    """``E|Z|^-s = E[X^s] / (Gamma(s+1) cos(s pi/2))`` for a Polya-type ``Z``.

    ``X`` has distribution function ``1 - cf`` of ``Z``.  The left side
    integrates ``|z|^-s`` against the density of ``Z``.
    """
    if not -1.0 < s < 1.0:
        raise RelationError(f"s={s} outside (-1, 1)")
    check_polya_type(spec)
    if spec.density is None:
        raise MissingInputError(f"{spec.label} has no density")
    c = spec.scale
    base, base_err = _polya_base_moment(spec, s, cfg)
    constant = 1.0 / (math.gamma(s + 1.0) * math.cos(s * math.pi / 2.0))
    # symmetric density: 2 int_0^inf z^-s p(z) dz with z = c u
    res = integrate_halfline(lambda u: u ** (-s) * spec.density(c * u), IntegrandProfile(-s), cfg)
    lhs, lhs_err = _finite(res.scaled(2.0 * c ** (1.0 - s)))
    return RelationCheck("polya_reciprocal", s, lhs, constant * base, constant, base, lhs_err, constant * base_err)


def _length_biased_moment(spec: DistributionSpec, p: float, m1: float) -> tuple[float, float]:
    """``E[Z^p]`` for the length-biased law, by quadrature of ``z^p z f(z) / m_1``."""
    if spec.density is None and not spec.atoms:
        return math.nan, math.inf
    total, err = 0.0, 0.0
    for x, w in spec.atoms:
        if x > 0:
            total += w * x * x**p / m1
    if spec.density is not None:
        biased = DistributionSpec(
            name=f"{spec.name}-length-biased",
            params=spec.params,
            transforms=spec.transforms,
            density=lambda z: np.asarray(z) * spec.density(z) / m1,
            bounds=spec.bounds,
            scale=spec.scale,
        )
        res = oracle_moment(biased, p)
        if res.infinite:
            return math.inf, 0.0
        total += res.value
        err += res.error_estimate
    return total, err


def length_biased_relation(spec: DistributionSpec, s: float, cfg: QuadratureConfig = ENGINE_CONFIG) -> RelationCheck:
    """``E[Y^(1-s)] = E[X^s] / (m_1 Gamma(s+1) sin(s pi/2)) = E[Z^(s-1)] / (Gamma(s+1) sin(s pi/2))``.

    ``extra["length_biased_rhs"]`` holds the right side computed through the
    length-biased variable ``Z``.
    """
    if not 0.0 < s < 2.0:
        raise RelationError(f"s={s} outside (0, 2)")
    g = length_biased_density(spec)
    m1 = _positive_moment(spec, 1)
    base, base_err = _base_moment(spec, s)
    constant = 1.0 / (m1 * math.gamma(s + 1.0) * math.sin(s * math.pi / 2.0))
    # int y^(1-s) g(y) dy = (2 / (pi m_1)) int (1 - Re cf(y)) y^(-s-1) dy
    resid = build_residual(spec, ResidualKind.EVEN, 0)
    res = residual_integral(resid, s, spec.scale, cfg)
    lhs, lhs_err = _finite(res.scaled(2.0 / (math.pi * m1)))
    z_moment, z_err = _length_biased_moment(spec, s - 1.0, m1)
    via_z = m1 * constant * z_moment
    return RelationCheck(
        "length_biased", s, lhs, constant * base, constant, base, lhs_err, constant * base_err,
        {"length_biased_rhs": via_z, "length_biased_rhs_error": m1 * constant * z_err, "density": g},
    )


def equilibrium_reciprocal(
    spec: DistributionSpec, n: int, s: float, cfg: QuadratureConfig = ENGINE_CONFIG
) -> RelationCheck:
    """``E[Y^(n-s)] = n! (n-s) pi / (m_n Gamma(s+1) sin((n-s) pi)) E[X^s]`` for ``Y ~ 1 - L_(n)``.

    The left side integrates the survival function ``L_(n)`` (``s < n``) or
    the distribution function ``1 - L_(n)`` (``s > n``) against a power.
    At ``s = n`` both sides equal one.
    """
    if not n - 1 < s < n + 1:
        raise RelationError(f"s={s} outside ({n - 1}, {n + 1})")
    eq = equilibrium_lst(spec, n)
    m_n = _positive_moment(spec, n)
    p = n - s
    if p == 0:
        constant = 1.0 / m_n
    else:
        constant = math.factorial(n) * p * math.pi / (m_n * math.gamma(s + 1.0) * math.sin(p * math.pi))
    base, base_err = _base_moment(spec, s)
    c = spec.scale
    if p == 0:
        lhs, lhs_err = 1.0, 0.0
    elif p > 0:
        # E[Y^p] = p int L_(n)(lam) lam^(p-1) dlam with lam = u / c
        res = integrate_halfline(lambda u: u ** (p - 1.0) * eq.lst(u / c), IntegrandProfile(p - 1.0), cfg)
        lhs, lhs_err = _finite(res.scaled(p * c ** (-p)))
    else:
        # E[Y^p] = -p int (1 - L_(n)(lam)) lam^(p-1) dlam
        res = integrate_halfline(lambda u: u ** (p - 1.0) * eq.complement(u / c), IntegrandProfile(p), cfg)
        lhs, lhs_err = _finite(res.scaled(-p * c ** (-p)))
    return RelationCheck("equilibrium", s, lhs, constant * base, constant, base, lhs_err, constant * base_err,
                         {"order": n, "mean_chain": eq.mean_chain})


def exp_mixture_relation(spec: DistributionSpec, s: float, cfg: QuadratureConfig = ENGINE_CONFIG) -> RelationCheck:
    """``E[Z^-s] = E[E^-s] E[X^s]`` for ``Z = E / X`` with distribution function ``1 - L``.

    ``E[E^-s]`` is ``Gamma(1 - s)`` for ``s < 1`` and infinite otherwise.
    """
    h = exp_mixture_distribution(spec)
    if spec.lst is None:
        raise MissingInputError(f"{spec.label} has no Laplace-Stieltjes transform")
    base, base_err = _base_moment(spec, s)
    constant = math.gamma(1.0 - s) if s < 1 else math.inf
    rhs = constant * base if base != 0 else 0.0
    c = spec.scale
    if s == 0:
        lhs, lhs_err = 1.0, 0.0
    elif s > 0:
        # E[Z^-s] = s int lam^(-s-1) (1 - L(lam)) dlam
        res = residual_integral(h.evaluator, s, c, cfg)
        lhs, lhs_err = _finite(res.scaled(s))
    else:
        # E[Z^|s|] = |s| int lam^(|s|-1) L(lam) dlam with lam = u / c
        res = integrate_halfline(
            lambda u: u ** (-s - 1.0) * np.asarray(spec.lst(u / c), dtype=float), IntegrandProfile(-s - 1.0), cfg
        )
        lhs, lhs_err = _finite(res.scaled(-s * c**s))
    rhs_err = constant * base_err if math.isfinite(constant) else 0.0
    return RelationCheck("exp_mixture", s, lhs, rhs, constant, base, lhs_err, rhs_err)
