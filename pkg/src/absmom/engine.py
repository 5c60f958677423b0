"""Moments and distribution functions recovered from transforms.

The central quantity is a Mellin-type integral of a transform residual,

    int_0^inf R(t) t^(-s-1) dt,

where ``R`` is the transform minus the Taylor polynomial built from integer
moments, sign-adjusted so that ``R >= 0``.  Dividing by the matching kernel
constant gives the fractional moment.  Three residuals are supported:

* even: real part of the CF, powers ``t^(2k)``, absolute moments on the line;
* odd: imaginary part of the CF, powers ``t^(2k-1)``, for ``X >= 0``;
* laplace: the LST, powers ``lambda^k``, for ``X >= 0``.

Near zero the residual is a tiny difference of O(1) numbers.  When higher
integer moments are known the residual is summed from its own power series
instead; otherwise the quadrature's power-law end correction takes over.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .corpus import DistributionSpec, Support, oracle_moment
from .kernels import StripError, eval_g, eval_q, lemma1_constant, lemma2_constant, lemma4_constant
from .quadrature import (
    IntegralResult,
    IntegrandProfile,
    QuadratureConfig,
    Status,
    integrate_from_zero,
    integrate_halfline,
    integrate_improper,
    integrate_tail,
)
from .results import Method, MomentResult

__all__ = [
    "EngineError",
    "MissingInputError",
    "ResidualKind",
    "ResidualEvaluator",
    "CoefficientFunction",
    "CdfResult",
    "ENGINE_CONFIG",
    "build_residual",
    "residual_integral",
    "abs_moment_cf",
    "moment_nonneg_cf",
    "moment_lst",
    "sine_integral_identity",
    "negative_moment_lst",
    "ramanujan_negative_moment",
    "gamma_coefficient_function",
    "abs_mean_cf_derivative",
    "cdf_from_cf",
]

ENGINE_CONFIG = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13)

# Split point (in units of 1/scale) between the head integral and the tail.
_SPLIT = 8.0
# A series value is used only where its last term is this small relative to the sum.
_SERIES_RTOL = 1e-16


class EngineError(ValueError):
    """Invalid order, unsupported support type or missing transform."""


class MissingInputError(EngineError):
    """A required evaluator or prerequisite moment is unavailable."""


class ResidualKind(str, enum.Enum):
    EVEN = "G"
    ODD = "H"
    LAPLACE = "Q"


def _log_factorial(j: int) -> float:
    return math.lgamma(j + 1.0)


@dataclass
class ResidualEvaluator:
    """Sign-adjusted transform residual of order ``n``.

    ``moments[k]`` is ``E[X^k]`` for every ``k`` used by the polynomial;
    further finite entries are used for the small-argument series.
    ``transform`` is the real function being expanded (``Re cf``, ``Im cf``
    or the LST).
    """

    kind: ResidualKind
    order: int
    moments: dict[int, float]
    transform: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        for k in self.polynomial_orders:
            m = self.moments.get(k)
            if m is None:
                raise MissingInputError(f"moment m_{k} required by the {self.kind.value}_{self.order} residual")

    @property
    def sign(self) -> float:
        n = self.order
        return (-1.0) ** n if self.kind is ResidualKind.ODD else (-1.0) ** (n + 1)

    def _power(self, k: int) -> int:
        if self.kind is ResidualKind.EVEN:
            return 2 * k
        if self.kind is ResidualKind.ODD:
            return 2 * k - 1
        return k

    def _taylor_sign(self, k: int) -> float:
        if self.kind is ResidualKind.ODD:
            return (-1.0) ** (k + 1)
        return (-1.0) ** k

    @property
    def _first_index(self) -> int:
        return 1 if self.kind is ResidualKind.ODD else 0

    @property
    def polynomial_orders(self) -> list[int]:
        return [self._power(k) for k in range(self._first_index, self.order + 1)]

    def _terms(self, start: int, stop: int | None = None):
        """``(power, coefficient)`` of the transform's Taylor series from index ``start``."""
        out = []
        k = start
        while stop is None or k <= stop:
            p = self._power(k)
            m = self.moments.get(p)
            if m is None or not math.isfinite(m):
                break
            if m == 0:
                coeff = 0.0
            else:
                coeff = self._taylor_sign(k) * math.copysign(
                    math.exp(math.log(abs(m)) - _log_factorial(p)), m
                )
            out.append((p, coeff))
            k += 1
        return out

    @property
    def polynomial(self) -> list[tuple[int, float]]:
        return self._terms(self._first_index, self.order)

    @property
    def series(self) -> list[tuple[int, float]]:
        return self._terms(self.order + 1)

    def direct(self, t: np.ndarray) -> np.ndarray:
        poly = np.zeros_like(t)
        for p, c in self.polynomial:
            poly += c * t**p
        return self.sign * (np.asarray(self.transform(t), dtype=float) - poly)

    def series_value(self, t: np.ndarray):
        """Series value and a mask of points where the series has converged."""
        terms = self.series
        if len(terms) < 2:
            return np.zeros_like(t), np.zeros(t.shape, dtype=bool)
        total = np.zeros_like(t)
        last = np.zeros_like(t)
        for p, c in terms:
            last = c * t**p
            total += last
        ok = np.abs(last) <= _SERIES_RTOL * np.abs(total)
        return self.sign * total, ok

    def rounding_floor(self, top: float) -> float | None:
        """Smallest decade below ``top`` at which the residual is still trustworthy.

        Where the series is unavailable the residual is a difference of terms of
        size ``M``; once ``|R| <= 1e-10 M`` rounding dominates it.
        """
        t = 1e-3 * top
        while t > 1e-30:
            arr = np.array([t])
            _, ok = self.series_value(arr)
            if not ok[0]:
                magnitude = abs(float(np.asarray(self.transform(arr), dtype=float)[0]))
                magnitude += sum(abs(c) * t**p for p, c in self.polynomial)
                if abs(float(self.direct(arr)[0])) <= 1e-10 * magnitude:
                    return 10.0 * t
            t *= 0.1
        return None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.direct(t)
        ser, ok = self.series_value(t)
        out[ok] = ser[ok]
        return out


def _transform_part(spec: DistributionSpec, kind: ResidualKind):
    if kind is ResidualKind.LAPLACE:
        if spec.lst is None:
            raise MissingInputError(f"{spec.label} has no Laplace-Stieltjes transform")
        return lambda lam: np.asarray(spec.lst(lam), dtype=float)
    if spec.cf is None:
        raise MissingInputError(f"{spec.label} has no characteristic function")
    if kind is ResidualKind.EVEN:
        return lambda t: np.real(spec.cf(t))
    return lambda t: np.imag(spec.cf(t))


def _prerequisite_moments(spec: DistributionSpec, orders) -> dict[int, float]:
    moments = {}
    for k in orders:
        m = spec.integer_moment(k)
        if m is None:
            res = oracle_moment(spec, float(k))
            m = math.inf if res.infinite else res.value
        moments[k] = m
    # higher moments from the catalog feed the small-argument series
    if spec.integer_moments is not None:
        for k, m in enumerate(spec.integer_moments, start=1):
            moments.setdefault(k, m)
    return moments


def build_residual(spec: DistributionSpec, kind: ResidualKind, n: int) -> ResidualEvaluator:
    transform = _transform_part(spec, kind)
    first = 1 if kind is ResidualKind.ODD else 0
    power = {ResidualKind.EVEN: lambda k: 2 * k, ResidualKind.ODD: lambda k: 2 * k - 1}.get(kind, lambda k: k)
    orders = [power(k) for k in range(first, n + 1)]
    return ResidualEvaluator(kind, n, _prerequisite_moments(spec, orders), transform)


def residual_integral(
    resid: ResidualEvaluator,
    s: float,
    scale: float,
    cfg: QuadratureConfig = ENGINE_CONFIG,
) -> IntegralResult:
    """``int_0^inf R(t) t^(-s-1) dt`` with ``t`` measured in units of ``1/scale``.

    The head ``(0, 8/scale]`` uses the pointwise residual; beyond it the
    transform part is integrated numerically and the polynomial part exactly.
    """
    c = float(scale)

    def head_integrand(u):
        return resid(u / c) * u ** (-s - 1.0)

    floor = resid.rounding_floor(_SPLIT / c)
    head = integrate_from_zero(head_integrand, _SPLIT, cfg, floor=None if floor is None else floor * c)
    if head.diverged:
        return head

    def tail_integrand(u):
        return np.asarray(resid.transform(u / c), dtype=float) * u ** (-s - 1.0)

    tail = integrate_tail(tail_integrand, _SPLIT, cfg)
    if tail.diverged:
        return tail
    poly_tail = math.fsum(
        coeff * c ** (-p) * _SPLIT ** (p - s) / (s - p) for p, coeff in resid.polynomial
    )
    tail_value = resid.sign * (tail.value - poly_tail)
    total = IntegralResult(
        (head.value + tail_value) * c**s,
        (head.error_estimate + tail.error_estimate + 1e-16 * abs(poly_tail)) * c**s,
        Status.CONVERGED,
        head.panels_used + tail.panels_used,
        head.function_evals + tail.function_evals,
        head.notes + tail.notes,
    )
    return total


_GRID_CAP = 1e12


class _KernelMean:
    """``E[k(t |X|)]`` for many ``t`` from the density on a fixed log grid.

    Two grid resolutions give an error estimate.  Atoms are added exactly.
    """

    def __init__(self, spec: DistributionSpec, kernel, degree: int):
        self.kernel = kernel
        self.atoms = [(abs(x), w) for x, w in spec.atoms]
        self.nodes = []
        # smallest t at which the truncated density grid still stands in for the law
        self.floor = None
        if spec.density is None:
            return
        lo, hi = spec.bounds
        scale = spec.scale
        sides = []
        if hi > 0:
            sides.append((1.0, hi))
        if lo < 0:
            sides.append((-1.0, -lo))
        xgl, wgl = np.polynomial.legendre.leggauss(16)
        for sign, upper in sides:
            top = upper if math.isfinite(upper) else self._tail_end(spec, sign, scale, degree)
            if top >= _GRID_CAP * scale:
                self.floor = max(self.floor or 0.0, 1e3 / top)
            w_lo = math.log(scale) - 30.0
            w_hi = math.log(top)
            grids = []
            for step in (0.25, 0.125):
                count = max(4, int(math.ceil((w_hi - w_lo) / step)))
                edges = np.linspace(w_lo, w_hi, count + 1)
                mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
                half = 0.5 * np.diff(edges)[:, None]
                w = (mid + half * xgl[None, :]).ravel()
                x = np.exp(w)
                weight = (half * wgl[None, :]).ravel() * x * spec.density(sign * x)
                grids.append((x, weight))
            self.nodes.append(grids)

    @staticmethod
    def _tail_end(spec, sign, scale, degree):
        top = 4.0 * scale
        while top < _GRID_CAP * scale:
            if spec.density(sign * top) * top ** (degree + 2) < 1e-18:
                break
            top *= 2.0
        return top

    def __call__(self, t: np.ndarray):
        t = np.asarray(t, dtype=float)
        coarse = np.zeros_like(t)
        fine = np.zeros_like(t)
        for x, w in self.atoms:
            val = w * self.kernel(t * x)
            coarse += val
            fine += val
        for grids in self.nodes:
            for target, (x, w) in zip((coarse, fine), grids):
                for start in range(0, t.size, 64):
                    tt = t.ravel()[start : start + 64]
                    target.ravel()[start : start + 64] += self.kernel(np.outer(tt, x)) @ w
        return fine, np.abs(fine - coarse)


def _kernel_integral(mean: _KernelMean, s: float, scale: float, cfg) -> tuple[IntegralResult, float]:
    """``int_0^(8/scale) E[k(tX)] t^(-s-1) dt`` plus a grid-error bound."""
    c = float(scale)
    worst = [0.0]
    # no point integrating more tightly than the grid resolves the mean
    probe, probe_err = mean(np.geomspace(1e-6, _SPLIT, 13) / c)
    grid_rel = float(np.max(probe_err / np.maximum(np.abs(probe), 1e-300)))
    cfg = cfg.replace(rel_tol=max(cfg.rel_tol, 0.1 * grid_rel))

    def integrand(u):
        val, err = mean(u / c)
        weight = u ** (-s - 1.0)
        worst[0] = max(worst[0], float(np.max(err * weight * u, initial=0.0)))
        return val * weight

    res = integrate_from_zero(integrand, _SPLIT, cfg, floor=None if mean.floor is None else mean.floor * c)
    return res, worst[0] * math.log(_SPLIT * 1e30)


def _from_integral(s, res: IntegralResult, constant: float, method: Method, extra=None) -> MomentResult:
    if res.diverged:
        return MomentResult.infinity(s, method, "; ".join(res.notes) or "integral diverges", res.function_evals)
    diag = {"status": res.status.value, "notes": res.notes, "panels": res.panels_used}
    if extra:
        diag.update(extra)
    return MomentResult(
        s,
        res.value / constant,
        method,
        res.error_estimate / constant,
        evals=res.function_evals,
        diagnostics=diag,
    )


def _infinite_prerequisite(resid: ResidualEvaluator, s: float, method: Method) -> MomentResult | None:
    for k in resid.polynomial_orders:
        if not math.isfinite(resid.moments[k]):
            return MomentResult.infinity(s, method, f"prerequisite moment m_{k} is infinite")
    return None


def _require_nonnegative(spec: DistributionSpec, what: str):
    if spec.support is Support.REAL_LINE:
        raise EngineError(f"{what} needs a nonnegative random variable; {spec.label} lives on the real line")


def _prerequisite_or_infinite(spec, kind, n, s, method):
    """Residual for order ``n`` or an infinity marker if a needed moment is infinite."""
    resid = build_residual(spec, kind, n)
    return resid, _infinite_prerequisite(resid, s, method)


def abs_moment_cf(
    spec: DistributionSpec,
    s: float,
    n: int | None = None,
    *,
    cross_check: bool = False,
    cfg: QuadratureConfig = ENGINE_CONFIG,
) -> MomentResult:
    """``E|X|^s`` from the real part of the CF.

    ``n`` defaults to ``floor(s/2)``; ``s`` must lie strictly inside
    ``(2n, 2n+2)``.  With ``cross_check`` and a density, the kernel-mean form
    ``E[g_n(tX)]`` is also integrated and reported in the diagnostics.
    """
    n = int(s // 2) if n is None else n
    constant = lemma1_constant(n, s)
    method = Method.CF_EVEN_RESIDUAL
    resid, inf = _prerequisite_or_infinite(spec, ResidualKind.EVEN, n, s, method)
    if inf is not None:
        return inf
    res = residual_integral(resid, s, spec.scale, cfg)
    out = _from_integral(s, res, constant, method, {"order": n})
    if cross_check and (spec.density is not None or spec.atoms) and not out.infinite:
        alt = abs_moment_cf_kernel_mean(spec, s, n, cfg=cfg)
        out.diagnostics["kernel_mean"] = alt.value
        out.diagnostics["kernel_mean_error"] = alt.error_estimate
        out.diagnostics["agree"] = abs(alt.value - out.value) <= 10 * (alt.error_estimate + out.error_estimate) + 1e-9 * abs(out.value)
    return out


def _kernel_mean_moment(spec, s, n, kernel, degree, kind, constant, method, cfg):
    resid, inf = _prerequisite_or_infinite(spec, kind, n, s, method)
    if inf is not None:
        return inf
    mean = _KernelMean(spec, kernel, degree)
    head, grid_err = _kernel_integral(mean, s, spec.scale, cfg)
    if head.diverged:
        return MomentResult.infinity(s, method, "; ".join(head.notes))
    c = float(spec.scale)
    full = residual_integral(resid, s, spec.scale, cfg)
    if full.diverged:
        return MomentResult.infinity(s, method, "; ".join(full.notes))
    # the tail beyond 8/scale is shared with the residual route
    floor = resid.rounding_floor(_SPLIT / c)
    head_resid = integrate_from_zero(
        lambda u: resid(u / c) * u ** (-s - 1.0), _SPLIT, cfg, floor=None if floor is None else floor * c
    )
    tail_value = full.value - head_resid.value * c**s
    value = head.value * c**s + tail_value
    err = (head.error_estimate + grid_err) * c**s + full.error_estimate + head_resid.error_estimate * c**s
    return MomentResult(s, value / constant, method, err / constant,
                        evals=head.function_evals + full.function_evals,
                        diagnostics={"order": n, "grid_error": grid_err / constant})


def abs_moment_cf_kernel_mean(spec, s, n=None, *, cfg=ENGINE_CONFIG) -> MomentResult:
    """``E|X|^s`` via ``int E[g_n(t|X|)] t^(-s-1) dt`` with the expectation from the density."""
    n = int(s // 2) if n is None else n
    constant = lemma1_constant(n, s)
    return _kernel_mean_moment(
        spec, s, n, lambda z: eval_g(n, z), 2 * n + 2, ResidualKind.EVEN, constant,
        Method.CF_EVEN_KERNEL_DENSITY, cfg,
    )


def moment_nonneg_cf(
    spec: DistributionSpec,
    s: float,
    n: int | None = None,
    *,
    cfg: QuadratureConfig = ENGINE_CONFIG,
) -> MomentResult:
    """``E[X^s]`` for ``X >= 0`` from the imaginary part of the CF.

    ``n`` defaults to ``floor((s+1)/2)``; for ``0 < s < 1`` this is the bare
    imaginary part (no polynomial).
    """
    _require_nonnegative(spec, "the odd-residual formula")
    if not s > 0:
        raise StripError(f"s={s} must be positive for the odd-residual formula")
    n = int((s + 1) // 2) if n is None else n
    constant = lemma2_constant(n, s)
    method = Method.CF_ODD_RESIDUAL
    resid, inf = _prerequisite_or_infinite(spec, ResidualKind.ODD, n, s, method)
    if inf is not None:
        return inf
    res = residual_integral(resid, s, spec.scale, cfg)
    return _from_integral(s, res, constant, method, {"order": n})


def moment_lst(
    spec: DistributionSpec,
    s: float,
    n: int | None = None,
    *,
    route: str = "residual",
    cfg: QuadratureConfig = ENGINE_CONFIG,
) -> MomentResult:
    """``E[X^s]`` for ``X >= 0`` from the LST residual of order ``n = floor(s)``.

    ``route="density"`` integrates ``E[q_n(lambda X)]`` computed from the
    density instead of the residual near the origin.
    """
    _require_nonnegative(spec, "the Laplace formula")
    if not s > 0:
        raise StripError(f"s={s} must be positive")
    n = int(s // 1) if n is None else n
    constant = lemma4_constant(n, s)
    if route == "density":
        return _kernel_mean_moment(
            spec, s, n, lambda z: eval_q(n, z), n + 1, ResidualKind.LAPLACE, constant,
            Method.LST_KERNEL_DENSITY, cfg,
        )
    if route != "residual":
        raise EngineError(f"unknown route {route!r}")
    method = Method.LST_RESIDUAL
    resid, inf = _prerequisite_or_infinite(spec, ResidualKind.LAPLACE, n, s, method)
    if inf is not None:
        return inf
    res = residual_integral(resid, s, spec.scale, cfg)
    return _from_integral(s, res, constant, method, {"order": n})


def _require_positive(spec: DistributionSpec, what: str):
    _require_nonnegative(spec, what)
    if any(x == 0 for x, _ in spec.atoms):
        raise EngineError(f"{what} needs X > 0 but {spec.label} has an atom at zero")


def sine_integral_identity(spec: DistributionSpec, cfg: QuadratureConfig = ENGINE_CONFIG) -> IntegralResult:
    """``int_0^inf Im cf(t) / t dt`` as an improper limit; equals ``pi/2`` for ``X > 0``."""
    _require_positive(spec, "the sine-integral identity")
    if spec.cf is None:
        raise MissingInputError(f"{spec.label} has no characteristic function")
    c = float(spec.scale)

    def integrand(u):
        return np.imag(spec.cf(u / c)) / u

    return integrate_improper(integrand, cfg)


def negative_moment_lst(spec: DistributionSpec, s: float, cfg: QuadratureConfig = ENGINE_CONFIG) -> MomentResult:
    """``E[X^(-s)] = int_0^inf lambda^(s-1) L(lambda) dlambda / Gamma(s)`` for ``s > 0``."""
    _require_positive(spec, "negative moments from the LST")
    if not s > 0:
        raise EngineError(f"order s={s} must be positive")
    if spec.lst is None:
        raise MissingInputError(f"{spec.label} has no Laplace-Stieltjes transform")
    c = float(spec.scale)

    def integrand(u):
        return u ** (s - 1.0) * np.asarray(spec.lst(u / c), dtype=float)

    res = integrate_halfline(integrand, IntegrandProfile(s - 1.0), cfg)
    if res.diverged:
        return MomentResult.infinity(-s, Method.LST_NEGATIVE, "; ".join(res.notes), res.function_evals)
    factor = c ** (-s) / math.gamma(s)
    return MomentResult(-s, res.value * factor, Method.LST_NEGATIVE, res.error_estimate * factor,
                        evals=res.function_evals, diagnostics={"notes": res.notes})


@dataclass(frozen=True)
class CoefficientFunction:
    """Analytic interpolant of the LST coefficients.

    ``evaluator(k)`` equals ``E[X^k]`` at nonnegative integers, i.e. the LST
    is ``sum_k evaluator(k) (-lambda)^k / k!``; it is analytic on
    ``Re z >= -delta``.
    """

    evaluator: Callable[[float], float]
    delta: float
    name: str = ""

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    def check_integer_values(self, spec: DistributionSpec, kmax: int = 6, rtol: float = 1e-12) -> bool:
        for k in range(kmax + 1):
            m = spec.integer_moment(k)
            if m is None or not math.isfinite(m):
                continue
            if not math.isclose(self.evaluator(k), m, rel_tol=rtol):
                return False
        return True


def gamma_coefficient_function(alpha: float, beta: float = 1.0) -> CoefficientFunction:
    """Coefficient function ``Gamma(z+alpha) beta^z / Gamma(alpha)`` of a gamma LST."""

    def evaluator(z):
        return math.exp(math.lgamma(z + alpha) - math.lgamma(alpha) + z * math.log(beta))

    return CoefficientFunction(evaluator, 0.999 * min(alpha, 1.0), f"gamma({alpha:g},{beta:g})")


def ramanujan_negative_moment(cfn: CoefficientFunction, s: float) -> MomentResult:
    """``E[X^(-s)]`` as the coefficient function evaluated at ``-s``, for ``0 < s < delta``."""
    if not 0 < s < cfn.delta:
        raise EngineError(f"s={s} outside (0, {cfn.delta})")
    return MomentResult(-s, float(cfn.evaluator(-s)), Method.COEFFICIENT_FUNCTION, 0.0)


def abs_mean_cf_derivative(spec: DistributionSpec, cfg: QuadratureConfig = ENGINE_CONFIG) -> MomentResult:
    """``E|X| = -(2/pi) int_0^inf Re cf'(t) / t dt`` (improper limit)."""
    deriv = spec.transforms.cf_derivative
    if deriv is None:
        raise MissingInputError(f"{spec.label} has no CF derivative evaluator")
    c = float(spec.scale)

    def integrand(u):
        return np.real(deriv(u / c)) / u

    res = integrate_improper(integrand, cfg)
    if res.diverged:
        return MomentResult.infinity(1.0, Method.CF_DERIVATIVE, "; ".join(res.notes), res.function_evals)
    # t = u / c leaves dt / t unchanged
    factor = -2.0 / math.pi
    return MomentResult(1.0, res.value * factor, Method.CF_DERIVATIVE, res.error_estimate * abs(factor),
                        evals=res.function_evals, diagnostics={"notes": res.notes})


@dataclass
class CdfResult:
    x: float
    value: float
    method: str
    error_estimate: float
    clamped: bool = False
    raw_value: float = math.nan
    evals: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


def cdf_from_cf(
    spec: DistributionSpec,
    x: float,
    method: str = "eq2",
    cfg: QuadratureConfig = ENGINE_CONFIG,
) -> CdfResult:
    """``F(x)`` at a continuity point from the CF.

    ``eq2``: ``1/2 - (1/pi) int Im(cf(t) e^(-itx)) dt/t`` (any support);
    ``eq3``: ``(2/pi) int sin(xt) Re cf(t) dt/t`` (``X >= 0``);
    ``eq4``: ``1 - (2/pi) int cos(xt) Im cf(t) dt/t`` (``X >= 0``).
    The result is clamped to ``[0, 1]``; clamping is recorded.
    """
    if spec.cf is None:
        raise MissingInputError(f"{spec.label} has no characteristic function")
    c = float(spec.scale)
    x = float(x)
    if method == "eq2":

        def integrand(u):
            t = u / c
            return np.imag(spec.cf(t) * np.exp(-1j * t * x)) / u

        offset, factor = 0.5, -1.0 / math.pi
    elif method in ("eq3", "eq4"):
        _require_nonnegative(spec, f"CDF inversion {method}")
        if x < 0:
            return CdfResult(x, 0.0, method, 0.0, raw_value=0.0)
        if method == "eq3":

            def integrand(u):
                t = u / c
                return np.sin(x * t) * np.real(spec.cf(t)) / u

            offset, factor = 0.0, 2.0 / math.pi
        else:

            def integrand(u):
                t = u / c
                return np.cos(x * t) * np.imag(spec.cf(t)) / u

            offset, factor = 1.0, -2.0 / math.pi
    else:
        raise EngineError(f"unknown inversion method {method!r}; use eq2, eq3 or eq4")
    res = integrate_improper(integrand, cfg)
    if res.diverged:
        raise ArithmeticError(f"CDF inversion {method} at x={x} did not converge: {'; '.join(res.notes)}")
    raw = offset + factor * res.value
    value = min(1.0, max(0.0, raw))
    return CdfResult(x, value, method, abs(factor) * res.error_estimate, value != raw, raw,
                     res.function_evals, {"notes": res.notes})
