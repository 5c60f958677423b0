"""Translated moments ``E[(X + a)^s]`` and what they determine.

For ``X >= 0`` the values ``E[(X + a_k)^s]`` along a suitable shift
sequence ``a_k`` pin down the law of ``X``.  No finite computation can
certify that, so this module offers two testable stand-ins: discrimination
reports comparing two laws on a finite prefix of shifts, and recovery of the
integer moments from the large-shift expansion of translated moments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import DistributionSpec, Support, TransformPair, oracle_moment
from .engine import ENGINE_CONFIG, EngineError, ResidualKind, build_residual, moment_lst
from .kernels import gen_binomial
from .quadrature import IntegrandProfile, QuadratureConfig, integrate_from_zero, integrate_halfline, integrate_interval
from .results import Method, MomentResult

__all__ = [
    "TranslationError",
    "MuntzCondition",
    "MuntzSequence",
    "TranslatedMomentProfile",
    "DiscriminationReport",
    "ExtractionReport",
    "EXTRACTION_CONFIG",
    "primes",
    "make_sequence",
    "shifted",
    "translated_moment",
    "translated_profile",
    "discriminate",
    "h_density_distance",
    "extract_integer_moments",
    "richardson",
]

# translated moments feeding the large-shift expansion lose digits to cancellation
EXTRACTION_CONFIG = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15, max_panels=8192)


class TranslationError(EngineError):
    """Invalid shift sequence or a scenario outside the determination hypotheses."""


class MuntzCondition(str, enum.Enum):
    DIVERGENT = "a"  # a_k -> inf with sum 1/a_k = inf
    CONVERGENT = "b"  # a_k -> a_0 in (0, inf)
    VANISHING = "c"  # a_k -> 0 with sum a_k = inf


def primes(count: int) -> list[int]:
    """The first ``count`` primes by the sieve of Eratosthenes."""
    if count < 1:
        return []
    # p_n < n (ln n + ln ln n) for n >= 6
    limit = 15 if count < 6 else int(count * (math.log(count) + math.log(math.log(count)))) + 1
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)[:count]]


@dataclass(frozen=True)
class MuntzSequence:
    """A finite prefix of a shift sequence and the condition it is declared to satisfy.

    Whether the full sequence meets the condition is not decidable from a
    prefix; :meth:`trend_consistent` only checks the prefix does not contradict it.
    """

    values: tuple[float, ...]
    condition: MuntzCondition
    kind: str = "custom"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise TranslationError("empty shift sequence")
        if any(not (math.isfinite(v) and v > 0) for v in vals):
            raise TranslationError("shifts must be finite and positive")
        if len(set(vals)) != len(vals):
            raise TranslationError("shifts must be pairwise distinct")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "condition", MuntzCondition(self.condition))

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def trend_consistent(self) -> bool:
        v = np.asarray(self.values)
        if v.size < 3:
            return True
        tail = v[v.size // 2 :]
        if self.condition is MuntzCondition.DIVERGENT:
            return bool(np.all(np.diff(tail) > 0))
        if self.condition is MuntzCondition.VANISHING:
            return bool(np.all(np.diff(tail) < 0))
        steps = np.abs(np.diff(v))
        return bool(steps[-1] <= steps[0] and np.min(tail) > 0.1 * np.max(np.abs(tail - tail[-1])))


def make_sequence(kind: str, count: int, *, limit: float = 1.0, values=None, condition=None) -> MuntzSequence:
    """Build ``count`` shifts.

    ``primes`` gives ``p_k`` (condition a), ``reciprocal_primes`` gives
    ``1/p_k`` (condition c), ``harmonic-to-limit`` gives ``limit + 1/k``
    (condition b) and ``custom`` takes ``values`` and a declared ``condition``.
    """
    if int(count) != count or count < 1:
        raise TranslationError(f"sequence length must be a positive integer, got {count!r}")
    count = int(count)
    if kind == "primes":
        return MuntzSequence(tuple(primes(count)), MuntzCondition.DIVERGENT, kind)
    if kind == "reciprocal_primes":
        return MuntzSequence(tuple(1.0 / p for p in primes(count)), MuntzCondition.VANISHING, kind)
    if kind in ("harmonic-to-limit", "harmonic"):
        if not limit > 0:
            raise TranslationError("the limit of a harmonic sequence must be positive")
        return MuntzSequence(tuple(limit + 1.0 / k for k in range(1, count + 1)), MuntzCondition.CONVERGENT,
                             "harmonic-to-limit")
    if kind == "custom":
        if values is None or condition is None:
            raise TranslationError("custom sequences need values and a declared condition")
        return MuntzSequence(tuple(values)[:count], condition, kind)
    raise TranslationError(f"unknown sequence kind {kind!r}")


def _require_nonnegative(spec: DistributionSpec):
    if spec.support is Support.REAL_LINE:
        raise TranslationError(f"{spec.label} is not a nonnegative law")


def _shifted_moments(moments, a):
    out = []
    for k in range(1, len(moments) + 1):
        raw = [1.0] + list(moments[:k])
        if any(not math.isfinite(m) for m in raw):
            out.append(math.inf)
            continue
        out.append(math.fsum(math.comb(k, j) * a ** (k - j) * raw[j] for j in range(k + 1)))
    return tuple(out)


def shifted(spec: DistributionSpec, a: float) -> DistributionSpec:
    """The law of ``X + a`` for ``X >= 0`` and ``a >= 0``."""
    _require_nonnegative(spec)
    if not a >= 0:
        raise TranslationError(f"shift must be nonnegative, got {a!r}")
    if a == 0:
        return spec
    tp = spec.transforms
    cf = dcf = lst = None
    if tp.cf is not None:
        def cf(t, f=tp.cf):
            t = np.asarray(t, dtype=float)
            return np.exp(1j * a * t) * f(t)

        if tp.cf_derivative is not None:
            def dcf(t, f=tp.cf, df=tp.cf_derivative):
                t = np.asarray(t, dtype=float)
                return np.exp(1j * a * t) * (1j * a * f(t) + df(t))
    if tp.lst is not None:
        def lst(lam, f=tp.lst):
            lam = np.asarray(lam, dtype=float)
            return np.exp(-a * lam) * f(lam)

    density = None
    if spec.density is not None:
        def density(x, f=spec.density):
            x = np.asarray(x, dtype=float)
            y = x - a
            return np.where(y >= 0, f(np.maximum(y, 0.0)), 0.0)

    cdf = None
    if spec.cdf is not None:
        def cdf(x, F=spec.cdf):
            return F(np.asarray(x, dtype=float) - a)

    moments = None if spec.integer_moments is None else _shifted_moments(spec.integer_moments, a)
    return replace(
        spec,
        name=f"{spec.name}+{a:g}",
        transforms=TransformPair(cf, dcf, lst, Support.POSITIVE),
        density=density,
        cdf=cdf,
        closed_moment=None,
        integer_moments=moments,
        sin_positivity_flag=False,
        atoms=tuple((x + a, w) for x, w in spec.atoms),
        bounds=(spec.bounds[0] + a, spec.bounds[1] + a),
        scale=spec.scale + a,
    )


def _density_route(spec: DistributionSpec, s: float, a: float, cfg: QuadratureConfig) -> MomentResult:
    """``sum w (x + a)^s + int (x + a)^s f(x) dx`` over the support of ``X``."""
    parts = [w * (x + a) ** s for x, w in spec.atoms]
    err, evals = 0.0, 0
    if spec.density is not None:
        lo, hi = spec.bounds
        f = spec.density
        c = spec.scale

        def integrand(u):
            x = c * u + lo
            return (x + a) ** s * f(x)

        if math.isinf(hi):
            res = integrate_halfline(integrand, IntegrandProfile(None), cfg)
        elif lo == 0:
            res = integrate_from_zero(integrand, hi / c, cfg)
        else:
            res = integrate_interval(integrand, 0.0, (hi - lo) / c, cfg)
        if res.diverged:
            return MomentResult.infinity(s, Method.ORACLE, "; ".join(res.notes), res.function_evals)
        parts.append(c * res.value)
        err, evals = c * res.error_estimate, res.function_evals
    elif not spec.atoms:
        raise EngineError(f"{spec.label} has neither density nor atoms")
    return MomentResult(s, math.fsum(parts), Method.ORACLE, err, evals=evals)


def _integer_power(spec: DistributionSpec, k: int, a: float) -> MomentResult | None:
    moments = [spec.integer_moment(j) for j in range(k + 1)]
    if any(m is None for m in moments):
        return None
    if any(not math.isfinite(m) for m in moments):
        return MomentResult.infinity(float(k), Method.ORACLE, "an integer moment is infinite")
    value = math.fsum(math.comb(k, j) * a ** (k - j) * moments[j] for j in range(k + 1))
    return MomentResult(float(k), value, Method.ORACLE, 0.0)


def translated_moment(
    spec: DistributionSpec,
    s: float,
    a: float,
    *,
    route: str = "auto",
    cfg: QuadratureConfig | None = None,
) -> MomentResult:
    """``E[(X + a)^s]`` for ``X >= 0`` and ``a >= 0``.

    ``route`` is ``density`` (quadrature against the density, plus atoms),
    ``lst`` (the LST formula applied to ``exp(-a lam) L(lam)``) or ``auto``,
    which prefers the density.  Integer ``s`` is expanded exactly when the
    integer moments are recorded.
    """
    _require_nonnegative(spec)
    if not a >= 0:
        raise TranslationError(f"shift must be nonnegative, got {a!r}")
    if route not in ("auto", "density", "lst"):
        raise TranslationError(f"unknown route {route!r}")
    if s == 0:
        return MomentResult(0.0, 1.0, Method.ORACLE, 0.0)
    if s == int(s) and s > 0 and route != "lst":
        exact = _integer_power(spec, int(s), a)
        if exact is not None:
            return exact
    if route == "lst" or (route == "auto" and spec.density is None and not spec.atoms):
        if spec.lst is None:
            raise EngineError(f"{spec.label} has no Laplace-Stieltjes transform")
        if s < 0 and a == 0:
            raise TranslationError("the LST route needs s > 0 or a > 0")
        return moment_lst(shifted(spec, a), s, cfg=cfg or ENGINE_CONFIG)
    if a == 0:
        return oracle_moment(spec, s, cfg)
    return _density_route(spec, s, a, cfg or EXTRACTION_CONFIG)


@dataclass(frozen=True)
class TranslatedMomentProfile:
    """``E[X^s]`` and ``E[(X + a_k)^s]`` (and ``E[(X + 2 a_k)^s]`` when ``doubled``)."""

    s: float
    base: float
    entries: tuple[tuple[float, float], ...]
    doubled: tuple[tuple[float, float], ...] | None = None

    def monotone(self) -> bool:
        """Every translated value is at least the base value (``s > 0``)."""
        values = [v for _, v in self.entries] + [v for _, v in (self.doubled or ())]
        return all(math.isfinite(v) and v >= self.base for v in values)


def _value(res: MomentResult) -> float:
    return math.inf if res.infinite else res.value


def translated_profile(
    spec: DistributionSpec, s: float, seq, *, doubled: bool | None = None, route: str = "auto"
) -> TranslatedMomentProfile:
    """Base and translated moments along ``seq``; ``doubled`` defaults to ``s > 1``."""
    doubled = s > 1 if doubled is None else doubled
    shifts = list(seq)
    base = _value(translated_moment(spec, s, 0.0, route=route))
    entries = tuple((a, _value(translated_moment(spec, s, a, route=route))) for a in shifts)
    twice = None
    if doubled:
        twice = tuple((2 * a, _value(translated_moment(spec, s, 2 * a, route=route))) for a in shifts)
    return TranslatedMomentProfile(s, base, entries, twice)


@dataclass
class DiscriminationReport:
    """Comparison of two translated-moment profiles on a finite prefix.

    A discrepancy above tolerance is evidence that the laws differ; matching
    prefixes prove nothing.  ``first_index`` is 1-based.
    """

    s: float
    tol: float
    discrepancies: list[float]
    first_index: int | None
    base_discrepancy: float
    h_distance: float | None = None
    profiles: tuple = field(default=(), repr=False)

    @property
    def max_discrepancy(self) -> float:
        return max(self.discrepancies) if self.discrepancies else 0.0

    @property
    def separated(self) -> bool:
        return self.first_index is not None


def discriminate(
    spec_a: DistributionSpec,
    spec_b: DistributionSpec,
    s: float,
    seq: MuntzSequence,
    tol: float,
    *,
    route_a: str = "auto",
    route_b: str = "auto",
    with_h_distance: bool = False,
) -> DiscriminationReport:
    """Per-index ``|E[(A + a_k)^s] - E[(B + a_k)^s]|`` (and the ``2 a_k`` companion for ``s > 1``).

    The base moments must agree to relative ``tol``; otherwise the scenario
    lies outside the determination hypotheses and is rejected.
    """
    if not (s > 0 and s != int(s)):
        raise TranslationError(f"s={s} must be positive and not an integer")
    for spec in (spec_a, spec_b):
        _require_nonnegative(spec)
    pa = translated_profile(spec_a, s, seq, route=route_a)
    pb = translated_profile(spec_b, s, seq, route=route_b)
    if not (math.isfinite(pa.base) and math.isfinite(pb.base) and pa.base > 0 and pb.base > 0):
        raise TranslationError("E[X^s] must be finite and positive for both laws")
    base_gap = abs(pa.base - pb.base)
    if base_gap > tol * max(pa.base, pb.base):
        raise TranslationError(
            f"base moments differ ({pa.base!r} vs {pb.base!r}); matched base moments are required"
        )
    gaps = []
    for k, ((_, va), (_, vb)) in enumerate(zip(pa.entries, pb.entries)):
        gap = abs(va - vb)
        if pa.doubled is not None:
            gap = max(gap, abs(pa.doubled[k][1] - pb.doubled[k][1]))
        gaps.append(gap)
    first = next((k + 1 for k, g in enumerate(gaps) if g > tol), None)
    h = h_density_distance(spec_a, spec_b, s, pa.base, pb.base) if with_h_distance else None
    return DiscriminationReport(s, tol, gaps, first, base_gap, h, (pa, pb))


def h_density_distance(spec_a, spec_b, s: float, base_a: float, base_b: float) -> float:
    """``int |h_A - h_B|`` for ``h(lam) = C_s Q_n(lam) / (m_s lam^(s+1))``.

    ``h`` is a probability density built from the LST residual of order
    ``n = floor(s)``; it is the same for two laws exactly when they agree.
    """
    n = int(s // 1)
    c_s = math.gamma(s + 1.0) * math.sin((s - n) * math.pi) / math.pi
    ra = build_residual(spec_a, ResidualKind.LAPLACE, n)
    rb = build_residual(spec_b, ResidualKind.LAPLACE, n)
    scale = max(spec_a.scale, spec_b.scale)

    def gap(u):
        lam = u / scale
        return np.abs(ra(lam) / base_a - rb(lam) / base_b) * lam ** (-s - 1.0)

    res = integrate_halfline(gap, IntegrandProfile(None), ENGINE_CONFIG)
    return math.inf if res.diverged else c_s * res.value / scale


def richardson(values, ratio: float) -> tuple[float, float, int]:
    """Extrapolate ``values[k] = v + sum_p c_p h_k^p`` with ``h_{k+1} = h_k / ratio``.

    Returns ``(estimate, error, column)``: the column whose last two entries
    agree best, their disagreement, and the column index.
    """
    col = [float(v) for v in values]
    if not col:
        raise ValueError("nothing to extrapolate")
    if len(col) == 1:
        return col[0], math.inf, 0
    best = (col[-1], abs(col[-1] - col[-2]), 0)
    p = 1
    while len(col) > 2:
        w = ratio**p
        col = [(w * col[k + 1] - col[k]) / (w - 1.0) for k in range(len(col) - 1)]
        spread = abs(col[-1] - col[-2])
        if spread < best[1]:
            best = (col[-1], spread, p)
        p += 1
    return best


@dataclass
class ExtractionReport:
    """Integer moments recovered from the large-shift expansion.

    ``raw[l]`` are the unextrapolated estimates of ``m_{l+1}`` along the
    shift schedule.  ``converged`` is false when successive raw estimates
    stop contracting, which makes the extrapolated value unreliable.
    """

    s: float
    schedule: tuple[float, ...]
    moments: list[float]
    errors: list[float]
    raw: list[list[float]]
    converged: bool
    notes: list[str] = field(default_factory=list)


def _contracting(raw) -> bool:
    steps = np.abs(np.diff(raw))
    if steps.size < 3:
        return True
    tail = steps[-3:]
    return bool(np.all(tail[1:] <= tail[:-1] * 1.05 + 1e-300))


def extract_integer_moments(
    spec: DistributionSpec,
    s: float,
    n: int,
    a_schedule=None,
    *,
    route: str = "auto",
) -> ExtractionReport:
    """Recover ``m_1..m_n`` from ``E[(X + a)^s]`` and ``E[(X + 2a)^s]`` as ``a`` grows.

    For ``0 <= l < n``::

        a^(l+1) {2 a^-s E[(X+a)^s] - 2^(l+1) (2a)^-s E[(X+2a)^s]}
          = sum_{j<=l} C(s,j) a^(l+1-j) (2 - 2^(l+1-j)) m_j + C(s,l+1) m_{l+1} + O(1/a)

    The growing terms use the moments already recovered; the remainder is
    extrapolated in ``1/a`` over the geometric schedule (default ``32 .. 4096``).
    """
    if int(n) != n or n < 1:
        raise TranslationError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if not n < s < n + 1:
        raise TranslationError(f"s={s} outside ({n}, {n + 1})")
    if a_schedule is None:
        a_schedule = [32.0 * 2**k for k in range(8)]
    schedule = tuple(float(a) for a in a_schedule)
    ratios = np.array(schedule[1:]) / np.array(schedule[:-1])
    if len(schedule) < 3 or not np.allclose(ratios, ratios[0], rtol=1e-12) or not ratios[0] > 1:
        raise TranslationError("the shift schedule must be increasing and geometric with at least 3 points")
    ratio = float(ratios[0])
    base = translated_moment(spec, s, 0.0, route=route)
    if base.infinite:
        raise TranslationError(f"E[X^{s}] is infinite for {spec.label}")

    cfg = EXTRACTION_CONFIG
    near = [_value(translated_moment(spec, s, a, route=route, cfg=cfg)) for a in schedule]
    far = [_value(translated_moment(spec, s, 2 * a, route=route, cfg=cfg)) for a in schedule]
    known = [1.0]
    errors, raws = [], []
    converged = True
    notes = []
    for ell in range(n):
        estimates = []
        for a, v1, v2 in zip(schedule, near, far):
            terms = [a ** (ell + 1) * 2.0 * v1 * a ** (-s), -(a ** (ell + 1)) * 2.0 ** (ell + 1) * v2 * (2 * a) ** (-s)]
            for j, m in enumerate(known):
                weight = 2.0 - 2.0 ** (ell + 1 - j)
                if weight:
                    terms.append(-gen_binomial(s, j) * a ** (ell + 1 - j) * weight * m)
            estimates.append(math.fsum(terms) / gen_binomial(s, ell + 1))
        value, err, _ = richardson(estimates, ratio)
        if not _contracting(estimates):
            converged = False
            notes.append(f"estimates of m_{ell + 1} are not contracting")
        known.append(value)
        errors.append(err)
        raws.append(estimates)
    return ExtractionReport(s, schedule, known[1:], errors, raws, converged, notes)
