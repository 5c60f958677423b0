"""Adaptive quadrature on the half line with sequence acceleration.

Finite pieces are integrated with an adaptive Gauss-Legendre 20/10 pair.
The half line is split into a head ``(0, T0]``, integrated after the
substitution ``t = exp(u)`` so that algebraic endpoint behaviour becomes
exponential decay, and a tail ``[T0, inf)`` whose partial integrals along a
truncation schedule are accelerated with Wynn's epsilon algorithm.

Tails are handled in one of three ways:

* ``aligned``: a period is known, schedule points are spaced by whole periods
  so the oscillating remainder is a smooth function of the truncation point;
* ``alternating``: the integrand changes sign regularly, partial integrals are
  taken between consecutive zeros;
* ``geometric``: truncation points ``2**j``.

Divergence is never proven, only suspected: see :func:`integrate_halfline`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "Status",
    "TailClass",
    "IntegrandProfile",
    "IntegralResult",
    "QuadratureConfig",
    "IntegrandError",
    "integrate_interval",
    "integrate_from_zero",
    "integrate_halfline",
    "integrate_improper",
    "integrate_tail",
    "detect_period",
    "wynn_epsilon",
]

Integrand = Callable[[np.ndarray], np.ndarray]

_X20, _W20 = np.polynomial.legendre.leggauss(20)
_X10, _W10 = np.polynomial.legendre.leggauss(10)
_NODES = np.concatenate([_X20, _X10])
_EVALS_PER_PANEL = _NODES.size

# Floor for the lower cut of the head integral; below it a power law is assumed.
_T_FLOOR = 1e-30
_MAX_ZEROS = 600
_MAX_OSC_PERIODS = 2**14


class Status(str, enum.Enum):
    CONVERGED = "converged"
    IMPROPER = "improper_limit"
    DIVERGENT = "divergent_suspected"


class TailClass(str, enum.Enum):
    ABSOLUTE = "absolutely-decaying"
    OSCILLATORY = "oscillatory-conditional"
    POLYNOMIAL = "polynomial-bounded"


class IntegrandError(ValueError):
    """The integrand returned a non-finite value."""

    def __init__(self, abscissa: float, value):
        super().__init__(f"integrand is not finite at t={abscissa!r} (value {value!r})")
        self.abscissa = abscissa


@dataclass(frozen=True)
class IntegrandProfile:
    """What the caller knows about an integrand on ``(0, inf)``.

    ``zero_exponent_hint`` is the power ``alpha`` in ``f(t) ~ c t**alpha`` as
    ``t -> 0+``; ``oscillation_scale`` is the period of the tail oscillation
    when one is known exactly.
    """

    zero_exponent_hint: float | None = 0.0
    tail_class: TailClass = TailClass.ABSOLUTE
    oscillation_scale: float | None = None

    def __post_init__(self):
        if self.oscillation_scale is not None and not self.oscillation_scale > 0:
            raise ValueError("oscillation_scale must be positive")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_panels: int = 4096
    schedule_start: int = 4
    schedule_stop: int = 24
    divergence_growth_factor: float = 1.5

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_panels < 8:
            raise ValueError("max_panels must be at least 8")
        if self.schedule_stop <= self.schedule_start:
            raise ValueError("empty truncation schedule")

    def replace(self, **changes) -> "QuadratureConfig":
        values = {f: getattr(self, f) for f in self.__dataclass_fields__}
        values.update(changes)
        return QuadratureConfig(**values)


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    status: Status = Status.CONVERGED
    panels_used: int = 0
    function_evals: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def diverged(self) -> bool:
        return self.status is Status.DIVERGENT

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        if self.diverged or other.diverged:
            status = Status.DIVERGENT
        elif Status.IMPROPER in (self.status, other.status):
            status = Status.IMPROPER
        else:
            status = Status.CONVERGED
        return IntegralResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            status,
            self.panels_used + other.panels_used,
            self.function_evals + other.function_evals,
            self.notes + other.notes,
        )

    def scaled(self, factor: float) -> "IntegralResult":
        return IntegralResult(
            self.value * factor,
            self.error_estimate * abs(factor),
            self.status,
            self.panels_used,
            self.function_evals,
            list(self.notes),
        )


def _divergent(note: str, panels=0, evals=0) -> IntegralResult:
    return IntegralResult(math.nan, math.inf, Status.DIVERGENT, panels, evals, [note])


def _evaluate(f: Integrand, x: np.ndarray) -> np.ndarray:
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape)
    bad = ~np.isfinite(y)
    if np.any(bad):
        i = np.flatnonzero(bad.ravel())[0]
        raise IntegrandError(float(x.ravel()[i]), float(y.ravel()[i]))
    return y


def _panels(f: Integrand, left: np.ndarray, right: np.ndarray):
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = _evaluate(f, x)
    hi = half * (y[:, :20] @ _W20)
    lo = half * (y[:, 20:] @ _W10)
    return hi, np.abs(hi - lo)


def _adaptive(f, edges, rel_tol, abs_tol, max_panels):
    """Adaptive refinement starting from the partition ``edges``.

    Returns ``(value, error, panels, evals)``.  Panels are bisected in order of
    decreasing error until the summed estimate meets the tolerance or the
    refinement budget is spent.  Reductions use ``math.fsum`` in position order.
    """
    edges = np.asarray(edges, dtype=float)
    left, right = edges[:-1].copy(), edges[1:].copy()
    val, err = _panels(f, left, right)
    evals = left.size * _EVALS_PER_PANEL
    added = 0
    while True:
        total = math.fsum(val)
        tol = max(abs_tol, rel_tol * abs(total))
        total_err = math.fsum(err)
        if total_err <= tol or added >= max_panels:
            break
        order = np.argsort(-err, kind="stable")
        excess = np.cumsum(err[order])
        # smallest set of worst panels whose removal meets the tolerance
        count = int(np.searchsorted(excess, total_err - tol)) + 1
        count = max(1, min(count, order.size, max_panels - added))
        pick = np.sort(order[:count])
        mids = 0.5 * (left[pick] + right[pick])
        new_left = np.concatenate([left[pick], mids])
        new_right = np.concatenate([mids, right[pick]])
        nv, ne = _panels(f, new_left, new_right)
        evals += new_left.size * _EVALS_PER_PANEL
        added += count
        keep = np.ones(left.size, dtype=bool)
        keep[pick] = False
        left = np.concatenate([left[keep], new_left])
        right = np.concatenate([right[keep], new_right])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        pos = np.argsort(left, kind="stable")
        left, right, val, err = left[pos], right[pos], val[pos], err[pos]
    return math.fsum(val), math.fsum(err), left.size, evals


def integrate_interval(
    f: Integrand,
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    *,
    breakpoints=(),
    n_initial: int = 8,
    geometric: bool = False,
) -> IntegralResult:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    ``geometric=True`` grades the initial partition geometrically (``a > 0``),
    which suits integrands varying on a logarithmic scale.
    """
    cfg = cfg or QuadratureConfig()
    if b == a:
        return IntegralResult(0.0, 0.0)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    if geometric and a > 0:
        edges = np.geomspace(a, b, n_initial + 1)
    else:
        edges = np.linspace(a, b, n_initial + 1)
    inner = [p for p in breakpoints if a < p < b]
    if inner:
        edges = np.unique(np.concatenate([edges, inner]))
    value, err, panels, evals = _adaptive(f, edges, cfg.rel_tol, cfg.abs_tol, cfg.max_panels)
    return IntegralResult(sign * value, err, Status.CONVERGED, panels, evals)


def wynn_epsilon(seq) -> tuple[float, float]:
    """Accelerate a partial-sum sequence with Wynn's epsilon algorithm.

    Returns ``(estimate, spread)``.  Among the even columns of the table the
    one whose last two entries agree best is selected; ``spread`` is that
    disagreement and serves as the error estimate.
    """
    s = [float(v) for v in seq]
    if not s:
        raise ValueError("empty sequence")
    if len(s) == 1:
        return s[0], math.inf
    best = (s[-1], abs(s[-1] - s[-2]))
    prev = [0.0] * (len(s) + 1)
    cur = list(s)
    k = 0
    with np.errstate(all="ignore"):
        while len(cur) > 1:
            nxt = []
            for i in range(len(cur) - 1):
                d = cur[i + 1] - cur[i]
                nxt.append(prev[i + 1] + (1.0 / d if d != 0 else math.inf))
            prev, cur = cur, nxt
            k += 1
            if k % 2 == 0 and len(cur) >= 2:
                a, b = cur[-2], cur[-1]
                if math.isfinite(a) and math.isfinite(b):
                    spread = abs(b - a)
                    if spread < best[1]:
                        best = (b, spread)
            if not all(math.isfinite(v) for v in cur):
                break
    return best


def _sample_grid(a: float, scale: float | None = None) -> np.ndarray:
    width = 8.0 * a + 64.0 if scale is None else 32.0 * scale
    return np.linspace(a, a + width, 4097)


def _regular_crossings(x: np.ndarray, y: np.ndarray) -> np.ndarray | None:
    sgn = np.sign(y)
    idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    if idx.size < 6:
        return None
    gaps = np.diff(x[idx])
    if gaps.max() > 1.5 * gaps.min() + 2 * (x[1] - x[0]):
        return None
    return idx


def detect_period(f: Integrand, a: float) -> tuple[float | None, bool]:
    """Estimate the oscillation period of ``f`` beyond ``a``.

    Returns ``(period, sign_changing)``.  A regular pattern of sign changes of
    ``f`` itself gives ``sign_changing=True``; otherwise regular extrema are
    looked for.  ``(None, False)`` when no regular oscillation is seen.
    """
    x = _sample_grid(a)
    y = _evaluate(f, x)
    idx = _regular_crossings(x, y)
    if idx is not None:
        return 2.0 * float(np.median(np.diff(x[idx]))), True
    dy = np.diff(y)
    idx = _regular_crossings(x[:-1], dy)
    if idx is not None:
        return 2.0 * float(np.median(np.diff(x[idx]))), False
    return None, False


def _shortest_swing(f: Integrand, a: float) -> float | None:
    """Shortest gap between sign changes of ``f`` or of its slope, regular or not."""
    x = _sample_grid(a)
    y = _evaluate(f, x)
    gaps = []
    for values, grid in ((y, x), (np.diff(y), x[:-1])):
        sgn = np.sign(values)
        idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
        if idx.size >= 6:
            gaps.append(float(np.min(np.diff(grid[idx]))))
    return min(gaps) if gaps else None


def _refine_period(f, a: float, rough: float) -> float | None:
    """Sharpen a rough period from extrema located far out in the tail.

    Extrema are roots of a central difference; only extrema of the same parity
    are compared, since a smooth trend shifts maxima and minima differently.
    """
    start = max(a, 2.0**12 * rough / (2 * math.pi))
    step = rough / 64.0

    def slope(t):
        return _evaluate(f, np.asarray(t + step)) - _evaluate(f, np.asarray(t - step))

    x = np.linspace(start, start + 32.0 * rough, 4097)
    y = slope(x)
    idx = _regular_crossings(x, y)
    if idx is None or idx.size < 8:
        return None
    roots = []
    for i in idx:
        try:
            roots.append(brentq(lambda t: float(slope(t)), x[i], x[i + 1], xtol=1e-13, rtol=1e-15))
        except ValueError:
            return None
    even = roots[0::2]
    periods = len(even) - 1
    if periods < 4:
        return None
    return (even[-1] - even[0]) / periods


def _window_edges(lo: float, hi: float, panel_width: float | None, geometric: bool):
    if panel_width is not None:
        count = max(4, int(math.ceil((hi - lo) / panel_width)))
        return np.linspace(lo, hi, count + 1)
    return np.geomspace(lo, hi, 9) if geometric and lo > 0 else np.linspace(lo, hi, 9)


def _check_growth(partials, increments, factor) -> str | None:
    if len(partials) >= 4:
        p = [abs(v) for v in partials[-4:]]
        if all(p[i + 1] >= factor * p[i] and p[i] > 0 for i in range(3)):
            return "partial integrals grow geometrically"
    if len(increments) >= 4:
        d = [abs(v) for v in increments[-4:]]
        if all(d[i] > 0 and d[i + 1] >= 0.98 * d[i] for i in range(3)):
            return "schedule increments do not contract"
    return None


def _accelerate(partials, errs, cfg, improper, panels, evals, notes, min_terms=5):
    """Shared convergence logic for a sequence of partial integrals."""
    if len(partials) < min_terms:
        return None
    tol_scale = 10.0 if improper else 1.0
    inc = [partials[i + 1] - partials[i] for i in range(len(partials) - 1)]
    tiny = 1e-3 * cfg.abs_tol
    if len(inc) >= 3 and all(abs(v) <= tiny for v in inc[-3:]):
        return IntegralResult(partials[-1], sum(errs) + 3 * tiny, Status.CONVERGED, panels, evals, notes)
    est, spread = wynn_epsilon(partials[-16:])
    prev_est, _ = wynn_epsilon(partials[-17:-1])
    step = abs(est - prev_est)
    tol = max(cfg.abs_tol, tol_scale * cfg.rel_tol * abs(est))
    if max(spread, step) <= tol:
        status = Status.IMPROPER if improper else Status.CONVERGED
        return IntegralResult(est, max(spread, step) + sum(errs), status, panels, evals, notes)
    return None


def _taper(u: np.ndarray) -> np.ndarray:
    """Smooth step from 1 at ``u = 0`` to 0 at ``u = 1``, flat to all orders at both ends."""
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(u < 1.0, np.exp(-1.0 / np.maximum(1.0 - u, 1e-300)), 0.0)
        right = np.where(u > 0.0, np.exp(-1.0 / np.maximum(u, 1e-300)), 0.0)
    return left / (left + right)


def _tail_scheduled(f, a, cfg, improper, period, panel_width, geometric, notes):
    """Partial integrals along an aligned or geometric schedule.

    A resolved geometric schedule (irregular oscillation) closes each partial
    integral with a smooth taper over ``[T, 2T]`` instead of a hard cut, which
    suppresses the oscillating part of the remainder and leaves a sequence
    that converges smoothly in ``T``.
    """
    tapered = period is None and panel_width is not None
    if period is not None:
        # whole periods so the oscillating remainder is smooth in the endpoint
        m0 = max(1, int(math.ceil(a / period)))
        edges = [a + period * m0 * (2**k - 1) for k in range(40)]
        edges = [e for e in edges if (e - a) / period <= _MAX_OSC_PERIODS * 2]
    else:
        top = cfg.schedule_stop
        if panel_width is not None:
            top = min(top, int(math.log2(max(a, 1.0) + _MAX_OSC_PERIODS * panel_width * 2)) + 1)
        edges = [a] + [2.0**j for j in range(cfg.schedule_start, top + 1) if 2.0**j > a]
        if len(edges) < 6:
            edges = [a * 2.0**j for j in range(0, 21)]
    partials, errs = [], []
    total, panels, evals = 0.0, 0, 0
    amp0 = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        tol_abs = 0.01 * max(cfg.abs_tol, cfg.rel_tol * abs(total))
        win = _window_edges(lo, hi, panel_width, geometric and period is None)
        v, e, p, n = _adaptive(f, win, 0.01 * cfg.rel_tol, tol_abs, cfg.max_panels)
        total += v
        panels += p
        evals += n
        closing = 0.0
        if tapered:
            tail_win = _window_edges(hi, 2.0 * hi, panel_width, False)
            closing, e2, p2, n2 = _adaptive(lambda t: _evaluate(f, t) * _taper(t / hi - 1.0), tail_win,
                                            0.01 * cfg.rel_tol, tol_abs, cfg.max_panels)
            e, panels, evals = e + e2, panels + p2, evals + n2
        partials.append(total + closing)
        errs.append(e)
        if period is not None or tapered:
            span = period if period is not None else 64.0 * panel_width
            amp = float(np.max(np.abs(_evaluate(f, np.linspace(lo, lo + span, 257)))))
            if amp0 is None:
                amp0 = (lo, amp)
            elif hi / amp0[0] >= 16 and amp0[1] > 0:
                decay = math.log(max(amp, 1e-300) / amp0[1]) / math.log(lo / amp0[0])
                if decay > -0.05 and amp > cfg.abs_tol:
                    return _divergent("oscillation amplitude does not decay", panels, evals)
        reason = _check_growth(partials, np.diff(partials).tolist(), cfg.divergence_growth_factor)
        if reason:
            return _divergent(reason, panels, evals)
        res = _accelerate(partials, errs, cfg, improper, panels, evals, notes)
        if res is not None:
            return res
    return _divergent("acceleration did not stabilise", panels, evals)


def _tail_alternating(f, a, cfg, improper, notes):
    """Partial integrals between consecutive zeros of a sign-changing integrand."""
    x = _sample_grid(a)
    y = _evaluate(f, x)
    idx = _regular_crossings(x, y)
    zeros = [brentq(f, x[i], x[i + 1], xtol=1e-15, rtol=1e-15) for i in idx]
    gap = zeros[-1] - zeros[-2]
    first = integrate_interval(f, a, zeros[0], cfg.replace(rel_tol=0.01 * cfg.rel_tol, abs_tol=0.01 * cfg.abs_tol))
    total = first.value
    panels, evals = first.panels_used, first.function_evals
    partials, errs, terms = [], [first.error_estimate], []
    k = 0
    while len(partials) < _MAX_ZEROS:
        if k + 1 >= len(zeros):
            z = zeros[-1]
            lo, hi = z + 0.5 * gap, z + 1.5 * gap
            flo, fhi = float(_evaluate(f, np.array([lo]))[0]), float(_evaluate(f, np.array([hi]))[0])
            if flo == 0.0 or fhi == 0.0 or flo * fhi > 0:
                notes.append("zero tracking lost")
                break
            zeros.append(brentq(f, lo, hi, xtol=1e-15, rtol=1e-15))
        lo, hi = zeros[k], zeros[k + 1]
        gap = hi - lo
        tol_abs = 0.01 * max(cfg.abs_tol, cfg.rel_tol * abs(total))
        v, e, p, n = _adaptive(f, np.linspace(lo, hi, 3), 0.01 * cfg.rel_tol, tol_abs, cfg.max_panels)
        total += v
        panels += p
        evals += n
        partials.append(total)
        errs.append(e)
        terms.append(abs(v))
        k += 1
        if len(terms) >= 8:
            decay = math.log(max(terms[-1], 1e-300) / terms[1]) / math.log(zeros[k] / zeros[2])
            if decay > -0.05 and terms[-1] > cfg.abs_tol:
                return _divergent("oscillation amplitude does not decay", panels, evals)
        res = _accelerate(partials, errs, cfg, improper, panels, evals, notes, min_terms=12)
        if res is not None:
            return res
    return _divergent("acceleration did not stabilise", panels, evals)


def integrate_tail(
    f: Integrand,
    a: float,
    cfg: QuadratureConfig | None = None,
    *,
    period: float | None = None,
    improper: bool = False,
) -> IntegralResult:
    """Integrate ``f`` over ``[a, inf)``.

    With ``period`` the schedule is aligned to whole periods; otherwise the
    oscillation, if any, is detected from samples of ``f``.
    """
    cfg = cfg or QuadratureConfig()
    if not a > 0:
        raise ValueError("tail start must be positive")
    notes: list[str] = []
    if period is not None:
        notes.append("aligned")
        return _tail_scheduled(f, a, cfg, improper, period, 0.5 * period, False, notes)
    detected, sign_changing = detect_period(f, a)
    if detected is not None and sign_changing:
        notes.append("alternating")
        res = _tail_alternating(f, a, cfg, improper, notes)
        if not (res.diverged and "zero tracking lost" in notes):
            return res
    if detected is not None:
        refined = _refine_period(f, a, detected)
        if refined is not None:
            notes.append("aligned-detected")
            res = _tail_scheduled(f, a, cfg, improper, refined, 0.5 * refined, False, notes)
            # several incommensurate frequencies defeat period alignment
            if not (res.diverged and "acceleration did not stabilise" in res.notes):
                return res
    # irregular oscillation (beats, several frequencies): resolve the fastest swing
    swing = _shortest_swing(f, a)
    width = min(w for w in (detected, swing, math.inf) if w is not None)
    if math.isfinite(width):
        notes.append("geometric-resolved")
        return _tail_scheduled(f, a, cfg, improper, None, 0.5 * width, True, notes)
    notes.append("geometric")
    return _tail_scheduled(f, a, cfg, improper, None, None, True, notes)


def _power_exponent(f, t):
    y1, y2 = _evaluate(f, np.array([t, 2.0 * t]))
    if y1 == 0.0 or y2 == 0.0 or y1 * y2 < 0:
        return None, float(y1)
    return math.log2(y2 / y1), float(y1)


def _end_levels(f, t_top, cfg, floor=None):
    """Decade levels ``(t, exponent, f(t), key)`` below ``t_top``.

    The local exponent is ``log2(f(2t)/f(t))``.  The key is the change of
    exponent from the previous decade times the size of the power-law end
    piece; it shrinks while a power law becomes exact and grows again once
    rounding in the integrand (cancellation near zero) takes over.
    """
    levels = []
    t = 1e-3 * t_top
    bottom = max(_T_FLOOR, floor or 0.0)
    while t >= bottom:
        alpha, y = _power_exponent(f, t)
        if alpha is None:
            if not levels:
                levels.append((t, None, y, abs(y) * t))
            break
        drift = abs(alpha - levels[-1][1]) if levels else math.inf
        levels.append((t, alpha, y, abs(y * t) * drift))
        if alpha > -1 and abs(y * t / (alpha + 1.0)) <= 1e-3 * cfg.abs_tol:
            break
        t *= 0.1
    return levels


def _two_term_end(levels):
    """End piece for ``f ~ A t^a (1 + C t^d)`` fitted to three decade levels.

    The local exponent drifts towards ``a`` geometrically, by ``10^-d`` per
    decade.  Returns ``(piece, a)`` or ``None`` when the drift is not a clean
    geometric contraction.
    """
    (_, a1, _, _), (_, a2, _, _), (t, a3, y, _) = levels
    if a1 is None or a2 is None or a3 is None:
        return None
    d1, d2 = a1 - a2, a2 - a3
    if d1 == 0 or d2 / d1 <= 0 or d2 / d1 >= 0.9:
        return None
    r = d2 / d1
    d = -math.log10(r)
    a = a3 - d2 * r / (1.0 - r)
    if a <= -1.0:
        return 0.0, a
    lift = 2.0 ** (a3 - a)
    if not 1e-300 < abs(2.0**d - lift):
        return None
    eps = (lift - 1.0) / (2.0**d - lift)
    piece = y * t * (1.0 / (a + 1.0) + eps / (a + 1.0 + d)) / (1.0 + eps)
    return piece, a


def _head(f, t_top, alpha, cfg, floor=None) -> IntegralResult:
    """``int_0^t_top f`` via ``t = exp(u)`` plus a power-law end piece.

    The head integral truncated at each decade plus its power-law end piece
    forms a sequence converging geometrically when the integrand is a sum of
    powers near zero.  Its epsilon-accelerated limit replaces the single best
    cut whenever that lowers the error estimate.
    """
    if alpha is not None and alpha <= -1.0:
        return _divergent("integrand not integrable at zero (hint)")
    levels = _end_levels(f, t_top, cfg, floor)
    if len(levels) > 1:
        levels = levels[: min(range(1, len(levels)), key=lambda i: levels[i][3]) + 1]
        # the probes alone settle a non-integrable end; skip the expensive body
        if levels[-1][1] is not None and levels[-1][1] <= -1.0 + 1e-3:
            return _divergent("integrand not integrable at zero", 0, 2 * len(levels))

    def g(u):
        t = np.exp(u)
        return _evaluate(f, t) * t

    sub = cfg.replace(rel_tol=0.1 * cfg.rel_tol)
    edges = [math.log(t_top)] + [math.log(lv[0]) for lv in levels]
    segments = [integrate_interval(g, edges[1], edges[0], sub, n_initial=16)]
    # deeper decades only need absolute accuracy relative to the whole head;
    # one that cannot reach it is rounding-limited and ends the descent
    deep = sub.replace(abs_tol=max(sub.abs_tol, sub.rel_tol * abs(segments[0].value)) / len(edges),
                       max_panels=64)
    for hi, lo in zip(edges[1:-1], edges[2:]):
        seg = integrate_interval(g, lo, hi, deep)
        if seg.error_estimate > 1e3 * max(deep.abs_tol, deep.rel_tol * abs(seg.value)):
            break
        segments.append(seg)
    levels = levels[: len(segments)]
    if len(levels) == 1:
        best = 0
        t_lo, est_alpha, y_lo, key = levels[0]
        perr = key if est_alpha is None else 1e-3 * abs(y_lo * t_lo)
    else:
        best = min(range(1, len(levels)), key=lambda i: levels[i][3])
        t_lo, est_alpha, y_lo, spread = levels[best]
        perr = spread / max(est_alpha + 1.0, 1e-3) ** 2 + 1e-16 * abs(y_lo * t_lo)
        segments = segments[: best + 1]
    if est_alpha is not None and est_alpha <= -1.0 + 1e-3:
        return _divergent("integrand not integrable at zero", 0, 2)
    panels = sum(r.panels_used for r in segments)
    evals = sum(r.function_evals for r in segments) + 2 * (best + 1)
    body_err = sum(r.error_estimate for r in segments)
    partial = np.cumsum([r.value for r in segments])
    if est_alpha is None:
        return IntegralResult(float(partial[-1]), body_err + perr, Status.CONVERGED, panels, evals)
    value = float(partial[-1]) + y_lo * t_lo / (est_alpha + 1.0)
    totals = [float(partial[i]) + lv[2] * lv[0] / (lv[1] + 1.0)
              for i, lv in enumerate(levels[: best + 1]) if lv[1] is not None and lv[1] > -1.0]
    # plain truncations converge like t^(a+1) (a + b log t) for log-type ends
    for seq in (totals, [float(v) for v in partial]):
        if len(seq) < 4:
            continue
        accel, spread = wynn_epsilon(seq)
        if math.isfinite(accel) and spread < perr:
            value, perr = accel, spread + 1e-16 * abs(accel)
    # a slowly drifting exponent (order near the edge of its strip) leaves the
    # single power-law piece far off; a second power fixes the leading term
    fits = [_two_term_end(levels[i - 2 : i + 1]) for i in range(2, best + 1)]
    two = [(float(partial[i + 2]) + fit[0], fit[1]) for i, fit in enumerate(fits) if fit is not None]
    if len(two) >= 2 and fits[-1] is not None:
        if two[-1][1] <= -1.0 + 1e-3 and two[-2][1] <= -1.0 + 1e-3:
            return _divergent("integrand not integrable at zero (two-term end)", panels, evals)
        spread = abs(two[-1][0] - two[-2][0])
        if spread < perr and two[-1][1] > -1.0:
            value, perr = two[-1][0], spread + 1e-16 * abs(two[-1][0])
    return IntegralResult(value, body_err + perr, Status.CONVERGED, panels, evals)


def integrate_from_zero(
    f: Integrand,
    b: float,
    cfg: QuadratureConfig | None = None,
    zero_exponent_hint: float | None = None,
    floor: float | None = None,
) -> IntegralResult:
    """Integrate ``f`` over ``(0, b]`` allowing an algebraic singularity at zero.

    Below a cut chosen from samples, ``f`` is replaced by a power law fitted
    to it.  ``floor`` stops the cut from going below a point where the caller
    knows ``f`` to be dominated by rounding.
    """
    if not b > 0:
        raise ValueError("upper limit must be positive")
    return _head(f, b, zero_exponent_hint, cfg or QuadratureConfig(), floor)


def _halfline(f, profile, cfg, improper) -> IntegralResult:
    profile = profile or IntegrandProfile()
    cfg = cfg or QuadratureConfig()
    t0 = 2.0**cfg.schedule_start
    head = _head(f, t0, profile.zero_exponent_hint, cfg)
    if head.diverged:
        return head
    # the relative tolerance refers to the whole integral, not to the tail alone
    tail_cfg = cfg.replace(abs_tol=max(cfg.abs_tol, cfg.rel_tol * abs(head.value)))
    tail = integrate_tail(f, t0, tail_cfg, period=profile.oscillation_scale, improper=improper)
    out = head + tail
    if not out.diverged:
        out.status = Status.IMPROPER if improper else Status.CONVERGED
    return out


def integrate_halfline(
    f: Integrand,
    profile: IntegrandProfile | None = None,
    cfg: QuadratureConfig | None = None,
) -> IntegralResult:
    """Integrate ``f`` over ``(0, inf)``.

    ``f`` must accept and return numpy arrays.  The result status is
    ``divergent_suspected`` when the integrand is not integrable at zero, when
    partial integrals grow by ``cfg.divergence_growth_factor`` over three
    consecutive schedule steps, when schedule increments stop contracting, or
    when acceleration does not stabilise.  A non-finite sample raises
    :class:`IntegrandError` naming the abscissa.
    """
    return _halfline(f, profile, cfg, improper=False)


def integrate_improper(
    f: Integrand,
    cfg: QuadratureConfig | None = None,
    *,
    period: float | None = None,
    zero_exponent_hint: float | None = 0.0,
) -> IntegralResult:
    """``lim_{T->inf} int_0^T f`` for conditionally convergent integrands.

    Status is ``improper_limit`` on success.  Acceleration failure, meaning no
    two consecutive accelerated values within ``10 * rel_tol``, gives
    ``divergent_suspected``.
    """
    profile = IntegrandProfile(zero_exponent_hint, TailClass.OSCILLATORY, period)
    return _halfline(f, profile, cfg, improper=True)
