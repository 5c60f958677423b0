"""Taylor-remainder kernels of cos, sin and exp and their Mellin constants.

The kernels are the signed remainders left after truncating the power series
of ``cos t``, ``sin t`` and ``exp(-t)``::

    g_n(t) = (-1)^(n+1) (cos t - sum_{k<=n} (-1)^k t^(2k) / (2k)!)
    h_n(t) = (-1)^n     (sin t - sum_{1<=k<=n} (-1)^(k+1) t^(2k-1) / (2k-1)!)
    q_n(t) = (-1)^(n+1) (exp(-t) - sum_{k<=n} (-1)^k t^k / k!)

All three are nonnegative on their domains (``h_0 = sin`` excepted).  The
defining formulas lose every significant digit as ``t -> 0``, so small
arguments are evaluated from the alternating series of omitted terms.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "StripError",
    "eval_g",
    "eval_h",
    "eval_q",
    "eval_g_direct",
    "eval_h_direct",
    "eval_q_direct",
    "lemma1_constant",
    "lemma2_constant",
    "lemma4_constant",
    "gen_binomial",
]

# Series truncation: omitted terms stay below this fraction of the leading term.
_SERIES_RTOL = 1e-18
_MAX_TERMS = 200


class StripError(ValueError):
    """Order ``s`` lies outside the open strip on which a constant is defined."""


def _check_order(n: int) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"kernel order must be a nonnegative integer, got {n!r}")
    return int(n)


def _tail_series(first: np.ndarray, z: np.ndarray, denom) -> np.ndarray:
    """``first * sum_k c_k z^k`` with ``c_0 = 1`` and ``c_(k+1) = c_k / denom(k)``.

    The number of terms is fixed by the largest ``|z|`` so that the omitted
    part is below ``_SERIES_RTOL`` of the leading term; Horner's rule does the
    sum.  Small arguments are split off so they do not pay for the large ones.
    """
    out = np.empty_like(first)
    mag = np.abs(z)
    for lane in (mag <= 0.25, mag > 0.25):
        if not np.any(lane):
            continue
        zmax = float(mag[lane].max())
        coeffs, c, bound = [1.0], 1.0, 1.0
        while bound > _SERIES_RTOL and len(coeffs) < _MAX_TERMS:
            c /= denom(len(coeffs) - 1)
            bound = c * zmax ** len(coeffs)
            coeffs.append(c)
        zl = z[lane]
        acc = np.full_like(zl, coeffs[-1])
        for c in reversed(coeffs[:-1]):
            acc = acc * zl + c
        out[lane] = first[lane] * acc
    return out


def _poly_cos(n: int, t: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(t)
    term = np.ones_like(t)
    for k in range(n + 1):
        if k:
            term = term * (-t * t) / ((2 * k - 1) * (2 * k))
        acc += term
    return acc


def _poly_sin(n: int, t: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(t)
    term = t.copy()
    for k in range(1, n + 1):
        if k > 1:
            term = term * (-t * t) / ((2 * k - 2) * (2 * k - 1))
        acc += term
    return acc


def _poly_exp(n: int, t: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(t)
    term = np.ones_like(t)
    for k in range(n + 1):
        if k:
            term = term * (-t) / k
        acc += term
    return acc


def eval_g_direct(n: int, t):
    """``g_n`` straight from its defining formula (no cancellation control)."""
    n = _check_order(n)
    t = np.asarray(t, dtype=float)
    return (-1.0) ** (n + 1) * (np.cos(t) - _poly_cos(n, t))


def eval_h_direct(n: int, t):
    """``h_n`` straight from its defining formula (no cancellation control)."""
    n = _check_order(n)
    t = np.asarray(t, dtype=float)
    return (-1.0) ** n * (np.sin(t) - _poly_sin(n, t))


def eval_q_direct(n: int, lam):
    """``q_n`` straight from its defining formula (no cancellation control)."""
    n = _check_order(n)
    lam = np.asarray(lam, dtype=float)
    return (-1.0) ** (n + 1) * (np.exp(-lam) - _poly_exp(n, lam))


def _blend(t: np.ndarray, switch: float, series, direct):
    out = np.empty_like(t)
    small = np.abs(t) <= switch
    if np.any(small):
        out[small] = series(t[small])
    if np.any(~small):
        out[~small] = direct(t[~small])
    return out


def eval_g(n: int, t):
    """Evaluate the even kernel ``g_n(t) >= 0``.

    Uses the tail series ``sum_{k>n} (-1)^(k+n+1) t^(2k)/(2k)!`` for
    ``|t| <= n + 2`` and the defining formula beyond.
    """
    n = _check_order(n)
    arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(arr).ravel()

    def series(x):
        m = 2 * n + 2
        first = x**m / math.factorial(m)
        return _tail_series(first, -x * x, lambda k: (m + 2 * k + 1) * (m + 2 * k + 2))

    # evaluated at |t| so the result is exactly even
    out = _blend(np.abs(flat), n + 2.0, series, lambda x: eval_g_direct(n, x))
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def eval_h(n: int, t):
    """Evaluate the odd kernel ``h_n``; ``h_0`` is ``sin``.

    For ``n >= 1`` the value is nonnegative on ``t >= 0``.
    """
    n = _check_order(n)
    arr = np.asarray(t, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    if n == 0:
        out = np.sin(flat)
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def series(x):
        m = 2 * n + 1
        first = x**m / math.factorial(m)
        return _tail_series(first, -x * x, lambda k: (m + 2 * k + 1) * (m + 2 * k + 2))

    out = np.copysign(_blend(np.abs(flat), n + 2.0, series, lambda x: eval_h_direct(n, x)), flat)
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def eval_q(n: int, lam):
    """Evaluate ``q_n(lam) >= 0`` for ``lam >= 0``."""
    n = _check_order(n)
    arr = np.asarray(lam, dtype=float)
    flat = np.atleast_1d(arr).ravel()

    def series(x):
        m = n + 1
        first = x**m / math.factorial(m)
        return _tail_series(first, -x, lambda k: m + k + 1)

    out = _blend(flat, n + 2.0, series, lambda x: eval_q_direct(n, x))
    return out.reshape(arr.shape) if arr.ndim else float(out[0])


def _falling(s: float, count: int) -> float:
    """``s (s-1) ... (s-count+1)``."""
    return math.prod(s - j for j in range(count))


def lemma1_constant(n: int, s: float) -> float:
    """``int_0^inf g_n(t) t^(-s-1) dt`` for ``2n < s < 2n+2``."""
    n = _check_order(n)
    if not 2 * n < s < 2 * n + 2:
        raise StripError(f"s={s} outside ({2 * n}, {2 * n + 2})")
    r = s - 2 * n
    base = math.pi / (2.0 * math.gamma(r + 1.0) * math.sin(r * math.pi / 2.0))
    return base / _falling(s, 2 * n)


def lemma2_constant(n: int, s: float) -> float:
    """``int_0^inf h_n(t) t^(-s-1) dt`` for ``2n-1 < s < 2n+1``.

    For ``n = 0`` and ``s <= 0`` the integral exists only as an improper limit.
    """
    n = _check_order(n)
    if not 2 * n - 1 < s < 2 * n + 1:
        raise StripError(f"s={s} outside ({2 * n - 1}, {2 * n + 1})")
    if n == 0:
        return math.pi / (2.0 * math.gamma(s + 1.0) * math.cos(s * math.pi / 2.0))
    # integration by parts: int h_n t^(-s-1) = (s+1) int g_n t^(-s-2)
    return (s + 1.0) * lemma1_constant(n, s + 1.0)


def lemma4_constant(n: int, s: float) -> float:
    """``int_0^inf q_n(lam) lam^(-s-1) dlam = Gamma(n+1-s) / (s (s-1) ... (s-n))``."""
    n = _check_order(n)
    if not n < s < n + 1:
        raise StripError(f"s={s} outside ({n}, {n + 1})")
    return math.gamma(n + 1.0 - s) / _falling(s, n + 1)


def gen_binomial(s: float, j: int) -> float:
    """Generalized binomial coefficient ``s (s-1) ... (s-j+1) / j!``."""
    if int(j) != j or j < 0:
        raise ValueError(f"j must be a nonnegative integer, got {j!r}")
    value = 1.0
    for i in range(int(j)):
        value = value * (s - i) / (i + 1)
    return value
