"""Regenerate ``frozen.json``: high-precision reference values for the tests.

Every value comes from mpmath at 40 digits, through formulas independent of
the package (reflection forms of the Mellin constants, direct quadrature of
densities, remainders summed in extended precision).  Run from the repo root:

    python3 tests/oracles/freeze.py
"""

from __future__ import annotations

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).with_name("frozen.json")


def remainder(kind, n, t):
    # the subtraction cancels about 2n*log10(1/t) digits; carry enough of them
    with mp.workdps(400):
        return +_remainder(kind, n, mp.mpf(t))


def _remainder(kind, n, t):
    if kind == "g":
        poly = mp.fsum((-1) ** k * t ** (2 * k) / mp.factorial(2 * k) for k in range(n + 1))
        return (-1) ** (n + 1) * (mp.cos(t) - poly)
    if kind == "h":
        poly = mp.fsum((-1) ** (k + 1) * t ** (2 * k - 1) / mp.factorial(2 * k - 1) for k in range(1, n + 1))
        return (-1) ** n * (mp.sin(t) - poly)
    poly = mp.fsum((-t) ** k / mp.factorial(k) for k in range(n + 1))
    return (-1) ** (n + 1) * (mp.exp(-t) - poly)


def kernels():
    rows = []
    points = ["1e-12", "1e-6", "0.001", "0.1", "0.5", "1", "2.5", "4", "7.5", "20", "50"]
    for kind in "ghq":
        for n in range(7):
            if kind == "h" and n == 0:
                continue
            for t in points:
                rows.append({"kind": kind, "n": n, "t": float(t), "value": float(remainder(kind, n, float(t)))})
    return rows


def split_osc(whole, smooth, wave):
    """``int_0^inf whole`` where ``whole = smooth + wave`` on ``[1, inf)``.

    quadosc alone mishandles a slowly decaying non-oscillating part.
    """
    return (mp.quad(whole, [0, 1]) + mp.quad(smooth, [1, mp.inf])
            + mp.quadosc(wave, [1, mp.inf], omega=1))


def _off_pole(s):
    # Gamma(-s) trig(s) has a removable singularity at integer s
    return s + mp.mpf("1e-25") if s == int(s) else s


def mellin():
    # analytic continuation of the Mellin transforms of cos, sin and exp
    rows = []
    for n in range(4):
        for r in (0.3, 1.0, 1.7):
            s = mp.mpf(2 * n) + mp.mpf(r)
            rows.append({"kind": "g", "n": n, "s": float(s),
                         "value": float((-1) ** (n + 1) * mp.gamma(-_off_pole(s)) * mp.cos(mp.pi * _off_pole(s) / 2))})
        for r in (0.25, 0.5, 0.75):
            s = mp.mpf(n) + mp.mpf(r)
            rows.append({"kind": "q", "n": n, "s": float(s), "value": float((-1) ** (n + 1) * mp.gamma(-s))})
        for r in (0.3, 1.0, 1.7) if n else (-0.75, -0.5, -0.25, 0.25, 0.5, 0.75):
            s = mp.mpf(2 * n - 1) + mp.mpf(r) if n else mp.mpf(r)
            value = mp.pi / (2 * mp.gamma(s + 1) * mp.cos(mp.pi * s / 2)) if n == 0 else \
                (-1) ** (n + 1) * mp.gamma(-_off_pole(s)) * mp.sin(mp.pi * _off_pole(s) / 2)
            rows.append({"kind": "h", "n": n, "s": float(s), "value": float(value)})
    # one quadrature spot check per kind, to pin the continuation signs
    g_value = split_osc(lambda t: remainder("g", 1, t) * t**-3.5,
                        lambda t: (t * t / 2 - 1) * t**-3.5, lambda t: mp.cos(t) * t**-3.5)
    q_value = mp.quad(lambda t: remainder("q", 1, t) * t**-2.5, [0, 1, 10, 100, mp.inf])
    h_value = split_osc(lambda t: remainder("h", 1, t) * t**-3.5,
                        lambda t: t**-2.5, lambda t: -mp.sin(t) * t**-3.5)
    checks = [{"kind": "g", "n": 1, "s": 2.5, "value": float(g_value)},
              {"kind": "h", "n": 1, "s": 2.5, "value": float(h_value)},
              {"kind": "q", "n": 1, "s": 1.5, "value": float(q_value)}]
    return rows, checks


def closed_moments():
    rows = []

    def add(name, params, s, value):
        rows.append({"name": name, "params": params, "s": s, "value": float(value)})

    for s in (0.5, 1.5, 2.5, 3.3):
        add("exponential", {"rate": 1.0}, s, mp.gamma(s + 1))
        add("exponential", {"rate": 2.5}, s, mp.gamma(s + 1) / mp.mpf(2.5) ** s)
    for alpha, beta in ((0.5, 1.0), (2.0, 1.0), (3.5, 0.5)):
        for s in (-0.25, 0.5, 1.7):
            add("gamma", {"alpha": alpha, "beta": beta}, s,
                mp.gamma(s + alpha) / mp.gamma(alpha) * mp.mpf(beta) ** s)
    for mu, sigma in ((0.0, 1.0), (1.0, 2.0), (-0.5, 0.7)):
        for s in (0.5, 1.5, 2.5):
            dens = lambda x: mp.npdf(x, mu, sigma) * abs(x) ** s  # noqa: E731
            add("normal", {"mu": mu, "sigma": sigma}, s, mp.quad(dens, [-mp.inf, mu - 10 * sigma, 0, mu + 10 * sigma, mp.inf]))
    for a, b in ((0.0, 1.0), (-1.0, 2.0), (0.5, 3.0)):
        for s in (0.5, 1.5, 2.5):
            add("uniform", {"a": a, "b": b}, s, mp.quad(lambda x: abs(x) ** s, [a, 0, b] if a < 0 < b else [a, b]) / (b - a))
    for s in (-0.5, 0.3, 0.9):
        # x = e^y turns the slow x^(s-2) tail into an exponential one
        add("half-cauchy", {"scale": 1.0}, s,
            mp.quad(lambda y: 2 * mp.exp((s + 1) * y) / (mp.pi * (1 + mp.exp(2 * y))), [-mp.inf, 0, mp.inf]))
    for s in (0.25, 0.9, 1.2):
        add("pareto", {"alpha": 1.5}, s, mp.quad(lambda x: x**s * 1.5 * (1 + x) ** -2.5, [0, 1, mp.inf]))
    for s in (-0.5, 0.25, 0.75):
        value = split_osc(lambda x: 2 * x ** (s - 2) * (1 - mp.cos(x)) / mp.pi,
                          lambda x: 2 * x ** (s - 2) / mp.pi, lambda x: -2 * x ** (s - 2) * mp.cos(x) / mp.pi)
        add("polya", {}, s, value)
    for c in (1.0, 3.0):
        for s in (0.5, 2.5):
            add("degenerate", {"c": c}, s, mp.mpf(c) ** s)
    return rows


def named():
    """Scalar reference values used across the test files."""
    e = mp.e
    lam = mp.mpf(1)
    return {
        "gamma_1_5": float(mp.gamma(1.5)),
        "gamma_half_neg_quarter": float(mp.gamma(0.25) / mp.gamma(0.5)),
        "exp_cdf_1": float(1 - mp.exp(-1)),
        "polya_reciprocal_half": float(2 * split_osc(lambda z: z**-2.5 * (1 - mp.cos(z)) / mp.pi,
                                                     lambda z: z**-2.5 / mp.pi, lambda z: -z**-2.5 * mp.cos(z) / mp.pi)),
        "polya_reciprocal_half_closed": float((mp.mpf(2) / 3) / (mp.gamma(1.5) * mp.cos(mp.pi / 4))),
        "translated_exp_half_a1": float(mp.quad(lambda x: (x + 1) ** 0.5 * mp.exp(-x), [0, mp.inf])),
        "uniform_equilibrium_lst_1": float(2 * (lam - 1 + mp.exp(-lam)) / lam**2),
        "uniform_equilibrium_lst_at_1_direct": float(mp.quad(lambda x: mp.exp(-x) * 2 * (1 - x), [0, 1])),
        "gamma_half_sine_reciprocal_half": float(mp.gamma(1.0) / mp.gamma(0.5) / (mp.gamma(1.5) * mp.cos(mp.pi / 4))),
        "e_times_upper_gamma": float(e * mp.gammainc(1.5, 1)),
        "kernel_h1_at_0_1": float(remainder("h", 1, mp.mpf("0.1"))),
    }


def main():
    rows, checks = mellin()
    data = {
        "kernels": kernels(),
        "mellin": rows,
        "mellin_quadrature": checks,
        "moments": closed_moments(),
        "named": named(),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
