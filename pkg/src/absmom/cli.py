"""Command-line front end: ``absmom moment``, ``absmom cdf`` and ``absmom verify``.

Exit codes: 0 success (an infinite moment is a result, not an error),
2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Callable

from . import engine, verify
from .corpus import CatalogError, DistributionSpec, Support, TableError, oracle_moment, parse_distribution
from .engine import ENGINE_CONFIG, EngineError
from .kernels import StripError
from .quadrature import IntegrandError, QuadratureConfig
from .results import MomentResult

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

ROW_FIELDS = ["s", "value", "infinite", "error_estimate", "method", "formula_ref", "evals"]
CDF_FIELDS = ["x", "value", "infinite", "error_estimate", "method", "formula_ref", "evals", "clamped"]

CDF_FORMULAS = {
    "eq2": "cf-inversion-imaginary-shifted",
    "eq3": "cf-inversion-sine-real-part",
    "eq4": "cf-inversion-cosine-imaginary-part",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class MethodEntry:
    run: Callable[[DistributionSpec, float, int | None, QuadratureConfig], MomentResult]
    check: Callable[[DistributionSpec, float, int | None], None]


def _need_nonnegative(spec: DistributionSpec, token: str):
    if spec.support is Support.REAL_LINE:
        raise EngineError(f"method {token} needs a nonnegative variable; {spec.label} lives on the real line")


def _non_integer_strip(s: float, n: int | None, lo_of: Callable[[int], float], width: float, default_n, token):
    if not s > 0:
        raise StripError(f"method {token} needs s > 0, got {s}")
    n = default_n(s) if n is None else n
    lo = lo_of(n)
    if not lo < s < lo + width:
        raise StripError(f"method {token} with n={n} needs {lo:g} < s < {lo + width:g}, got {s}")


def _check_even(token):
    def check(spec, s, n):
        if spec.cf is None:
            raise EngineError(f"{spec.label} has no characteristic function")
        _non_integer_strip(s, n, lambda k: 2 * k, 2, lambda v: int(v // 2), token)
        if token == "thm1prime_eq9" and spec.density is None and not spec.atoms:
            raise EngineError(f"method {token} needs a density; {spec.label} has none")

    return check


def _check_odd(spec, s, n):
    _need_nonnegative(spec, "thm2")
    if spec.cf is None:
        raise EngineError(f"{spec.label} has no characteristic function")
    _non_integer_strip(s, n, lambda k: 2 * k - 1, 2, lambda v: int((v + 1) // 2), "thm2")


def _check_laplace(token):
    def check(spec, s, n):
        _need_nonnegative(spec, token)
        if spec.lst is None:
            raise EngineError(f"{spec.label} has no Laplace-Stieltjes transform")
        _non_integer_strip(s, n, lambda k: k, 1, lambda v: int(v // 1), token)
        if token == "thm5_eq19" and spec.density is None and not spec.atoms:
            raise EngineError(f"method {token} needs a density; {spec.label} has none")

    return check


def _check_negative(spec, s, n):
    _need_nonnegative(spec, "eq28")
    if spec.lst is None:
        raise EngineError(f"{spec.label} has no Laplace-Stieltjes transform")
    if not s > 0:
        raise StripError(f"method eq28 computes E[X^-s] and needs s > 0, got {s}")


def _coefficient_function(spec):
    if spec.name == "gamma":
        return engine.gamma_coefficient_function(spec.params["alpha"], spec.params["beta"])
    if spec.name == "exponential":
        return engine.gamma_coefficient_function(1.0, 1.0 / spec.params["rate"])
    raise EngineError(f"method ramanujan has a coefficient function only for gamma and exponential, not {spec.label}")


def _check_ramanujan(spec, s, n):
    cfn = _coefficient_function(spec)
    if not 0 < s < cfn.delta:
        raise StripError(f"method ramanujan needs 0 < s < {cfn.delta:g}, got {s}")


def _check_derivative(spec, s, n):
    if s != 1:
        raise StripError(f"method eq5 gives the first absolute moment only; s must be 1, got {s}")
    if spec.transforms.cf_derivative is None:
        raise EngineError(f"{spec.label} has no CF derivative evaluator")


def _check_oracle(spec, s, n):
    if spec.density is None and not spec.atoms:
        raise EngineError(f"method oracle needs a density or atoms; {spec.label} has neither")


_THM1 = MethodEntry(lambda sp, s, n, cfg: engine.abs_moment_cf(sp, s, n, cfg=cfg), _check_even("thm1prime"))
_THM5 = MethodEntry(lambda sp, s, n, cfg: engine.moment_lst(sp, s, n, cfg=cfg), _check_laplace("thm5"))

METHODS: dict[str, MethodEntry] = {
    "thm1prime": _THM1,
    "thm1prime_eq10": _THM1,
    "thm1prime_eq9": MethodEntry(
        lambda sp, s, n, cfg: engine.abs_moment_cf_kernel_mean(sp, s, n, cfg=cfg), _check_even("thm1prime_eq9")
    ),
    "thm2": MethodEntry(lambda sp, s, n, cfg: engine.moment_nonneg_cf(sp, s, n, cfg=cfg), _check_odd),
    "thm5": _THM5,
    "thm5_eq20": _THM5,
    "thm5_eq19": MethodEntry(
        lambda sp, s, n, cfg: engine.moment_lst(sp, s, n, route="density", cfg=cfg), _check_laplace("thm5_eq19")
    ),
    "eq28": MethodEntry(lambda sp, s, n, cfg: engine.negative_moment_lst(sp, s, cfg), _check_negative),
    "ramanujan": MethodEntry(
        lambda sp, s, n, cfg: engine.ramanujan_negative_moment(_coefficient_function(sp), s), _check_ramanujan
    ),
    "eq5": MethodEntry(lambda sp, s, n, cfg: engine.abs_mean_cf_derivative(sp, cfg), _check_derivative),
    "oracle": MethodEntry(lambda sp, s, n, cfg: oracle_moment(sp, s, cfg), _check_oracle),
}


def _float_list(text: str, what: str) -> list[float]:
    out = []
    for item in filter(None, (p.strip() for p in text.split(","))):
        try:
            value = float(item)
        except ValueError:
            raise UsageError(f"{what}: not a number: {item!r}") from None
        if not math.isfinite(value):
            raise UsageError(f"{what}: must be finite, got {item!r}")
        out.append(value)
    if not out:
        raise UsageError(f"{what}: empty list")
    return out


def _token_list(text: str, allowed, what: str) -> list[str]:
    tokens = [t.strip() for t in text.split(",") if t.strip()]
    for t in tokens:
        if t not in allowed:
            raise UsageError(f"unknown {what} {t!r}; choose from {', '.join(allowed)}")
    if not tokens:
        raise UsageError(f"{what}: empty list")
    return tokens


def _config(args) -> QuadratureConfig:
    cfg = ENGINE_CONFIG
    if args.tol is not None:
        if not 0 < args.tol < 1:
            raise UsageError(f"--tol must lie in (0, 1), got {args.tol}")
        cfg = cfg.replace(rel_tol=args.tol)
    if args.max_panels is not None:
        if args.max_panels < 1:
            raise UsageError(f"--max-panels must be positive, got {args.max_panels}")
        cfg = cfg.replace(max_panels=args.max_panels)
    return cfg


def _json_number(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _render(payload: dict, rows: list[dict], fields: list[str], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if row.get(k) is None else row.get(k) for k in fields})
        return buf.getvalue()
    body = dict(payload)
    body["rows"] = [{k: _json_number(v) for k, v in row.items()} for row in rows]
    return json.dumps(body, indent=2) + "\n"


def write_atomic(path: str, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".absmom-", dir=folder)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str):
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_moment(args) -> int:
    cfg = _config(args)
    spec = parse_distribution(args.dist)
    orders = _float_list(args.s, "--s") if args.s is not None else [1.0]
    methods = _token_list(args.method, METHODS, "method")
    if args.n is not None and args.n < 0:
        raise UsageError(f"--n must be nonnegative, got {args.n}")
    # every (s, method) pair is checked before any integration starts
    for token in methods:
        for s in orders:
            METHODS[token].check(spec, s, args.n)
    rows = []
    for s in orders:
        for token in methods:
            res = METHODS[token].run(spec, s, args.n, cfg)
            row = res.as_dict()
            if token == "eq28" or token == "ramanujan":
                row["s"] = -s
            rows.append(row)
    _emit(args, _render({"command": "moment", "distribution": spec.label}, rows, ROW_FIELDS, args.format))
    return EXIT_OK


def cmd_cdf(args) -> int:
    cfg = _config(args)
    spec = parse_distribution(args.dist)
    points = _float_list(args.x, "--x")
    methods = _token_list(args.method, CDF_FORMULAS, "method")
    for token in methods:
        if token != "eq2":
            _need_nonnegative(spec, token)
    if spec.cf is None:
        raise EngineError(f"{spec.label} has no characteristic function")
    rows = []
    for x in points:
        for token in methods:
            res = engine.cdf_from_cf(spec, x, token, cfg)
            rows.append({
                "x": x,
                "value": res.value,
                "infinite": False,
                "error_estimate": res.error_estimate,
                "method": token,
                "formula_ref": CDF_FORMULAS[token],
                "evals": res.evals,
                "clamped": res.clamped,
            })
    _emit(args, _render({"command": "cdf", "distribution": spec.label}, rows, CDF_FIELDS, args.format))
    return EXIT_OK


VERIFY_FIELDS = ["criterion", "title", "passed", "measured", "tolerance", "seconds", "budget", "details"]


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite)
    for c in checks:
        print(c.line(), file=sys.stderr)
        for d in c.details:
            print(f"    {d}", file=sys.stderr)
    rows = [{
        "criterion": c.criterion,
        "title": c.title,
        "passed": c.passed,
        "measured": c.measured,
        "tolerance": c.tolerance,
        "seconds": round(c.seconds, 3),
        "budget": c.budget,
        "details": "; ".join(c.details),
    } for c in checks]
    passed = all(c.passed for c in checks)
    _emit(args, _render({"command": "verify", "suite": args.suite, "passed": passed}, rows, VERIFY_FIELDS,
                        args.format))
    return EXIT_OK if passed else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--max-panels", type=int, help="panel budget per adaptive integration")
    common.add_argument("--out", help="write output to this file (atomically) instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(prog="absmom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moment", parents=[common], help="fractional moments of a distribution")
    p.add_argument("--dist", required=True, help="name:key=value,... or csv:path")
    p.add_argument("--s", help="comma-separated orders (default 1)")
    p.add_argument("--method", default="thm1prime", help=f"comma-separated, from {', '.join(METHODS)}")
    p.add_argument("--n", type=int, help="residual order; defaults to the one whose strip holds s")
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("cdf", parents=[common], help="distribution function from the CF")
    p.add_argument("--dist", required=True)
    p.add_argument("--x", required=True, help="comma-separated points")
    p.add_argument("--method", default="eq2", help="comma-separated, from eq2, eq3, eq4")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("suite", choices=tuple(verify.SUITES))
    p.set_defaults(func=cmd_verify)
    return parser


def _fail(code: int, kind: str, exc: BaseException | str) -> int:
    message = str(exc)
    payload = {"error": {"type": kind, "message": message, "exit_code": code}}
    sys.stdout.write(json.dumps(payload) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ArithmeticError, IntegrandError) as exc:
        return _fail(EXIT_NUMERICAL, "numerical", exc)
    except (UsageError, StripError, CatalogError, TableError, EngineError, ValueError) as exc:
        return _fail(EXIT_VALIDATION, "validation", exc)
    except OSError as exc:
        return _fail(EXIT_IO, "io", exc)


if __name__ == "__main__":
    sys.exit(main())
