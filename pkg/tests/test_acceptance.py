"""Acceptance criteria 1 to 9, one test each.

Every criterion test prints a single PASS/FAIL line; the lines are repeated
in the terminal summary so they show without ``-s``.  A test fails exactly
when its verdict is FAIL.
"""

import math

import pytest

from absmom import verify

# pinned here so a silent edit to the suite's thresholds fails loudly
EXPECTED_TOLERANCES = {
    "mellin_constants": 1e-8,
    "mellin_improper": 1e-5,
    "sine_identity": 1e-5,
    "round_trip": 1e-6,
    "round_trip_improper": 1e-5,
    "sine_reciprocal_table": 1e-5,
    "equilibrium_fixed_point": 1e-9,
    "equilibrium_uniform": 1e-6,
    "equilibrium_identity": 1e-5,
    "extract_m1": 1e-3,
    "extract_m1_m2": 1e-2,
    "dual_representation": 1e-5,
    "separation": 1e-6,
    "separation_index": 10,
    "derivative_chain": 1e-6,
    "dual_path": 1e-12,
}
EXPECTED_BUDGETS = {1: 10.0, 2: 5.0, 3: 60.0, 6: 30.0, 9: 10.0}

REPORT: dict[int, str] = {}


def test_tolerances_pinned():
    assert verify.TOLERANCES == EXPECTED_TOLERANCES


def test_budgets_pinned():
    assert verify.BUDGETS == EXPECTED_BUDGETS


def test_suites_cover_every_criterion():
    assert sorted(verify.CRITERIA) == list(range(1, 10))
    assert verify.SUITES["all"] == tuple(range(1, 10))
    covered = {c for name, keys in verify.SUITES.items() if name != "all" for c in keys}
    assert covered == set(range(1, 10))


def run_criterion(number):
    check = verify.CRITERIA[number]()
    REPORT[number] = check.line()
    print()
    print(check.line())
    for line in check.details:
        print(f"    {line}")
    return check


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    check = run_criterion(number)
    assert check.criterion == number
    if check.budget is not None:
        assert check.seconds < check.budget, check.line()
    assert math.isfinite(check.measured), check.details
    assert check.passed, "\n".join([check.line(), *check.details])
