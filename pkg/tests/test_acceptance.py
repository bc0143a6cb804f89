"""Acceptance gate: the nine reproduction criteria at full size.

Every test reports one PASS/FAIL line.  Criterion 1 runs the exhaustive
grid over q <= 343 (about ten minutes on one core); criteria 4, 5 and 7
reuse its cached counters.
"""

import time

import pytest

from permfam import checks


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    res = fn(*args, **kwargs)
    res.seconds = time.perf_counter() - start
    return res


@pytest.fixture(scope="module")
def full_grid():
    start = time.perf_counter()
    totals, mismatches = checks.grid_totals(checks.FULL_GRID_Q)
    return totals, mismatches, time.perf_counter() - start


def test_criterion_1_oracle_equivalence(full_grid, report_criterion):
    totals, mismatches, seconds = full_grid
    res = checks.check_oracle_equivalence(checks.FULL_GRID_Q)
    res.seconds = seconds
    report_criterion(1, res)
    assert totals["tuples"] > 0 and not mismatches
    assert res.passed, res.detail


def test_criterion_2_theta_counts(report_criterion):
    res = timed(checks.check_theta_counts)
    report_criterion(2, res)
    assert res.passed, res.detail


def test_criterion_3_c_set(report_criterion):
    res = timed(checks.check_c_set)
    report_criterion(3, res)
    assert res.passed, res.detail


def test_criterion_4_d3_totality(full_grid, report_criterion):
    res = timed(checks.check_d3_totality, checks.LARGE_Q, checks.FULL_GRID_Q)
    report_criterion(4, res)
    assert res.passed, res.detail


def test_criterion_5_d5_star(full_grid, report_criterion):
    res = timed(checks.check_d5_star, checks.LARGE_Q, checks.FULL_GRID_Q)
    report_criterion(5, res)
    assert res.passed, res.detail


def test_criterion_6_product_identity(report_criterion):
    res = timed(checks.check_product_identity, 1000, checks.LARGE_Q)
    report_criterion(6, res)
    assert res.passed, res.detail


def test_criterion_7_cond3_necessity(full_grid, report_criterion):
    res = timed(checks.check_cond3_necessity, checks.FULL_GRID_Q)
    report_criterion(7, res)
    assert res.passed, res.detail


def test_criterion_8_realizations(report_criterion):
    # every valid theta_hat for d in {7, 11, 13} needs a k=2, t=e=1 witness with q <= 10^4
    res = timed(checks.check_computer_claim, (7, 11, 13), checks.LARGE_Q)
    report_criterion(8, res)
    assert res.passed, res.detail


def test_criterion_9_degree_bound(report_criterion):
    res = timed(checks.check_degree_bound, checks.FULL_GRID_Q, 1000)
    report_criterion(9, res)
    assert res.passed, res.detail
