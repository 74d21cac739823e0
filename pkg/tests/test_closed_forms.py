"""Closed-form rate formulas against independent numerical maximization.

The oracle route never reuses the formula under test: band objectives are
maximized with scipy on the raw moment expressions, and frozen constants
were produced by that independent route at high resolution.
"""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from lpconc.closed_forms import (
    PHI_FAMILIES,
    catalog,
    cube_upper_bound,
    diff_uniform_f,
    diff_uniform_maximizer,
    phi_closed,
    uniform_f,
    uniform_maximizer,
)


def _numeric_band_rate(delta: float, sign: int, log_moment, log_mean: float) -> float:
    """max over y >= 0 of s*y*(log(1+s*delta) + E log|x|) - log E[|x|^{s*y}].

    The band sits around the geometric mean in this limit, hence the E log
    term.  Negative moments blow up at y = 1 for both test laws, so the
    minus side searches below that.
    """
    target = math.log1p(sign * delta) + log_mean

    def negated(y):
        return -(sign * y * target - log_moment(sign * y))

    upper = 60.0 if sign > 0 else 1.0 - 1e-9
    best = minimize_scalar(negated, bounds=(1e-12, upper), method="bounded",
                           options={"xatol": 1e-12})
    return max(-best.fun, 0.0)


_UNIFORM_LOG_MEAN = -1.0
_DIFF_LOG_MEAN = math.log(2.0) - 1.5


def _uniform_log_moment(q: float) -> float:
    # E[U^q] = 1/(1+q) for U uniform on [0,1]
    return -math.log1p(q)


def _diff_log_moment(q: float) -> float:
    # E[X^q] = 2^{q+1}/((q+1)(q+2)) for the triangular difference law
    return (q + 1) * math.log(2.0) - math.log1p(q) - math.log(q + 2.0)


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("sign", [+1, -1])
def test_uniform_f_matches_independent_maximization(delta, sign):
    numeric = _numeric_band_rate(delta, sign, _uniform_log_moment, _UNIFORM_LOG_MEAN)
    assert uniform_f(delta, sign) == pytest.approx(numeric, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("delta", [0.05, 0.1, 0.2, 0.5, 0.9])
@pytest.mark.parametrize("sign", [+1, -1])
def test_diff_uniform_f_matches_independent_maximization(delta, sign):
    numeric = _numeric_band_rate(delta, sign, _diff_log_moment, _DIFF_LOG_MEAN)
    assert diff_uniform_f(delta, sign) == pytest.approx(numeric, rel=1e-9, abs=1e-12)


def test_uniform_f_frozen_values():
    # (1.2)(1 - log 1.2) sits in [0.9810, 0.9815]
    base = 1.2 * (1.0 - math.log(1.2))
    assert 0.9810 < base < 0.9815
    assert uniform_f(0.2, +1) == pytest.approx(-math.log(base), rel=1e-14)
    assert uniform_f(0.2, +1) == pytest.approx(0.018964564085075908, rel=1e-13)
    # -log(0.5 * (1 - log 0.5)), evaluated exactly
    assert uniform_f(0.5, -1) == pytest.approx(
        -math.log(0.5 * (1.0 - math.log(0.5))), rel=1e-14
    )
    assert uniform_f(0.5, -1) == pytest.approx(0.16655814642090083, rel=1e-13)


def test_uniform_maximizer_sits_at_the_peak():
    for delta, sign in ((0.1, +1), (0.3, -1), (0.6, +1)):
        y_abs = abs(uniform_maximizer(delta, sign))
        assert y_abs > 0
        target = math.log1p(sign * delta) + _UNIFORM_LOG_MEAN

        def value(y):
            return sign * y * target - _uniform_log_moment(sign * y)

        peak = value(y_abs)
        assert peak == pytest.approx(uniform_f(delta, sign), rel=1e-12)
        for bump in (0.999, 1.001):
            assert value(y_abs * bump) <= peak + 1e-12


def test_diff_uniform_maximizer_sits_at_the_peak():
    for delta, sign in ((0.1, +1), (0.2, -1), (0.5, +1)):
        y_abs = abs(diff_uniform_maximizer(delta, sign))
        target = math.log1p(sign * delta) + _DIFF_LOG_MEAN

        def value(y):
            return sign * y * target - _diff_log_moment(sign * y)

        peak = value(y_abs)
        assert peak == pytest.approx(diff_uniform_f(delta, sign), rel=1e-11)
        for bump in (0.999, 1.001):
            assert value(y_abs * bump) <= peak + 1e-12


def test_phi_uniform_cube_is_half_plus_p():
    for p in (0.01, 0.1, 1.0, 2.0, 10.0):
        assert phi_closed("uniform-cube", p) == 0.5 + p


def test_phi_diff_uniform_rational_form():
    for p in (0.1, 1.0, 2.0):
        assert phi_closed("diff-uniform", p) == pytest.approx((2 + 4 * p) / (5 + p), rel=1e-15)


def test_phi_standard_normal_values():
    assert phi_closed("standard-normal", 2.0) == pytest.approx(1.0, rel=1e-12)
    # 1/(pi - 2) at p = 1: mu_1 = sqrt(2/pi), second moment 1
    assert phi_closed("standard-normal", 1.0) == pytest.approx(1.0 / (math.pi - 2.0), rel=1e-12)
    # small-p limit 4/pi^2; below p ~ 1e-5 the gamma-function differences
    # cancel catastrophically, so the floor is ~1e-4 absolute, not zero
    assert phi_closed("standard-normal", 1e-3) == pytest.approx(4.0 / math.pi**2, abs=1e-3)
    assert phi_closed("standard-normal", 1e-6) == pytest.approx(4.0 / math.pi**2, abs=5e-4)


def test_phi_small_p_limits_match_inverse_log_variance():
    # phi(p) -> 1/(2 Var log|x|) as p -> 0; the rational families are exact
    # at tiny p, the normal family is tested above its cancellation floor
    for family, log_var, p, tol in (
        ("uniform-cube", 1.0, 1e-7, 1e-5),
        ("diff-uniform", 1.25, 1e-7, 1e-5),
        ("standard-normal", math.pi**2 / 8, 1e-4, 1e-3),
    ):
        assert phi_closed(family, p) == pytest.approx(1.0 / (2.0 * log_var), rel=tol)


def test_cube_upper_bound_frozen_values():
    assert cube_upper_bound(0.2, 200) == pytest.approx(0.022529880760804272, rel=1e-12)
    assert 0.0220 < cube_upper_bound(0.2, 200) < 0.0230
    assert cube_upper_bound(0.2, 1000) == pytest.approx(5.804896304589545e-09, rel=1e-12)
    assert 5.2e-9 < cube_upper_bound(0.2, 1000) < 6.4e-9
    # n-multiplicativity of the exponential form
    assert cube_upper_bound(0.2, 400) == pytest.approx(cube_upper_bound(0.2, 200) ** 2, rel=1e-10)


def test_domain_validation():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            uniform_f(bad, +1)
        with pytest.raises(ValueError):
            diff_uniform_f(bad, -1)
    with pytest.raises(ValueError):
        phi_closed("no-such-family", 1.0)


def test_catalog_entries_are_callable_and_consistent():
    entries = catalog()
    assert len(entries) >= 6
    names = {(e.family, e.quantity) for e in entries}
    assert ("uniform-cube", "band-rate") in names or any("uniform" in e.family for e in entries)
    for entry in entries:
        assert callable(entry.fn)
    assert set(PHI_FAMILIES) == {"uniform-cube", "diff-uniform", "standard-normal"}
