"""Rate engine against dense-grid maximization and frozen analytic values.

Two independent routes anchor everything: (1) dense grids over the tilt
parameter bound the supremum from below without trusting the line search;
(2) closed-form family values derived by hand.  Frozen constants come from
those routes at high resolution.
"""

import math

import numpy as np
import pytest

from lpconc.closed_forms import diff_uniform_f, phi_closed, uniform_f
from lpconc.distributions import (
    DiffUniform,
    StandardNormal,
    ThreePointSymmetric,
    TwoPoint,
    UniformSymmetric,
    UniformUnit,
)
from lpconc.rate_engine import (
    REGIME_DIVERGENT,
    REGIME_INTERIOR,
    REGIME_LARGE_P,
    REGIME_SMALL_P,
    c_star,
    chernoff_bounds,
    contrast_bounds,
    lambda_value,
    large_p_limits,
    phi,
    rate,
    small_p_rate,
    uniform_rate,
)


def _dense_max(dist, p, delta, sign, t_hi, points=4000):
    grid = np.geomspace(1e-8, t_hi, points)
    best = 0.0
    for t in grid:
        v = lambda_value(dist, float(t), p, delta, sign)
        if v > best:
            best = v
    return best


def test_lambda_single_point_two_point_law():
    # 1 * 1.2 * 0.5 - log(0.5 + 0.5 e), evaluated directly
    expected = 0.6 - math.log(0.5 + 0.5 * math.e)
    got = lambda_value(TwoPoint(a=0.5, r=1.0), 1.0, 1.0, 0.2, +1)
    assert got == pytest.approx(expected, rel=1e-14)
    assert got == pytest.approx(-0.0201145069582778, abs=1e-13)


def test_lambda_is_zero_at_origin_and_minus_inf_past_divergence():
    assert lambda_value(UniformUnit(), 0.0, 1.0, 0.1, +1) == 0.0
    assert lambda_value(StandardNormal(), 0.6, 2.0, 0.1, +1) == -math.inf


def test_lambda_validation():
    with pytest.raises(ValueError):
        lambda_value(UniformUnit(), -1.0, 1.0, 0.1, +1)
    with pytest.raises(ValueError):
        lambda_value(UniformUnit(), 1.0, 0.0, 0.1, +1)
    with pytest.raises(ValueError):
        lambda_value(UniformUnit(), 1.0, 1.0, 1.5, -1)


@pytest.mark.parametrize("p,delta,sign,t_hi", [
    (0.01, 0.2, +1, 4000.0),
    (0.1, 0.2, +1, 400.0),
    (1.0, 0.1, +1, 40.0),
    (1.0, 0.1, -1, 40.0),
    (2.0, 0.3, -1, 40.0),
])
def test_rate_beats_every_dense_grid_point(p, delta, sign, t_hi):
    dist = UniformUnit()
    result = rate(dist, p, delta, sign)
    dense = _dense_max(dist, p, delta, sign, t_hi)
    assert result.value >= dense - 1e-12
    assert result.value <= dense + 1e-5  # grid is fine enough to certify
    assert result.regime == REGIME_INTERIOR
    assert result.tolerance_met
    assert result.argmax_t is not None and result.argmax_t > 0


def test_two_point_rate_matches_dense_maximization():
    for a, r, p, delta, sign in [
        (0.5, 1.0, 1.0, 0.2, +1),
        (0.5, 1.0, 1.0, 0.2, -1),
        (0.3, 2.0, 0.5, 0.1, +1),
        (0.7, 1.0, 0.2, 0.3, -1),
    ]:
        dist = TwoPoint(a=a, r=r)
        result = rate(dist, p, delta, sign)
        dense = _dense_max(dist, p, delta, sign, t_hi=200.0 / r**p, points=6000)
        # the line search may top the finite grid by the grid's own resolution
        assert result.value >= dense - 1e-12
        assert result.value == pytest.approx(dense, rel=1e-4, abs=1e-7)


def test_two_point_symmetry_at_half():
    # a = 0.5 makes the two tails exactly symmetric at p = 1, r = 1
    plus = rate(TwoPoint(a=0.5, r=1.0), 1.0, 0.2, +1)
    minus = rate(TwoPoint(a=0.5, r=1.0), 1.0, 0.2, -1)
    assert plus.value == pytest.approx(minus.value, rel=1e-10)
    assert plus.value == pytest.approx(0.0201355135507, rel=1e-9)


def test_three_point_law_rates_match_two_point():
    two = rate(TwoPoint(a=0.4, r=1.5), 0.7, 0.2, +1)
    three = rate(ThreePointSymmetric(a=0.4, r=1.5), 0.7, 0.2, +1)
    assert three.value == pytest.approx(two.value, rel=1e-12)


def test_uniform_p1_reflection_symmetry():
    # U[0,1] maps to itself under x -> 1-x, so both tails match at p=1
    plus = rate(UniformUnit(), 1.0, 0.2, +1)
    minus = rate(UniformUnit(), 1.0, 0.2, -1)
    assert plus.value == pytest.approx(minus.value, rel=1e-9)


def test_divergent_regimes():
    # minus side with delta >= 1: the band covers everything below zero
    res = rate(UniformUnit(), 1.0, 1.0, -1)
    assert res.value == math.inf and res.regime == REGIME_DIVERGENT
    # bounded support, band target beyond ess sup
    res = rate(UniformUnit(), 19.0, 0.2, +1)
    assert res.value == math.inf and res.regime == REGIME_DIVERGENT
    res = rate(TwoPoint(a=0.5, r=1.0), 4.0, 0.2, +1)
    assert res.value == math.inf and res.regime == REGIME_DIVERGENT
    # but finite just below the threshold p
    assert rate(UniformUnit(), 15.0, 0.2, +1).value < math.inf
    assert rate(TwoPoint(a=0.5, r=1.0), 3.5, 0.2, +1).value < math.inf


def test_rate_rejects_p_beyond_exponential_order():
    with pytest.raises(ValueError):
        rate(StandardNormal(), 3.0, 0.1, +1)
    # p = p0 itself works, with the tilt capped at the divergence boundary
    res = rate(StandardNormal(), 2.0, 0.1, +1)
    assert 0 < res.value < math.inf
    assert res.argmax_t is not None and res.argmax_t < 0.5


def test_rate_endpoint_p_zero_matches_small_p():
    for dist, delta, sign in [(UniformUnit(), 0.2, +1), (DiffUniform(), 0.1, -1)]:
        res = rate(dist, 0.0, delta, sign)
        assert res.regime == REGIME_SMALL_P
        assert res.value == pytest.approx(small_p_rate(dist, delta, sign), rel=1e-12)


def test_rate_endpoint_p_inf_matches_large_p():
    res = rate(UniformUnit(), math.inf, 0.5, -1)
    assert res.regime == REGIME_LARGE_P
    assert res.value == pytest.approx(-math.log(0.5), rel=1e-12)
    plus = rate(UniformUnit(), math.inf, 0.5, +1)
    assert plus.value == math.inf and plus.regime == REGIME_LARGE_P
    with pytest.raises(ValueError):
        rate(StandardNormal(), math.inf, 0.5, -1)


def test_small_p_rate_equals_closed_forms():
    for delta in (0.1, 0.2, 0.5):
        for sign in (+1, -1):
            assert small_p_rate(UniformUnit(), delta, sign) == pytest.approx(
                uniform_f(delta, sign), rel=1e-12
            )
            assert small_p_rate(DiffUniform(), delta, sign) == pytest.approx(
                diff_uniform_f(delta, sign), rel=1e-12
            )


def test_small_p_rate_generic_route_agrees_with_closed_forms():
    for delta in (0.1, 0.5):
        for sign in (+1, -1):
            generic = small_p_rate(UniformUnit(), delta, sign, use_closed_forms=False)
            assert generic == pytest.approx(uniform_f(delta, sign), rel=2e-9)
            generic = small_p_rate(DiffUniform(), delta, sign, use_closed_forms=False)
            assert generic == pytest.approx(diff_uniform_f(delta, sign), rel=2e-9)


def test_small_p_rate_quadratic_in_delta_matches_inverse_log_variance():
    # f(delta)/delta^2 -> 1/(2 Var log|x|) as delta -> 0
    for dist, log_var in ((UniformUnit(), 1.0), (DiffUniform(), 1.25),
                          (StandardNormal(), math.pi**2 / 8)):
        ratio = small_p_rate(dist, 1e-2, +1) / 1e-4
        assert ratio == pytest.approx(1.0 / (2.0 * log_var), rel=0.01)


def test_small_p_rate_minus_divergence_and_atom_rejection():
    assert small_p_rate(UniformUnit(), 1.0, -1) == math.inf
    with pytest.raises(ValueError):
        small_p_rate(TwoPoint(a=0.5, r=1.0), 0.1, +1)


def test_large_p_limits_continuous_law():
    limits = large_p_limits(UniformUnit(), 0.5)
    assert limits.plus == math.inf
    assert limits.minus == pytest.approx(-math.log(0.5), rel=1e-12)
    assert limits.minus_bracket is None


def test_large_p_limits_atom_law_is_bracketed():
    limits = large_p_limits(TwoPoint(a=0.3, r=1.0), 0.5)
    assert limits.minus_bracket == (limits.minus, limits.minus)
    assert limits.minus == pytest.approx(-math.log(0.3), rel=1e-12)
    with pytest.raises(ValueError):
        large_p_limits(StandardNormal(), 0.5)


def test_phi_generic_matches_closed_families():
    for dist, family in ((UniformUnit(), "uniform-cube"),
                         (DiffUniform(), "diff-uniform"),
                         (StandardNormal(), "standard-normal")):
        for p in (0.1, 0.5, 1.0, 2.0):
            assert phi(dist, p) == pytest.approx(phi_closed(family, p), rel=1e-9)


def test_phi_two_point_analytic():
    # mu_p = (1-a) r^p gives phi = (p^2/2)(1-a)/a, independent of r
    for a, p in ((0.3, 1.0), (0.5, 0.5), (0.8, 2.0)):
        expected = 0.5 * p * p * (1 - a) / a
        assert phi(TwoPoint(a=a, r=1.0), p) == pytest.approx(expected, rel=1e-11)
        assert phi(TwoPoint(a=a, r=2.0), p) == pytest.approx(expected, rel=1e-11)


def test_c_star_known_values():
    assert c_star(UniformUnit()) == pytest.approx(0.5, rel=1e-6)
    assert c_star(DiffUniform()) == pytest.approx(0.4, rel=1e-6)
    assert c_star(StandardNormal()) == pytest.approx(4.0 / math.pi**2, rel=1e-4)
    # a two-point law concentrates arbitrarily badly as p -> 0
    assert 0.0 <= c_star(TwoPoint(a=0.5, r=1.0)) < 1e-3


def test_uniform_rate_is_the_small_p_value_for_uniform_plus():
    assert uniform_rate(UniformUnit(), 0.2, +1) == pytest.approx(
        uniform_f(0.2, +1), abs=1e-9
    )
    assert uniform_rate(UniformUnit(), 0.1, +1) == pytest.approx(
        uniform_f(0.1, +1), abs=1e-9
    )


def test_uniform_rate_monotone_in_delta_and_rejects_atoms():
    values = [uniform_rate(UniformUnit(), d, +1) for d in (0.1, 0.2, 0.4, 0.8)]
    assert all(b > a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        uniform_rate(TwoPoint(a=0.5, r=1.0), 0.2, +1)


def test_chernoff_bounds_exponential_identity():
    bounds = chernoff_bounds(uniform_f(0.2, +1), uniform_f(0.2, -1), 200)
    assert bounds.upper_tail_bound == pytest.approx(math.exp(-200 * uniform_f(0.2, +1)), rel=1e-12)
    assert bounds.lower_tail_bound == pytest.approx(math.exp(-200 * uniform_f(0.2, -1)), rel=1e-12)
    assert bounds.two_sided_lower == pytest.approx(
        1.0 - bounds.upper_tail_bound - bounds.lower_tail_bound, rel=1e-12
    )
    infinite = chernoff_bounds(math.inf, 0.01, 50)
    assert infinite.upper_tail_bound == 0.0


def test_contrast_bounds_three_input_forms():
    n, delta = 500, 0.1
    f = lambda d: uniform_f(d, +1)
    from_callable = contrast_bounds(f, n, delta)
    from_tuple = contrast_bounds((f(delta / 2), f(delta / (2 + delta))), n, delta)
    assert from_callable == from_tuple
    expected_half = max(0.0, 1.0 - 4.0 * math.exp(-n * f(delta / 2)))
    assert from_callable[0] == pytest.approx(expected_half, rel=1e-12)
    single = contrast_bounds(0.01, n, delta)
    assert single[0] == single[1]
    assert 0.0 <= single[0] <= 1.0
    # a huge rate clips the bound at 1 from below 1
    assert contrast_bounds(math.inf, 10, 0.5) == (1.0, 1.0)


def test_rate_result_serialization_maps_infinities():
    record = rate(UniformUnit(), 19.0, 0.2, +1).json_record()
    assert record["value"] == "inf"
    assert record["regime"] == REGIME_DIVERGENT
    finite = rate(UniformUnit(), 1.0, 0.2, +1).json_record()
    assert isinstance(finite["value"], float)
    assert set(finite) == {"value", "argmax_t", "regime", "tolerance_met"}
