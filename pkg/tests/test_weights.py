import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from morreylab.geometry import BallFamily
from morreylab.quadrature import UNIT, Power
from morreylab.weights import (
    ap_constant,
    ap_values,
    estimate_rd_exponent,
    rd_holds_closed_form,
    reverse_doubling_check,
    reverse_holder_check,
)

CENTERED = BallFamily("centered", 1e-2, 1e2, points_per_decade=2)
ALL = BallFamily("all", 1e-2, 1e2, c_max=1e2, points_per_decade=2)


def brute_ap(beta, p, c, r):
    # independent oracle: scipy quadrature of w and w^{1-p'} on (c-r, c+r)
    brk = [x for x in (0.0,) if c - r < x < c + r]
    pts = [c - r, *brk, c + r]

    def avg(e):
        tot = sum(quad(lambda x: abs(x) ** e, u, v, limit=200, epsrel=1e-12)[0] for u, v in zip(pts[:-1], pts[1:]))
        return tot / (2 * r)

    return (avg(beta) * avg(beta * (1 - p / (p - 1))) ** (p - 1)) ** (1 / p)


def test_unit_weight_ap_is_one():
    rep = ap_constant(UNIT, 2.0, ALL)
    assert rep.verdict == "finite-stable"
    assert rep.constant == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("beta", [-0.9, -0.5, 0.0, 0.5, 0.9])
def test_centered_ap2_closed_form(beta):
    rep = ap_constant(Power(beta), 2.0, CENTERED)
    assert rep.verdict == "finite-stable"
    assert rep.constant == pytest.approx(1 / math.sqrt(1 - beta**2), rel=1e-9)


def test_ap_fails_above_p_minus_1():
    assert ap_constant(Power(1.2), 2.0, ALL).verdict == "diverging-under-refinement"


@given(st.floats(-0.9, 1.5), st.floats(1.5, 4.0), st.floats(-3, 3), st.floats(0.05, 3))
def test_ap_values_match_quadrature(beta, p, c, r):
    if beta >= p - 1:
        return
    got = float(ap_values(Power(beta), p, np.array([c - r]), np.array([c + r]))[0])
    assert got == pytest.approx(brute_ap(beta, p, c, r), rel=1e-6)


@given(st.floats(-0.9, 0.9), st.floats(1.3, 2.0), st.floats(2.0, 4.0))
def test_ap_values_decrease_in_p(beta, p, dp):
    if beta >= p - 1:
        return
    a, b = np.array([-0.3]), np.array([1.1])
    hi = ap_values(Power(beta), p, a, b)[0] ** (1 / p)
    lo = ap_values(Power(beta), p + dp, a, b)[0] ** (1 / (p + dp))
    assert lo <= hi * (1 + 1e-12)


@pytest.mark.parametrize("beta", [-0.5, 0.0, 0.7])
def test_rd_power_weights_centered(beta):
    res = reverse_doubling_check(Power(beta), 1 + beta, CENTERED, centered_only=True)
    assert res.holds and res.constant == pytest.approx(1.0, rel=1e-9)


def test_rd_fails_below_true_exponent():
    res = reverse_doubling_check(Power(-0.5), 0.6, CENTERED, centered_only=True)
    assert not res.holds
    assert reverse_doubling_check(UNIT, 1.0, ALL).holds


@pytest.mark.parametrize("lam", [0.25, 0.75])
@pytest.mark.parametrize("shift", [-0.2, -0.1, 0.0, 0.2])
def test_rd_matches_closed_form_on_all_balls(lam, shift):
    w = Power(lam - 1 + shift)
    assert reverse_doubling_check(w, lam, ALL).holds == rd_holds_closed_form(w, lam)


@pytest.mark.parametrize("beta", [-0.9, -0.4, 0.0, 0.8, 2.0])
def test_rd_exponent_estimate(beta):
    # sampled over a finite span, so it sits below the true exponent by at most log(C)/log(span)
    true = min(1.0, 1.0 + beta)
    est = estimate_rd_exponent(Power(beta), span=1e6)
    assert true - math.log(2 * (1 + abs(beta))) / math.log(1e6) <= est <= true + 1e-9


def test_reverse_holder():
    assert reverse_holder_check(UNIT, 2.0, ALL).constant == pytest.approx(1.0)
    beta, sigma = 0.5, 2.0
    res = reverse_holder_check(Power(beta), sigma, CENTERED)
    assert res.holds
    assert res.constant == pytest.approx((1 + beta) / (1 + sigma * beta) ** (1 / sigma), rel=1e-9)
    bad = reverse_holder_check(Power(-0.5), 3.0, CENTERED)
    assert not bad.holds and bad.structural


def test_ap_monotone_in_family():
    small = ap_constant(Power(0.5), 2.0, CENTERED).constant
    big = ap_constant(Power(0.5), 2.0, ALL).constant
    assert small <= big * (1 + 1e-12)
