import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma, gammaincc

from morreylab.geometry import Ball
from morreylab.quadrature import (
    UNIT,
    CharBall,
    DivergenceError,
    PiecewisePower,
    PiecewisePowerLog,
    Power,
    PowerTimes,
    Segment,
    TabulatedGrid,
    WeightedChar,
    func_from_dict,
    integrate_ball,
    integrate_interval,
    weight_from_dict,
    weight_measure,
)


def scipy_ref(g, a, b, brk=(0.0,)):
    pts = sorted({a, b, *[x for x in brk if a < x < b]})
    return sum(quad(g, u, v, limit=400, epsabs=0, epsrel=1e-12)[0] for u, v in zip(pts[:-1], pts[1:]))


def test_integrate_examples():
    f = CharBall(Ball(0, 1))
    assert integrate_ball(f, UNIT, Ball(0, 2)) == pytest.approx(2.0, rel=1e-14)
    assert integrate_ball(f, Power(-0.5), Ball(0, 1)) == pytest.approx(4.0, rel=1e-14)
    g = PiecewisePowerLog((Segment("both", 0.0, 1.0, ((1.0, 0.0, 0.0), (1.0, 0.0, 1.0))),))
    assert integrate_ball(g, UNIT, Ball(0, 1)) == pytest.approx(4.0, rel=1e-12)


def test_weight_measure_examples():
    assert weight_measure(UNIT, Ball(3.0, 2.5)) == pytest.approx(5.0)
    for beta in (-0.5, 0.3, 2.0):
        assert weight_measure(Power(beta), Ball(0, 3)) == pytest.approx(2 * 3 ** (beta + 1) / (beta + 1), rel=1e-13)


def test_divergence_is_an_error():
    with pytest.raises(ValueError):
        Power(-1.0)
    f = WeightedChar(Power.raw(-1.5), -1.0, 1.0)
    with pytest.raises(DivergenceError):
        integrate_ball(f, Power(0.2), Ball(0, 1))


@given(st.floats(-0.95, 3.0), st.floats(-5, 5), st.floats(0.01, 5), st.floats(0.05, 0.95))
def test_additivity(beta, c, r, t):
    w = Power(beta)
    b = Ball(c, r)
    m = b.left + t * 2 * r
    whole = weight_measure(w, b)
    parts = float(w.measure(b.left, m) + w.measure(m, b.right))
    assert parts == pytest.approx(whole, rel=1e-12)


@given(st.floats(-0.95, 3.0), st.floats(0.01, 100), st.floats(0.1, 10))
def test_power_homogeneity(beta, r, lam):
    w = Power(beta)
    assert weight_measure(w, Ball(0, lam * r)) == pytest.approx(lam ** (1 + beta) * weight_measure(w, Ball(0, r)), rel=1e-12)


@given(st.floats(-0.9, 2.0), st.floats(-3, 3), st.floats(0.01, 3), st.floats(1.0, 3.0))
def test_monotone_in_ball(beta, c, r, grow):
    f = WeightedChar(Power.raw(0.5), -1.0, 2.0)
    w = Power(beta)
    assert integrate_ball(f, w, Ball(c, r)) <= integrate_ball(f, w, Ball(c, grow * r)) * (1 + 1e-12)


@given(st.floats(-0.8, 1.5), st.integers(0, 2), st.floats(0.1, 3.0), st.floats(-0.5, 1.0), st.floats(0.01, 0.9))
def test_closed_form_vs_quadrature(a, k, p, beta, R):
    f = PiecewisePowerLog((Segment("both", 0.0, R, ((1.0, a, float(k)),)),))
    w = Power(beta)
    if a * p + beta <= -1:
        return
    got = integrate_interval(f, w, -R, R, p)
    # 2 int_0^R x^e log(1/x)^m dx = 2 Gamma(m + 1, (e + 1) log(1/R)) / (e + 1)^(m + 1)
    e, m = a * p + beta, k * p
    want = 2 * gamma(m + 1) * gammaincc(m + 1, (e + 1) * math.log(1 / R)) / (e + 1) ** (m + 1)
    assert got == pytest.approx(want, rel=1e-9)


def test_piecewise_and_products():
    pw = PiecewisePower(((0.0, 1.0, 1.0, 0.5), (1.0, math.inf, 1.0, -0.2)))
    ref = scipy_ref(lambda x: abs(x) ** 0.5 if abs(x) < 1 else abs(x) ** -0.2, -0.5, 3.0, (0.0, -1.0, 1.0))
    assert float(pw.measure(-0.5, 3.0)) == pytest.approx(ref, rel=1e-10)
    pt = PowerTimes(0.5, Power(0.3))
    assert float(pt.measure(0.2, 2.0)) == pytest.approx(float(Power(0.8).measure(0.2, 2.0)), rel=1e-12)


def test_tabulated_integrals():
    t = TabulatedGrid((-1.0, 0.0, 1.0, 2.0), (3.0, 1.0, 2.0))
    assert integrate_interval(t, UNIT, -0.5, 1.5) == pytest.approx(1.5 + 1.0 + 1.0)
    assert integrate_interval(t, UNIT, -0.5, 1.5, p=2.0) == pytest.approx(4.5 + 1.0 + 2.0)


def test_serialization_roundtrip():
    for w in (Power(0.3), Power(-0.5, center=1.0), PiecewisePower(((0.0, 1.0, 1.0, 0.5), (1.0, math.inf, 1.0, 0.0))), PowerTimes(0.5, Power(0.2))):
        assert weight_from_dict(w.to_dict()) == w
    fs = [
        CharBall(Ball(1.0, 2.0)),
        WeightedChar(Power.raw(-0.3), -1.0, 1.0, 1e-6, 0.0),
        PiecewisePowerLog((Segment("pos", 0.0, 1.0, ((2.0, 0.0, 1.0),)),)),
        TabulatedGrid((0.0, 1.0, 2.0), (1.0, 0.5)),
    ]
    for f in fs:
        g = func_from_dict(f.to_dict())
        xs = np.linspace(-2.5, 2.5, 41)
        assert np.allclose(g.value(xs), f.value(xs))


@given(st.floats(-1.5, 1.0), st.floats(0.3, 2.5), st.floats(1e-3, 0.3), st.floats(1.5, 3.0))
def test_fractional_log_powers_on_inner_intervals(a, k, u, ratio):
    v = min(u * ratio, 0.95)
    f = PiecewisePowerLog((Segment("pos", 0.0, 0.95, ((1.0, a, k),)),))
    p = 1.5
    e, m = a * p, k * p
    want = quad(lambda x: x**e * math.log(1 / x) ** m, u, v, epsabs=0, epsrel=1e-13)[0]
    assert integrate_interval(f, UNIT, u, v, p) == pytest.approx(want, rel=1e-9)
