import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from morreylab.geometry import Ball
from morreylab.operators import (
    OperatorTag,
    calderon,
    calderon_func,
    calderon_values,
    evaluate,
    hilbert_op,
    hl_maximal,
    hl_maximal_values,
    m0,
    m0_func,
    m0_values,
    m_loc,
    m_loc_values,
    mloc_func,
    truncated_hilbert,
)
from morreylab.quadrature import CharBall, DivergenceError, PiecewisePowerLog, Power, Segment, TabulatedGrid, WeightedChar

CHI = CharBall(Ball(0, 1))
ONE = TabulatedGrid((-1e9, 1e9), (1.0,))


def test_m0_examples():
    assert m0(CHI, 0.5) == pytest.approx(1.0)
    assert m0(CHI, 2.0) == pytest.approx(0.5)
    for R, x in ((1.0, 3.0), (2.5, -7.0)):
        assert m0(CharBall(Ball(0, R)), x) == pytest.approx(R / abs(x))


def test_hl_examples():
    assert hl_maximal(CHI, 0.0) == pytest.approx(1.0)
    assert hl_maximal(CHI, 2.0) == pytest.approx(2 / 3, rel=1e-9)


def test_mloc_examples():
    assert m_loc(CHI, 2.0) == 0.0
    assert m_loc(CHI, 0.5) == pytest.approx(1.0)
    assert m_loc(ONE, 3.7) == pytest.approx(1.0)


def test_calderon_examples():
    for x in (0.1, 0.5, -0.3):
        assert calderon(CHI, x) == pytest.approx(2 - 2 * math.log(abs(x)), rel=1e-12)
    assert calderon(CHI, 1.0) == pytest.approx(2.0)
    assert calderon(CHI, -4.0) == pytest.approx(0.5)


def test_calderon_matches_quadrature():
    f = WeightedChar(Power.raw(0.5), -1.0, 2.0)
    for x in (0.3, -0.7, 1.5, 3.0):
        ax = abs(x)
        hardy = quad(lambda y: f.value(np.array([y]))[0], -ax, ax, points=[0.0], epsrel=1e-12)[0] / ax
        g = lambda y: (f.value(np.array([y]))[0] + f.value(np.array([-y]))[0]) / y
        tail = quad(g, ax, 3.0, epsrel=1e-12, limit=200)[0]
        assert calderon(f, x) == pytest.approx(hardy + tail, rel=1e-8)


def test_closed_form_funcs_match_values():
    xs = np.concatenate([np.geomspace(1e-3, 1e2, 30), -np.geomspace(1e-3, 1e2, 30)])
    b = Ball(0, 1.5)
    assert np.allclose(m0_func(CharBall(b)).value(xs), m0_values(CharBall(b), xs), rtol=1e-12)
    assert np.allclose(calderon_func(CharBall(b)).value(xs), calderon_values(CharBall(b), xs), rtol=1e-12)
    assert np.allclose(mloc_func(CharBall(b)).value(xs), m_loc_values(CharBall(b), xs), rtol=1e-9, atol=1e-12)


def test_hilbert_examples():
    with pytest.raises(DivergenceError):
        hilbert_op(CHI, 0.0)
    assert hilbert_op(CharBall(Ball(1.5, 0.5)), 0.0) == pytest.approx(math.log(2), rel=1e-12)
    # S-tilde f(x) = int f(y) / (|x| + |y|) dy, and S-tilde <= S <= 2 S-tilde
    x = 0.4
    ref = quad(lambda y: 1 / (x + abs(y)), -1, 1, points=[0.0], epsrel=1e-12)[0]
    assert hilbert_op(CHI, x) == pytest.approx(ref, rel=1e-10)
    assert hilbert_op(CHI, x) <= calderon(CHI, x) <= 2 * hilbert_op(CHI, x)
    assert truncated_hilbert(CHI, 2.0, 0.1) == pytest.approx(math.log(3), rel=1e-12)
    odd = PiecewisePowerLog((Segment("pos", 0.0, 1.0, ((1.0, 0.0, 0.0),)), Segment("neg", 0.0, 1.0, ((-1.0, 0.0, 0.0),))))
    # at x = 0 the kernel is odd, so even inputs cancel and odd inputs double
    assert truncated_hilbert(CHI, 0.0, 0.01) == pytest.approx(0.0, abs=1e-12)
    assert truncated_hilbert(odd, 0.0, 0.01) == pytest.approx(-2 * math.log(100), rel=1e-12)
    vals = [truncated_hilbert(CHI, 1 + d, 1e-9) for d in (1e-1, 1e-2, 1e-3)]
    for d, v in zip((1e-1, 1e-2, 1e-3), vals):
        assert v == pytest.approx(math.log((2 + d) / d), rel=1e-6)
    assert vals[0] < vals[1] < vals[2]


@given(st.floats(-0.8, 1.0), st.floats(0.2, 3.0), st.floats(-5, 5))
def test_pointwise_chain(a, R, x):
    if abs(x) < 1e-3:
        return
    f = WeightedChar(Power.raw(a), -R, 0.5 * R)
    xs = np.array([x])
    M = hl_maximal_values(f, xs)[0]
    assert M >= m0_values(f, xs)[0] * (1 - 1e-12)
    assert M >= m_loc_values(f, xs)[0] * (1 - 1e-12)
    assert calderon_values(f, xs)[0] >= m0_values(f, xs)[0] * (1 - 1e-12)


@given(st.floats(0.1, 5.0), st.floats(-3, 3))
def test_m0_radially_nonincreasing(R, c):
    f = CharBall(Ball(c, R))
    xs = np.geomspace(1e-3, 1e3, 64)
    for s in (1.0, -1.0):
        v = m0_values(f, s * xs)
        assert np.all(np.diff(v) <= 1e-12 * v[:-1])


def test_evaluate_dispatch():
    xs = np.array([0.5, 2.0])
    assert np.allclose(evaluate(OperatorTag("m0"), CHI, xs), m0_values(CHI, xs))
    assert np.allclose(evaluate(OperatorTag("hl"), CHI, xs), hl_maximal_values(CHI, xs))
    with pytest.raises(ValueError):
        OperatorTag.from_name("riesz")
