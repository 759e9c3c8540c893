import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.duality import (
    DualCandidateFamily,
    alpha_star,
    dual_char_norm,
    dual_char_upper,
    dual_m0_char,
    dual_norm_lower,
)
from morreylab.geometry import Ball, Resolution
from morreylab.morrey import GLOBAL, LOCAL, PhiSpec, SpaceParams, char_norm
from morreylab.quadrature import UNIT, CharBall, Power, PowerTimes, WeightedChar, pairing


def sp(lam, p, w=UNIT, scope=GLOBAL, preset="samko"):
    return SpaceParams(p, PhiSpec.from_preset(preset, lam), w, scope)


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
def test_local_offcenter_dual(lam):
    e = dual_char_norm(Ball(4, 1), sp(lam, 2.0, scope=LOCAL))
    want = math.sqrt(2) * 5 ** (lam / 2)
    assert e.upper == pytest.approx(want, rel=1e-12)
    assert e.lower == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("R", [0.1, 3.0])
def test_p1_centered_dual(lam, R):
    # the indicator itself attains the Holder bound r^lam / ess inf w
    e = dual_char_norm(Ball(0, R), sp(lam, 1.0))
    assert e.upper == pytest.approx(R**lam, rel=1e-12)
    assert e.lower == pytest.approx(R**lam, rel=1e-9)


def test_indicator_candidate_ratio():
    lam, p, b = 0.5, 2.0, Ball(0.3, 0.7)
    s = sp(lam, p)
    e = dual_norm_lower(CharBall(b), s, [CharBall(b)])
    direct = b.measure / char_norm(b, s, levels=1).lower
    assert e.lower == pytest.approx(direct, rel=1e-12)
    assert e.lower >= b.measure / (2 * b.radius ** (1 - lam)) ** (1 / p) * (1 - 1e-12)


def test_zero_pairing_is_zero():
    z = WeightedChar(Power.raw(0.0), 5.0, 6.0)
    assert dual_norm_lower(z, sp(0.5, 2.0), [CharBall(Ball(0, 1))]).lower == 0.0


@given(st.floats(-0.6, 0.8), st.floats(-3, 3), st.floats(0.05, 3), st.sampled_from([1.5, 2.0, 3.0]), st.sampled_from(["samko", "komori_shirai"]))
def test_lower_below_holder_upper(beta, c, r, p, preset):
    s = sp(0.5, p, Power(beta), preset=preset)
    b = Ball(c, r)
    e = dual_char_norm(b, s, levels=1)
    up = dual_char_upper(b, s)
    if up is not None:
        assert e.lower <= up * (1 + 1e-9)


@given(st.floats(-0.6, 0.8), st.floats(-2, 2), st.floats(0.1, 2), st.floats(0.05, 1.0), st.floats(-0.9, 0.9))
def test_holder_consistency(beta, c, r, t, shift):
    # int f g <= ||f|| ||g||' for sub-ball indicators f of the ball carrying g
    s = sp(0.5, 2.0, Power(beta))
    b = Ball(c, r)
    d = dual_char_norm(b, s, levels=1)
    bound = d.upper if d.upper is not None else d.lower
    sub = Ball(c + shift * (1 - t) * r, t * r)
    assert pairing(CharBall(sub), CharBall(b)) <= char_norm(sub, s, levels=1).lower * bound * (1 + 1e-9)


def test_alpha_star_values():
    assert alpha_star(sp(0.5, 2.0)) == pytest.approx(-1 / 1.5)
    assert alpha_star(sp(0.5, 2.0, preset="komori_shirai")) == pytest.approx(-0.5 / 1.5)


def test_unimplemented_weight_is_flagged():
    # |x|^0.5 |x - 1|^0.2 has no closed Holder bound
    w = PowerTimes(0.5, Power(0.2, center=1.0))
    small = DualCandidateFamily(alphas=(), sub_ball_decades=(1,), edge_decades=(1,))
    e = dual_char_norm(Ball(0, 2), sp(0.5, 2.0, w), Resolution(ppd=2, depth=4.0), levels=1, cands=small)
    assert "regime-not-covered" in e.flags and e.upper is None and e.lower > 0


def test_m0_dual_fails_at_left_endpoint():
    lam = 0.5
    e = dual_m0_char(Ball(0, 1), sp(lam, 2.0, Power(lam - 1)))
    assert "condition-fails" in e.flags and e.upper is None


def test_m0_dual_finite_for_unit_weight():
    e = dual_m0_char(Ball(0, 1), sp(0.5, 2.0), s=1.05)
    assert e.verdict == "finite-stable"
    assert e.upper is not None and e.lower <= e.upper
