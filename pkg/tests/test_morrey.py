
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.geometry import Ball, BallFamily
from morreylab.morrey import (
    GLOBAL,
    LOCAL,
    AdmissibilityError,
    PhiSpec,
    PreconditionError,
    SpaceParams,
    char_norm,
    char_norm_closed,
    morrey_norm,
    phi_value,
    weak_morrey_norm,
)
from morreylab.quadrature import UNIT, CharBall, PiecewisePowerLog, Power, Segment, TabulatedGrid

FAM = BallFamily("all", 1e-2, 1e2, c_max=1e2, points_per_decade=4)


def samko(lam, p=2.0, w=UNIT, scope=GLOBAL):
    return SpaceParams(p, PhiSpec.samko(lam), w, scope)


def test_phi_examples():
    assert phi_value(PhiSpec.samko(0.5), Power(0.3), Ball(0, 4)) == pytest.approx(2.0)
    assert phi_value(PhiSpec.komori_shirai(0.5), UNIT, Ball(0, 2)) == pytest.approx(2.0)
    assert phi_value(PhiSpec.poelhuis_torchinsky(0.5), UNIT, Ball(0, 1)) == pytest.approx(2.0)


def test_presets_and_admissibility():
    assert PhiSpec.from_preset("komori_shirai", 0.3) == PhiSpec.komori_shirai(0.3)
    with pytest.raises(ValueError):
        PhiSpec.from_preset("nope", 0.3)
    with pytest.raises(AdmissibilityError):
        SpaceParams(2.0, PhiSpec.poelhuis_torchinsky(0.5), Power(-0.7), GLOBAL)
    with pytest.raises(ValueError):
        SpaceParams(0.5, PhiSpec.samko(0.5), UNIT, GLOBAL)
    sp = samko(0.5, 3.0)
    assert SpaceParams.from_dict(sp.to_dict()) == sp
    assert sp.p_dual == pytest.approx(1.5)


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_indicator_norm_is_2_to_1_over_p(lam, p):
    e = morrey_norm(CharBall(Ball(0, 1)), samko(lam, p), FAM)
    assert e.lower == pytest.approx(2 ** (1 / p), rel=1e-9)
    assert char_norm(Ball(0, 1), samko(lam, p)).lower == pytest.approx(2 ** (1 / p), rel=1e-9)


def test_zero_function():
    z = TabulatedGrid((-1.0, 1.0), (0.0,))
    assert morrey_norm(z, samko(0.5), FAM).lower == 0.0
    assert weak_morrey_norm(z, samko(0.5), FAM, t_grid=[0.5, 1.0]).lower == 0.0


@given(st.floats(-50, 50), st.floats(0.01, 50), st.sampled_from([0.25, 0.5, 0.75]), st.floats(1.0, 4.0), st.sampled_from(["samko", "komori_shirai"]))
def test_weak_equals_strong_on_indicators(c, r, lam, p, preset):
    sp = SpaceParams(p, PhiSpec.from_preset(preset, lam), Power(0.3), GLOBAL)
    f = CharBall(Ball(c, r))
    strong = morrey_norm(f, sp, FAM, levels=1).lower
    weak = weak_morrey_norm(f, sp, FAM, levels=1).lower
    assert weak == pytest.approx(strong, rel=1e-9)


def _random_ppl(data):
    segs = []
    for side, lo, hi in (("pos", 0.0, 1.0), ("neg", 0.0, 2.0)):
        c = data.draw(st.floats(0.1, 3.0))
        a = data.draw(st.floats(-0.3, 1.0))
        segs.append((side, lo, hi, c, a))
    return segs


@given(st.data(), st.floats(1.0, 2.0), st.floats(1.0, 2.5))
def test_scaling_identity(data, q, s):
    segs = _random_ppl(data)
    f = PiecewisePowerLog(tuple(Segment(sd, lo, hi, ((c, a, 0.0),)) for sd, lo, hi, c, a in segs))
    fs = PiecewisePowerLog(tuple(Segment(sd, lo, hi, ((c**s, a * s, 0.0),)) for sd, lo, hi, c, a in segs))
    sp = samko(0.5, q, Power(0.2))
    left = morrey_norm(fs, sp, FAM, levels=1).lower
    right = morrey_norm(f, sp.with_p(s * q), FAM, levels=1).lower ** s
    assert left == pytest.approx(right, rel=1e-9)


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_local_char_closed_form(lam, p):
    sp = samko(lam, p, scope=LOCAL)
    want = (2 / 5**lam) ** (1 / p)
    assert char_norm_closed(Ball(4, 1), sp) == pytest.approx(want, rel=1e-12)
    fam = BallFamily("centered", 1e-2, 1e2, points_per_decade=8)
    assert morrey_norm(CharBall(Ball(4, 1)), sp, fam).lower == pytest.approx(want, rel=1e-9)
    with pytest.raises(PreconditionError):
        char_norm_closed(Ball(2, 1), sp)


def test_global_closed_form_needs_rd():
    with pytest.raises(PreconditionError):
        char_norm_closed(Ball(0, 1), samko(0.5, 2.0, Power(-0.8)))
    assert char_norm_closed(Ball(0, 1), samko(0.5, 2.0)) == pytest.approx((2 / 2**0.5) ** 0.5)


@given(st.floats(0.01, 100), st.floats(0.1, 10))
def test_dilation_scaling_of_indicator_norms(r, t):
    # w = 1, Samko: ||chi_{tB}|| = t^{(1-lam)/p} ||chi_B||
    sp = samko(0.5, 2.0)
    a = char_norm(Ball(0, r), sp, levels=1).lower
    b = char_norm(Ball(0, t * r), sp, levels=1).lower
    assert b == pytest.approx(t**0.25 * a, rel=1e-9)
