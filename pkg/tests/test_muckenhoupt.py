import pytest

from morreylab.geometry import Ball, BallFamily
from morreylab.morrey import GLOBAL, LOCAL, PhiSpec, SpaceParams
from morreylab.muckenhoupt import (
    calderon_condition,
    condition_for,
    default_test_family,
    extrapolation_condition,
    matching_family,
    morrey_ap_constant,
    operator_norm_estimate,
)
from morreylab.operators import OperatorTag
from morreylab.quadrature import UNIT, CharBall, Power

CENTERED = BallFamily("centered")


def sp(lam, p, w=UNIT, scope=GLOBAL, preset="samko"):
    return SpaceParams(p, PhiSpec.from_preset(preset, lam), w, scope)


@pytest.mark.parametrize("lam", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_unit_weight_condition_is_stable(lam, p):
    rep = morrey_ap_constant(sp(lam, p), CENTERED)
    assert rep.holds
    assert rep.constant.lower >= 1.0 - 1e-12


def test_left_endpoint_weight_passes_a0():
    lam = 0.5
    rep = morrey_ap_constant(sp(lam, 2.0, Power(lam - 1)), CENTERED)
    assert rep.holds


def test_far_outside_range_diverges():
    rep = morrey_ap_constant(sp(0.5, 2.0, Power(10.0)), BallFamily("all"))
    assert rep.verdict == "diverging-under-refinement"


@pytest.mark.parametrize("w", [UNIT, Power(0.3), Power(-0.4)])
def test_calderon_dominates_a0(w):
    s = sp(0.5, 2.0, w)
    assert calderon_condition(s).constant.lower >= morrey_ap_constant(s, CENTERED).constant.lower * (1 - 1e-12)


def test_calderon_fails_at_left_endpoint():
    assert not calderon_condition(sp(0.5, 2.0, Power(-0.5))).holds
    assert calderon_condition(sp(0.5, 2.0)).holds


def test_extrapolation_monotone_in_s():
    s = sp(0.5, 2.0, Power(0.3))
    vals = [extrapolation_condition(s, 2.0, t, levels=1).constant.lower for t in (1.1, 1.5, 3.0)]
    assert vals[0] <= vals[1] <= vals[2]
    assert extrapolation_condition(s, 2.0, 1.1).holds
    with pytest.raises(ValueError):
        extrapolation_condition(s, 3.0, 1.1)
    with pytest.raises(ValueError):
        extrapolation_condition(s, 2.0, 1.0)


def test_extrapolation_fails_at_left_endpoint():
    assert not extrapolation_condition(sp(0.5, 2.0, Power(-0.5)), 2.0, 1.05).holds


def test_m0_norm_at_least_one():
    e = operator_norm_estimate(OperatorTag("m0"), sp(0.5, 2.0), levels=2)
    assert e.lower >= 1.0


@pytest.mark.parametrize("op,scope", [("m0", GLOBAL), ("mloc", LOCAL)])
def test_witness_reuse_gives_necessity(op, scope):
    s = sp(0.5, 2.0, Power(0.2), scope=scope)
    tag = OperatorTag(op)
    cond = condition_for(tag, s, levels=2)
    est = operator_norm_estimate(tag, s, levels=2, condition=cond)
    assert cond.constant.lower <= est.lower * (1 + 1e-9)


def test_matching_families():
    assert matching_family(OperatorTag("m0")).kind == "centered"
    assert matching_family(OperatorTag("mloc")).kind == "local"
    assert matching_family(OperatorTag("hl")).kind == "all"
    fam = default_test_family(sp(0.5, 2.0))
    assert CharBall(Ball(0.0, 1.0)) in fam


def test_report_serializes():
    rep = morrey_ap_constant(sp(0.5, 2.0, Power(0.2)), CENTERED)
    d = rep.to_dict()
    assert d["verdict"] == rep.verdict and len(d["refinement_trace"]) == 3
    assert rep.to_csv().splitlines()[0] == "c,r,lower,upper"
