import csv
import json
import math

import numpy as np
import pytest

from morreylab.experiments import (
    ConfigError,
    ExperimentSpec,
    asymptotic_log_slope,
    log_window_values,
    m0_constancy_ratio,
    power_range,
    run,
    spec_for,
    sweep_betas,
    write_result,
)
from morreylab.geometry import Ball
from morreylab.operators import hl_maximal, m0, m_loc
from morreylab.quadrature import CharBall


def test_power_range_examples():
    s = power_range("samko", 0.5, 2.0)
    assert (s.lo, s.hi, s.lo_closed) == (-0.5, 1.5, True)
    assert s.contains(-0.5) and not s.contains(1.5)
    k = power_range("komori_shirai", 0.5, 2.0)
    assert (k.lo, k.hi, k.lo_closed) == (-1.0, 3.0, False)
    pt = power_range("pt", 0.5, 2.0)
    assert pt.lo == -0.5 and math.isinf(pt.hi) and not pt.contains(-0.5)
    with pytest.raises(ConfigError):
        power_range("nope", 0.5, 2.0)


def test_sweep_points():
    assert sweep_betas(power_range("samko", 0.5, 2.0)) == [-0.7, -0.5, -0.3, 0.5, 1.3, 1.5, 1.7]
    assert sweep_betas(power_range("pt", 0.5, 2.0)) == [-0.7, -0.5, -0.3, 0.5, 3.5]


def test_spec_validation():
    ExperimentSpec()
    for bad in ({"lambdas": [1.5]}, {"ps": [0.5]}, {"presets": ["x"]}, {"band": [2, 1]}, {"seed": -1}, {"levels": 0}, {"bogus": 1}):
        with pytest.raises(ConfigError):
            ExperimentSpec.from_dict(bad)
    s = ExperimentSpec.from_dict({"lambdas": [0.5], "ps": [2], "band": [0.1, 10]})
    assert ExperimentSpec.from_dict(s.to_dict()) == s


def test_far_beta_diverges():
    spec = spec_for("ranges", ExperimentSpec(), {"presets": ["samko"], "lambdas": [0.5], "ps": [2.0], "betas": [10.0, 0.5]})
    res = run("ranges", spec)
    verdicts = {r["beta"]: r["numeric"] for r in res.rows}
    assert verdicts[10.0] == "unbounded" and verdicts[0.5] == "bounded"
    assert res.passed


def test_window_values_grow_like_log():
    lam, p = 0.25, 2.0
    ks, v = log_window_values(lam, p, 20)
    assert np.all(np.diff(v) > 0)
    slope = np.polyfit(ks, v, 1)[0]
    assert 0.5 * math.log(2) <= slope <= 2 * math.log(2)
    assert slope == pytest.approx(asymptotic_log_slope(lam, p), rel=1e-2)


def test_counterexample_runs_clean():
    res = run("counterexample", spec_for("counterexample", ExperimentSpec()))
    assert res.passed
    assert "conclusion" in res.summary


def test_decomposition_hand_values():
    chi = CharBall(Ball(0, 1))
    M, M0, Ml = hl_maximal(chi, 2.0), m0(chi, 2.0), m_loc(chi, 2.0)
    assert (M, M0, Ml) == pytest.approx((2 / 3, 1 / 2, 0.0))
    assert M / (M0 + Ml) == pytest.approx(4 / 3)


def test_m0_constancy_on_offcenter_balls():
    chi = CharBall(Ball(0, 1))
    for c, r in ((5.0, 1.0), (-9.0, 2.0), (50.0, 0.3)):
        assert m0_constancy_ratio(chi, Ball(c, r)) <= 2.0


def test_decomposition_is_deterministic():
    spec = spec_for("decomposition", ExperimentSpec(), {"n_random": 4, "seed": 11})
    a, b = run("decomposition", spec), run("decomposition", spec)
    assert a.rows == b.rows and a.passed


def test_write_result(tmp_path):
    res = run("counterexample", spec_for("counterexample", ExperimentSpec(), {"k_max": 6}))
    csv_path, json_path = write_result(res, str(tmp_path))
    rows = list(csv.DictReader(open(csv_path)))
    assert len(rows) == 6 and "window_value" in rows[0] and "witness" in rows[0]
    assert json.load(open(json_path))["name"] == "counterexample"
