import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.estimate import DIVERGING, FINITE, INCONCLUSIVE, Estimate, classify


def test_verdict_rule():
    assert classify([1.0, 1.5, 1.504]) == FINITE
    assert classify([1.0, 1.5, 2.0]) == DIVERGING
    assert classify([1.0, 1.2, 1.5]) == INCONCLUSIVE
    assert classify([1.0, math.inf]) == DIVERGING
    assert classify([3.0]) == INCONCLUSIVE
    assert classify([]) == INCONCLUSIVE


@given(st.lists(st.floats(0.01, 100), min_size=2, max_size=6))
def test_verdict_is_scale_invariant(trace):
    assert classify(trace) == classify([7.0 * v for v in trace])


def test_estimate_contract():
    e = Estimate.from_trace([1.0, 1.0, 1.0], upper=2.0)
    assert e.stabilized and e.lower == 1.0 and e.two_sided
    with pytest.raises(ValueError):
        Estimate(3.0, 2.0)
    s = e.scaled(2.0)
    assert (s.lower, s.upper, s.trace) == (2.0, 4.0, (2.0, 2.0, 2.0))
    assert e.to_dict()["verdict"] == FINITE
