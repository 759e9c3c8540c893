"""Classical weight-class constants: A_p over ball families, reverse doubling, reverse Holder."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimate import DIVERGING, Estimate, classify
from .geometry import Ball, BallFamily
from .quadrature import Power, Weight

DEFAULT_LEVELS = 3


@dataclass(frozen=True)
class WeightClassReport:
    constant_estimate: Estimate
    witnessing_ball: Ball | None
    family: BallFamily
    verdict: str
    structural: bool = False

    @property
    def constant(self) -> float:
        return self.constant_estimate.lower

    def to_dict(self) -> dict:
        b = self.witnessing_ball
        return {
            "constant": self.constant,
            "witness": None if b is None else b.to_dict(),
            "verdict": self.verdict,
            "refinement_trace": list(self.constant_estimate.trace),
        }


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a sampled structural check (RD or RH)."""

    holds: bool
    constant: float
    witness: tuple
    trace: tuple[float, ...]
    verdict: str
    structural: bool = False

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "constant": self.constant,
            "witness": [b.to_dict() if hasattr(b, "to_dict") else b for b in self.witness],
            "trace": list(self.trace),
            "verdict": self.verdict,
        }


def _ess_inf_many(w: Weight, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if isinstance(w, Power):
        u, v = a - w.center, b - w.center
        straddle = (u <= 0) & (v >= 0)
        near = np.where(straddle, 0.0, np.minimum(np.abs(u), np.abs(v)))
        far = np.maximum(np.abs(u), np.abs(v))
        with np.errstate(divide="ignore"):
            if w.beta > 0:
                return near**w.beta
            if w.beta < 0:
                return far**w.beta
        return np.ones_like(a)
    return np.array([w.ess_inf(x, y) for x, y in zip(a, b)])


def ap_values(w: Weight, p: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-ball A_p quantity (w(B)/|B|)^(1/p) (sigma(B)/|B|)^(1/p'); inf if sigma is not integrable."""
    size = b - a
    wb = w.measure(a, b) / size
    if p == 1.0:
        with np.errstate(divide="ignore"):
            return wb / _ess_inf_many(w, a, b)
    pd = p / (p - 1.0)
    sig = w.pow(1.0 - pd).measure(a, b) / size
    return wb ** (1.0 / p) * sig ** (1.0 / pd)


def _balls_arrays(balls):
    a = np.array([x.left for x in balls])
    b = np.array([x.right for x in balls])
    return a, b


def _anchored_balls(w: Weight, family: BallFamily, level: int) -> list[Ball]:
    """Balls B(s + rho r, r) about a singular point s on a linear rho grid in [0, 2].

    Extremal balls for power-type weights sit at a fixed ratio rho of offset to
    radius, which a geometric center grid approaches only slowly.
    """
    sing = w.singular_points()
    if family.kind != "all" or len(sing) != 1:
        return []
    s = sing[0]
    rhos = np.linspace(0.0, 2.0, 16 * 2**level + 1)
    return [Ball(s + sg * float(rho * r), float(r)) for r in family.refined(level).radii() for rho in rhos for sg in (-1.0, 1.0)]


def ap_constant(w: Weight, p: float, family: BallFamily, levels: int = DEFAULT_LEVELS) -> WeightClassReport:
    """sup over the family of the A_p quantity, traced over grid refinements.

    A ball on which w^(1-p') is not integrable makes the constant infinite
    structurally; the report then carries that ball as witness.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    trace, wit = [], None
    for lv in range(levels):
        balls = family.refined(lv).enumerate() + _anchored_balls(w, family, lv)
        a, b = _balls_arrays(balls)
        vals = ap_values(w, p, a, b)
        k = int(np.argmax(vals))
        trace.append(float(vals[k]))
        wit = balls[k]
        if math.isinf(trace[-1]):
            est = Estimate.from_trace(trace, witness=wit, flags=("structural",))
            return WeightClassReport(est, wit, family, DIVERGING, structural=True)
    est = Estimate.from_trace(trace, witness=wit)
    return WeightClassReport(est, wit, family, est.verdict)


def _nested_pairs(family: BallFamily, centered_only: bool, anchor: float | None = None, level: int = 0):
    """Nested pairs B1 in B2 (B1 = B2 allowed): B2 from the family, B1 with radius on the grid up to r2.

    With an anchor (a singular point of the weight) the pairs also include
    configurations placed relative to it, where power-type sups are attained.
    """
    radii = family.radii()
    if centered_only:
        i, j = np.triu_indices(radii.size, 0)
        r1, r2 = radii[i], radii[j]
        z = np.zeros_like(r1)
        return z, r1, z, r2
    balls = family.enumerate()
    c2 = np.array([x.center for x in balls])
    R2 = np.array([x.radius for x in balls])
    out = [[], [], [], []]
    for r in radii:
        sel = R2 >= r
        if not sel.any():
            continue
        cc, rr = c2[sel], R2[sel]
        slack = rr - r
        for c1 in (cc, cc - slack, cc + slack, np.clip(0.0, cc - slack, cc + slack)):
            out[0].append(c1)
            out[1].append(np.full(c1.shape, r))
            out[2].append(cc)
            out[3].append(rr)
    if anchor is not None:
        # B2 = B(s + rho r2, r2) on a linear rho grid; B1 of radius t r2 with t over many decades,
        # aligned to either edge of B2, at s, or with s just inside B1 and the edge of B2
        ppd = family.points_per_decade
        fine = 8 * 2**level
        t = np.unique(np.concatenate([10.0 ** (-np.arange(0, 2 * fine + 1) / fine), 10.0 ** (-np.arange(0, ppd * (12 + 4 * level) + 1) / ppd)]))
        rhos = np.linspace(0.0, 2.0, 8 * 2**level + 1)
        R, T, P, S = (x.ravel() for x in np.meshgrid(family.radii(), t, rhos, (-1.0, 1.0), indexing="ij"))
        cc, rr, r1 = anchor + S * P * R, R, T * R
        slack = rr - r1
        for c1 in (cc - slack, cc + slack, np.clip(anchor, cc - slack, cc + slack)):
            out[0].append(c1)
            out[1].append(r1)
            out[2].append(cc)
            out[3].append(rr)
        R, T, S = (x.ravel() for x in np.meshgrid(family.radii(), t, (-1.0, 1.0), indexing="ij"))
        out[0].append(np.full(R.shape, anchor))
        out[1].append(T * R)
        out[2].append(anchor + S * (R - T * R))
        out[3].append(R)
    return tuple(np.concatenate(x) for x in out)


def reverse_doubling_check(
    w: Weight, delta: float, family: BallFamily, centered_only: bool = False, levels: int = DEFAULT_LEVELS
) -> CheckResult:
    """sup over sampled nested pairs of [w(B1)/w(B2)] (|B2|/|B1|)^delta, traced over refinements."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    sing = w.singular_points()
    anchor = sing[0] if len(sing) == 1 else None
    trace, wit = [], ()
    for lv in range(levels):
        c1, r1, c2, r2 = _nested_pairs(family.refined(lv), centered_only, anchor, lv)
        w1 = w.measure(c1 - r1, c1 + r1)
        w2 = w.measure(c2 - r2, c2 + r2)
        vals = (w1 / w2) * (r2 / r1) ** delta
        k = int(np.argmax(vals))
        trace.append(float(vals[k]))
        wit = (Ball(float(c1[k]), float(r1[k])), Ball(float(c2[k]), float(r2[k])))
    v = classify(trace)
    return CheckResult(v == "finite-stable", trace[-1], wit, tuple(trace), v)


def rd_holds_closed_form(w: Weight, delta: float, centered_only: bool = False) -> bool | None:
    """Exact RD_delta membership for power weights: |x|^beta is RD_delta iff delta <= min(1, 1+beta)."""
    if isinstance(w, Power):
        e = 1.0 + w.beta if centered_only and w.center == 0.0 else min(1.0, 1.0 + w.beta)
        return delta <= e + 1e-12
    return None


def reverse_holder_check(w: Weight, sigma: float, family: BallFamily, levels: int = DEFAULT_LEVELS) -> CheckResult:
    """sup over the family of (avg_B w^sigma)^(1/sigma) / avg_B w."""
    if not sigma > 1:
        raise ValueError("sigma must exceed 1")
    ws = w.pow(sigma)
    trace, wit = [], ()
    for lv in range(levels):
        balls = family.refined(lv).enumerate()
        a, b = _balls_arrays(balls)
        num = (ws.measure(a, b) / (b - a)) ** (1.0 / sigma)
        den = w.measure(a, b) / (b - a)
        vals = num / den
        k = int(np.argmax(vals))
        trace.append(float(vals[k]))
        wit = (balls[k],)
        if math.isinf(trace[-1]):
            return CheckResult(False, math.inf, wit, tuple(trace), DIVERGING, structural=True)
    v = classify(trace)
    return CheckResult(v == "finite-stable", trace[-1], wit, tuple(trace), v)


def estimate_rd_exponent(w: Weight, span: float = 1e6) -> float:
    """Sampled RD exponent: min over nested concentric and boundary pairs of log(w(B2)/w(B1)) / log(r2/r1)."""
    rs = np.geomspace(1e-6, 1e6, 49)
    cs = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 25), -np.geomspace(1e-6, 1e6, 25)])
    best = 1.0
    for c in cs:
        r2 = rs
        r1 = rs / span
        # B1 must be resolvable in floating point next to its center
        ok = r1 > 1e-9 * (abs(c) + r2)
        if not ok.any():
            continue
        r1, r2 = r1[ok], r2[ok]
        for c1 in (np.full_like(r2, c), c - (r2 - r1), c + (r2 - r1)):
            w1 = w.measure(c1 - r1, c1 + r1)
            w2 = w.measure(c - r2, c + r2)
            with np.errstate(divide="ignore"):
                e = np.log(w2 / w1) / math.log(span)
            best = min(best, float(np.min(e)))
    return best
