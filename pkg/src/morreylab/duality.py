"""Koethe dual norms: candidate-family lower bounds and closed-form upper bounds.

For g supported near a ball B, ||g||' >= int f g / ||f|| for every candidate f.
Candidates follow the necessity arguments: powers w^alpha chi_B (truncated
around the singular point at the current depth), w^(1-p') chi_B, and
indicators of sub-balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .estimate import Estimate
from .geometry import Ball, Resolution
from .morrey import DEFAULT_RES, SpaceParams, phi_value, support_sampler
from .quadrature import (
    UNIT,
    CharBall,
    Func,
    PiecewisePower,
    PiecewisePowerLog,
    Power,
    PowerTimes,
    Segment,
    Weight,
    WeightedChar,
    interval_integrals,
    pairing,
)
from .weights import _ess_inf_many


class DegenerateCandidates(ValueError):
    """No candidate produced a finite nonzero norm."""


def alpha_star(sp: SpaceParams) -> float:
    l1, l2, n, p = sp.phi.lambda1, sp.phi.lambda2, sp.phi.n, sp.p
    return (l2 - n) / (n * (p - 1) + l1 + l2)


def alpha_grid(sp: SpaceParams) -> np.ndarray:
    """Nine exponents bracketing alpha* log-symmetrically (a linear set if alpha* = 0)."""
    a = alpha_star(sp)
    if a == 0.0:
        return np.array([-1.0, -0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 1.0])
    return a * 2.0 ** (np.arange(-4, 5) / 4.0)


def _is_flat(w: Weight) -> bool:
    return isinstance(w, Power) and w.beta == 0.0


def _singular_in(w: Weight, b: Ball) -> float | None:
    for s in (*w.singular_points(), 0.0):
        if b.left <= s <= b.right and (s in w.singular_points()):
            return s
    return None


def _needs_hole(w: Weight, a: float, p: float) -> bool:
    """w^a chi_B needs truncation unless both w^a and w^(ap+1) are integrable at the singular point."""
    beta = w.degree
    if beta is None:
        return True
    return beta * a <= -1.0 or beta * (a * p + 1.0) <= -1.0


@dataclass(frozen=True)
class DualCandidateFamily:
    """Generators of test functions for a dual norm near a ball."""

    alphas: tuple[float, ...] | None = None
    sigma: bool = True
    sub_ball_decades: tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    edge_decades: tuple[int, ...] = (1, 2)

    def generate(self, sp: SpaceParams, b: Ball, res: Resolution) -> list[tuple[str, Func]]:
        w, r = sp.w, b.radius
        out: list[tuple[str, Func]] = [("chi_B", CharBall(b))]
        s = _singular_in(w, b)
        eps = r * 10.0 ** (-res.depth) if s is not None else 0.0
        hole_at = s if s is not None else 0.0
        if not _is_flat(w):
            alphas = alpha_grid(sp) if self.alphas is None else np.asarray(self.alphas)
            exps = [float(a) for a in alphas if a != 0.0]
            if self.sigma and sp.p > 1:
                exps.append(1.0 - sp.p_dual)
            for a in exps:
                h = eps if _needs_hole(w, a, sp.p) else 0.0
                name = "sigma" if self.sigma and sp.p > 1 and a == exps[-1] else f"w^{a:.4g}"
                out.append((name, WeightedChar(w.pow(a), b.left, b.right, h, hole_at)))
        anchor = s if s is not None else (0.0 if b.left <= 0.0 <= b.right else None)
        if anchor is not None:
            for k in self.sub_ball_decades:
                if k > res.depth:
                    break
                t = r * 10.0 ** (-k)
                lo, hi = max(b.left, anchor - t), min(b.right, anchor + t)
                if hi > lo:
                    out.append((f"chi_E(0,{k})", CharBall(Ball(0.5 * (lo + hi), 0.5 * (hi - lo)))))
        for k in self.edge_decades:
            t = r * 10.0 ** (-k)
            out.append((f"chi_E(L,{k})", CharBall(Ball(b.left + 0.5 * t, 0.5 * t))))
            out.append((f"chi_E(R,{k})", CharBall(Ball(b.right - 0.5 * t, 0.5 * t))))
            if b.center != 0.0:
                out.append((f"chi_E(c,{k})", CharBall(Ball(b.center, t))))
        return out


DEFAULT_CANDIDATES = DualCandidateFamily()


LOG_RANGE = 280.0
DEPTH_SCALE = 50.0


def representable_res(sp: SpaceParams, res: Resolution) -> Resolution:
    """Shrink the sampling depth so that eps**e stays inside double range for every exponent e in play.

    The depth is scaled proportionally, so refinement levels keep growing.
    """
    beta = sp.w.degree
    if beta is None or beta == 0.0:
        return res
    p, pd = sp.p, sp.p_dual
    ex = [1.0 + beta, sp.phi.lambda2 * (1.0 + beta)]
    for a in alpha_grid(sp):
        ex += [beta * (a * p + 1.0) + 1.0, beta * a + 1.0]
    if p > 1:
        ex.append(beta * (1.0 - pd) + 1.0)
    E = max(abs(e) for e in ex)
    c = min(1.0, LOG_RANGE / (E * DEPTH_SCALE))
    return res if c == 1.0 else replace(res, depth=res.depth * c)


@dataclass(frozen=True)
class BallValues:
    """Numeric ||chi_B|| and the best candidate ratio for ||chi_B||' at one resolution."""

    ball: Ball
    char: float
    dual: float
    best: str
    dual_upper: float | None

    @property
    def a_value(self) -> float:
        return self.char * self.dual / self.ball.measure


def ball_values(sp: SpaceParams, b: Ball, res: Resolution, cands: DualCandidateFamily = DEFAULT_CANDIDATES) -> BallValues:
    res = representable_res(sp, res)
    named = cands.generate(sp, b, res)
    holes = {(f.hole_at, f.hole) for _, f in named if isinstance(f, WeightedChar) and f.hole > 0}
    smp = support_sampler(sp, b, res, holes=sorted(holes), support=b)
    char, _ = smp.norm(CharBall(b))
    best, label = 0.0, ""
    nfs = smp.norms([f for _, f in named])
    for (name, f), nf in zip(named, nfs):
        if not (nf > 0 and math.isfinite(nf)):
            continue
        val = float(interval_integrals(f, UNIT, b.left, b.right, 1.0)) / nf
        if val > best:
            best, label = val, name
    if best <= 0:
        raise DegenerateCandidates(f"no candidate with finite nonzero norm for {b}")
    return BallValues(b, char, best, label, dual_char_upper(b, sp))


def dual_norm_lower(
    g: Func,
    sp: SpaceParams,
    cands: list[Func],
    res: Resolution = DEFAULT_RES,
    levels: int = 1,
) -> Estimate:
    """max over candidates f of int |f g| / ||f||."""
    trace, wit = [], None
    for lv in range(levels):
        r = res.refined(lv)
        best = 0.0
        for f in cands:
            lo, hi = f.support()
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("dual candidates must have bounded support")
            smp = support_sampler(sp, Ball(0.5 * (lo + hi), 0.5 * (hi - lo)), r, f.breakpoints())
            nf, _ = smp.norm(f)
            if not (nf > 0 and math.isfinite(nf)):
                continue
            val = pairing(f, g) / nf
            if val > best:
                best, wit = val, f
        trace.append(best)
    if not any(np.isfinite(trace)):
        raise DegenerateCandidates("all candidates degenerate")
    return Estimate.from_trace(trace, witness=wit)


def closed_form_regime(w: Weight) -> bool:
    if isinstance(w, PowerTimes):
        w = w.simplify()
    return isinstance(w, (Power, PiecewisePower))


def dual_char_upper(b: Ball, sp: SpaceParams) -> float | None:
    """Certified upper bound of ||chi_b||' from Holder's inequality.

    p > 1: phi(Q)^(1/p) sigma(b)^(1/p'), sigma = w^(1-p'); p = 1: phi(Q) / ess inf_b w,
    with Q = b for global scope and Q = tilde(b) for local scope. None when infinite.
    """
    w = sp.w
    if not closed_form_regime(w):
        return None
    q = b.tilde() if sp.is_local else b
    ph = phi_value(sp.phi, w, q)
    if sp.p == 1.0:
        m = float(_ess_inf_many(w, np.array([b.left]), np.array([b.right]))[0]) if isinstance(w, Power) else w.ess_inf(b.left, b.right)
        if not m > 0:
            return None
        return ph / m
    pd = sp.p_dual
    sig = float(w.pow(1.0 - pd).measure(b.left, b.right))
    if not math.isfinite(sig):
        return None
    return ph ** (1.0 / sp.p) * sig ** (1.0 / pd)


def dual_char_norm(
    b: Ball,
    sp: SpaceParams,
    res: Resolution = DEFAULT_RES,
    levels: int = 3,
    cands: DualCandidateFamily = DEFAULT_CANDIDATES,
) -> Estimate:
    """[candidate lower bound, Holder upper bound] for ||chi_b||'."""
    trace, best = [], ""
    for lv in range(levels):
        bv = ball_values(sp, b, res.refined(lv), cands)
        trace.append(bv.dual)
        best = bv.best
    up = dual_char_upper(b, sp)
    flags = () if closed_form_regime(sp.w) else ("regime-not-covered",)
    if up is not None and trace[-1] > up:
        # sampled candidate norms are lower bounds of the true norms; never report lower > upper
        flags += ("lower-clipped",)
        trace[-1] = up
    return Estimate.from_trace(trace, witness=best, upper=up, flags=flags)


# --------------------------------------------------------------------------
# dual norms of maximal functions of indicators


def _m_lower_step(b: Ball, s: float, kmax: int) -> PiecewisePowerLog:
    """Step function below M(chi_b)^(1/s): 1 on b and (2/(2^k + 1))^(1/s) on 2^k b minus 2^(k-1) b."""
    c, r = b.center, b.radius
    segs = []

    def add(lo, hi, val):
        # [lo, hi] in x coordinates, mapped to |x| segments by side
        if hi > 0:
            u = max(lo, 0.0)
            if hi > u:
                segs.append(Segment("pos", u, hi, ((val, 0.0, 0.0),)))
        if lo < 0:
            u = max(-hi, 0.0)
            if -lo > u:
                segs.append(Segment("neg", u, -lo, ((val, 0.0, 0.0),)))

    add(b.left, b.right, 1.0)
    for k in range(1, kmax + 1):
        val = (2.0 / (2.0**k + 1.0)) ** (1.0 / s)
        R0, R1 = r * 2.0 ** (k - 1), r * 2.0**k
        add(c - R1, c - R0, val)
        add(c + R0, c + R1, val)
    return PiecewisePowerLog(tuple(segs))


def m0_char_power(b: Ball, s: float) -> PiecewisePowerLog:
    """M0(chi_b)^(1/s) for centered b: 1 on b, (R/|x|)^(1/s) outside."""
    R = b.radius
    return PiecewisePowerLog(
        (Segment("both", 0.0, R, ((1.0, 0.0, 0.0),)), Segment("both", R, math.inf, ((R ** (1.0 / s), -1.0 / s, 0.0),)))
    )


def dyadic_upper(b: Ball, sp: SpaceParams, coeff, kmax: int = 400, rtol: float = 1e-6) -> tuple[float | None, bool]:
    """sum_k coeff(k) * upper(||chi_{2^k b}||'), with a geometric tail bound.

    Returns (value, summable). value is None when a term has no closed-form upper bound.
    """
    terms = []
    for k in range(kmax + 1):
        u = dual_char_upper(b.dilate(2.0**k), sp)
        if u is None:
            return None, True
        terms.append(coeff(k) * u)
        if k >= 6:
            ratios = [terms[i + 1] / terms[i] for i in range(k - 4, k)]
            q = max(ratios)
            if min(ratios) >= 1.0 - 1e-12:
                return math.inf, False
            if q < 1.0:
                tail = terms[-1] * q / (1.0 - q)
                partial = sum(terms)
                if tail < rtol * partial:
                    return partial + tail, True
    return math.inf, False


def dual_m0_char(
    b: Ball,
    sp: SpaceParams,
    s: float = 1.0,
    target: str = "m0",
    res: Resolution = DEFAULT_RES,
    levels: int = 3,
    dilations: int = 12,
) -> Estimate:
    """Two-sided estimate of ||M0(chi_b)^(1/s)||' (target "m0", centered b) or ||M(chi_b)^(1/s)||' (target "hl").

    Lower: candidate ratios against an explicit minorant of the target on the
    dilates 2^k b. Upper: dyadic domination by sum_k a_k chi_{2^k b}; a
    non-summable tail is reported as the flag "condition-fails".
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if target == "m0" and b.center != 0.0:
        raise ValueError("M0 target needs a centered ball")
    trace = []
    wit = None
    for lv in range(levels):
        r = res.refined(lv)
        K = dilations + 2 * lv
        g = m0_char_power(b, s) if target == "m0" else _m_lower_step(b, s, K + 1)
        best = 0.0
        for k in range(K + 1):
            d = b.dilate(2.0**k)
            smp = support_sampler(sp, d, r)
            for name, f in _dilate_candidates(sp, d, r):
                nf, _ = smp.norm(f)
                if not (nf > 0 and math.isfinite(nf)):
                    continue
                val = pairing(f, g) / nf
                if val > best:
                    best, wit = val, (k, name)
        trace.append(best)
    if target == "m0":
        coeff = lambda k: 1.0 if k == 0 else 2.0 ** ((1.0 - k) / s)
    else:
        coeff = lambda k: 1.0 if k == 0 else 2.0 ** ((2.0 - k) / s)
    up, summable = dyadic_upper(b, sp, coeff)
    flags = []
    if not summable:
        flags.append("condition-fails")
        up = None
    if up is None and summable:
        flags.append("one-sided")
    if up is not None and trace[-1] > up:
        flags.append("lower-clipped")
        trace[-1] = up
    return Estimate.from_trace(trace, witness=wit, upper=up, flags=flags)


def _dilate_candidates(sp: SpaceParams, d: Ball, res: Resolution) -> list[tuple[str, Func]]:
    fam = DualCandidateFamily(alphas=(alpha_star(sp),) if alpha_star(sp) != 0 else (), sub_ball_decades=(), edge_decades=())
    return fam.generate(sp, d, res)
