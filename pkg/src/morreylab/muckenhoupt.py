"""Muckenhoupt-Morrey type conditions and empirical operator norms.

For weights homogeneous about the origin (powers |x|^beta) every per-ball
quantity is dilation invariant, so a ball B(c, r) is represented by
B(rho, 1) with rho = |c|/r. Suprema are then located by a scan over rho at a
cheap resolution and traced over refinements at the maximizers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .duality import (
    BallValues,
    DegenerateCandidates,
    alpha_star,
    ball_values,
    dual_m0_char,
)
from .estimate import DIVERGING, FINITE, Estimate, classify
from .geometry import Ball, BallFamily, Resolution, _dedupe, geometric_grid
from .morrey import (
    DEFAULT_RES,
    PairSampler,
    RadialSampler,
    SpaceParams,
    char_norm,
    default_t_grid,
    level_set,
    morrey_norm,
    weak_morrey_norm,
)
from .operators import (
    OperatorTag,
    calderon_func,
    lower_envelope,
    m0_func,
    mloc_func,
)
from .quadrature import CharBall, Func, TabulatedGrid, WeightedChar

SCAN_RES = Resolution(ppd=4, depth=16.0, fine_decades=2.0, edge_decades=1.0)
RHO_RANGE = (1e-3, 1e4)
RHO_PPD = 1
TOP_K = 1
DEFAULT_LEVELS = 3


@dataclass(frozen=True)
class BallRow:
    c: float
    r: float
    lower: float
    upper: float | None
    char: float
    dual: float
    dual_upper: float | None
    candidate: str

    @classmethod
    def of(cls, bv: BallValues) -> "BallRow":
        b = bv.ball
        # the char norm has no certified upper bound, so per-ball intervals are one-sided
        return cls(b.center, b.radius, bv.a_value, None, bv.char, bv.dual, bv.dual_upper, bv.best)


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    constant: Estimate
    family: BallFamily | None
    verdict: str
    witnesses: tuple[BallRow, ...] = ()
    level_values: tuple[tuple[BallValues, ...], ...] = field(default=(), repr=False)
    structural: bool = False

    @property
    def witness(self) -> Ball | None:
        w = self.constant.witness
        return w if isinstance(w, Ball) else None

    @property
    def holds(self) -> bool:
        return self.verdict == FINITE

    def to_dict(self) -> dict:
        w = self.witness
        return {
            "condition": self.condition,
            "constant": self.constant.lower,
            "upper": self.constant.upper,
            "witness": None if w is None else w.to_dict(),
            "verdict": self.verdict,
            "refinement_trace": list(self.constant.trace),
            "flags": list(self.constant.flags),
            "family": None if self.family is None else self.family.to_dict(),
            "balls": [row.__dict__ for row in self.witnesses],
        }

    def csv_rows(self) -> list[dict]:
        return [{"c": r.c, "r": r.r, "lower": r.lower, "upper": "" if r.upper is None else r.upper} for r in self.witnesses]

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.DictWriter(buf, fieldnames=["c", "r", "lower", "upper"])
        wr.writeheader()
        wr.writerows(self.csv_rows())
        return buf.getvalue()


# --------------------------------------------------------------------------
# target balls


def homogeneous(sp: SpaceParams) -> bool:
    return bool(sp.w.is_homogeneous)


def rho_grid(family: BallFamily, level: int) -> np.ndarray:
    """Representative ratios |c|/r of the family for dilation-invariant problems."""
    ppd = RHO_PPD * 2**level
    lo, hi = RHO_RANGE
    k = family.kind
    if k == "centered":
        return np.array([0.0])
    if k == "boundary":
        return np.array([4.0])
    if k == "offcenter":
        g = geometric_grid(4.0, hi, ppd)
        return g[g > 4.0]
    if k == "local":
        t = 1.0 / family.kappa
        g = geometric_grid(t, hi, ppd)
        return g[g > t]
    return np.concatenate([[0.0], geometric_grid(lo, hi, ppd)])


def target_balls(sp: SpaceParams, family: BallFamily, level: int) -> list[Ball]:
    if homogeneous(sp):
        return [Ball(float(r), 1.0) for r in rho_grid(family, level)]
    return family.refined(level).enumerate()


def _safe_values(sp: SpaceParams, b: Ball, res: Resolution) -> BallValues | None:
    try:
        return ball_values(sp, b, res)
    except DegenerateCandidates:
        return None


def _value(bv: BallValues | None) -> float:
    if bv is None:
        return 0.0
    v = bv.a_value
    return math.inf if math.isnan(v) else v


def _scan(sp: SpaceParams, family: BallFamily, level: int) -> list[Ball]:
    """Locate the maximizing balls at a cheap resolution."""
    balls = target_balls(sp, family, level)
    vals = np.array([_value(_safe_values(sp, b, SCAN_RES)) for b in balls])
    order = np.argsort(-vals, kind="stable")
    keep = [balls[i] for i in order[:TOP_K]]
    if homogeneous(sp) and len(balls) > 2 and np.isfinite(vals[order[0]]):
        k = int(order[0])
        rhos = np.array([b.center for b in balls])
        if 0 < k < len(balls) - 1 and rhos[k - 1] > 0:
            lo, hi = math.log(rhos[k - 1]), math.log(rhos[k + 1])
            opt = minimize_scalar(
                lambda t: -_value(_safe_values(sp, Ball(math.exp(t), 1.0), SCAN_RES)),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-3, "maxiter": 12},
            )
            keep.append(Ball(float(math.exp(opt.x)), 1.0))
        if family.kind == "all":
            keep += [Ball(0.0, 1.0), Ball(1.0, 1.0)]
    return sorted(set(keep))


def morrey_ap_constant(
    sp: SpaceParams,
    family: BallFamily,
    levels: int = DEFAULT_LEVELS,
    res: Resolution = DEFAULT_RES,
) -> ConditionReport:
    """sup_B ||chi_B|| ||chi_B||' / |B| over the family, as a refinement-traced lower bound.

    The char norm has no certified upper bound, so the interval is one-sided.
    """
    targets = _scan(sp, family, levels - 1)
    trace, per_level, wit = [], [], None
    for lv in range(levels):
        r = res.refined(lv)
        vals = tuple(v for v in (_safe_values(sp, b, r) for b in targets) if v is not None)
        if not vals:
            raise DegenerateCandidates("no target ball produced a finite dual estimate")
        per_level.append(vals)
        k = int(np.argmax([_value(v) for v in vals]))
        trace.append(_value(vals[k]))
        wit = vals[k].ball
        if math.isinf(trace[-1]):
            est = Estimate.from_trace(trace, witness=wit, flags=("one-sided", "structural"))
            return ConditionReport("A(M^p(phi))", est, family, DIVERGING, tuple(BallRow.of(v) for v in vals), tuple(per_level), True)
    est = Estimate.from_trace(trace, witness=wit, flags=("one-sided",))
    rows = tuple(BallRow.of(v) for v in per_level[-1])
    return ConditionReport("A(M^p(phi))", est, family, est.verdict, rows, tuple(per_level))


# --------------------------------------------------------------------------
# Calderon and extrapolation conditions


def _centered_targets(sp: SpaceParams, family: BallFamily | None) -> list[Ball]:
    if homogeneous(sp) or family is None:
        return [Ball(0.0, 1.0)]
    return [Ball(0.0, float(r)) for r in family.radii()]


def _dyadic_condition(name, sp_char, sp_dual, targets, s, target, levels, res, family) -> ConditionReport:
    per_ball = []
    for b in targets:
        ch = char_norm(b, sp_char, res, levels)
        du = dual_m0_char(b, sp_dual, s=s, target=target, res=res, levels=levels)
        tr = [c * d / b.measure for c, d in zip(ch.trace, du.trace)]
        per_ball.append((b, tr, du))
    trace = [max(t[1][lv] for t in per_ball) for lv in range(levels)]
    k = int(np.argmax([t[1][-1] for t in per_ball]))
    b, _, du = per_ball[k]
    fails = any("condition-fails" in t[2].flags for t in per_ball)
    flags = ["one-sided"] + (["condition-fails"] if fails else [])
    est = Estimate.from_trace(trace, witness=b, flags=flags)
    verdict = DIVERGING if fails else est.verdict
    rows = tuple(
        BallRow(bb.center, bb.radius, tr[-1], None, math.nan, d.lower, d.upper, "dyadic") for bb, tr, d in per_ball
    )
    return ConditionReport(name, est, family, verdict, rows)


def calderon_condition(
    sp: SpaceParams,
    family: BallFamily | None = None,
    levels: int = DEFAULT_LEVELS,
    res: Resolution = DEFAULT_RES,
) -> ConditionReport:
    """sup over centered B of ||chi_B|| ||M0 chi_B||' / |B|."""
    fam = family if family is not None else BallFamily("centered")
    return _dyadic_condition("calderon", sp, sp, _centered_targets(sp, fam), 1.0, "m0", levels, res, fam)


def extrapolation_condition(
    sp: SpaceParams,
    q: float,
    s: float,
    family: BallFamily | None = None,
    levels: int = DEFAULT_LEVELS,
    res: Resolution = DEFAULT_RES,
) -> ConditionReport:
    """sup_B ||chi_B||_{M^q} ||(M chi_B)^(1/s)||'_{M^q} / |B|.

    Global scope samples B(rho, 1) for rho in {0, 1, 4}; local scope uses centered balls.
    """
    if not 1.0 <= q <= sp.p:
        raise ValueError("need 1 <= q <= p")
    if not s > 1.0:
        raise ValueError("need s > 1")
    spq = sp.with_p(q)
    if sp.is_local:
        targets = _centered_targets(sp, family)
    elif homogeneous(sp):
        targets = [Ball(0.0, 1.0), Ball(1.0, 1.0), Ball(4.0, 1.0)]
    else:
        targets = (family or BallFamily("all")).enumerate()
    return _dyadic_condition("extrapolation", spq, spq, targets, s, "hl", levels, res, family)


# --------------------------------------------------------------------------
# operator norms

NORM_FAMILY = BallFamily("all", r_min=1e-4, r_max=1e4, c_max=1e4, points_per_decade=2)
NORM_FAMILY_LOCAL = BallFamily("centered", r_min=1e-4, r_max=1e4, points_per_decade=4)
ENVELOPE_PPD = 128
ENVELOPE_DECADES = 5


def matching_family(op: OperatorTag) -> BallFamily:
    """Ball family whose averages the operator dominates pointwise."""
    if op.name in ("m0", "calderon"):
        return BallFamily("centered")
    if op.name == "mloc":
        return BallFamily("local", kappa=op.kappa)
    return BallFamily("all")


def default_test_family(sp: SpaceParams, op: OperatorTag | None = None) -> list[Func]:
    """Centered indicators, boundary indicators and the power candidate w^alpha* chi_B."""
    radii = [1.0] if homogeneous(sp) else [10.0**k for k in range(-4, 5)]
    fam: list[Func] = [CharBall(Ball(0.0, r)) for r in radii]
    fam += [CharBall(Ball(4.0, 1.0))]
    a = alpha_star(sp)
    w = sp.w
    if a != 0.0 and not (getattr(w, "beta", None) == 0.0):
        fam.append(WeightedChar(w.pow(a), -1.0, 1.0, 1e-12, 0.0))
    return fam


def _exact_output(op: OperatorTag, f: Func) -> Func | None:
    if isinstance(f, CharBall) and f.ball.center == 0.0:
        if op.name == "m0":
            return m0_func(f)
        if op.name == "calderon":
            return calderon_func(f)
        if op.name == "mloc":
            return mloc_func(f, op.kappa)
    return None


def _envelope_radii(f: Func, level: int) -> np.ndarray:
    lo, hi = f.support()
    scale = max(abs(lo), abs(hi))
    ppd = ENVELOPE_PPD * (2 + level) // 2
    d = ENVELOPE_DECADES + level
    g = geometric_grid(scale * 10.0**-d, scale * 10.0**d, ppd)
    br = [abs(x) for x in f.breakpoints() if math.isfinite(x) and x != 0]
    return np.unique(np.concatenate([g, br]))


def operator_output(op: OperatorTag, f: Func, level: int = 0) -> Func:
    """Exact output when symbolic, else a certified lower envelope on a level-dependent grid."""
    out = _exact_output(op, f)
    if out is not None:
        return out
    tag = op
    if op.name == "hilbert":
        tag = OperatorTag("hilbert", op.kappa, op.eps * 10.0 ** (-2 * level))
    return lower_envelope(tag, f, _envelope_radii(f, level))


def _witness_values(op: OperatorTag, condition: ConditionReport | None, level: int) -> tuple[float, Ball | None]:
    """Thm-3.1 witness: op f >= avg_B f on B gives ||op|| >= ||chi_B|| int_B f / (|B| ||f||)."""
    if condition is None or level >= len(condition.level_values):
        return 0.0, None
    fam = matching_family(op)
    best, wit = 0.0, None
    for bv in condition.level_values[level]:
        if fam.admits(bv.ball) or fam.kind == "all":
            v = _value(bv)
            if v > best:
                best, wit = v, bv.ball
    return best, wit


NORM_PPD = 8


def _norm_points(f: Func, level: int) -> np.ndarray:
    """Nonnegative sample points adapted to a test function: geometric about 0 and about its breakpoints."""
    lo, hi = f.support()
    s = max(abs(lo), abs(hi))
    ppd = NORM_PPD * (2 + level) // 2
    pts = [np.array([0.0]), geometric_grid(s * 1e-6, s * 1e4, ppd)]
    off = geometric_grid(s * 1e-4, s, ppd)
    for e in f.breakpoints():
        if math.isfinite(e) and e != 0:
            pts += [np.array([abs(e)]), abs(e) + off, np.abs(abs(e) - off)]
    p = np.unique(np.concatenate(pts))
    return _dedupe(p)


def _indicator_of_level(g: Func, t: float, lo: float, hi: float) -> TabulatedGrid | None:
    if isinstance(g, TabulatedGrid):
        return TabulatedGrid(g.edges, tuple((np.abs(g.v) >= t).astype(float)))
    iv = level_set(g, t, lo, hi)
    if not iv:
        return None
    edges, vals = [iv[0][0]], []
    for k, (u, v) in enumerate(iv):
        if k:
            vals.append(0.0)
            edges.append(u)
        vals.append(1.0)
        edges.append(v)
    return TabulatedGrid(tuple(edges), tuple(vals))


def sampled_norm(g: Func, sp: SpaceParams, pos: np.ndarray, weak: bool = False) -> float:
    """Norm of g over the intervals with endpoints in +-pos (centered balls of radii pos for local scope)."""
    if sp.is_local:
        smp = RadialSampler(sp, pos[pos > 0])
    else:
        smp = PairSampler(sp, np.unique(np.concatenate([-pos, pos])))
    if not weak:
        return smp.norm(g)[0]
    lo, hi = -float(pos.max()), float(pos.max())
    best = 0.0
    for t in default_t_grid(g, lo, hi):
        ind = _indicator_of_level(g, float(t), lo, hi)
        if ind is None:
            continue
        v, _ = smp.norm(ind)
        best = max(best, float(t) * v)
    return best


def operator_norm_estimate(
    op: OperatorTag,
    sp: SpaceParams,
    test_family: list[Func] | None = None,
    weak: bool = False,
    levels: int = DEFAULT_LEVELS,
    res: Resolution = DEFAULT_RES,
    norm_family: BallFamily | None = None,
    condition: ConditionReport | None = None,
) -> Estimate:
    """Lower-bound trace of ||op|| over M^p(phi, w) (weak-type output norm if ``weak``).

    Per level: the best ratio ||op f|| / ||f|| over the test family, and, when a
    condition report is supplied, the necessity witnesses on its balls. Both
    norms are sups over the family grid and over intervals adapted to f.
    """
    tests = default_test_family(sp, op) if test_family is None else list(test_family)
    if not tests:
        raise DegenerateCandidates("empty test family")
    nf = norm_family or (NORM_FAMILY_LOCAL if sp.is_local else NORM_FAMILY)
    trace, wits = [], []
    for lv in range(levels):
        fam, r = nf.refined(lv), res.refined(lv)
        best, wit = _witness_values(op, condition, lv)
        for f in tests:
            pos = _norm_points(f, lv)
            den = max(morrey_norm(f, sp, fam, levels=1, res=r).lower, sampled_norm(f, sp, pos))
            if not (den > 0 and math.isfinite(den)):
                continue
            g = operator_output(op, f, lv)
            if weak:
                num = max(weak_morrey_norm(g, sp, fam, levels=1, res=r).lower, sampled_norm(g, sp, pos, weak=True))
            else:
                num = max(morrey_norm(g, sp, fam, levels=1, res=r).lower, sampled_norm(g, sp, pos))
            if num / den > best:
                best, wit = num / den, f
        trace.append(best)
        wits.append(wit)
    if not any(v > 0 for v in trace):
        raise DegenerateCandidates("no test function with finite nonzero norm")
    return Estimate.from_trace(trace, witness=wits[-1])


def condition_for(op: OperatorTag, sp: SpaceParams, levels: int = DEFAULT_LEVELS, res: Resolution = DEFAULT_RES) -> ConditionReport:
    """The Muckenhoupt-Morrey constant over the operator's matching family."""
    return morrey_ap_constant(sp, matching_family(op), levels, res)


def verdict_of(e: Estimate | ConditionReport) -> str:
    return e.verdict if isinstance(e, ConditionReport) else classify(e.trace)
