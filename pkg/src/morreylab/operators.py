"""Maximal operators M, M0, M_loc, the Calderon operator S and its kernel twin, truncated Hilbert transform.

Maximal functions are suprema of averages over explicit candidate intervals.
The full operator M reuses the candidate sets of M0 and M_loc, so the
subfamily dominations M >= M0 and M >= M_loc hold exactly in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BallFamily, geometric_grid
from .quadrature import (
    INF,
    UNIT,
    CharBall,
    DivergenceError,
    Func,
    Power,
    PiecewisePowerLog,
    Segment,
    TabulatedGrid,
    adaptive_integral,
    interval_integrals,
)

GRID_PPD = 64


class UndefinedAtOrigin(ValueError):
    pass


NAMES = ("hl", "m0", "mloc", "calderon", "hilbertop", "hilbert")


@dataclass(frozen=True)
class OperatorTag:
    name: str
    kappa: float = 0.25
    eps: float = 1e-3

    def __post_init__(self):
        if self.name not in NAMES:
            raise ValueError(f"unknown operator {self.name!r}; expected one of {NAMES}")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @classmethod
    def from_name(cls, name: str, **kw) -> "OperatorTag":
        return cls(name.lower(), **kw)


def _avg(f: Func, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return interval_integrals(f, UNIT, a, b, 1.0) / (b - a)


def _finite_breaks(f: Func) -> np.ndarray:
    return np.array(sorted({x for x in f.breakpoints() if math.isfinite(x)}), dtype=float)


def _reach(f: Func, scale: float) -> float:
    lo, hi = f.support()
    ext = max(abs(lo), abs(hi))
    return ext if math.isfinite(ext) else scale * 1e8


# --------------------------------------------------------------------------
# M0


def m0_values(f: Func, xs) -> np.ndarray:
    """sup over r >= |x| of the average of |f| on B(0, r), for each x."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    t = np.abs(xs)
    if isinstance(f, CharBall):
        L, R = f.ball.left, f.ball.right
        best = np.zeros_like(t)
        for cand in (t, np.full_like(t, abs(L)), np.full_like(t, abs(R))):
            r = np.maximum(cand, t)
            ok = r > 0
            meas = np.maximum(np.minimum(R, r) - np.maximum(L, -r), 0.0)
            val = np.where(ok, meas / np.where(ok, 2 * r, 1.0), 0.0)
            best = np.maximum(best, val)
        # r -> 0 limit at x = 0
        z = t == 0
        if z.any():
            best[z] = np.maximum(best[z], 1.0 if L < 0 < R else (0.5 if (L == 0 or R == 0) else 0.0))
        return best
    tpos = t[t > 0]
    scale = float(np.max(tpos)) if tpos.size else 1.0
    reach = max(_reach(f, scale), scale)
    lo = float(np.min(tpos)) if tpos.size else reach * 1e-12
    U = np.concatenate([geometric_grid(lo, reach, GRID_PPD), tpos, np.abs(_finite_breaks(f))])
    U = np.unique(U[(U >= lo) & (U <= reach)])
    av = _avg(f, -U, U)
    suff = np.maximum.accumulate(av[::-1])[::-1]
    idx = np.searchsorted(U, np.where(t > 0, t, lo))
    idx = np.clip(idx, 0, U.size - 1)
    return suff[idx]


def m0(f: Func, x: float) -> float:
    return float(m0_values(f, [x])[0])


def m0_func(f: CharBall) -> PiecewisePowerLog:
    """Closed form of M0 chi_B for a centered ball: 1 on B, R/|x| outside."""
    if not (isinstance(f, CharBall) and f.ball.center == 0.0):
        raise ValueError("symbolic M0 output is available for centered indicators only")
    R = f.ball.radius
    return PiecewisePowerLog((Segment("both", 0.0, R, ((1.0, 0.0, 0.0),)), Segment("both", R, INF, ((R, -1.0, 0.0),))))


# --------------------------------------------------------------------------
# M_loc


def _mloc_intervals(f: Func, x: float, kappa: float, ppd: int = GRID_PPD) -> tuple[np.ndarray, np.ndarray]:
    """Closure of the intervals [a, b] containing x > 0 with b < a (1+kappa)/(1-kappa)."""
    q = (1 + kappa) / (1 - kappa)
    br = _finite_breaks(f)
    br = br[br > 0]
    e_a = br[(br >= x / q) & (br <= x)]
    e_b = br[(br >= x) & (br <= q * x)]
    grid = x * 10.0 ** (-np.arange(0, int(math.ceil(math.log10(q) * ppd)) + 1) / ppd)
    A = np.unique(np.concatenate([[x, x / q], e_a, e_b / q, grid[grid >= x / q]]))
    aa, bb = [], []
    for a in A:
        top = q * a
        bs = np.concatenate([[x, top], br[(br >= x) & (br <= top)]])
        g = x * 10.0 ** (np.arange(0, int(math.ceil(math.log10(top / x) * ppd)) + 1) / ppd) if top > x else []
        bs = np.unique(np.concatenate([bs, np.asarray(g)[np.asarray(g) <= top] if len(g) else []]))
        bs = bs[bs >= x]
        aa.append(np.full(bs.shape, a))
        bb.append(bs)
    a = np.concatenate(aa)
    b = np.concatenate(bb)
    keep = b > a
    return a[keep], b[keep]


class _Mirror(Func):
    """f(-x), used to reduce negative evaluation points to positive ones."""

    def __init__(self, f: Func):
        self.f = f

    def breakpoints(self):
        return tuple(sorted(-x for x in self.f.breakpoints()))

    def support(self):
        lo, hi = self.f.support()
        return -hi, -lo


def _mloc_one(f: Func, x: float, kappa: float) -> float:
    if x == 0:
        raise UndefinedAtOrigin("M_loc is not defined at the origin")
    if x > 0:
        a, b = _mloc_intervals(f, x, kappa)
        return float(np.max(_avg(f, a, b)))
    a, b = _mloc_intervals(_Mirror(f), -x, kappa)
    return float(np.max(_avg(f, -b, -a)))


def m_loc_values(f: Func, xs, kappa: float = 0.25) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return np.array([_mloc_one(f, float(x), kappa) for x in xs])


def m_loc(f: Func, x: float, kappa: float = 0.25) -> float:
    return _mloc_one(f, float(x), kappa)


def mloc_func(f: CharBall, kappa: float = 0.25) -> PiecewisePowerLog:
    """Closed form of M_loc chi_B for B = B(0, R), q = (1+kappa)/(1-kappa).

    1 on B; (qR/|x| - 1)/(q - 1) for R < |x| < qR (interval [|x|/q, |x|]); 0 beyond.
    """
    if not (isinstance(f, CharBall) and f.ball.center == 0.0):
        raise ValueError("symbolic M_loc output is available for centered indicators only")
    R = f.ball.radius
    q = (1 + kappa) / (1 - kappa)
    mid = ((q * R / (q - 1.0), -1.0, 0.0), (-1.0 / (q - 1.0), 0.0, 0.0))
    return PiecewisePowerLog((Segment("both", 0.0, R, ((1.0, 0.0, 0.0),)), Segment("both", R, q * R, mid)))


# --------------------------------------------------------------------------
# M


def _hl_intervals(f: Func, x: float, family: BallFamily | None):
    br = _finite_breaks(f)
    scale = max(abs(x), float(np.max(np.abs(br))) if br.size else 1.0, 1e-300)
    h = scale * 10.0 ** (np.arange(-6 * 16, 6 * 16 + 1) / 16)
    a = [x - h, np.full_like(h, x), x - h]
    b = [np.full_like(h, x), x + h, x + h]
    left, right = br[br < x], br[br > x]
    if left.size:
        a.append(left)
        b.append(np.full(left.shape, x))
    if right.size:
        a.append(np.full(right.shape, x))
        b.append(right)
    if left.size and right.size:
        L, R = np.meshgrid(left, right)
        a.append(L.ravel())
        b.append(R.ravel())
    d = np.abs(br - x)
    d = d[d > 0]
    if d.size:
        a.append(x - d)
        b.append(x + d)
    if family is not None:
        for ball in family.enumerate():
            if ball.left <= x <= ball.right:
                a.append(np.array([ball.left]))
                b.append(np.array([ball.right]))
    a = np.concatenate(a)
    b = np.concatenate(b)
    keep = b > a
    return a[keep], b[keep]


def hl_maximal_values(f: Func, xs, family: BallFamily | None = None, kappa: float = 0.25) -> np.ndarray:
    """Sup of averages over intervals containing x: anchored, breakpoint-aligned, family, and the M0 / M_loc candidates."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    base = m0_values(f, xs)
    out = np.empty_like(xs)
    for k, x in enumerate(xs):
        a, b = _hl_intervals(f, float(x), family)
        v = max(float(np.max(_avg(f, a, b))), float(base[k]))
        if x != 0:
            v = max(v, _mloc_one(f, float(x), kappa))
        out[k] = v
    return out


def hl_maximal(f: Func, x: float, family: BallFamily | None = None, kappa: float = 0.25) -> float:
    return float(hl_maximal_values(f, [x], family, kappa)[0])


# --------------------------------------------------------------------------
# S and S-tilde

_INV = Power.raw(-1.0)


def calderon_values(f: Func, xs) -> np.ndarray:
    """S|f|(x) = |x|^-1 int_{|y|<|x|} |f| + int_{|y|>|x|} |f(y)|/|y| dy."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    t = np.abs(xs)
    if np.any(t == 0):
        raise UndefinedAtOrigin("S is evaluated at x != 0")
    inner = interval_integrals(f, UNIT, -t, t, 1.0) / t
    tail = interval_integrals(f, _INV, t, np.full_like(t, INF), 1.0) + interval_integrals(f, _INV, np.full_like(t, -INF), -t, 1.0)
    if np.any(~np.isfinite(tail)):
        raise DivergenceError("f has a non-integrable tail against 1/|y|")
    return inner + tail


def calderon(f: Func, x: float) -> float:
    return float(calderon_values(f, [x])[0])


def calderon_func(f: CharBall) -> PiecewisePowerLog:
    """S chi_B for B = B(0, R): 2 + 2 ln(R/|x|) inside, 2R/|x| outside."""
    if not (isinstance(f, CharBall) and f.ball.center == 0.0):
        raise ValueError("symbolic S output is available for centered indicators only")
    R = f.ball.radius
    inside = ((2.0 + 2.0 * math.log(R), 0.0, 0.0), (2.0, 0.0, 1.0))
    return PiecewisePowerLog((Segment("both", 0.0, R, inside), Segment("both", R, INF, ((2.0 * R, -1.0, 0.0),))))


def _charball_kernel_integral(lo: float, hi: float, X: float) -> float:
    """int_lo^hi dy / (X + |y|)."""
    total = 0.0
    if hi > 0:
        u, v = max(lo, 0.0), hi
        if v > u:
            total += math.log1p((v - u) / (X + u))
    if lo < 0:
        u, v = max(-hi, 0.0), -lo
        if v > u:
            total += math.log1p((v - u) / (X + u))
    return total


def hilbert_op(f: Func, x: float) -> float:
    """S-tilde f(x) = int f(y) / (|x| + |y|) dy."""
    X = abs(float(x))
    if X == 0.0:
        val = float(interval_integrals(f, _INV, -INF, INF, 1.0))
        if not math.isfinite(val):
            raise DivergenceError("S-tilde at the origin diverges for this input")
        return val
    if isinstance(f, CharBall):
        return _charball_kernel_integral(f.ball.left, f.ball.right, X)
    lo, hi = f.support()
    brk = (0.0, *f.breakpoints())
    val = adaptive_integral(lambda y: float(abs(f.value(np.array([y]))[0])) / (X + abs(y)), lo, hi, brk)
    return val


def hilbert_op_values(f: Func, xs) -> np.ndarray:
    return np.array([hilbert_op(f, float(x)) for x in np.atleast_1d(xs)])


def truncated_hilbert(f: Func, x: float, eps: float) -> float:
    """int_{|x-y|>eps} f(y) / (x - y) dy."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = float(x)
    lo, hi = f.support()
    parts = [(lo, min(hi, x - eps)), (max(lo, x + eps), hi)]
    total = 0.0
    if isinstance(f, CharBall):
        for u, v in parts:
            if v > u:
                total += math.log(abs(x - u)) - math.log(abs(x - v))
        return total
    brk = tuple(f.breakpoints()) + (0.0,)
    for u, v in parts:
        if v > u:
            total += adaptive_integral(lambda y: float(f.value(np.array([y]))[0]) / (x - y), u, v, brk)
    return total


def truncated_hilbert_values(f: Func, xs, eps: float) -> np.ndarray:
    return np.array([truncated_hilbert(f, float(x), eps) for x in np.atleast_1d(xs)])


# --------------------------------------------------------------------------
# dispatch and certified lower envelopes


def evaluate(op: OperatorTag, f: Func, xs) -> np.ndarray:
    if op.name == "m0":
        return m0_values(f, xs)
    if op.name == "mloc":
        return m_loc_values(f, xs, op.kappa)
    if op.name == "hl":
        return hl_maximal_values(f, xs, None, op.kappa)
    if op.name == "calderon":
        return calderon_values(f, xs)
    if op.name == "hilbertop":
        return hilbert_op_values(f, xs)
    return truncated_hilbert_values(f, xs, op.eps)


def lower_envelope(op: OperatorTag, f: Func, radii: np.ndarray) -> TabulatedGrid:
    """Even piecewise-constant function below |op f| on each cell (r_{i-1}, r_i] (with r_{-1} = 0).

    M0 is radially decreasing, so its value at the outer cell edge bounds the
    cell from below. For M and M_loc the average over an interval containing a
    whole cell bounds every point of the cell. For S with f >= 0 the Hardy part
    is bounded by A(r_in)/r_out and the adjoint part by its value at r_out.
    The truncated Hilbert transform gets midpoint samples (not certified).
    """
    r = np.unique(np.asarray(radii, dtype=float))
    r = r[r > 0]
    inner = np.concatenate([[0.0], r[:-1]])
    if op.name == "m0":
        v = m0_values(f, r)
        return _even_from_cells(r, v, v)
    if op.name == "calderon":
        A = interval_integrals(f, UNIT, -inner, inner, 1.0)
        T = interval_integrals(f, _INV, r, np.full_like(r, INF), 1.0) + interval_integrals(f, _INV, np.full_like(r, -INF), -r, 1.0)
        v = A / r + T
        return _even_from_cells(r, v, v)
    if op.name in ("hl", "mloc"):
        vp = _cell_interval_lower(op, f, inner, r)
        vn = _cell_interval_lower(op, f, -r, -inner)
        return _even_from_cells(r, vp, vn)
    mids = 0.5 * (inner + r)
    vp = np.abs(evaluate(op, f, mids))
    vn = np.abs(evaluate(op, f, -mids))
    return _even_from_cells(r, vp, vn)


def _even_from_cells(r: np.ndarray, vpos: np.ndarray, vneg: np.ndarray) -> TabulatedGrid:
    edges = np.concatenate([-r[::-1], [0.0], r])
    values = np.concatenate([vneg[::-1], vpos])
    return TabulatedGrid(tuple(edges), tuple(values))


def _cell_interval_lower(op: OperatorTag, f: Func, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """For each cell [lo, hi]: best average over candidate intervals containing the cell."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    br = _finite_breaks(f)
    if op.name == "mloc":
        out = np.zeros(lo.shape)
        pos, neg = lo > 0, hi < 0
        for sel, sign in ((pos, 1.0), (neg, -1.0)):
            if not sel.any():
                continue
            u = np.where(sign > 0, lo[sel], -hi[sel])
            v = np.where(sign > 0, hi[sel], -lo[sel])
            out[sel] = _mloc_cells(f, u, v, (1 + op.kappa) / (1 - op.kappa), np.sort(sign * br), sign)
        return out
    w = hi - lo
    ext = np.concatenate([[1.0], 10.0 ** (np.arange(1, 6 * 8 + 1) / 8)])
    L, H, E = lo[:, None], hi[:, None], w[:, None] * (ext[None, :] - 1.0)
    a = [L - E, np.broadcast_to(L, E.shape), L - E]
    b = [np.broadcast_to(H, E.shape), H + E, H + E]
    if br.size:
        B = br[None, :]
        a += [np.where(B < L, B, L), np.broadcast_to(L, (lo.size, br.size))]
        b += [np.broadcast_to(H, (lo.size, br.size)), np.where(B > H, B, H)]
    a, b = np.concatenate(a, axis=1), np.concatenate(b, axis=1)
    return np.max(_avg(f, a.ravel(), b.ravel()).reshape(a.shape), axis=1)


def _mloc_cells(f: Func, u: np.ndarray, v: np.ndarray, q: float, br: np.ndarray, sign: float) -> np.ndarray:
    """Best local average over [a, b] with a <= u, b >= v, b <= q a, for cells [u, v] in |x| coordinates."""
    bpos = np.abs(br[br * sign > 0]) if br.size else br
    U, V = u[:, None], v[:, None]
    Ac = [U, V / q]
    Bc = [V, q * U]
    if bpos.size:
        Ac.append(np.broadcast_to(bpos[None, :], (u.size, bpos.size)))
        Bc.append(np.broadcast_to(bpos[None, :], (u.size, bpos.size)))
        Ac.append(np.broadcast_to(bpos[None, :] / q, (u.size, bpos.size)))
        Bc.append(np.broadcast_to(q * bpos[None, :], (u.size, bpos.size)))
    A = np.concatenate(Ac, axis=1)
    B = np.concatenate(Bc, axis=1)
    a = np.repeat(A[:, :, None], B.shape[1], axis=2)
    b = np.repeat(B[:, None, :], A.shape[1], axis=1)
    ok = (a <= U[:, :, None]) & (b >= V[:, :, None]) & (b <= q * a * (1 + 1e-15)) & (b > a)
    a, b = np.where(ok, a, 1.0), np.where(ok, b, 2.0)
    lo, hi = (a, b) if sign > 0 else (-b, -a)
    vals = _avg(f, lo.ravel(), hi.ravel()).reshape(a.shape)
    vals = np.where(ok, vals, 0.0)
    return vals.reshape(u.size, -1).max(axis=1)


def _mloc_cover(u: float, v: float, q: float, br: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closure of the local intervals [a, b] containing [u, v] (0 < u < v): a <= u, b >= v, b <= q a."""
    if v > q * u:
        return np.array([]), np.array([])
    bs = np.unique(np.concatenate([[v, q * u], br[(br > v) & (br < q * u)]]))
    aa, bb = [], []
    for b in bs:
        As = np.unique(np.concatenate([[b / q, u], br[(br > b / q) & (br < u)]]))
        aa.append(As)
        bb.append(np.full(As.shape, b))
    a, b = np.concatenate(aa), np.concatenate(bb)
    ok = (a <= u) & (b >= v) & (b <= q * a * (1 + 1e-15)) & (b > a)
    return a[ok], b[ok]
