"""Symbolic weights and functions on the line and their integrals over intervals.

Everything that can be integrated in closed form is reduced to "density
pieces" c * |x|**m * (ln 1/|x|)**j supported on one or both sides of the
origin; other integrands go through scipy's adaptive quadrature, split at the
known singular points.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import product as iproduct
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .geometry import Ball

INF = math.inf
ABS_FLOOR = 1e-300
ADAPTIVE_EPSREL = 1e-11


class DivergenceError(ArithmeticError):
    """The integrand is not integrable on the requested set."""


# --------------------------------------------------------------------------
# density pieces


@dataclass(frozen=True)
class Piece:
    """coef * |x|**m * (ln 1/|x|)**j for |x| in [lo, hi] on side +1, -1 or both (0)."""

    side: int
    lo: float
    hi: float
    coef: float
    m: float
    j: float = 0


def _log_inv(x):
    with np.errstate(divide="ignore"):
        return -np.log(x)


def _antideriv(m: float, j: float, x: np.ndarray) -> np.ndarray:
    """Antiderivative of x**m (ln 1/x)**j on (0, inf), valid for x > 0 finite.

    Non-integer j is only used on (0, 1], where x = e^-t turns the integral
    into an upper incomplete gamma function when m > -1.
    """
    s = m + 1.0
    L = _log_inv(x)
    if abs(s) < 1e-14:
        return -(L ** (j + 1)) / (j + 1)
    if not _is_int(j):
        if s < 0:
            raise ValueError("non-integer log power needs m > -1")
        with np.errstate(under="ignore"):
            return math.gamma(j + 1) * special.gammaincc(j + 1, s * L) / s ** (j + 1)
    j = int(round(j))
    acc = np.zeros_like(x, dtype=float)
    fact = 1.0
    for i in range(j + 1):
        if i > 0:
            fact *= j - i + 1
        acc = acc + fact * L ** (j - i) / s ** (i + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        return x**s * acc


def mono_integral(m: float, j: float, u, v) -> np.ndarray:
    """Vectorized integral of x**m (ln 1/x)**j over [u, v] with 0 <= u <= v <= inf.

    Returns inf where the integral diverges.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    out = np.zeros(u.shape)
    live = v > u
    if not live.any():
        return out
    s = m + 1.0
    at0 = live & (u == 0.0)
    atinf = live & np.isinf(v)
    inner = live & ~at0 & ~atinf
    if j == 0 and m == 0.0:
        out[live] = v[live] - u[live]
        return out
    if j == 0:
        if abs(s) < 1e-14:
            out[inner] = np.log(v[inner] / u[inner])
            out[at0 | atinf] = INF
            return out
        uu, vv = u[inner], v[inner]
        t = s * (np.log(vv) - np.log(uu))
        small = np.abs(t) < 0.5
        res = np.empty_like(uu)
        with np.errstate(over="ignore"):
            res[small] = uu[small] ** s * np.expm1(t[small]) / s
            res[~small] = (vv[~small] ** s - uu[~small] ** s) / s
        out[inner] = res
    elif not _is_int(j) and s < 0:
        # finite range in t = ln 1/x, no special function for the growing exponential
        for i in np.flatnonzero(inner):
            lo, hi = -math.log(v.flat[i]), -math.log(u.flat[i])
            out.flat[i] = integrate.quad(lambda t: math.exp(-s * t) * t**j, lo, hi, epsabs=0, epsrel=1e-13, limit=200)[0]
    else:
        with np.errstate(invalid="ignore", over="ignore"):
            out[inner] = _antideriv(m, j, v[inner]) - _antideriv(m, j, u[inner])
    both = at0 & atinf
    head = at0 & ~atinf
    tail = atinf & ~at0
    if head.any():
        if s > 0:
            out[head] = _antideriv(m, j, v[head]) if j else v[head] ** s / s
        else:
            out[head] = INF
    if tail.any():
        if s < 0:
            out[tail] = -(_antideriv(m, j, u[tail]) if j else u[tail] ** s / s)
        else:
            out[tail] = INF
    out[both] = INF
    return out


def _piece_integral(pc: Piece, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    total = np.zeros(a.shape)
    if pc.side in (0, 1):
        u = np.maximum(np.maximum(a, 0.0), pc.lo)
        v = np.minimum(b, pc.hi)
        total += mono_integral(pc.m, pc.j, u, np.maximum(u, v))
    if pc.side in (0, -1):
        u = np.maximum(np.maximum(-b, 0.0), pc.lo)
        v = np.minimum(-a, pc.hi)
        total += mono_integral(pc.m, pc.j, u, np.maximum(u, v))
    with np.errstate(invalid="ignore"):
        return pc.coef * total


def pieces_integral(pieces: Sequence[Piece], a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape)
    for pc in pieces:
        if pc.coef != 0.0:
            out = out + _piece_integral(pc, a, b)
    return out


def multiply_pieces(xs: Sequence[Piece], ys: Sequence[Piece]) -> list[Piece]:
    out = []
    for p, q in iproduct(xs, ys):
        if p.side and q.side and p.side != q.side:
            continue
        lo, hi = max(p.lo, q.lo), min(p.hi, q.hi)
        if hi <= lo:
            continue
        out.append(Piece(p.side or q.side, lo, hi, p.coef * q.coef, p.m + q.m, p.j + q.j))
    return out


def _abs_range(a: float, b: float) -> tuple[float, float]:
    if a <= 0.0 <= b:
        return 0.0, max(-a, b)
    return min(abs(a), abs(b)), max(abs(a), abs(b))


def _pow0(coef: float, e: float) -> float:
    if e > 0:
        return 0.0
    if e < 0:
        return INF
    return coef


# --------------------------------------------------------------------------
# adaptive fallback


def adaptive_integral(g, a: float, b: float, breaks: Iterable[float] = ()) -> float:
    """scipy QUADPACK on [a, b], split at every break point inside (a, b)."""
    if not b > a:
        return 0.0
    cuts = sorted({a, b, *[x for x in breaks if a < x < b]})
    marks = frozenset(float(x) for x in breaks)

    def h(x):
        # bisection below one ulp can land on a singular point, where 0 * inf gives nan; that point has measure zero
        v = g(x)
        return 0.0 if v != v and x in marks else v

    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(h, lo, hi, epsabs=ABS_FLOOR, epsrel=ADAPTIVE_EPSREL, limit=400)
        total += val
    if not math.isfinite(total):
        raise DivergenceError("adaptive integral diverged")
    return total


# --------------------------------------------------------------------------
# weights


def _raw(cls, **kw):
    obj = object.__new__(cls)
    for k, v in kw.items():
        object.__setattr__(obj, k, v)
    return obj


class Weight:
    """Interface shared by the symbolic weight classes."""

    kind = "weight"

    def value(self, x):
        raise NotImplementedError

    def pieces(self) -> list[Piece] | None:
        return None

    def singular_points(self) -> tuple[float, ...]:
        return ()

    def measure(self, a, b) -> np.ndarray:
        """w([a, b]) vectorized over interval endpoints."""
        pcs = self.pieces()
        if pcs is not None:
            return pieces_integral(pcs, a, b)
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape)
        for idx in np.ndindex(a.shape):
            out[idx] = adaptive_integral(lambda x: float(self.value(x)), a[idx], b[idx], (0.0, *self.singular_points()))
        return out

    def ess_inf(self, a: float, b: float) -> float:
        xs = np.unique(np.concatenate([np.linspace(a, b, 257), [x for x in self.singular_points() if a <= x <= b]]))
        return float(np.min(self.value(xs)))

    def pow(self, alpha: float) -> "Weight":
        return GenericWeight.of(lambda x, s=self: s.value(x) ** alpha, self.singular_points())

    def mul(self, other: "Weight") -> "Weight":
        return GenericWeight.of(lambda x, s=self, o=other: s.value(x) * o.value(x), self.singular_points() + other.singular_points())

    @property
    def is_homogeneous(self) -> bool:
        return False

    @property
    def degree(self) -> float | None:
        return None

    def rd_exponent(self) -> float | None:
        """Certified reverse doubling exponent when known in closed form."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Power(Weight):
    """|x - center|**beta."""

    beta: float
    center: float = 0.0
    kind = "power"

    def __post_init__(self):
        if not self.beta > -1.0:
            raise ValueError(f"power weight |x|^beta needs beta > -1 (got {self.beta})")

    @classmethod
    def raw(cls, beta: float, center: float = 0.0) -> "Power":
        return _raw(cls, beta=float(beta), center=float(center))

    def value(self, x):
        t = np.abs(np.asarray(x, dtype=float) - self.center)
        if self.beta == 0.0:
            return np.ones_like(t)
        with np.errstate(divide="ignore"):
            return t**self.beta

    def pieces(self):
        if self.center != 0.0:
            return None
        return [Piece(0, 0.0, INF, 1.0, self.beta, 0)]

    def singular_points(self):
        return (self.center,) if self.beta != 0.0 else ()

    def measure(self, a, b):
        if self.center == 0.0:
            return super().measure(a, b)
        a = np.asarray(a, dtype=float) - self.center
        b = np.asarray(b, dtype=float) - self.center
        return pieces_integral([Piece(0, 0.0, INF, 1.0, self.beta, 0)], a, b)

    def ess_inf(self, a, b):
        lo, hi = _abs_range(a - self.center, b - self.center)
        if self.beta > 0:
            return lo**self.beta
        if self.beta < 0:
            return hi**self.beta
        return 1.0

    def pow(self, alpha):
        return Power.raw(self.beta * alpha, self.center)

    def mul(self, other):
        if isinstance(other, Power) and other.center == self.center:
            return Power.raw(self.beta + other.beta, self.center)
        if isinstance(other, PiecewisePower) and self.center == 0.0:
            return other.mul(self)
        return super().mul(other)

    @property
    def is_homogeneous(self):
        return self.center == 0.0

    @property
    def degree(self):
        return self.beta

    def rd_exponent(self):
        return min(1.0, 1.0 + self.beta)

    def to_dict(self):
        d = {"kind": "power", "beta": self.beta}
        if self.center:
            d["center"] = self.center
        return d


@dataclass(frozen=True)
class PiecewisePower(Weight):
    """Even weight coef_i * |x|**exp_i for |x| in [lo_i, hi_i); segments cover [0, inf)."""

    segments: tuple[tuple[float, float, float, float], ...]
    kind = "piecewise"

    def __post_init__(self):
        segs = tuple(tuple(float(v) for v in s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs or segs[0][0] != 0.0 or not math.isinf(segs[-1][1]):
            raise ValueError("piecewise power segments must cover [0, inf)")
        for s0, s1 in zip(segs[:-1], segs[1:]):
            if s0[1] != s1[0]:
                raise ValueError("piecewise power segments must be contiguous")
        for lo, hi, c, e in segs:
            if not hi > lo or c < 0:
                raise ValueError("bad piecewise power segment")
        if not segs[0][3] > -1.0:
            raise ValueError("exponent at the origin must exceed -1")

    @classmethod
    def raw(cls, segments) -> "PiecewisePower":
        return _raw(cls, segments=tuple(tuple(float(v) for v in s) for s in segments))

    def value(self, x):
        t = np.abs(np.asarray(x, dtype=float))
        out = np.zeros_like(t)
        for lo, hi, c, e in self.segments:
            sel = (t >= lo) & (t < hi)
            with np.errstate(divide="ignore"):
                out = np.where(sel, c * t**e, out)
        return out

    def pieces(self):
        return [Piece(0, lo, hi, c, e, 0) for lo, hi, c, e in self.segments]

    def singular_points(self):
        return (0.0,)

    def ess_inf(self, a, b):
        lo, hi = _abs_range(a, b)
        best = INF
        for slo, shi, c, e in self.segments:
            u, v = max(lo, slo), min(hi, shi)
            if v < u or (v == u and u != lo):
                continue
            for t in (u, v):
                val = _pow0(c, e) if t == 0.0 else c * t**e
                best = min(best, val)
        return best

    def pow(self, alpha):
        return PiecewisePower.raw([(lo, hi, c**alpha, e * alpha) for lo, hi, c, e in self.segments])

    def mul(self, other):
        if isinstance(other, Power) and other.center == 0.0:
            return PiecewisePower.raw([(lo, hi, c, e + other.beta) for lo, hi, c, e in self.segments])
        if isinstance(other, PiecewisePower):
            cuts = sorted({s[0] for s in self.segments} | {s[0] for s in other.segments})
            segs = []
            for lo, hi in zip(cuts, cuts[1:] + [INF]):
                mid = lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi)
                a = next(s for s in self.segments if s[0] <= mid < s[1])
                b = next(s for s in other.segments if s[0] <= mid < s[1])
                segs.append((lo, hi, a[2] * b[2], a[3] + b[3]))
            return PiecewisePower.raw(segs)
        return super().mul(other)

    def to_dict(self):
        return {"kind": "piecewise", "segments": [list(s) for s in self.segments]}


@dataclass(frozen=True)
class PowerTimes(Weight):
    """|x|**alpha * inner(x)."""

    alpha: float
    inner: Weight
    kind = "power_times"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("PowerTimes needs alpha >= 0")

    def simplify(self) -> Weight:
        if self.alpha == 0.0:
            return self.inner
        base = Power.raw(self.alpha)
        if isinstance(self.inner, Power) and self.inner.center == 0.0:
            return Power(self.alpha + self.inner.beta)
        if isinstance(self.inner, PiecewisePower):
            return self.inner.mul(base)
        if isinstance(self.inner, PowerTimes):
            s = self.inner.simplify()
            if not isinstance(s, PowerTimes):
                return PowerTimes(self.alpha, s).simplify()
        return self

    def value(self, x):
        s = self.simplify()
        if s is not self:
            return s.value(x)
        return np.abs(np.asarray(x, dtype=float)) ** self.alpha * self.inner.value(x)

    def pieces(self):
        s = self.simplify()
        return None if s is self else s.pieces()

    def singular_points(self):
        return tuple(sorted({0.0, *self.inner.singular_points()}))

    def measure(self, a, b):
        s = self.simplify()
        return Weight.measure(self, a, b) if s is self else s.measure(a, b)

    def ess_inf(self, a, b):
        s = self.simplify()
        return Weight.ess_inf(self, a, b) if s is self else s.ess_inf(a, b)

    def pow(self, alpha):
        s = self.simplify()
        return Weight.pow(self, alpha) if s is self else s.pow(alpha)

    def mul(self, other):
        s = self.simplify()
        return Weight.mul(self, other) if s is self else s.mul(other)

    @property
    def is_homogeneous(self):
        s = self.simplify()
        return False if s is self else s.is_homogeneous

    @property
    def degree(self):
        s = self.simplify()
        return None if s is self else s.degree

    def rd_exponent(self):
        s = self.simplify()
        return None if s is self else s.rd_exponent()

    def to_dict(self):
        return {"kind": "power_times", "alpha": self.alpha, "inner": self.inner.to_dict()}


class GenericWeight(Weight):
    """Pointwise-only weight produced by algebra the symbolic classes do not close under."""

    kind = "generic"

    def __init__(self, fn, singular):
        self._fn = fn
        self._singular = tuple(sorted(set(singular)))

    @classmethod
    def of(cls, fn, singular):
        return cls(fn, singular)

    def value(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._fn(np.asarray(x, dtype=float))

    def singular_points(self):
        return self._singular


def weight_from_dict(d: dict) -> Weight:
    k = d.get("kind")
    if k == "power":
        return Power(float(d["beta"]), float(d.get("center", 0.0)))
    if k == "unit":
        return Power(0.0)
    if k == "piecewise":
        return PiecewisePower(tuple(tuple(s) for s in d["segments"]))
    if k == "power_times":
        return PowerTimes(float(d["alpha"]), weight_from_dict(d["inner"]))
    raise ValueError(f"unknown weight kind {k!r}")


UNIT = Power(0.0)


# --------------------------------------------------------------------------
# functions


class Func:
    kind = "func"

    def value(self, x):
        raise NotImplementedError

    def pieces(self, p: float = 1.0) -> list[Piece] | None:
        """Density pieces of |f|**p, or None when not representable."""
        return None

    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def support(self) -> tuple[float, float]:
        return -INF, INF

    def power(self, s: float) -> "Func":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class CharBall(Func):
    ball: Ball
    kind = "char_ball"

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return ((x >= self.ball.left) & (x <= self.ball.right)).astype(float)

    def pieces(self, p=1.0):
        return _interval_pieces(self.ball.left, self.ball.right, 1.0, 0.0, 0)

    def breakpoints(self):
        return (self.ball.left, self.ball.right)

    def support(self):
        return self.ball.left, self.ball.right

    def power(self, s):
        return self

    def to_dict(self):
        return {"kind": "char_ball", "c": self.ball.center, "r": self.ball.radius}


def _interval_pieces(a: float, b: float, coef: float, m: float, j: int) -> list[Piece]:
    out = []
    if b > 0:
        lo = max(a, 0.0)
        if b > lo:
            out.append(Piece(1, lo, b, coef, m, j))
    if a < 0:
        lo = max(-b, 0.0)
        if -a > lo:
            out.append(Piece(-1, lo, -a, coef, m, j))
    if len(out) == 2 and out[0].lo == out[1].lo == 0.0 and out[0].hi == out[1].hi:
        out = [Piece(0, 0.0, out[0].hi, coef, m, j)]
    return out


@dataclass(frozen=True)
class WeightedChar(Func):
    """factor(x) on [a, b] minus the open hole (hole_at - hole, hole_at + hole)."""

    factor: Weight
    a: float
    b: float
    hole: float = 0.0
    hole_at: float = 0.0
    kind = "weighted_char"

    def _mask(self, x):
        return (x >= self.a) & (x <= self.b) & (np.abs(x - self.hole_at) >= self.hole)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(self._mask(x), self.factor.value(x), 0.0)

    def intervals(self) -> list[tuple[float, float]]:
        h, s = self.hole, self.hole_at
        if h <= 0 or self.b <= s - h or self.a >= s + h:
            return [(self.a, self.b)]
        out = []
        if self.a < s - h:
            out.append((self.a, s - h))
        if self.b > s + h:
            out.append((s + h, self.b))
        return out

    def pieces(self, p=1.0):
        fp = self.factor.pow(p).pieces()
        if fp is None:
            return None
        out = []
        for a, b in self.intervals():
            out += multiply_pieces(fp, _interval_pieces(a, b, 1.0, 0.0, 0))
        return out

    def breakpoints(self):
        pts = {self.a, self.b}
        if self.hole > 0:
            pts |= {self.hole_at - self.hole, self.hole_at + self.hole}
        return tuple(sorted(x for x in pts if self.a <= x <= self.b))

    def support(self):
        return self.a, self.b

    def power(self, s):
        return WeightedChar(self.factor.pow(s), self.a, self.b, self.hole, self.hole_at)

    def to_dict(self):
        return {"kind": "weighted_char", "factor": self.factor.to_dict(), "a": self.a, "b": self.b, "hole": self.hole, "hole_at": self.hole_at}


@dataclass(frozen=True)
class Segment:
    """sum_i c_i |x|**a_i (ln 1/|x|)**k_i for |x| in [lo, hi] on side "pos", "neg" or "both"."""

    side: str
    lo: float
    hi: float
    terms: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        if self.side not in ("pos", "neg", "both"):
            raise ValueError("segment side must be pos, neg or both")
        if not (0.0 <= self.lo < self.hi):
            raise ValueError("segment needs 0 <= lo < hi")
        object.__setattr__(self, "terms", tuple(tuple(float(v) for v in t) for t in self.terms))

    @property
    def sign(self) -> int:
        return {"pos": 1, "neg": -1, "both": 0}[self.side]

    def eval_abs(self, t):
        t = np.asarray(t, dtype=float)
        L = _log_inv(t)
        out = np.zeros_like(t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for c, a, k in self.terms:
                term = c * t**a
                if k:
                    term = term * L**k
                out = out + term
        return out


@dataclass(frozen=True)
class PiecewisePowerLog(Func):
    segments: tuple[Segment, ...]
    kind = "ppl"

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        t = np.abs(x)
        out = np.zeros_like(t)
        for sg in self.segments:
            sel = (t >= sg.lo) & (t <= sg.hi)
            if sg.side == "pos":
                sel &= x > 0
            elif sg.side == "neg":
                sel &= x < 0
            if sel.any():
                out[sel] = sg.eval_abs(t[sel])
        return out

    def pieces(self, p=1.0):
        out = []
        for sg in self.segments:
            pcs = _segment_power_pieces(sg, p)
            if pcs is None:
                return None
            out += pcs
        return out

    def breakpoints(self):
        pts = set()
        for sg in self.segments:
            for t in (sg.lo, sg.hi):
                if math.isfinite(t):
                    if sg.side in ("pos", "both"):
                        pts.add(t)
                    if sg.side in ("neg", "both"):
                        pts.add(-t)
        return tuple(sorted(pts))

    def support(self):
        pts = self.breakpoints()
        if not pts:
            return 0.0, 0.0
        lo, hi = min(pts), max(pts)
        if any(sg.side != "pos" and sg.lo == 0.0 for sg in self.segments) or any(math.isinf(sg.hi) for sg in self.segments):
            lo = min(lo, 0.0)
        if any(math.isinf(sg.hi) and sg.side != "pos" for sg in self.segments):
            lo = -INF
        if any(math.isinf(sg.hi) and sg.side != "neg" for sg in self.segments):
            hi = INF
        return lo, hi

    def power(self, s):
        segs = []
        for sg in self.segments:
            if len(sg.terms) != 1:
                raise ValueError("power of a multi-term segment is not in the symbolic class")
            c, a, k = sg.terms[0]
            segs.append(Segment(sg.side, sg.lo, sg.hi, ((abs(c) ** s, a * s, k * s),)))
        return PiecewisePowerLog(tuple(segs))

    def to_dict(self):
        return {
            "kind": "ppl",
            "segments": [{"side": s.side, "lo": s.lo, "hi": s.hi, "terms": [list(t) for t in s.terms]} for s in self.segments],
        }


def _is_int(x: float) -> bool:
    return abs(x - round(x)) < 1e-12


def _segment_sign(sg: Segment) -> int:
    """+1 / -1 when the segment is sign-definite on a dense check, 0 otherwise."""
    hi = sg.hi if math.isfinite(sg.hi) else max(10.0, 10 * sg.lo)
    lo = sg.lo
    if lo > 0:
        t = np.geomspace(lo, hi, 257)
    else:
        t = np.concatenate([hi * np.geomspace(1e-12, 1.0, 257)])
    v = sg.eval_abs(t)
    v = v[np.isfinite(v)]
    if np.all(v >= 0):
        return 1
    if np.all(v <= 0):
        return -1
    return 0


def _segment_power_pieces(sg: Segment, p: float) -> list[Piece] | None:
    side = sg.sign
    if len(sg.terms) == 1:
        c, a, k = sg.terms[0]
        j = k * p
        coef = abs(c) ** p
        if not _is_int(j):
            # |ln x|^j changes form at x = 1; the exact route covers (0, 1]
            return [Piece(side, sg.lo, sg.hi, coef, a * p, j)] if sg.hi <= 1.0 else None
        j = int(round(j))
        if j % 2 == 0 or sg.hi <= 1.0:
            return [Piece(side, sg.lo, sg.hi, coef, a * p, j)]
        # (ln 1/x) < 0 beyond x = 1 flips the sign of an odd power
        out = []
        if sg.lo < 1.0:
            out.append(Piece(side, sg.lo, 1.0, coef, a * p, j))
        out.append(Piece(side, max(1.0, sg.lo), sg.hi, -coef, a * p, j))
        return out
    if not (_is_int(p) and all(_is_int(t[2]) for t in sg.terms)):
        return None
    sgn = _segment_sign(sg)
    if sgn == 0:
        return None
    n = int(round(p))
    out: list[Piece] = []
    # multinomial expansion of (sum of terms)**n
    for combo in iproduct(range(len(sg.terms)), repeat=n):
        coef, m, jj = float(sgn**n), 0.0, 0
        for i in combo:
            c, a, k = sg.terms[i]
            coef *= c
            m += a
            jj += int(round(k))
        out.append(Piece(side, sg.lo, sg.hi, coef, m, jj))
    return _merge_pieces(out)


def _merge_pieces(pcs: list[Piece]) -> list[Piece]:
    acc: dict = {}
    for pc in pcs:
        key = (pc.side, pc.lo, pc.hi, pc.m, pc.j)
        acc[key] = acc.get(key, 0.0) + pc.coef
    return [Piece(s, lo, hi, c, m, j) for (s, lo, hi, m, j), c in acc.items() if c != 0.0]


@dataclass(frozen=True)
class TabulatedGrid(Func):
    """Piecewise constant: values[i] on [edges[i], edges[i+1]); zero outside."""

    edges: tuple[float, ...]
    values: tuple[float, ...]
    kind = "tabulated"

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.ndim != 1 or v.shape != (e.size - 1,) or np.any(np.diff(e) <= 0):
            raise ValueError("tabulated grid needs increasing edges and one value per cell")
        object.__setattr__(self, "edges", tuple(e.tolist()))
        object.__setattr__(self, "values", tuple(v.tolist()))

    @classmethod
    def from_radial(cls, radii: np.ndarray, vals: np.ndarray) -> "TabulatedGrid":
        """Even function equal to vals[i] for |x| in (radii[i-1], radii[i]] with radii[-1] := 0."""
        r = np.asarray(radii, dtype=float)
        v = np.asarray(vals, dtype=float)
        edges = np.concatenate([-r[::-1], [0.0], r])
        values = np.concatenate([v[::-1], v])
        return cls(tuple(edges), tuple(values))

    @property
    def e(self) -> np.ndarray:
        return np.asarray(self.edges)

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.values)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        e = self.e
        idx = np.searchsorted(e, x, side="right") - 1
        ok = (idx >= 0) & (idx < e.size - 1)
        out = np.zeros_like(x)
        out[ok] = self.v[idx[ok]]
        return out

    def breakpoints(self):
        return (self.edges[0], self.edges[-1])

    def support(self):
        return self.edges[0], self.edges[-1]

    def power(self, s):
        return TabulatedGrid(self.edges, tuple(np.abs(self.v) ** s))

    def to_dict(self):
        return {"kind": "tabulated", "edges": list(self.edges), "values": list(self.values)}


def func_from_dict(d: dict) -> Func:
    k = d.get("kind")
    if k == "char_ball":
        return CharBall(Ball(float(d["c"]), float(d["r"])))
    if k == "ppl":
        return PiecewisePowerLog(
            tuple(Segment(s["side"], float(s["lo"]), float(s["hi"]), tuple(tuple(t) for t in s["terms"])) for s in d["segments"])
        )
    if k == "tabulated":
        return TabulatedGrid(tuple(d["edges"]), tuple(d["values"]))
    if k == "weighted_char":
        return WeightedChar(weight_from_dict(d["factor"]), float(d["a"]), float(d["b"]), float(d.get("hole", 0.0)), float(d.get("hole_at", 0.0)))
    raise ValueError(f"unknown func kind {k!r}")


# --------------------------------------------------------------------------
# integration entry points


def _check_finite(vals: np.ndarray) -> np.ndarray:
    if np.any(np.isinf(vals)):
        raise DivergenceError("integrand is not locally integrable at the origin")
    return vals


def _density(f: Func | None, w: Weight, p: float):
    if f is None:
        return w.pieces()
    if isinstance(f, WeightedChar):
        fp = f.factor.pow(p).mul(w).pieces()
        if fp is None:
            return None
        out = []
        for a, b in f.intervals():
            out += multiply_pieces(fp, _interval_pieces(a, b, 1.0, 0.0, 0))
        return out
    fp = f.pieces(p)
    wp = w.pieces()
    if fp is None or wp is None:
        return None
    return multiply_pieces(fp, wp)


def interval_integrals(f: Func | None, w: Weight, a, b, p: float = 1.0) -> np.ndarray:
    """int_{[a,b]} |f|**p w, vectorized over interval endpoints; inf marks divergence."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    if f is None:
        return w.measure(a, np.maximum(a, b))
    if isinstance(f, CharBall):
        lo = np.maximum(a, f.ball.left)
        hi = np.minimum(b, f.ball.right)
        return w.measure(lo, np.maximum(lo, hi))
    if isinstance(f, WeightedChar):
        dens = f.factor.pow(p).mul(w)
        out = np.zeros(a.shape)
        for lo_, hi_ in f.intervals():
            lo = np.maximum(a, lo_)
            hi = np.minimum(b, hi_)
            out = out + dens.measure(lo, np.maximum(lo, hi))
        return out
    if isinstance(f, TabulatedGrid):
        return _tabulated_integrals(f, w, a, b, p)
    dens = _density(f, w, p)
    if dens is not None:
        return pieces_integral(dens, a, b)
    out = np.empty(a.shape)
    brk = (0.0, *w.singular_points(), *f.breakpoints())
    g = lambda x: float(np.abs(f.value(x)) ** p * w.value(x))
    for idx in np.ndindex(a.shape):
        lo, hi = max(a[idx], f.support()[0]), min(b[idx], f.support()[1])
        out[idx] = adaptive_integral(g, lo, hi, brk) if hi > lo else 0.0
    return out


def _tabulated_integrals(f: TabulatedGrid, w: Weight, a, b, p):
    e = f.e
    vp = np.abs(f.v) ** p
    cell = w.measure(e[:-1], e[1:])
    with np.errstate(invalid="ignore"):
        contrib = np.where(vp > 0, vp * cell, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(contrib)])
    aa = np.clip(a, e[0], e[-1])
    bb = np.clip(b, e[0], e[-1])
    bb = np.maximum(aa, bb)
    ia = np.clip(np.searchsorted(e, aa, side="right") - 1, 0, e.size - 2)
    ib = np.clip(np.searchsorted(e, bb, side="right") - 1, 0, e.size - 2)
    same = ia == ib
    out = np.zeros(aa.shape)
    # same cell
    if same.any():
        out[same] = vp[ia[same]] * w.measure(aa[same], bb[same])
    d = ~same
    if d.any():
        left = vp[ia[d]] * w.measure(aa[d], e[ia[d] + 1])
        right = vp[ib[d]] * w.measure(e[ib[d]], bb[d])
        mid = cum[ib[d]] - cum[ia[d] + 1]
        out[d] = left + mid + right
    return out


def integrate_ball(f: Func, w: Weight, b: Ball, p: float = 1.0) -> float:
    """int_b |f|**p w."""
    val = float(interval_integrals(f, w, b.left, b.right, p))
    return float(_check_finite(np.asarray(val)))


def integrate_interval(f: Func | None, w: Weight, a: float, b: float, p: float = 1.0) -> float:
    return float(_check_finite(np.asarray(interval_integrals(f, w, a, b, p))))


def weight_measure(w: Weight, b: Ball) -> float:
    return float(_check_finite(np.asarray(w.measure(b.left, b.right))))


def adaptive_reference(f: Func | None, w: Weight, a: float, b: float, p: float = 1.0) -> float:
    """Independent quadrature value of int_a^b |f|**p w, used as an oracle."""
    if f is None:
        g = lambda x: float(w.value(x))
        brk = (0.0, *w.singular_points())
    else:
        g = lambda x: float(np.abs(f.value(x)) ** p * w.value(x))
        brk = (0.0, *w.singular_points(), *f.breakpoints())
    return adaptive_integral(g, a, b, brk)


def pairing(f: Func, g: Func, lo: float = -INF, hi: float = INF) -> float:
    """int |f g| dx over [lo, hi]."""
    pf, pg = f.pieces(1.0), g.pieces(1.0)
    if pf is not None and pg is not None:
        val = float(pieces_integral(multiply_pieces(pf, pg), lo, hi))
        return float(_check_finite(np.asarray(val)))
    s0 = max(lo, f.support()[0], g.support()[0])
    s1 = min(hi, f.support()[1], g.support()[1])
    if not s1 > s0:
        return 0.0
    brk = (0.0, *f.breakpoints(), *g.breakpoints())
    if isinstance(f, WeightedChar):
        brk += f.factor.singular_points()
    return adaptive_integral(lambda x: float(abs(f.value(x) * g.value(x))), s0, s1, brk)
