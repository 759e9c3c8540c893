"""Balls on the real line, the reduced ball families, and sampling point sets.

All suprema over "all balls" are approximated on geometric grids anchored at
1, so that coarse grids are exact subsets of their refinements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

KINDS = ("all", "centered", "offcenter", "boundary", "local")


class EmptyFamilyError(ValueError):
    """The kind predicate admits no ball on the requested grid."""


@dataclass(frozen=True, order=True)
class Ball:
    center: float
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")
        if not math.isfinite(self.center):
            raise ValueError("ball center must be finite")

    @property
    def left(self) -> float:
        return self.center - self.radius

    @property
    def right(self) -> float:
        return self.center + self.radius

    @property
    def measure(self) -> float:
        # |B| = 2r in dimension one
        return 2.0 * self.radius

    def contains(self, x) -> bool | np.ndarray:
        return np.logical_and(x >= self.left, x <= self.right)

    def contains_ball(self, other: "Ball") -> bool:
        return self.left <= other.left and other.right <= self.right

    def is_centered(self) -> bool:
        return self.center == 0.0

    def tilde(self) -> "Ball":
        return tilde(self)

    def dilate(self, lam: float) -> "Ball":
        return dilate(self, lam)

    def to_dict(self) -> dict:
        return {"c": self.center, "r": self.radius}

    @classmethod
    def from_dict(cls, d: dict) -> "Ball":
        return cls(float(d.get("c", d.get("center"))), float(d.get("r", d.get("radius"))))


def tilde(b: Ball) -> Ball:
    """Smallest ball centered at the origin containing ``b``."""
    return Ball(0.0, abs(b.center) + b.radius)


def dilate(b: Ball, lam: float) -> Ball:
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return Ball(b.center, lam * b.radius)


def geometric_grid(lo: float, hi: float, ppd: int) -> np.ndarray:
    """Points 10**(k/ppd) inside [lo, hi], plus both endpoints."""
    if not (0 < lo <= hi):
        raise ValueError("geometric grid needs 0 < lo <= hi")
    k0 = math.ceil(math.log10(lo) * ppd - 1e-9)
    k1 = math.floor(math.log10(hi) * ppd + 1e-9)
    pts = 10.0 ** (np.arange(k0, k1 + 1) / ppd)
    pts = pts[(pts >= lo * (1 - 1e-12)) & (pts <= hi * (1 + 1e-12))]
    return np.unique(np.concatenate([[lo], pts, [hi]]))


@dataclass(frozen=True)
class BallFamily:
    kind: str = "all"
    r_min: float = 2.0**-20
    r_max: float = 2.0**20
    c_max: float = 2.0**20
    points_per_decade: int = 16
    kappa: float = 0.25

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ball family kind {self.kind!r}")
        if not (0 < self.r_min < self.r_max) and not (self.r_min == self.r_max > 0):
            raise ValueError("need 0 < r_min <= r_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be >= 1")
        if not (0 < self.kappa < 1):
            raise ValueError("kappa must lie in (0, 1)")

    def admits(self, b: Ball) -> bool:
        c = abs(b.center)
        if self.kind == "centered":
            return c == 0.0
        if self.kind == "offcenter":
            return c > 4.0 * b.radius
        if self.kind == "boundary":
            return c == 4.0 * b.radius
        if self.kind == "local":
            return b.radius < self.kappa * c
        return True

    def radii(self) -> np.ndarray:
        return geometric_grid(self.r_min, self.r_max, self.points_per_decade)

    def centers(self) -> np.ndarray:
        """Nonnegative center magnitudes used by the off-center kinds."""
        return geometric_grid(min(self.r_min, self.c_max), self.c_max, self.points_per_decade)

    def enumerate(self) -> list[Ball]:
        radii = self.radii()
        balls: list[Ball] = []
        if self.kind == "centered":
            balls = [Ball(0.0, float(r)) for r in radii]
        elif self.kind == "boundary":
            for r in radii:
                if 4.0 * r <= self.c_max * (1 + 1e-12):
                    balls.append(Ball(-4.0 * r, float(r)))
                    balls.append(Ball(4.0 * r, float(r)))
        else:
            cs = self.centers()
            for r in radii:
                if self.kind == "all":
                    balls.append(Ball(0.0, float(r)))
                    sel = cs
                elif self.kind == "offcenter":
                    sel = cs[cs > 4.0 * r]
                else:
                    sel = cs[r < self.kappa * cs]
                for c in sel:
                    balls.append(Ball(-float(c), float(r)))
                    balls.append(Ball(float(c), float(r)))
        if not balls:
            raise EmptyFamilyError(
                f"family {self.kind!r} is empty for r in [{self.r_min}, {self.r_max}], c_max={self.c_max}"
            )
        return sorted(set(balls), key=lambda b: (b.radius, b.center))

    def refined(self, level: int) -> "BallFamily":
        """Grid G_level: points per decade doubled and the range widened by one decade per side per level."""
        if level == 0:
            return self
        f = 10.0**level
        return replace(
            self,
            r_min=self.r_min / f,
            r_max=self.r_max * f,
            c_max=self.c_max * f,
            points_per_decade=self.points_per_decade * 2**level,
        )

    @property
    def decades(self) -> float:
        return math.log10(self.r_max / self.r_min)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "kappa": self.kappa,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "c_max": self.c_max,
            "points_per_decade": self.points_per_decade,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BallFamily":
        known = {"kind", "kappa", "r_min", "r_max", "c_max", "points_per_decade"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown BallFamily keys: {sorted(extra)}")
        kw = dict(d)
        if "points_per_decade" in kw:
            kw["points_per_decade"] = int(kw["points_per_decade"])
        return cls(**kw)


@dataclass(frozen=True)
class Resolution:
    """Inner sampling density used when a supremum runs over sub-intervals of a container.

    ``depth`` is the number of decades resolved below the container scale near
    singular points; ``ppd`` the fine points per decade near anchors.
    """

    ppd: int = 8
    depth: float = 40.0
    coarse_ppd: int = 1
    fine_decades: float = 3.0
    edge_decades: float = 2.0

    def refined(self, level: int) -> "Resolution":
        if level == 0:
            return self
        return replace(self, ppd=self.ppd + (self.ppd // 2) * level, depth=self.depth + 2 * level)


def _offsets(scale: float, decades: float, ppd: int) -> np.ndarray:
    k = np.arange(0, int(math.ceil(decades * ppd)) + 1)
    return scale * 10.0 ** (-k / ppd)


def interval_points(
    lo: float,
    hi: float,
    scale: float,
    res: Resolution,
    deep: Iterable[float] = (),
    edges: Iterable[float] = (),
    holes: Iterable[tuple[float, float]] = (),
) -> np.ndarray:
    """Sample points of [lo, hi] for endpoint-pair families of sub-intervals.

    Points accumulate geometrically at ``deep`` anchors (down to
    ``scale * 10**-depth``) and more mildly at ``edges``; a linear layer covers
    the bulk. Each ``(s, eps)`` in ``holes`` adds points just outside (s - eps, s + eps).
    """
    pts = [np.array([lo, hi]), np.linspace(lo, hi, 2 * res.ppd + 1)]
    for s in deep:
        if lo <= s <= hi:
            coarse = _offsets(scale, res.depth, res.coarse_ppd)
            fine = _offsets(scale, res.fine_decades, res.ppd)
            off = np.concatenate([coarse, fine])
            pts += [np.array([s]), s + off, s - off]
    for e in edges:
        if lo <= e <= hi:
            off = _offsets(scale, res.edge_decades, res.ppd)
            pts += [np.array([e]), e + off, e - off]
    for s, eps in holes:
        if eps > 0:
            off = eps * 10.0 ** (np.arange(0, int(math.ceil(res.fine_decades * res.ppd)) + 1) / res.ppd)
            pts += [s + off, s - off]
    p = np.concatenate(pts)
    p = p[(p >= lo) & (p <= hi)]
    return _dedupe(np.unique(p))


def _dedupe(p: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Drop points within rtol (relative) of their left neighbour; degenerate pairs carry no mass.

    Gaps must also exceed a few smallest normals, so every kept interval has a representable half-length.
    """
    if p.size < 2:
        return p
    gap = np.diff(p)
    floor = np.maximum(rtol * np.maximum(np.abs(p[1:]), np.abs(p[:-1])), 4.0 * np.finfo(float).tiny)
    keep = np.concatenate([[True], gap > floor])
    return p[keep]


def radial_points(r_hi: float, scale: float, res: Resolution, anchors: Iterable[float] = ()) -> np.ndarray:
    """Positive radii for centered-ball families: deep geometric toward 0, refined near ``anchors``."""
    pts = [np.array([r_hi]), _offsets(r_hi, res.depth, res.coarse_ppd), _offsets(r_hi, res.fine_decades, res.ppd)]
    for a in anchors:
        if 0 < a <= r_hi:
            off = _offsets(scale, res.edge_decades, res.ppd)
            pts += [np.array([a]), a + off, a - off]
    p = np.concatenate(pts)
    p = p[(p > 0) & (p <= r_hi)]
    return _dedupe(np.unique(p))


def pair_indices(k: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(k, 1)
    return i, j
