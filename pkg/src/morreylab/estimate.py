"""Interval-valued estimates of suprema and the refinement verdict rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

FINITE = "finite-stable"
DIVERGING = "diverging-under-refinement"
INCONCLUSIVE = "inconclusive"

STABLE_TOL = 0.01
GROWTH_FACTOR = 2.0


def classify(trace: Sequence[float], tol: float = STABLE_TOL, growth: float = GROWTH_FACTOR) -> str:
    """Verdict from a refinement trace v0, v1, v2, ... of lower bounds.

    Diverging: any infinite value, or growth by ``growth`` across the last two
    refinements. Stable: relative change below ``tol`` at the last refinement.
    """
    vals = [float(v) for v in trace]
    if not vals:
        return INCONCLUSIVE
    if any(math.isinf(v) for v in vals):
        return DIVERGING
    if len(vals) >= 3 and vals[-3] > 0 and vals[-1] >= growth * vals[-3]:
        return DIVERGING
    if len(vals) == 1:
        return INCONCLUSIVE
    v1, v2 = vals[-2], vals[-1]
    if v1 == v2 or abs(v2 - v1) <= tol * abs(v1):
        return FINITE
    return INCONCLUSIVE


@dataclass(frozen=True)
class Estimate:
    """Certified lower bound, optional upper bound, and the refinement trace behind them."""

    lower: float
    upper: float | None = None
    trace: tuple[float, ...] = ()
    stabilized: bool = False
    witness: Any = None
    flags: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper * (1 + 1e-9):
            raise ValueError(f"estimate lower {self.lower} exceeds upper {self.upper}")

    @classmethod
    def from_trace(cls, trace: Sequence[float], witness=None, upper=None, flags=()) -> "Estimate":
        trace = tuple(float(v) for v in trace)
        return cls(
            lower=trace[-1] if trace else 0.0,
            upper=upper,
            trace=trace,
            stabilized=classify(trace) == FINITE,
            witness=witness,
            flags=tuple(flags),
        )

    @property
    def verdict(self) -> str:
        return classify(self.trace) if self.trace else (FINITE if self.stabilized else INCONCLUSIVE)

    @property
    def two_sided(self) -> bool:
        return self.upper is not None

    def times(self, other: "Estimate") -> "Estimate":
        up = None if self.upper is None or other.upper is None else self.upper * other.upper
        return Estimate(self.lower * other.lower, up, stabilized=self.stabilized and other.stabilized)

    def scaled(self, c: float) -> "Estimate":
        up = None if self.upper is None else self.upper * c
        return Estimate(self.lower * c, up, tuple(v * c for v in self.trace), self.stabilized, self.witness, self.flags)

    def to_dict(self) -> dict:
        w = self.witness
        if hasattr(w, "to_dict"):
            w = w.to_dict()
        return {
            "lower": self.lower,
            "upper": self.upper,
            "trace": list(self.trace),
            "stabilized": self.stabilized,
            "verdict": self.verdict,
            "witness": w,
            "flags": list(self.flags),
        }
