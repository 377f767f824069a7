"""Wöhler-curve cycle life and the fleet depth-of-discharge penalties."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from degvrp.model import TOL, FleetState

CYCLES_LABEL = "estimated cycles (Woehler power law calibrated to reference anchors; indicative only)"

# (DoD %, cycles). The cycle counts are published as upper bounds.
ANCHORS: tuple[tuple[float, float], ...] = ((66.0, 10000.0), (44.0, 27500.0), (41.0, 30000.0))

# Moving from 65 % to 45 % DoD must at least multiply cycle life by this.
LIFE_GAIN = (65.0, 45.0, 2.5)

# Keeps the fitted inequalities strict after rounding.
_FIT_MARGIN = 1e-9


class Variant(str, enum.Enum):
    BASE = "base"
    QUADRATIC_SPREAD = "quad"
    LINEAR_MIN_DOD = "linear"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, Variant):
            return value
        aliases = {
            "base": cls.BASE,
            "quad": cls.QUADRATIC_SPREAD,
            "quadraticspread": cls.QUADRATIC_SPREAD,
            "quadratic_spread": cls.QUADRATIC_SPREAD,
            "linear": cls.LINEAR_MIN_DOD,
            "linearmindod": cls.LINEAR_MIN_DOD,
            "linear_min_dod": cls.LINEAR_MIN_DOD,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown objective variant {value!r}") from None


@dataclass(frozen=True)
class ObjectiveSpec:
    variant: Variant = Variant.BASE
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")


@dataclass(frozen=True)
class WoehlerCurve:
    """Power law N(d) = n_ref * (dod_ref / d) ** exponent."""

    n_ref: float
    dod_ref: float
    exponent: float

    def __post_init__(self):
        if not self.n_ref > 0:
            raise ValueError(f"n_ref must be positive, got {self.n_ref}")
        if not 0 < self.dod_ref <= 100:
            raise ValueError(f"dod_ref must lie in (0, 100], got {self.dod_ref}")
        if not self.exponent > 0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")


def cycle_life(curve: WoehlerCurve, dod: float) -> float:
    if not 0 < dod <= 100:
        raise ValueError(f"DoD must lie in (0, 100], got {dod}")
    if dod == curve.dod_ref:
        return float(curve.n_ref)
    return float(curve.n_ref * (curve.dod_ref / dod) ** curve.exponent)


def loglog_lstsq(points) -> tuple[float, float]:
    """Closed-form fit of log N = a + b log d. Returns (a, b)."""
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    xm, ym = x.mean(), y.mean()
    b = float(((x - xm) * (y - ym)).sum() / ((x - xm) ** 2).sum())
    return float(ym - b * xm), b


def _constrained_loglog_fit(points, rows, rhs) -> tuple[float, float]:
    """Least squares in (a, b) subject to rows @ (a, b) <= rhs.

    Two unknowns, so the optimum has at most two active constraints;
    enumerate every active set and keep the best feasible candidate.
    """
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    A = np.column_stack([np.ones_like(x), x])
    H = A.T @ A
    g = A.T @ y
    G = np.asarray(rows, dtype=float)
    h = np.asarray(rhs, dtype=float)
    best = None
    for size in range(3):
        for active in itertools.combinations(range(len(h)), size):
            idx = list(active)
            Ga = G[idx]
            kkt = np.block([[H, Ga.T], [Ga, np.zeros((size, size))]])
            try:
                sol = np.linalg.solve(kkt, np.concatenate([g, h[idx]]))
            except np.linalg.LinAlgError:
                continue
            p = sol[:2]
            if np.any(G @ p > h + 1e-12):
                continue
            if size and np.any(sol[2:] < -1e-12):
                continue
            sse = float(((A @ p - y) ** 2).sum())
            if best is None or sse < best[0] - 1e-15:
                best = (sse, p)
    if best is None:
        raise RuntimeError("constrained cycle-life fit is infeasible")
    return float(best[1][0]), float(best[1][1])


@lru_cache(maxsize=None)
def fit_default_curve() -> WoehlerCurve:
    """Power law fitted in log-log space to the three DoD/cycle anchors.

    The anchors are upper bounds, so the least-squares fit is constrained
    to stay at or below each of them and to keep the 65 % -> 45 % life
    gain at or above ``LIFE_GAIN``. The unconstrained fit misses both.
    """
    # log N = a + b log d; b is the negated exponent.
    rows, rhs = [], []
    for d, n in ANCHORS:
        rows.append((1.0, math.log(d)))
        rhs.append(math.log(n) - _FIT_MARGIN)
    hi, lo, gain = LIFE_GAIN
    # N(lo)/N(hi) = (hi/lo)^(-b) >= gain  <=>  b <= -log(gain)/log(hi/lo)
    rows.append((0.0, 1.0))
    rhs.append(-math.log(gain) / math.log(hi / lo) - _FIT_MARGIN)
    a, b = _constrained_loglog_fit(ANCHORS, rows, rhs)
    dod_ref = ANCHORS[0][0]
    return WoehlerCurve(n_ref=math.exp(a + b * math.log(dod_ref)), dod_ref=dod_ref, exponent=-b)


def worst_case_cycles(curve: WoehlerCurve, fleet: FleetState) -> float:
    """Cycle life of the most deeply discharged battery; inf if none cycles."""
    cycling = [d for d in fleet.dod if d > TOL]
    if not cycling:
        return math.inf
    worst = max(cycling)
    if 100.0 < worst <= 100.0 + TOL:
        worst = 100.0
    return cycle_life(curve, worst)


def penalty(spec: ObjectiveSpec, fleet: FleetState) -> float:
    if spec.variant is Variant.BASE:
        return 0.0
    if spec.variant is Variant.QUADRATIC_SPREAD:
        return (fleet.dod_max - fleet.dod_min) ** 2
    return -fleet.dod_min


def total_objective(spec: ObjectiveSpec, route_cost: float, fleet: FleetState) -> float:
    if spec.variant is Variant.BASE or spec.alpha == 0:
        return float(route_cost)
    return float(route_cost + spec.alpha * penalty(spec, fleet))
