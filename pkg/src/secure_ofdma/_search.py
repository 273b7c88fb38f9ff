"""Monotone binary-search primitives shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rates import _su_power_core


@dataclass
class SearchOutcome:
    value: float           # located search variable
    fn_value: float        # function value there
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)  # (lo, hi) after each step


def bisect_monotone(
    fn, target, lo, hi, tol, *, increasing, max_iter=200, width_floor=1e-12,
) -> SearchOutcome:
    """Locate x in [lo, hi] with |fn(x) - target| <= tol by bisection.

    ``fn`` must be monotone on the bracket with ``fn(lo) <= target <= fn(hi)``
    when increasing (reversed when decreasing).  Terminates on tolerance or
    when the bracket collapses below ``width_floor`` times its initial width.
    """
    trace = []
    width0 = hi - lo
    x, fx = hi, fn(hi)
    if abs(fx - target) <= tol:
        return SearchOutcome(x, fx, 0, True, trace)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if abs(fm - target) <= tol:
            return SearchOutcome(mid, fm, it, True, trace)
        go_up = fm < target if increasing else fm > target
        if go_up:
            lo = mid
        else:
            hi = mid
        trace.append((lo, hi))
        if hi - lo <= width_floor * max(width0, 1.0):
            return SearchOutcome(mid, fm, it, abs(fm - target) <= tol, trace)
    return SearchOutcome(mid, fm, max_iter, False, trace)


class ThresholdCurve:
    """Average secrecy rate and power of one SU as its CNR-gap threshold moves.

    Built from the flattened candidate columns of an ensemble: ``a`` holds the
    SU's CNR where it is the column maximum (restricted to a fixed subcarrier
    set for the fixed-assignment baselines), ``b`` the runner-up CNR.  Power
    follows the secure-user closed form with the price pair (1/threshold, 1),
    which keeps the activation rule at ``a - b > threshold`` exactly.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, t_count: int):
        self.a = np.asarray(a, float)
        self.b = np.asarray(b, float)
        self.gap = self.a - self.b
        self.t_count = t_count

    @property
    def max_gap(self) -> float:
        return float(self.gap.max()) if self.gap.size else 0.0

    def gap_percentile(self, q: float) -> float:
        if self.gap.size == 0:
            return 0.0
        return float(np.percentile(self.gap, q))

    def limit_rate(self) -> float:
        """Average secrecy rate as the threshold (and the power price) -> 0."""
        act = self.gap > 0
        if not act.any():
            return 0.0
        return float(np.log(self.a[act] / self.b[act]).sum() / self.t_count)

    def stats(self, threshold: float):
        """(mean secrecy rate, mean power) at the given threshold.

        A vanishing threshold is the unbounded-power limit: the rate tends
        to the mean log-ratio of the top two CNRs and the power diverges.
        """
        if not np.isfinite(threshold):
            return 0.0, 0.0
        if threshold <= 0:
            return self.limit_rate(), np.inf
        act = self.gap > threshold
        if not act.any():
            return 0.0, 0.0
        a, b = self.a[act], self.b[act]
        p = _su_power_core(a, b, 1.0 / threshold, 1.0)
        rs = np.log1p(p * a) - np.log1p(p * b)
        return float(rs.sum() / self.t_count), float(p.sum() / self.t_count)

    def rate(self, threshold: float) -> float:
        return self.stats(threshold)[0]

    def powers(self, threshold: float) -> np.ndarray:
        """Per-candidate-column powers at the threshold (0 when inactive)."""
        p = np.zeros_like(self.gap)
        if not np.isfinite(threshold):
            return p
        act = self.gap > threshold
        if act.any():
            p[act] = _su_power_core(self.a[act], self.b[act], 1.0 / threshold, 1.0)
        return p


def search_threshold(curve: ThresholdCurve, target: float, eps: float,
                     ub: float | None = None) -> SearchOutcome:
    """Shrink the threshold bracket until |mean rate - target| <= eps*target.

    The rate is continuous and non-increasing in the threshold, so plain
    bisection with a bracket that caps at just above the largest observed
    gap (where the rate is exactly zero) always terminates.
    """
    if target <= 0:
        return SearchOutcome(np.inf, 0.0, 0, True)
    hi = ub if ub is not None else curve.gap_percentile(99.9)
    hard_cap = curve.max_gap * (1 + 1e-9) + 1e-9
    hi = min(max(hi, 1e-12), hard_cap)
    guard = 0
    while curve.rate(hi) > target and guard < 60:
        hi = min(hi * 2.0, hard_cap)
        guard += 1
        if hi >= hard_cap:
            break
    return bisect_monotone(
        curve.rate, target, 0.0, hi, eps * target, increasing=False,
    )
