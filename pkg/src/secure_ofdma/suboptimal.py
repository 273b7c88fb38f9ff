"""Low-complexity two-phase allocator.

Phase 1 serves the secure users in isolation, treating every other user
as a pure eavesdropper: SU k claims the subcarriers where its CNR beats
the best other CNR by more than a per-user gap threshold, and K1
independent binary searches tune the thresholds until each average
secrecy target is met.  Phase 2 distributes the leftover subcarriers and
power among the normal users by searching a single water level with
per-user levels proportional to the weights.  The two phases decouple
the multiplier updates, so the whole run needs O((K1+1) log(1/eps))
bisection steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._search import ThresholdCurve, bisect_monotone, search_threshold
from .allocation import SolveResult, decisions_from_arrays
from .channel import ChannelEnsemble, column_order_stats
from .config import ProblemConfig, SolverOptions
from .evaluate import evaluate
from .rates import DualState


class SecrecyInfeasibleError(RuntimeError):
    """A secrecy target is unreachable even with a vanishing gap threshold."""

    def __init__(self, su_index: int, achievable: float, target: float):
        self.su_index = su_index
        self.achievable = achievable
        self.target = target
        super().__init__(
            f"SU {su_index}: target {target:.4g} exceeds the achievable "
            f"average secrecy rate {achievable:.4g} on this ensemble"
        )


@dataclass
class SuboptimalState:
    """Tuned search variables of the two phases."""

    nu_thresholds: np.ndarray   # (K1,) CNR-gap thresholds, inf = no service
    water_level: float          # base water level L0
    weights: np.ndarray

    @property
    def per_nu_levels(self) -> np.ndarray:
        return self.weights * self.water_level


@dataclass
class SuPhaseReport:
    secrecy: np.ndarray          # (K1,) achieved average secrecy rates
    power: np.ndarray            # (K1,) average power spent per SU
    iterations: np.ndarray       # (K1,) bisection steps per SU
    occupied: np.ndarray         # (T, N) bool, subcarriers claimed by any SU
    claimed: list = field(default_factory=list, repr=False)  # per-SU (T, N) bool
    curves: list = field(default_factory=list, repr=False)


@dataclass
class NuPhaseReport:
    nu_rate: np.ndarray          # (K-K1,) average information rate per NU
    power: float                 # average NU power
    iterations: int
    budget_exhausted: bool
    owner_nu: np.ndarray | None = None   # (T, N) NU winner or -1, repr-free
    power_nu: np.ndarray | None = None   # (T, N) NU powers


def su_phase(
    ensemble: ChannelEnsemble,
    config: ProblemConfig,
    eps: float,
    candidate_sets: list[np.ndarray] | None = None,
):
    """Tune per-SU gap thresholds to the secrecy targets.

    ``candidate_sets`` restricts SU k to a fixed subcarrier set (used by
    the fixed-assignment baselines); by default every subcarrier where the
    SU has the largest CNR is a candidate.  Returns
    ``(nu_thresholds, SuPhaseReport, total SU power)``.
    """
    k1 = config.n_secure
    nu1, nu2, kmax = column_order_stats(ensemble.alpha)
    t_count = ensemble.count

    thresholds = np.full(k1, np.inf)
    secrecy = np.zeros(k1)
    power = np.zeros(k1)
    iterations = np.zeros(k1, dtype=int)
    occupied = np.zeros((t_count, config.n_subcarriers), dtype=bool)
    claimed_masks = []
    curves = []

    for k in range(k1):
        mask = kmax == k
        if candidate_sets is not None:
            in_set = np.zeros(config.n_subcarriers, dtype=bool)
            in_set[candidate_sets[k]] = True
            mask = mask & in_set
        curve = ThresholdCurve(nu1[mask], nu2[mask], t_count)
        curves.append(curve)
        claimed = np.zeros_like(occupied)
        target = float(config.secrecy_targets[k])
        if target > 0:
            achievable = curve.limit_rate()
            if achievable <= target * (1 - eps):
                raise SecrecyInfeasibleError(k, achievable, target)
            out = search_threshold(curve, target, eps)
            thresholds[k] = out.value
            iterations[k] = out.iterations
            secrecy[k], power[k] = curve.stats(out.value)
            claimed[mask] = curve.gap > thresholds[k]
        claimed_masks.append(claimed)
        occupied |= claimed

    report = SuPhaseReport(
        secrecy=secrecy, power=power, iterations=iterations,
        occupied=occupied, claimed=claimed_masks, curves=curves,
    )
    return thresholds, report, float(power.sum())


def nu_phase(
    ensemble: ChannelEnsemble,
    config: ProblemConfig,
    p_residual: float,
    occupied: np.ndarray,
    eps: float,
    fixed_sets: list[np.ndarray] | None = None,
):
    """Search the NU water level that spends the residual power.

    On each free subcarrier the NU with the largest priced payoff wins
    (with ``fixed_sets`` the owner is predetermined instead).  Average NU
    power is non-decreasing in the water level, so bisection stops when
    the total spend matches the budget within ``eps * power``.  A
    non-positive residual short-circuits to an all-zero allocation with
    ``budget_exhausted`` set.  Returns ``(water_level, NuPhaseReport)``.
    """
    t_count = ensemble.count
    n = config.n_subcarriers
    k1 = config.n_secure
    n_nu = config.n_normal
    omega = config.weights

    if p_residual <= 0:
        return 0.0, NuPhaseReport(
            nu_rate=np.zeros(n_nu), power=0.0, iterations=0,
            budget_exhausted=True,
            owner_nu=np.full((t_count, n), -1), power_nu=np.zeros((t_count, n)),
        )

    alpha_nu = ensemble.alpha[:, k1:, :]
    inv_alpha = 1.0 / alpha_nu
    ln_wa = np.log(omega[:, None] * alpha_nu)

    if fixed_sets is not None:
        owner = np.full(n, -1)
        for j, subs in enumerate(fixed_sets):
            owner[subs] = j
        owner_nu = np.broadcast_to(owner, (t_count, n))
        free = owner_nu >= 0
        idx = np.where(free, owner_nu, 0)[:, None, :]
        inv_a_win = np.take_along_axis(inv_alpha, idx, axis=1)[:, 0, :]
        ln_wa_win = np.take_along_axis(ln_wa, idx, axis=1)[:, 0, :]
        w_win = omega[np.where(free, owner_nu, 0)]

        def assignment(level):
            return owner_nu, inv_a_win, ln_wa_win, w_win
    else:
        free = ~occupied

        def assignment(level):
            h = np.maximum(
                omega[:, None] * np.maximum(ln_wa + np.log(level), 0.0)
                - np.maximum(omega[:, None] - inv_alpha / level, 0.0),
                0.0,
            )
            j = np.argmax(h, axis=1)
            take = j[:, None, :]
            return (
                np.where(free, j, -1),
                np.take_along_axis(inv_alpha, take, axis=1)[:, 0, :],
                np.take_along_axis(ln_wa, take, axis=1)[:, 0, :],
                omega[j],
            )

    def spend(level):
        if level <= 0:
            return 0.0
        _, inv_a, _, w = assignment(level)
        p = np.maximum(w * level - inv_a, 0.0)
        return float(np.where(free, p, 0.0).sum() / t_count)

    hi = max(config.power, 1e-12)
    guard = 0
    while spend(hi) < p_residual and guard < 200:
        hi *= 2.0
        guard += 1
    out = bisect_monotone(
        spend, p_residual, 0.0, hi, eps * config.power, increasing=True,
    )
    level = out.value

    owner_nu, inv_a, ln_wa_win, w_win = assignment(level)
    p = np.where(free & (owner_nu >= 0), np.maximum(w_win * level - inv_a, 0.0), 0.0)
    rate = np.where(p > 0, np.maximum(ln_wa_win + np.log(level), 0.0), 0.0)
    nu_rate = np.zeros(n_nu)
    won = p > 0
    np.add.at(nu_rate, owner_nu[won], rate[won])
    nu_rate /= t_count

    report = NuPhaseReport(
        nu_rate=nu_rate,
        power=float(p.sum() / t_count),
        iterations=out.iterations,
        budget_exhausted=False,
        owner_nu=np.where(won, owner_nu, -1),
        power_nu=p,
    )
    return level, report


def _assemble_result(ensemble, config, opts, thresholds, su_rep, nu_rep,
                     level, iterations, converged, infeasible, message):
    from .rates import _su_power_core

    t_count = ensemble.count
    k1 = config.n_secure
    nu1, nu2, _ = column_order_stats(ensemble.alpha)

    owner = np.full((t_count, config.n_subcarriers), -1, dtype=np.int64)
    p_win = np.zeros((t_count, config.n_subcarriers))
    for k in range(k1):
        mask = su_rep.claimed[k]
        if not np.isfinite(thresholds[k]) or not mask.any():
            continue
        owner[mask] = k
        p_win[mask] = _su_power_core(
            nu1[mask], nu2[mask], 1.0 / thresholds[k], 1.0
        )
    if nu_rep.owner_nu is not None:
        nu_cols = nu_rep.owner_nu >= 0
        owner[nu_cols] = k1 + nu_rep.owner_nu[nu_cols]
        p_win[nu_cols] = nu_rep.power_nu[nu_cols]

    power = np.zeros((t_count, config.n_users, config.n_subcarriers))
    tt, nn = np.nonzero(owner >= 0)
    power[tt, owner[tt, nn], nn] = p_win[tt, nn]
    decisions = decisions_from_arrays(owner, power, ensemble, config)
    report = evaluate(decisions, ensemble, config)

    lam = 1.0 / level if level > 0 else None
    mu = np.zeros(k1)
    finite = np.isfinite(thresholds) & (thresholds > 0)
    mu[finite] = (lam if lam is not None else 1.0) / thresholds[finite]
    return SolveResult(
        duals=DualState(mu=mu, lam=lam),
        report=report,
        iterations=int(iterations),
        converged=converged,
        infeasible=infeasible,
        decisions=decisions if opts.keep_decisions else None,
        message=message,
    )


def solve_suboptimal(
    ensemble: ChannelEnsemble,
    config: ProblemConfig,
    opts: SolverOptions | None = None,
) -> SolveResult:
    """Run both phases and package the allocation like the other solvers."""
    if config.mode != "average":
        raise ValueError("the two-phase allocator supports only mode='average'")
    opts = opts or SolverOptions()
    eps = opts.epsilon
    try:
        thresholds, su_rep, p_su = su_phase(ensemble, config, eps)
    except SecrecyInfeasibleError as err:
        return SolveResult(
            duals=DualState(mu=np.zeros(config.n_secure), lam=None),
            report=evaluate(
                decisions_from_arrays(
                    np.full((ensemble.count, config.n_subcarriers), -1),
                    np.zeros((ensemble.count, config.n_users, config.n_subcarriers)),
                    ensemble, config,
                ),
                ensemble, config,
            ),
            iterations=0,
            converged=False,
            infeasible=True,
            message=str(err),
        )

    residual = config.power - p_su
    level, nu_rep = nu_phase(ensemble, config, residual, su_rep.occupied, eps)
    iterations = int(su_rep.iterations.sum()) + nu_rep.iterations

    if nu_rep.budget_exhausted:
        return _assemble_result(
            ensemble, config, opts, thresholds, su_rep, nu_rep, 0.0,
            iterations, converged=False, infeasible=True,
            message=(
                f"secrecy targets consume {p_su:.4g} of the {config.power:.4g} "
                f"power budget; nothing left for normal users"
            ),
        )

    targets = config.secrecy_targets
    secrecy_ok = np.all(
        (targets <= 0) | (np.abs(su_rep.secrecy - targets) <= eps * np.maximum(targets, 1e-300))
    )
    power_ok = abs(p_su + nu_rep.power - config.power) < eps * config.power
    return _assemble_result(
        ensemble, config, opts, thresholds, su_rep, nu_rep, level,
        iterations, converged=bool(secrecy_ok and power_ok), infeasible=False,
        message="",
    )
