"""Per-realization allocation decisions and solver result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelEnsemble, column_order_stats
from .config import ProblemConfig
from .rates import DualState

UNASSIGNED = -1


@dataclass(frozen=True)
class AllocationDecision:
    """Subcarrier ownership and powers for one channel realization.

    ``owner[n]`` is the user index holding subcarrier ``n`` or -1 when the
    subcarrier is left unpowered.  Exactly the owner's entry of each power
    column is positive.
    """

    owner: np.ndarray       # (N,) int
    power: np.ndarray       # (K, N) >= 0
    su_secrecy: np.ndarray  # (K1,) realized secrecy rate per SU
    nu_rate: np.ndarray     # (K-K1,) realized information rate per NU
    total_power: float


def decisions_from_arrays(
    owner: np.ndarray, power: np.ndarray, ensemble: ChannelEnsemble,
    config: ProblemConfig,
) -> list[AllocationDecision]:
    """Materialize decisions from stacked (T, N) owner / (T, K, N) power arrays.

    Rates are recomputed here from power and channel so stored decisions
    are consistent with the rate formulas by construction.
    """
    t_count = owner.shape[0]
    k1 = config.n_secure
    nu1, nu2, kmax = column_order_stats(ensemble.alpha)
    out = []
    for t in range(t_count):
        su_secrecy = np.zeros(k1)
        nu_rate = np.zeros(config.n_normal)
        own = owner[t]
        pw = power[t]
        for n in np.flatnonzero(own >= 0):
            u = own[n]
            p = pw[u, n]
            a = ensemble.alpha[t, u, n]
            if u < k1:
                beta = nu2[t, n] if kmax[t, n] == u else nu1[t, n]
                su_secrecy[u] += max(np.log1p(p * a) - np.log1p(p * beta), 0.0)
            else:
                nu_rate[u - k1] += np.log1p(p * a)
        out.append(
            AllocationDecision(
                owner=own.copy(),
                power=pw.copy(),
                su_secrecy=su_secrecy,
                nu_rate=nu_rate,
                total_power=float(pw.sum()),
            )
        )
    return out


def validate_exclusivity(decision: AllocationDecision, atol: float = 0.0) -> None:
    """Raise if any subcarrier powers a user other than its owner."""
    positive = decision.power > atol
    per_column = positive.sum(axis=0)
    if np.any(per_column > 1):
        raise ValueError("multiple users powered on one subcarrier")
    for n in range(decision.owner.size):
        u = decision.owner[n]
        if u == UNASSIGNED:
            if per_column[n] != 0:
                raise ValueError(f"unassigned subcarrier {n} carries power")
        elif positive[:, n].any() and not positive[u, n]:
            raise ValueError(f"subcarrier {n} powered by a non-owner")


@dataclass
class SolveResult:
    """Outcome of one solver run over an ensemble."""

    duals: DualState
    report: "EvaluationReport"
    iterations: int
    converged: bool
    infeasible: bool
    dual_value: float = np.nan
    dual_trace: list = field(default_factory=list)
    decisions: list[AllocationDecision] | None = None
    lambda_per_realization: np.ndarray | None = None
    message: str = ""

    def __post_init__(self):
        if self.converged and self.infeasible:
            raise ValueError("converged and infeasible are mutually exclusive")
