"""Ensemble-average evaluation of allocation policies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import AllocationDecision
from .channel import ChannelEnsemble
from .config import ProblemConfig


@dataclass
class EvaluationReport:
    """Training-set averages of the figures of merit.

    ``r_nu_total`` is the weighted aggregate NU information rate,
    ``r_su`` the per-SU average secrecy rate, both in nat/OFDM symbol.
    """

    r_nu_total: float
    r_su: np.ndarray          # (K1,)
    avg_power: float
    su_power: float           # mean power spent on SU-owned subcarriers
    su_subcarriers: float     # mean count of SU-owned subcarriers
    realizations_used: int

    def to_dict(self) -> dict:
        return {
            "r_nu_total": self.r_nu_total,
            "r_su": np.asarray(self.r_su).tolist(),
            "avg_power": self.avg_power,
            "su_power": self.su_power,
            "su_subcarriers": self.su_subcarriers,
            "realizations_used": self.realizations_used,
        }


def evaluate(
    decisions: list[AllocationDecision],
    ensemble: ChannelEnsemble,
    config: ProblemConfig,
) -> EvaluationReport:
    """Aggregate per-realization decisions with fixed-order summation."""
    if len(decisions) != ensemble.count:
        raise ValueError("need exactly one decision per ensemble realization")
    k, n = ensemble.n_users, ensemble.n_subcarriers
    k1 = config.n_secure
    for d in decisions:
        if d.power.shape != (k, n) or d.owner.shape != (n,):
            raise ValueError("decision dimensions do not match the ensemble")

    t_count = len(decisions)
    r_nu = 0.0
    r_su = np.zeros(k1)
    power = 0.0
    su_power = 0.0
    su_count = 0.0
    for d in decisions:
        r_nu += float(config.weights @ d.nu_rate)
        r_su += d.su_secrecy
        power += d.total_power
        su_owned = (d.owner >= 0) & (d.owner < k1)
        su_power += float(d.power[:, su_owned].sum())
        su_count += int(su_owned.sum())
    return EvaluationReport(
        r_nu_total=r_nu / t_count,
        r_su=r_su / t_count,
        avg_power=power / t_count,
        su_power=su_power / t_count,
        su_subcarriers=su_count / t_count,
        realizations_used=t_count,
    )
