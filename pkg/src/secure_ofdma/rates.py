"""Per-subcarrier rates, optimal power levels, and assignment payoffs.

Everything works in nats (natural log) on linear CNRs.  All functions
broadcast over numpy arrays and return scalars for scalar input.  The
``_core`` variants skip argument validation and are what the solvers call
on large arrays; the public functions validate and delegate.

Conventions for a secure user on one subcarrier: ``alpha`` is its own
CNR, ``beta`` the largest CNR among all other users (the strongest
eavesdropper).  A secure user can be paid only when ``alpha - beta``
exceeds ``lam / mu_k``; the priced payoff ``h_su`` is the maximum of
``mu_k * secrecy_rate(p) - lam * p`` over p >= 0, and ``h_nu`` is the
analogous ``omega_k * info_rate(p) - lam * p`` maximum for a normal user.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ProblemConfig


@dataclass
class DualState:
    """Secrecy multipliers and the power multiplier.

    ``lam`` is a scalar under an average power constraint and ``None``
    under a peak constraint, where it is resolved per realization.
    """

    mu: np.ndarray
    lam: float | None = None

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        if np.any(self.mu < 0):
            raise ValueError("secrecy multipliers must be >= 0")
        if self.lam is not None and self.lam < 0:
            raise ValueError("power multiplier must be >= 0")


def _maybe_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_positive(name, value):
    if np.any(np.asarray(value) <= 0):
        raise ValueError(f"{name} must be > 0")


def _check_nonnegative(name, value):
    if np.any(np.asarray(value) < 0):
        raise ValueError(f"{name} must be >= 0")


def secrecy_rate(p, alpha, beta):
    """[ln(1 + p*alpha) - ln(1 + p*beta)]+ in nats."""
    _check_nonnegative("power", p)
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    p, alpha, beta = np.asarray(p, float), np.asarray(alpha, float), np.asarray(beta, float)
    return _maybe_scalar(np.maximum(np.log1p(p * alpha) - np.log1p(p * beta), 0.0))


def info_rate(p, alpha):
    """ln(1 + p*alpha) in nats."""
    _check_nonnegative("power", p)
    _check_positive("alpha", alpha)
    return _maybe_scalar(np.log1p(np.asarray(p, float) * np.asarray(alpha, float)))


def _su_power_core(alpha, beta, mu, lam):
    inv_a = 1.0 / alpha
    inv_b = 1.0 / beta
    # positivity threshold alpha - beta > lam/mu, written division-free so
    # mu == 0 is handled uniformly
    active = mu * (alpha - beta) > lam
    d = inv_a - inv_b
    disc = d * d + (4.0 * mu / lam) * (inv_b - inv_a)
    root = np.sqrt(np.where(active, disc, 1.0))
    p = 0.5 * (root - (inv_a + inv_b))
    # the optimum is strictly positive on the active side; keep that true
    # even when the closed form underflows right at the boundary
    return np.where(active, np.maximum(p, np.finfo(float).tiny), 0.0)


def su_power(alpha, beta, mu_k, lam):
    """Optimal secure-user power for priced payoff mu_k*r_s - lam*p.

    Zero whenever ``alpha - beta <= lam / mu_k`` (in particular for
    ``alpha <= beta``), otherwise the closed-form stationary point of the
    concave priced secrecy payoff.
    """
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    _check_nonnegative("mu_k", mu_k)
    _check_positive("lam", lam)
    out = _su_power_core(
        np.asarray(alpha, float), np.asarray(beta, float),
        np.asarray(mu_k, float), np.asarray(lam, float),
    )
    return _maybe_scalar(out)


def _nu_power_core(alpha, omega, lam):
    return np.maximum(omega / lam - 1.0 / alpha, 0.0)


def nu_power(alpha, omega_k, lam):
    """Water-filling power [omega_k/lam - 1/alpha]+ for a normal user."""
    _check_positive("alpha", alpha)
    _check_positive("omega_k", omega_k)
    _check_positive("lam", lam)
    out = _nu_power_core(
        np.asarray(alpha, float), np.asarray(omega_k, float), np.asarray(lam, float)
    )
    return _maybe_scalar(out)


def _h_su_core(alpha, beta, mu, lam):
    p = _su_power_core(alpha, beta, mu, lam)
    rs = np.where(p > 0, np.log1p(p * alpha) - np.log1p(p * beta), 0.0)
    return np.maximum(mu * rs - lam * p, 0.0), p, rs


def h_su(alpha, beta, mu_k, lam):
    """Maximized priced secrecy payoff max_p mu_k*r_s(p) - lam*p (>= 0)."""
    _check_positive("alpha", alpha)
    _check_positive("beta", beta)
    _check_nonnegative("mu_k", mu_k)
    _check_positive("lam", lam)
    h, _, _ = _h_su_core(
        np.asarray(alpha, float), np.asarray(beta, float),
        np.asarray(mu_k, float), np.asarray(lam, float),
    )
    return _maybe_scalar(h)


def _h_nu_core(alpha, omega, lam):
    gain = omega * np.maximum(np.log(omega * alpha / lam), 0.0)
    cost = np.maximum(omega - lam / alpha, 0.0)
    return np.maximum(gain - cost, 0.0)


def h_nu(alpha, omega_k, lam):
    """Maximized priced information payoff max_p omega_k*r(p) - lam*p.

    Equals omega_k*[ln(omega_k*alpha/lam)]+ - [omega_k - lam/alpha]+ and is
    non-decreasing in alpha.
    """
    _check_positive("alpha", alpha)
    _check_positive("omega_k", omega_k)
    _check_positive("lam", lam)
    out = _h_nu_core(
        np.asarray(alpha, float), np.asarray(omega_k, float), np.asarray(lam, float)
    )
    return _maybe_scalar(out)


def assign_subcarrier(column, duals: DualState, config: ProblemConfig, lam):
    """Auction one subcarrier among all K users at the given dual prices.

    Evaluates the priced payoff of every user (secrecy payoff for SUs,
    information payoff for NUs) and returns ``(owner, power)`` for the
    winner.  Ties between an SU and an NU go to the NU; ties within a type
    go to the lowest index.  If every payoff is zero the subcarrier is
    left unassigned: ``(None, 0.0)``.
    """
    _check_positive("lam", lam)
    column = np.asarray(column, dtype=float)
    k = column.size
    k1 = config.n_secure
    if k != config.n_users:
        raise ValueError("column length must equal the number of users")
    if duals.mu.size != k1:
        raise ValueError("duals.mu must have one entry per SU")

    real = ChannelColumn(column)
    best, nu1, nu2 = real.best, real.nu1, real.nu2

    h = np.zeros(k)
    p = np.zeros(k)
    for u in range(k):
        beta = nu2 if u == best else nu1
        if u < k1:
            h[u], p[u], _ = _h_su_core(column[u], beta, duals.mu[u], lam)
        else:
            h[u] = _h_nu_core(column[u], config.weights[u - k1], lam)
            p[u] = _nu_power_core(column[u], config.weights[u - k1], lam)

    # NU-first ordering implements the tie policy with a single argmax
    order = np.concatenate([np.arange(k1, k), np.arange(k1)])
    winner = order[int(np.argmax(h[order]))]
    if h[winner] <= 0.0:
        return None, 0.0
    return int(winner), float(p[winner])


class ChannelColumn:
    """Order statistics of a single subcarrier column."""

    def __init__(self, column: np.ndarray):
        if column.size < 2:
            raise ValueError("need at least 2 users")
        self.best = int(np.argmax(column))
        self.nu1 = float(column[self.best])
        self.nu2 = float(np.delete(column, self.best).max())


__all__ = [
    "DualState",
    "secrecy_rate",
    "info_rate",
    "su_power",
    "nu_power",
    "h_su",
    "h_nu",
    "assign_subcarrier",
]
