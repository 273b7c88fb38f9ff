"""Independent reference implementations used to check the library.

Nothing here may call into the closed forms under test: power levels come
from bounded 1-D numerical maximization, distributional quantities from
brute-force sampling, and the tiny-instance benchmark from exhaustive
enumeration plus a general-purpose constrained optimizer.
"""

import itertools

import numpy as np
from scipy import optimize


def maximize_power_payoff(payoff, p_hi, tol=1e-11):
    """max_{0 <= p <= p_hi} payoff(p) via bounded scalar search.

    Returns (p_star, value); the p = 0 endpoint is always a candidate.
    """
    res = optimize.minimize_scalar(
        lambda p: -payoff(p), bounds=(0.0, p_hi), method="bounded",
        options={"xatol": tol},
    )
    candidates = [(0.0, payoff(0.0)), (float(res.x), payoff(float(res.x)))]
    return max(candidates, key=lambda c: c[1])


def su_payoff(alpha, beta, mu, lam):
    def f(p):
        rs = max(np.log1p(p * alpha) - np.log1p(p * beta), 0.0)
        return mu * rs - lam * p
    return f


def nu_payoff(alpha, omega, lam):
    def f(p):
        return omega * np.log1p(p * alpha) - lam * p
    return f


def su_power_oracle(alpha, beta, mu, lam):
    # stationarity forces (1+p*a)(1+p*b) = mu(a-b)/lam, so
    # p* <= sqrt(mu (a-b) / (lam a b))
    hi = np.sqrt(max(mu * (alpha - beta) / (lam * alpha * beta), 0.0)) + 1.0
    return maximize_power_payoff(su_payoff(alpha, beta, mu, lam), hi)


def nu_power_oracle(alpha, omega, lam):
    hi = omega / lam + 1.0
    return maximize_power_payoff(nu_payoff(alpha, omega, lam), hi)


def top_two_log_ratio_mc(n_users, rho, samples, seed, batch=1 << 19):
    """Monte Carlo E[ln(nu1/nu2)] over the top two of K exponential draws."""
    rng = np.random.default_rng(seed)
    total = 0.0
    remaining = samples
    while remaining > 0:
        m = min(remaining, batch)
        x = rng.exponential(scale=rho, size=(m, n_users))
        x.sort(axis=1)
        total += float(np.log(x[:, -1] / x[:, -2]).sum())
        remaining -= m
    return total / samples


def weighted_waterfilling_rate(alpha, k1, power):
    """Best-NU water-filling benchmark for the no-secrecy case, unit weights.

    Each subcarrier goes to the NU with the largest CNR; a single water
    level across the whole ensemble spends the average power budget.
    Returns the mean aggregate NU rate.
    """
    t_count = alpha.shape[0]
    best = alpha[:, k1:, :].max(axis=1)  # (T, N)
    inv = 1.0 / best

    def spent(level):
        return float(np.maximum(level - inv, 0.0).sum() / t_count) - power

    hi = power / alpha.shape[2] + float(inv.max())
    level = optimize.brentq(spent, 0.0, hi * 4, xtol=1e-12)
    rate = np.where(level > inv, np.log(level / inv), 0.0)
    return float(rate.sum() / t_count)


def _inner_power_problem(alpha, owners, k1, weights, c_target, power):
    """Best powers for a fixed ownership map of one realization.

    Maximizes the weighted NU rate subject to the SU's total secrecy >= C
    and the frame power cap, with SLSQP.  Returns the optimum or None when
    the map cannot meet the constraint.
    """
    k, n = alpha.shape
    su_cols = []
    nu_cols = []
    for col, owner in enumerate(owners):
        if owner < 0:
            continue
        a = alpha[owner, col]
        others = np.delete(alpha[:, col], owner)
        beta = others.max()
        if owner < k1:
            if a > beta:  # zero-secrecy columns are dead weight for the SU
                su_cols.append((col, a, beta))
        else:
            nu_cols.append((col, a, weights[owner - k1]))
    cap = sum(np.log(a / b) for _, a, b in su_cols)
    if c_target > 0 and cap <= c_target:
        return None
    n_vars = len(su_cols) + len(nu_cols)
    if n_vars == 0:
        return 0.0 if c_target <= 0 else None

    def objective(p):
        return -sum(
            w * np.log1p(p[len(su_cols) + i] * a)
            for i, (_, a, w) in enumerate(nu_cols)
        )

    def secrecy(p):
        return sum(
            np.log1p(p[i] * a) - np.log1p(p[i] * b)
            for i, (_, a, b) in enumerate(su_cols)
        ) - c_target

    constraints = [
        {"type": "ineq", "fun": lambda p: power - p.sum()},
    ]
    if su_cols:
        constraints.append({"type": "ineq", "fun": secrecy})
    best = None
    for frac in (0.5, 0.95, 0.1):
        x0 = np.full(n_vars, frac * power / max(n_vars, 1))
        res = optimize.minimize(
            objective, x0, method="SLSQP", constraints=constraints,
            bounds=[(0.0, power)] * n_vars,
            options={"maxiter": 300, "ftol": 1e-12},
        )
        if not res.success:
            continue
        p = np.clip(res.x, 0.0, None)
        if p.sum() > power * (1 + 1e-6):
            continue
        if su_cols and secrecy(p) < -1e-6 * max(c_target, 1.0):
            continue
        value = -objective(p)
        if best is None or value > best:
            best = value
    return best


def _map_upper_bound(alpha, owners, k1, weights, power):
    """NU value of this map with the secrecy constraint dropped entirely."""
    cols = [
        (alpha[o, n], weights[o - k1])
        for n, o in enumerate(owners) if o >= k1
    ]
    if not cols:
        return 0.0
    a = np.array([c[0] for c in cols])
    w = np.array([c[1] for c in cols])

    def spend(lam):
        return np.maximum(w / lam - 1.0 / a, 0.0).sum() - power

    hi = w.max() * a.max()
    lam = optimize.brentq(spend, 1e-12, hi + 1.0, xtol=1e-12)
    p = np.maximum(w / lam - 1.0 / a, 0.0)
    return float((w * np.log1p(p * a)).sum())


def exhaustive_best_rate(alpha, k1, weights, c_target, power):
    """Enumerate every ownership map of one frame, solving powers per map.

    Only single-SU instances are supported (the SU is user 0).  Maps are
    visited in order of an optimistic secrecy-free bound so the search can
    stop early; the result is still the exact enumeration optimum.
    Returns the best weighted NU rate, or None when no map meets the target.
    """
    assert k1 == 1
    k, n = alpha.shape
    ranked = sorted(
        (
            (_map_upper_bound(alpha, owners, k1, weights, power), owners)
            for owners in itertools.product(range(-1, k), repeat=n)
        ),
        key=lambda item: -item[0],
    )
    best = None
    for bound, owners in ranked:
        if best is not None and bound <= best:
            break
        value = _inner_power_problem(alpha, owners, k1, weights, c_target, power)
        if value is not None and (best is None or value > best):
            best = value
    return best
