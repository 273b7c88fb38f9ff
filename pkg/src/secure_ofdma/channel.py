"""Rayleigh-fading CNR ensembles and per-subcarrier order statistics.

CNRs are sampled directly in power space: the squared envelope of a
Rayleigh channel with unit noise is exponential, so each entry is an
independent exponential draw with mean ``rho``.

Each realization is produced from its own counter-based Philox stream
keyed by ``(seed, index)``, so realization ``i`` is a pure function of
the seed and its index: regeneration is bit-identical for any count,
prefix-stable when the count grows, and safe to parallelize.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

from .config import ProblemConfig

_MAGIC = b"CNR1"
_HEADER = struct.Struct("<4sIIIdq")  # magic, K, N, count, rho, seed


@dataclass(frozen=True)
class ChannelRealization:
    """CNR matrix for one frame, indexed [user, subcarrier]."""

    alpha: np.ndarray  # shape (K, N), all entries > 0

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 2:
            raise ValueError("alpha must be a 2-D (users x subcarriers) matrix")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValueError("alpha entries must be positive and finite")
        object.__setattr__(self, "alpha", a)

    @property
    def n_users(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.alpha.shape[1]


@dataclass(frozen=True)
class ChannelEnsemble:
    """Ordered stack of i.i.d. channel realizations."""

    alpha: np.ndarray  # shape (count, K, N)
    seed: int
    rho: float

    def __post_init__(self):
        if self.alpha.ndim != 3 or self.alpha.shape[0] < 1:
            raise ValueError("alpha must be a nonempty (count, K, N) stack")

    @property
    def count(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_users(self) -> int:
        return self.alpha.shape[1]

    @property
    def n_subcarriers(self) -> int:
        return self.alpha.shape[2]

    def realization(self, i: int) -> ChannelRealization:
        return ChannelRealization(self.alpha[i])

    @property
    def realizations(self) -> list[ChannelRealization]:
        return [self.realization(i) for i in range(self.count)]


def _draw_realization(seed: int, index: int, k: int, n: int, rho: float) -> np.ndarray:
    # Distinct 256-bit counter block per realization; 2**128 draws of room.
    bits = np.random.Philox(key=seed, counter=index << 128)
    u = np.random.Generator(bits).random((k, n))
    x = -rho * np.log1p(-u)
    # u == 0 happens with probability 2**-53 per draw; keep alpha > 0 strict
    return np.maximum(x, np.finfo(float).tiny)


def generate_ensemble(config: ProblemConfig, count: int, seed: int) -> ChannelEnsemble:
    """Draw ``count`` i.i.d. exponential CNR matrices with mean ``config.rho``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if not config.rho > 0:
        raise ValueError("rho must be > 0")
    k, n = config.n_users, config.n_subcarriers
    alpha = np.empty((count, k, n), dtype=float)
    for i in range(count):
        alpha[i] = _draw_realization(int(seed), i, k, n, config.rho)
    return ChannelEnsemble(alpha=alpha, seed=int(seed), rho=float(config.rho))


def order_stats(real: ChannelRealization, n: int):
    """Top-two CNRs on subcarrier ``n`` (0-based).

    Returns ``(best_user, nu1, nu2)`` where ``nu1 >= nu2`` are the largest
    and second-largest CNRs in the column and ties go to the lowest user
    index.  The strongest eavesdropper CNR for the best user is ``nu2``;
    for every other user it is ``nu1``.
    """
    if real.n_users < 2:
        raise ValueError("order statistics need at least 2 users")
    if not (0 <= n < real.n_subcarriers):
        raise ValueError("subcarrier index out of range")
    col = real.alpha[:, n]
    best = int(np.argmax(col))
    rest = np.delete(col, best)
    return best, float(col[best]), float(rest.max())


def column_order_stats(alpha: np.ndarray):
    """Vectorized top-two statistics along the user axis.

    ``alpha`` has shape (..., K, N); returns ``(nu1, nu2, kmax)`` each of
    shape (..., N), with first-index tie-breaking on ``kmax``.
    """
    if alpha.shape[-2] < 2:
        raise ValueError("order statistics need at least 2 users")
    kmax = np.argmax(alpha, axis=-2)
    nu1 = np.take_along_axis(alpha, kmax[..., None, :], axis=-2)[..., 0, :]
    masked = np.array(alpha, copy=True)
    np.put_along_axis(masked, kmax[..., None, :], -np.inf, axis=-2)
    nu2 = masked.max(axis=-2)
    return nu1, nu2, kmax


def save_ensemble(ensemble: ChannelEnsemble, path) -> None:
    """Write the documented flat binary format.

    Layout: 32-byte little-endian header ``(magic 'CNR1', K:u32, N:u32,
    count:u32, rho:f64, seed:i64)`` followed by ``count`` row-major
    float64 (K, N) matrices.  Round-trips losslessly at 64-bit precision.
    """
    header = _HEADER.pack(
        _MAGIC,
        ensemble.n_users,
        ensemble.n_subcarriers,
        ensemble.count,
        ensemble.rho,
        ensemble.seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(ensemble.alpha, dtype="<f8").tobytes())


def load_ensemble(path) -> ChannelEnsemble:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: not an ensemble file")
        magic, k, n, count, rho, seed = _HEADER.unpack(header)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not an ensemble file")
        data = np.frombuffer(fh.read(), dtype="<f8")
    expected = count * k * n
    if data.size != expected:
        raise ValueError(f"{path}: truncated ensemble payload")
    alpha = data.reshape(count, k, n).astype(float)
    return ChannelEnsemble(alpha=alpha, seed=seed, rho=rho)


def ensemble_hash(ensemble: ChannelEnsemble) -> str:
    """Content hash of the ensemble (header fields plus raw samples)."""
    h = hashlib.sha256()
    h.update(
        _HEADER.pack(
            _MAGIC,
            ensemble.n_users,
            ensemble.n_subcarriers,
            ensemble.count,
            ensemble.rho,
            ensemble.seed,
        )
    )
    h.update(np.ascontiguousarray(ensemble.alpha, dtype="<f8").tobytes())
    return h.hexdigest()
