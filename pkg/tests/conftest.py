import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from secure_ofdma import ProblemConfig, generate_ensemble


def make_config(n=64, k=8, k1=4, c=0.4, omega=1.0, power=1000.0,
                mode="average", rho=1.0):
    return ProblemConfig(
        n_subcarriers=n,
        n_users=k,
        n_secure=k1,
        secrecy_targets=np.broadcast_to(float(c), (k1,)).copy()
        if np.ndim(c) == 0 else np.asarray(c, float),
        weights=np.broadcast_to(float(omega), (k - k1,)).copy()
        if np.ndim(omega) == 0 else np.asarray(omega, float),
        power=power,
        mode=mode,
        rho=rho,
    )


@pytest.fixture(scope="session")
def headline_config():
    """The headline benchmark setup: N=64, K=8, K1=4, 30 dB budget."""
    return make_config()


@pytest.fixture(scope="session")
def small_ensemble(headline_config):
    return generate_ensemble(headline_config, 300, seed=11)


@pytest.fixture(scope="session")
def tiny_config():
    return make_config(n=4, k=3, k1=1, c=0.3, power=100.0, mode="peak")
