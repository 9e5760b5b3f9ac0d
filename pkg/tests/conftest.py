import numpy as np
import pytest
from dataclasses import replace

from uavnoma.mgdist import MGDist
from uavnoma.scenario import Scenario, random_topology


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical checks")


def random_mg(rng, max_comp=3, max_shape=4, scale_lo=0.2, scale_hi=5.0) -> MGDist:
    k = int(rng.integers(1, max_comp + 1))
    chi = rng.dirichlet(np.ones(k))
    omega = rng.uniform(scale_lo, scale_hi, k)
    mu = rng.integers(1, max_shape + 1, k)
    return MGDist(chi, omega, mu)


def random_scenario(index: int, rng) -> Scenario:
    """A randomized but physically sane scenario for oracle comparisons."""
    base = random_topology(10_000 + index)
    return replace(
        base,
        r_th_c=float(rng.uniform(0.2, 2.5)),
        r_th_e=float(rng.uniform(0.01, 0.5)),
        xi_u=float(rng.choice([0.0, rng.uniform(0.01, 0.5)])),
        xi_f=float(rng.uniform(0.0, 0.5)),
        m_cu=int(rng.integers(1, 6)),
        m_eu=int(rng.integers(1, 6)),
        m_uf=int(rng.integers(1, 6)),
        m_cf=int(rng.integers(1, 6)),
        p_max1_dbm=float(rng.uniform(10, 40)),
        p_max2_dbm=float(rng.uniform(10, 40)),
        theta1=float(rng.uniform(0.05, 0.95)),
        theta2=float(rng.uniform(0.05, 0.95)),
        pos_u=(base.pos_u[0], base.pos_u[1], float(rng.uniform(3, 20))),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
