"""Shared fixtures: scenario geometry, system parameters, channel draws."""

import numpy as np
import pytest

from risec.channel import ScenarioGeometry, generate_channels
from risec.config import db_to_linear, dbm_to_watts
from risec.system import SystemParams

GEOMETRY = ScenarioGeometry(
    alice_pos=(0.0, 0.0),
    bob_pos=(90.0, 20.0),
    eve_pos=(70.0, 20.0),
    ris_pos=(40.0, 40.0),
)


def make_params(m=4, n=8, pt_dbm=30.0, pi_dbm=30.0, eta2_db=30.0, noise_dbm=-95.0,
                sigma2_i=None):
    sigma2 = dbm_to_watts(noise_dbm)
    return SystemParams(
        m=m,
        n=n,
        p_t=dbm_to_watts(pt_dbm),
        p_i=dbm_to_watts(pi_dbm),
        eta=np.full(n, np.sqrt(db_to_linear(eta2_db))),
        sigma2_B=sigma2,
        sigma2_E=sigma2,
        sigma2_I=sigma2 if sigma2_i is None else sigma2_i,
    )


def make_channels(params, seed):
    return generate_channels(params, GEOMETRY, seed)


@pytest.fixture
def geometry():
    return GEOMETRY


@pytest.fixture
def small_params():
    return make_params(m=2, n=2, eta2_db=20.0)


@pytest.fixture
def paper_params():
    return make_params(m=4, n=8, eta2_db=30.0)
