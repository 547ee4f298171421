import warnings

import numpy as np
import pytest

from tifano.io import ev_to_rad_s
from tifano.materials import HostMedium, TIMaterial
from tifano.quantization import HybridScenario, QuantumDot
from tifano.quasistatics import SphereGeometry, dielectric_from_mode


def make_material(mode_eV=2.2, eps_static=4.0, theta=1.0, eps2=1.5, gamma_0=0.0, mu_1=1.0, mu_2=1.0):
    host = HostMedium(eps2, mu_2)
    diel = dielectric_from_mode(
        float(ev_to_rad_s(mode_eV)), eps_static, host, mu_1=mu_1, theta_over_pi=theta, gamma_0=gamma_0
    )
    return TIMaterial(diel, mu_1=mu_1, theta_over_pi=theta), host


def make_scenario(
    r_nm=7.0,
    omega_a_eV=2.2,
    n=0.495,
    orientation="longitudinal",
    theta=1.0,
    gamma_s=1e8,
    gamma_0=0.0,
    eps2=1.5,
    polarizability=0.0,
):
    ti, host = make_material(theta=theta, eps2=eps2, gamma_0=gamma_0)
    qd = QuantumDot(float(ev_to_rad_s(omega_a_eV)), 7.2e-28, gamma_s, polarizability, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return HybridScenario(ti, host, SphereGeometry(5e-9), qd, r_nm * 1e-9, orientation)


@pytest.fixture
def preset():
    return make_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
