import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tifano.errors import PhysicsError, PhysicsWarning
from tifano.materials import (
    SI,
    DielectricModel,
    HostMedium,
    PhysicalConstants,
    TIMaterial,
    alpha_tilde,
    effective_permeability,
    epsilon1,
    magnetoelectric_term,
    static_permittivity,
)


def test_constants_consistent():
    assert abs((SI.mu_0 * SI.epsilon_0) ** -0.5 / SI.c - 1) < 1e-12
    assert abs(SI.alpha_fs - 1 / 137.036) < 1e-4
    assert SI.hbar == 1.054571817e-34


def test_constants_reject_inconsistent_c():
    with pytest.raises(ValueError):
        PhysicalConstants(epsilon_0=8.85e-12, mu_0=SI.mu_0, c=3.1e8, hbar=SI.hbar, alpha_fs=SI.alpha_fs)


def test_static_limit():
    m = DielectricModel(omega_e=3.0, omega_R=2.0, gamma_0=0.1)
    assert_allclose(epsilon1(m, 0.0), 1 + (3.0 / 2.0) ** 2, rtol=0, atol=1e-15)
    assert static_permittivity(m) == 1 + 2.25


def test_static_permittivity_four():
    m = DielectricModel(omega_e=math.sqrt(3.0) * 1e15, omega_R=1e15)
    assert_allclose(epsilon1(m, 0.0).real, 4.0, rtol=1e-15)


def test_transparency():
    m = DielectricModel(omega_e=2e15, omega_R=1e15)
    assert abs(epsilon1(m, 1e6 * m.omega_R) - 1) < 1e-9


def test_passivity_and_reality():
    m = DielectricModel(omega_e=2e15, omega_R=1e15, gamma_0=1e13)
    w = np.linspace(0, 5e15, 1001)
    eps = epsilon1(m, w)
    assert np.all(eps.imag >= 0)
    # eps(-w) = conj(eps(w)) for real w, evaluated directly on the formula
    minus = 1 + m.omega_e**2 / (m.omega_R**2 - (-w) * (-w + 1j * m.gamma_0))
    assert_allclose(minus, np.conj(eps), rtol=1e-15)


def test_undamped_pole():
    m = DielectricModel(omega_e=2.0, omega_R=1.0)
    with pytest.raises(PhysicsError, match="undamped resonance singularity"):
        epsilon1(m, 1.0)


def test_negative_frequency_rejected():
    with pytest.raises(PhysicsError):
        epsilon1(DielectricModel(1.0, 1.0), -1.0)


@pytest.mark.parametrize(
    "kw", [dict(omega_e=0.0, omega_R=1.0), dict(omega_e=1.0, omega_R=-1.0), dict(omega_e=1.0, omega_R=1.0, gamma_0=-1)]
)
def test_dielectric_validation(kw):
    with pytest.raises(PhysicsError):
        DielectricModel(**kw)


def test_low_q_warning():
    with pytest.warns(PhysicsWarning):
        m = DielectricModel(1.0, 1.0, gamma_0=0.5)
    assert not m.high_q
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert DielectricModel(1.0, 1.0, gamma_0=0.01).high_q


def test_alpha_tilde():
    d = DielectricModel(1.0, 1.0)
    assert alpha_tilde(TIMaterial(d, theta_over_pi=0)) == 0
    assert_allclose(alpha_tilde(TIMaterial(d, theta_over_pi=1)), 7.2973525693e-3)
    assert_allclose(alpha_tilde(TIMaterial(d, theta_over_pi=95)), 0.6932, rtol=1e-4)


def test_quantized_theta():
    d = DielectricModel(1.0, 1.0)
    TIMaterial(d, theta_over_pi=3, quantized_theta=True)
    TIMaterial(d, theta_over_pi=-1, quantized_theta=True)
    for bad in (2, 0.5, 0):
        with pytest.raises(PhysicsError):
            TIMaterial(d, theta_over_pi=bad, quantized_theta=True)
    TIMaterial(d, theta_over_pi=0.37)


def test_effective_permeability():
    d = DielectricModel(1.0, 1.0)
    assert effective_permeability(TIMaterial(d), HostMedium()) == 2 / 3
    assert_allclose(effective_permeability(TIMaterial(d), HostMedium(mu_2=2.0)), 4 / 5, rtol=1e-15)
    assert_allclose(effective_permeability(TIMaterial(d, mu_1=1e12), HostMedium()), 2.0, rtol=1e-11)


def test_magnetoelectric_term():
    ti = TIMaterial(DielectricModel(1.0, 1.0), theta_over_pi=95)
    assert_allclose(magnetoelectric_term(ti, HostMedium()), (2 / 3) * (95 * SI.alpha_fs) ** 2, rtol=1e-15)


def test_host_validation():
    with pytest.raises(PhysicsError):
        HostMedium(epsilon_2=0.5)
    with pytest.raises(PhysicsError):
        HostMedium(mu_2=0)
