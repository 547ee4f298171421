import dataclasses
import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import make_material, make_scenario
from tifano.errors import PhysicsError, PhysicsWarning
from tifano.materials import SI, DielectricModel, HostMedium, TIMaterial
from tifano.quantization import (
    ANGSTROM3_TO_SI,
    HybridScenario,
    Orientation,
    QuantumDot,
    coupling_strength,
    dispersive_slope,
    normalization_constants,
    radiative_decay_rate,
    stark_shift_bound,
)
from tifano.quasistatics import SphereGeometry, derived_frequencies

R = 5e-9
GEOM = SphereGeometry(R)


def classical_ti():
    # eps1(0) = 4, no axion term
    return TIMaterial(DielectricModel(math.sqrt(3.0) * 2e15, 2e15), theta_over_pi=0)


def test_energy_density_factor_classical():
    c = normalization_constants(classical_ti(), HostMedium(1.5), GEOM)
    # P = 4 and Q = 3: U0 = 2 (eps2 + 1) + 2 P^2 / Q
    assert_allclose(c.U0, 5 + 32 / 3, rtol=1e-15)
    assert_allclose(c.V_m, 8 * math.pi * R**3 / 3 * 28 / (3 * c.U0), rtol=1e-15)
    assert_allclose(c.V_m, 8 * math.pi * R**3 / 3 * 28 / 47, rtol=1e-15)


def test_energy_density_factor_equals_dispersive_slope_plus_host():
    ti, host = make_material(theta=11)
    c = normalization_constants(ti, host, GEOM)
    s = (2 / 3) * (11 * SI.alpha_fs) ** 2
    magnetic = s * (1 + (2 / 3) / ti.mu_1)
    slope = dispersive_slope(ti, host)
    P = 2 * host.epsilon_2 + 1 + s
    assert_allclose(slope, 1 + P + 2 * P**2 / 3.0, rtol=1e-13)
    assert_allclose(c.U0, 2 * (host.epsilon_2 + 1) + magnetic + 2 * P**2 / 3.0, rtol=1e-15)


def test_norm_factor_classical():
    ti = classical_ti()
    Omega = derived_frequencies(ti, HostMedium(1.5)).Omega
    c = normalization_constants(ti, HostMedium(1.5), GEOM)
    expected = 4 * math.pi * SI.epsilon_0 * R**3 / (3 * SI.hbar * Omega) * 4 * 7 / 3
    assert_allclose(c.norm_factor_sq_inv, expected, rtol=1e-15)


def test_field_amplitude_identity():
    ti, host = make_material(theta=95)
    c = normalization_constants(ti, host, GEOM)
    assert_allclose(c.field_amp**2 * 2 * SI.epsilon_0 * c.V_m, SI.hbar * c.Omega, rtol=1e-15)


def test_degenerate_permittivity():
    # eps1(0) exactly 1 cannot be built from positive oscillator strength, so patch the model
    ti = classical_ti()
    fake = dataclasses.replace(ti, dielectric=DielectricModel(1e-200, 1e15))
    with pytest.raises(PhysicsError, match="degenerate permittivity"):
        normalization_constants(fake, HostMedium(1.5), GEOM)


def test_even_in_theta():
    ti, host = make_material(theta=11)
    tm = dataclasses.replace(ti, theta_over_pi=-11)
    a, b = normalization_constants(ti, host, GEOM), normalization_constants(tm, host, GEOM)
    assert a == b
    assert radiative_decay_rate(ti, host, GEOM) == radiative_decay_rate(tm, host, GEOM)


def test_inverse_norm_increases_with_axion_strength():
    ti, host = make_material(theta=1)
    Omega = derived_frequencies(ti, host).Omega
    values = [
        normalization_constants(dataclasses.replace(ti, theta_over_pi=t), host, GEOM, Omega).norm_factor_sq_inv
        for t in np.linspace(0, 120, 25)
    ]
    assert np.all(np.diff(values) > 0)


def test_coupling_orientation_ratio(preset):
    trans = dataclasses.replace(preset, orientation=Orientation.TRANSVERSE)
    c = normalization_constants(preset.ti, preset.host, preset.geom)
    assert coupling_strength(preset, c) / coupling_strength(trans, c) == -2.0


def test_coupling_distance_scaling(preset):
    c = normalization_constants(preset.ti, preset.host, preset.geom)
    near = dataclasses.replace(preset, separation_r=2 * R)
    far = dataclasses.replace(preset, separation_r=4 * R)
    assert_allclose(coupling_strength(near, c) / coupling_strength(far, c), 8.0, rtol=2e-16)
    rs = np.linspace(1.01 * R, 10 * R, 50)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = [coupling_strength(dataclasses.replace(preset, separation_r=r), c) for r in rs]
    assert np.all(np.diff(g) < 0)


def test_coupling_linear_in_dipole(preset):
    c = normalization_constants(preset.ti, preset.host, preset.geom)
    zero = dataclasses.replace(preset, qd=dataclasses.replace(preset.qd, dipole_d=0.0))
    assert coupling_strength(zero, c) == 0.0


def test_preset_coupling_magnitude(preset):
    c = normalization_constants(preset.ti, preset.host, preset.geom)
    hbar_g_eV = SI.hbar * coupling_strength(preset, c) / 1.602176634e-19
    assert 0.1 < hbar_g_eV < 0.2


def test_radiative_rate_scalings():
    ti, host = make_material(theta=11)
    g1 = radiative_decay_rate(ti, host, GEOM)
    assert_allclose(radiative_decay_rate(ti, host, SphereGeometry(2 * R)) / g1, 8.0, rtol=1e-14)
    Omega = derived_frequencies(ti, host).Omega
    assert_allclose(radiative_decay_rate(ti, host, GEOM, 2 * Omega) / radiative_decay_rate(ti, host, GEOM, Omega), 16.0, rtol=1e-14)


def test_radiative_rate_golden(preset):
    # pinned from the first run; the independent check lives in the oracle tests
    assert_allclose(radiative_decay_rate(preset.ti, preset.host, preset.geom), 2.7915562378829553e11, rtol=1e-12)


def test_scenario_validation():
    ti, host = make_material()
    qd = QuantumDot(3e15, 7.2e-28)
    with pytest.raises(PhysicsError, match="separation inside nanoparticle"):
        HybridScenario(ti, host, GEOM, qd, 0.5 * R)
    with pytest.warns(PhysicsWarning, match="dipolar approximation"):
        HybridScenario(ti, host, GEOM, qd, 1.5 * R)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        HybridScenario(ti, host, GEOM, qd, 3 * R, "transverse")


@pytest.mark.parametrize(
    "kw", [dict(n_excitation=1.5), dict(gamma_s=-1.0), dict(polarizability_f=-1.0), dict(omega_a=0.0)]
)
def test_quantum_dot_validation(kw):
    base = dict(omega_a=3e15, dipole_d=7.2e-28)
    base.update(kw)
    with pytest.raises(PhysicsError):
        QuantumDot(**base)


def test_stark_advisory():
    sc = make_scenario(polarizability=1.5e5 * ANGSTROM3_TO_SI)
    zero = stark_shift_bound(sc, 0.0)
    assert zero.shift_J == 0 and zero.admissible
    thr = zero.threshold_field
    assert_allclose(thr, 2 * 7.2e-28 / (1.5e5 * ANGSTROM3_TO_SI), rtol=1e-15)
    assert not stark_shift_bound(sc, thr).admissible
    edge = stark_shift_bound(sc, 0.1 * thr * (1 - 1e-12))
    assert edge.admissible
    # at the edge of admissibility the shift is of order 1e-3 eV
    assert 1e-3 <= edge.shift_eV < 1e-2
    with pytest.raises(PhysicsError):
        stark_shift_bound(make_scenario(), 1.0)
