import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import make_material
from tifano.errors import PhysicsError, PhysicsWarning
from tifano.materials import SI, DielectricModel, HostMedium, TIMaterial, alpha_tilde, effective_permeability
from tifano.quasistatics import (
    QuadratureSpec,
    SphereGeometry,
    check_quasistatic,
    derived_frequencies,
    dielectric_from_mode,
    export_field_grid,
    g_vector,
    impulse_fields,
    lorentzian_response,
    mode_magnetic_factor,
    orthogonality_integral,
    solve_sphere_response,
    xi,
)

R = 5e-9
GEOM = SphereGeometry(R)


def test_g_vector_examples():
    assert_allclose(g_vector("z", [0, 0, R / 2], R), [0, 0, 1])
    assert_allclose(g_vector("z", [0, 0, 2 * R], R), [0, 0, -0.25], atol=1e-16)
    assert_allclose(g_vector("x", [0, 0, 2 * R], R), [0.125, 0, 0], atol=1e-16)


def test_g_vector_surface_uses_exterior_branch():
    assert_allclose(g_vector(2, [0, 0, R], R), [0, 0, -2.0])


def test_g_vector_vectorized(rng):
    pts = rng.normal(size=(7, 3)) * R
    stacked = g_vector("y", pts, R)
    for p, v in zip(pts, stacked):
        assert_allclose(g_vector("y", p, R), v)


def test_xi():
    assert xi(R / 2, R) == -2
    assert xi(3 * R, R) == 1
    assert xi(R, R) == 1
    with pytest.raises(ValueError):
        xi(-1.0, R)


def test_derived_frequencies_classical():
    ti = TIMaterial(DielectricModel(3e15, 2e15), theta_over_pi=0)
    f = derived_frequencies(ti, HostMedium(1.5))
    assert_allclose(f.omega_0, 3e15 / math.sqrt(4.0), rtol=1e-15)
    assert_allclose(f.Omega**2, f.omega_0**2 + 4e30, rtol=1e-12)
    assert 0 < f.eta < 1.5


def test_clausius_mossotti_limit():
    ti = TIMaterial(DielectricModel(3e15, 2e15), theta_over_pi=0)
    host = HostMedium(1.5)
    E0 = np.array([0.0, 0.0, 1.0])
    resp = solve_sphere_response(ti, host, GEOM, E0, 0.0)
    eps1 = 1 + 9 / 4
    cm = 4 * math.pi * SI.epsilon_0 * 1.5 * R**3 * (eps1 - 1.5) / (eps1 + 3.0) * E0
    assert_allclose(resp.dipoles.p, cm, rtol=1e-12)
    assert np.all(resp.dipoles.m == 0)
    assert np.all(resp.B_in == 0)


def test_interior_field_strong_axion():
    # eps1 = 4 statically, eps2 = 1.5, alpha_tilde = 95 alpha
    ti = TIMaterial(DielectricModel(math.sqrt(3.0) * 1e15, 1e15), theta_over_pi=95)
    resp = solve_sphere_response(ti, HostMedium(1.5), GEOM, [0, 0, 1.0], 0.0)
    s = (2 / 3) * alpha_tilde(ti) ** 2
    assert_allclose(resp.E_in.real, [0, 0, 4.5 / (7 + s)], rtol=1e-14)
    assert abs(resp.E_in[2].real - 0.6147) < 1e-4


def test_plasmon_pole():
    # eps1(2) = 1 + 9 / (1 - 4) = -2 = -2 eps2 exactly
    ti = TIMaterial(DielectricModel(3.0, 1.0), theta_over_pi=0)
    with pytest.raises(PhysicsError, match="plasmon pole"):
        solve_sphere_response(ti, HostMedium(1.0), GEOM, [0, 0, 1.0], 2.0)


def test_far_field_tends_to_drive():
    ti, host = make_material()
    resp = solve_sphere_response(ti, host, GEOM, [0.2, 0.0, 1.0], 0.7 * derived_frequencies(ti, host).Omega)
    E, _ = resp.exterior(np.array([[0, 0, 1e3 * R], [1e3 * R, 0, 0]]))
    assert np.max(np.abs(E - resp.E0)) / np.linalg.norm(resp.E0) < 1e-8


def test_fields_at_origin_equal_interior():
    ti, host = make_material()
    resp = solve_sphere_response(ti, host, GEOM, [0, 1.0, 0], 1e15)
    E, B = resp.fields(np.zeros(3))
    assert_allclose(E, resp.E_in)
    assert_allclose(B, resp.B_in)


@pytest.mark.parametrize("omega_frac", [0.0, 0.5, 0.93, 1.2])
def test_magnetic_dipole_parallel_to_electric(omega_frac):
    ti, host = make_material(theta=11, gamma_0=1e12)
    omega = omega_frac * derived_frequencies(ti, host).Omega
    resp = solve_sphere_response(ti, host, GEOM, [0.3, -0.4, 1.0], omega)
    p, m = resp.dipoles.p, resp.dipoles.m
    eps1 = resp.media.eps_in
    mu_e, at = effective_permeability(ti, host), alpha_tilde(ti)
    s = mu_e * at**2
    ratio = 3 * mu_e * at * SI.c / (2 * host.mu_2 * (eps1 - host.epsilon_2 + s))
    assert_allclose(m, ratio * p, rtol=1e-13)


def test_mode_dipole_ratio_at_resonance():
    # on the mode, eps1 - eps2 + s = -3 eps2 and the ratio reduces to -mu_e alpha c / (2 eps2 mu2)
    ti, host = make_material(theta=11)
    mu_e, at = effective_permeability(ti, host), alpha_tilde(ti)
    s = mu_e * at**2
    eps_res = -2 * host.epsilon_2 - s
    ratio = 3 * mu_e * at * SI.c / (2 * host.mu_2 * (eps_res - host.epsilon_2 + s))
    assert_allclose(ratio, -mu_e * at * SI.c / (2 * host.epsilon_2 * host.mu_2), rtol=1e-15)


def test_theta_parity(rng):
    ti_p, host = make_material(theta=11)
    ti_m = TIMaterial(ti_p.dielectric, theta_over_pi=-11)
    omega = 0.8 * derived_frequencies(ti_p, host).Omega
    a = solve_sphere_response(ti_p, host, GEOM, [0, 0, 1.0], omega)
    b = solve_sphere_response(ti_m, host, GEOM, [0, 0, 1.0], omega)
    pts = rng.normal(size=(10, 3)) * R
    Ea, Ba = a.fields(pts)
    Eb, Bb = b.fields(pts)
    assert np.array_equal(Ea, Eb)
    assert np.array_equal(Ba, -Bb)


def test_lorentzian_matches_exact_near_resonance():
    Omega = 3e15
    host = HostMedium(1.5)
    diel = dielectric_from_mode(Omega, 4.0, host, gamma_0=Omega / 100)
    ti = TIMaterial(diel)
    freqs = derived_frequencies(ti, host)
    E0 = np.array([0, 0, 1.0])
    inside = np.array([0, 0, 0.3 * R])
    for dw in np.linspace(-0.99, 0.99, 9) * diel.gamma_0:
        w = freqs.Omega + dw
        exact = solve_sphere_response(ti, host, GEOM, E0, w).interior(inside)[0]
        approx = lorentzian_response(ti, host, GEOM, E0, w).electric(inside)
        assert np.linalg.norm(approx - exact) / np.linalg.norm(exact) < 0.05


def test_lorentzian_peak_at_mode():
    ti, host = make_material(gamma_0=1e13)
    freqs = derived_frequencies(ti, host)
    pt = np.array([0, 0, 0.1 * R])
    ws = freqs.Omega + np.linspace(-50, 50, 201) * 1e12
    mags = [np.linalg.norm(lorentzian_response(ti, host, GEOM, [0, 0, 1.0], w).electric(pt)) for w in ws]
    assert ws[int(np.argmax(mags))] == freqs.Omega


def test_lorentzian_magnetic_consistent_with_exact_interior():
    # kappa * xi(inside) = +mu_e alpha / c, the ratio B_in / E_in of the exact solution
    ti, host = make_material(theta=11, gamma_0=1e12)
    omega = derived_frequencies(ti, host).Omega
    exact = solve_sphere_response(ti, host, GEOM, [0, 0, 1.0], omega)
    lor = lorentzian_response(ti, host, GEOM, [0, 0, 1.0], omega)
    pt = np.array([0, 0, 0.2 * R])
    assert_allclose(exact.B_in / exact.E_in[2], [0, 0, effective_permeability(ti, host) * alpha_tilde(ti) / SI.c])
    assert_allclose(lor.magnetic(pt) / lor.electric(pt)[2], exact.B_in / exact.E_in[2], rtol=1e-14)
    assert mode_magnetic_factor(ti, host) < 0


def test_lorentzian_low_q_warning():
    ti, host = make_material(gamma_0=1e13)
    with pytest.warns(PhysicsWarning):
        lorentzian_response(ti, host, GEOM, [0, 0, 1.0], 5e13)


def test_lorentzian_classical_omega0():
    ti, host = make_material(theta=0)
    f = lorentzian_response(ti, host, GEOM, [0, 0, 1.0], 3e15).frequencies
    assert_allclose(f.omega_0, ti.dielectric.omega_e / math.sqrt(4.0), rtol=1e-15)


def test_impulse_fields():
    ti, host = make_material(gamma_0=1e13)
    f = derived_frequencies(ti, host)
    pos = np.array([0, 0, 2 * R])
    E0 = np.array([0, 0, 1e-9])
    assert np.all(impulse_fields(ti, host, GEOM, E0, 0.0, pos).E == 0)
    lam = 1e-9 * f.eta * f.omega_0**2 / (2 * f.Omega)
    t = 2.5e-16
    e1 = impulse_fields(ti, host, GEOM, E0, t, pos).E
    e2 = impulse_fields(ti, host, GEOM, E0, t + 2 * math.pi / f.Omega, pos).E
    assert_allclose(e2[2] / e1[2], np.exp(-math.pi * ti.dielectric.gamma_0 / f.Omega), rtol=1e-9)
    doubled = impulse_fields(ti, host, GEOM, 2 * E0, t, pos).E
    assert_allclose(doubled, 2 * e1, rtol=1e-15)
    ti0 = TIMaterial(DielectricModel(ti.dielectric.omega_e, ti.dielectric.omega_R))
    peak = impulse_fields(ti0, host, GEOM, E0, math.pi / (2 * f.Omega), pos)
    assert_allclose(np.linalg.norm(peak.E), lam * np.linalg.norm(g_vector("z", pos, R)), rtol=1e-14)
    with pytest.raises(ValueError):
        impulse_fields(ti, host, GEOM, E0, -1.0, pos)


def test_impulse_magnetic_relation():
    ti, host = make_material(theta=11)
    out = impulse_fields(ti, host, GEOM, [0, 0, 1.0], 1e-16, np.array([[0, 0, 0.5 * R], [0, 0, 2 * R]]))
    kappa = mode_magnetic_factor(ti, host)
    assert_allclose(out.B[0], -2 * kappa * out.E[0])
    assert_allclose(out.B[1], kappa * out.E[1])


def test_orthogonality():
    amp = 2.0 - 1.0j
    off = orthogonality_integral("x", "y", R, amplitude=amp)
    assert abs(off.value) < 1e-8 * (4 * math.pi * R**3 / 3) * 4 * abs(amp) ** 2
    inner = orthogonality_integral("z", "z", R, region="interior", amplitude=amp)
    outer = orthogonality_integral("z", "z", R, region="exterior", amplitude=amp)
    assert_allclose(inner.value, 4 * math.pi * R**3 / 3 * abs(amp) ** 2, rtol=1e-10)
    assert_allclose(outer.value, 8 * math.pi * R**3 / 3 * abs(amp) ** 2, rtol=1e-9)


def test_orthogonality_magnetic_weights():
    kappa = 3.0
    inner = orthogonality_integral("x", "x", R, "B", region="interior", magnetic_factor=kappa)
    outer = orthogonality_integral("x", "x", R, "B", region="exterior", magnetic_factor=kappa)
    assert_allclose(inner.value, 4 * kappa**2 * 4 * math.pi * R**3 / 3, rtol=1e-10)
    assert_allclose(outer.value, kappa**2 * 8 * math.pi * R**3 / 3, rtol=1e-9)


def test_quadrature_stable_under_refinement():
    coarse = orthogonality_integral("z", "z", R)
    fine = orthogonality_integral("z", "z", R, spec=QuadratureSpec(n_theta=24, n_phi=48))
    assert abs(fine.value / coarse.value - 1) < 1e-7


def test_quasistatic_advisory():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_quasistatic(GEOM, 3.3e15)
    with pytest.warns(PhysicsWarning):
        assert not check_quasistatic(SphereGeometry(100e-9), 3.3e15)


def test_export_field_grid(tmp_path):
    ti, host = make_material(theta=11)
    resp = solve_sphere_response(ti, host, GEOM, [0, 0, 1.0], 1e15)
    pts = np.array([[0, 0, 0.5 * R], [0, 0, 3 * R]])
    path = tmp_path / "fields.csv"
    export_field_grid(resp, pts, path)
    lines = path.read_text().splitlines()
    assert lines[1].split(",")[:4] == ["x_m", "y_m", "z_m", "re_Ex"]
    assert len(lines) == 4
    row = [float(x) for x in lines[2].split(",")]
    assert_allclose(row[7], resp.E_in[2].real, rtol=1e-16)
