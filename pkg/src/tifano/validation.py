"""Run every oracle comparison for a scenario and collect a pass/fail report."""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .oracle import (
    DEFAULT_SEED,
    boundary_residuals,
    larmor_balance,
    numeric_energy_integral,
    solve_legendre_series,
)
from .quantization import HybridScenario, normalization_constants, radiative_decay_rate
from .quasistatics import derived_frequencies, solve_sphere_response
from .spectrum import absorption, absorption_via_equations_of_motion, derive_parameters

__all__ = ["TOLERANCE_PROFILES", "FAULTS", "validate_scenario"]

TOLERANCE_PROFILES = {
    "default": {
        "boundary": 1e-10,
        "legendre_fields": 1e-10,
        "legendre_higher_orders": 1e-12,
        "energy_closed_form": 1e-6,
        "energy_integrals": 1e-7,
        "radiative_balance": 1e-9,
        "zg_consistency": 1e-12,
    },
    "loose": {
        "boundary": 1e-8,
        "legendre_fields": 1e-8,
        "legendre_higher_orders": 1e-10,
        "energy_closed_form": 1e-4,
        "energy_integrals": 1e-5,
        "radiative_balance": 1e-7,
        "zg_consistency": 1e-10,
    },
}

# fault-injection hooks; each deliberately breaks one ingredient so the report must fail
FAULTS = {"perturb-c1": "scale the l = 1 exterior electric coefficient of the series solution by 1.01"}

MAGNETOELECTRIC_CHECKS = (".normal_B", ".tangential_H", "legendre.B")


def _rel(a, b):
    return abs(a - b) / abs(b)


def validate_scenario(
    scenario: HybridScenario,
    profile: str = "default",
    fault: str | None = None,
    seed: int = DEFAULT_SEED,
) -> dict[str, Any]:
    if profile not in TOLERANCE_PROFILES:
        raise ValueError(f"unknown tolerance profile {profile!r}; choose from {sorted(TOLERANCE_PROFILES)}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {sorted(FAULTS)}")
    tol = TOLERANCE_PROFILES[profile]
    ti, host, geom = scenario.ti, scenario.host, scenario.geom
    trivial_me = ti.theta_over_pi == 0
    checks: list[dict[str, Any]] = []

    def add(name, value, tolerance):
        trivial = trivial_me and name.endswith(MAGNETOELECTRIC_CHECKS)
        checks.append(
            {
                "name": name,
                "value": float(value),
                "tolerance": tolerance,
                "passed": bool(value < tolerance),
                "trivial": trivial,
            }
        )

    rng = np.random.default_rng(seed)
    Omega = derived_frequencies(ti, host).Omega
    drive = np.array([0.3, -0.2, 1.0])
    omega = 0.9 * Omega

    series = solve_legendre_series(ti, host, geom, drive, omega, ell_max=4)
    if fault == "perturb-c1":
        series = series.perturbed(1, 1.01)
    closed = solve_sphere_response(ti, host, geom, drive, omega)

    for label, solution in (("boundary", series), ("boundary_closed_form", closed)):
        report = boundary_residuals(solution, 100, seed)
        for cond, value in report.residuals.items():
            add(f"{label}.{cond}", value, tol["boundary"])

    R = geom.radius_R
    pts = rng.normal(size=(20, 3))
    pts *= (R * rng.uniform(0.2, 3.0, size=20) / np.linalg.norm(pts, axis=1))[:, None]
    inside = (np.linalg.norm(pts, axis=1) < R)[:, None]
    Ei, Bi = series.interior(pts)
    Eo, Bo = series.exterior(pts)
    Es, Bs = np.where(inside, Ei, Eo), np.where(inside, Bi, Bo)
    Ec, Bc = closed.fields(pts)
    add("legendre.E", np.max(np.abs(Es - Ec)) / np.max(np.abs(Ec)), tol["legendre_fields"])
    b_scale = np.max(np.abs(Bc))
    add("legendre.B", np.max(np.abs(Bs - Bc)) / b_scale if b_scale > 0 else np.max(np.abs(Bs)), tol["legendre_fields"])
    lead = max(abs(series.A[0]), abs(series.C[0]))
    higher = max(np.max(np.abs(k[1:])) for k in (series.A, series.C, series.D, series.F))
    add("legendre.higher_orders", higher / lead, tol["legendre_higher_orders"])

    ints = numeric_energy_integral(ti, host, geom)
    qc = normalization_constants(ti, host, geom)
    add("energy.inv_norm_sq", _rel(ints.inv_norm_sq, qc.norm_factor_sq_inv), tol["energy_closed_form"])
    add("energy.V_m", _rel(ints.V_m, qc.V_m), tol["energy_closed_form"])
    add("energy.interior_integral", _rel(ints.interior_integral, 4.0 * math.pi * R**3 / 3.0), tol["energy_integrals"])
    add("energy.exterior_integral", _rel(ints.exterior_integral, 8.0 * math.pi * R**3 / 3.0), tol["energy_integrals"])

    balance = larmor_balance(ti, host, geom)
    add("radiative.gamma_r", _rel(balance.gamma_r, radiative_decay_rate(ti, host, geom)), tol["radiative_balance"])

    params = derive_parameters(scenario)
    width = params.couplings.gamma_r + params.couplings.gamma_0 + abs(params.g)
    ws = np.sort(params.Omega + width * rng.uniform(-20.0, 20.0, size=100))
    ws = np.where(ws == params.fano.W_cal.real, ws + width * 1e-3, ws)
    direct = absorption(ws, params.fano)
    eom = absorption_via_equations_of_motion(
        ws, params.Omega, scenario.qd.omega_a, params.g, params.couplings, scenario.qd.n_excitation
    )
    add("zg.consistency", float(np.max(np.abs(eom - direct) / np.abs(direct))), tol["zg_consistency"])

    failed = [c["name"] for c in checks if not c["passed"]]
    return {
        "profile": profile,
        "fault": fault,
        "seed": seed,
        "theta_over_pi": ti.theta_over_pi,
        "checks": checks,
        "failed": failed,
        "passed": not failed,
    }
