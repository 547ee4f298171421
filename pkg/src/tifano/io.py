"""Serialization of spectra and parameter reports.

Floats are written with 17 significant digits in lowercase scientific notation
(``format(x, ".16e")``), which round-trips every IEEE double. Energies are
converted with the fixed value ``HBAR = 1.054571817e-34`` J s.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .materials import SI, alpha_tilde, effective_permeability
from .quantization import HybridScenario, stark_shift_bound

__all__ = [
    "SCHEMA_VERSION",
    "HBAR",
    "ELEMENTARY_CHARGE",
    "format_float",
    "ev_to_rad_s",
    "rad_s_to_ev",
    "scenario_snapshot",
    "parameter_report",
    "spectrum_csv",
    "spectrum_json",
    "dumps_json",
]

SCHEMA_VERSION = 1
HBAR = 1.054571817e-34
ELEMENTARY_CHARGE = 1.602176634e-19


def format_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".16e")


def ev_to_rad_s(energy_eV):
    return np.asarray(energy_eV, dtype=float) * ELEMENTARY_CHARGE / HBAR


def rad_s_to_ev(omega):
    return np.asarray(omega, dtype=float) * HBAR / ELEMENTARY_CHARGE


def scenario_snapshot(scenario: HybridScenario) -> dict[str, Any]:
    """Flat, ordered description of a scenario in SI units."""
    d = scenario.ti.dielectric
    return {
        "omega_e_rad_s": d.omega_e,
        "omega_R_rad_s": d.omega_R,
        "gamma_0_per_s": d.gamma_0,
        "mu_1": scenario.ti.mu_1,
        "theta_over_pi": scenario.ti.theta_over_pi,
        "epsilon_2": scenario.host.epsilon_2,
        "mu_2": scenario.host.mu_2,
        "radius_m": scenario.geom.radius_R,
        "omega_a_rad_s": scenario.qd.omega_a,
        "dipole_C_m": scenario.qd.dipole_d,
        "gamma_s_per_s": scenario.qd.gamma_s,
        "polarizability_C_m2_per_V": scenario.qd.polarizability_f,
        "n_excitation": scenario.qd.n_excitation,
        "separation_m": scenario.separation_r,
        "orientation": scenario.orientation.value,
    }


def parameter_report(scenario: HybridScenario, params) -> dict[str, Any]:
    """The derived quantities of a scenario, each with its unit, plus the Stark advisory."""
    f = params.frequencies
    c = params.constants
    report = {
        "schema_version": SCHEMA_VERSION,
        "omega_0": {"value": f.omega_0, "unit": "rad/s", "eV": float(rad_s_to_ev(f.omega_0))},
        "eta": {"value": f.eta, "unit": "1"},
        "Omega": {"value": params.Omega, "unit": "rad/s", "eV": float(rad_s_to_ev(params.Omega))},
        "U0": {"value": c.U0, "unit": "1"},
        "V_m": {"value": c.V_m, "unit": "m^3"},
        "field_amplitude": {"value": c.field_amp, "unit": "V/m"},
        "g": {"value": params.g, "unit": "rad/s", "eV": float(rad_s_to_ev(params.g))},
        "gamma_r": {"value": params.couplings.gamma_r, "unit": "1/s"},
        "gamma_s": {"value": params.couplings.gamma_s, "unit": "1/s"},
        "gamma_0": {"value": params.couplings.gamma_0, "unit": "1/s"},
        "alpha_tilde": {"value": alpha_tilde(scenario.ti, SI), "unit": "1"},
        "mu_e": {"value": effective_permeability(scenario.ti, scenario.host), "unit": "1"},
    }
    if scenario.qd.polarizability_f > 0:
        # field of a single quantum of the mode at the emitter, |g| hbar / d
        field = abs(params.g) * SI.hbar / scenario.qd.dipole_d
        est = stark_shift_bound(scenario, field)
        report["stark"] = {
            "field_V_per_m": field,
            "shift_eV": est.shift_eV,
            "threshold_field_V_per_m": est.threshold_field,
            "admissible": est.admissible,
        }
    else:
        report["stark"] = None
    return report


def _header_lines(snapshot: dict[str, Any], extra: dict[str, Any] | None = None):
    lines = [f"# schema_version={SCHEMA_VERSION}"]
    for key, value in list(snapshot.items()) + list((extra or {}).items()):
        text = format_float(value) if isinstance(value, float) else str(value)
        lines.append(f"# {key}={text}")
    return lines


def _derived_header(spectrum) -> dict[str, Any]:
    p = spectrum.parameters
    return {
        "Omega_rad_s": p.Omega,
        "g_rad_s": p.g,
        "gamma_r_per_s": p.couplings.gamma_r,
        "hbar_J_s": HBAR,
    }


def spectrum_csv(spectrum, normalize: bool = False) -> str:
    sigma = spectrum.sigma / np.max(spectrum.sigma) if normalize else spectrum.sigma
    extra = _derived_header(spectrum)
    extra["normalized"] = "peak" if normalize else "none"
    lines = _header_lines(scenario_snapshot(spectrum.scenario), extra)
    lines.append("omega_eV,sigma_arb")
    energies = rad_s_to_ev(spectrum.omegas)
    lines.extend(f"{format_float(e)},{format_float(s)}" for e, s in zip(energies, sigma))
    return "\n".join(lines) + "\n"


def _annotation_dict(e) -> dict[str, Any]:
    return {
        "kind": e.kind,
        "omega_eV": float(rad_s_to_ev(e.omega)),
        "height": e.height,
        "prominence": e.prominence,
        "fano_dip": e.fano,
    }


def spectrum_json(spectrum, normalize: bool = False) -> str:
    scale = float(np.max(spectrum.sigma)) if normalize else 1.0
    doc = {
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario_snapshot(spectrum.scenario),
        "derived": _derived_header(spectrum),
        "normalized": "peak" if normalize else "none",
        "omega_eV": [float(x) for x in rad_s_to_ev(spectrum.omegas)],
        "sigma_arb": [float(x) / scale for x in spectrum.sigma],
        "annotations": [_annotation_dict(e) for e in spectrum.annotations],
    }
    return dumps_json(doc)


def dumps_json(doc) -> str:
    # repr-based float output is the shortest string that round-trips
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"
