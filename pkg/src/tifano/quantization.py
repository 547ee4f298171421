"""Mode quantization constants, emitter coupling and radiative damping.

Everything here is evaluated in the ``gamma_0 -> 0`` limit of the oscillator
model, where the dispersive energy slope has a closed form.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .errors import PhysicsError, PhysicsWarning
from .materials import (
    SI,
    HostMedium,
    PhysicalConstants,
    TIMaterial,
    alpha_tilde,
    effective_permeability,
    magnetoelectric_term,
    static_permittivity,
)
from .quasistatics import SphereGeometry, derived_frequencies

__all__ = [
    "Orientation",
    "QuantumDot",
    "HybridScenario",
    "QuantizationConstants",
    "StarkEstimate",
    "ANGSTROM3_TO_SI",
    "dispersive_slope",
    "normalization_constants",
    "coupling_strength",
    "radiative_decay_rate",
    "stark_shift_bound",
]


class Orientation(str, enum.Enum):
    LONGITUDINAL = "longitudinal"
    TRANSVERSE = "transverse"

    @property
    def factor(self) -> float:
        return 2.0 if self is Orientation.LONGITUDINAL else -1.0


# polarizability volume (Angstrom^3) -> C m^2 / V
ANGSTROM3_TO_SI = 4.0 * math.pi * SI.epsilon_0 * 1e-30


@dataclass(frozen=True)
class QuantumDot:
    """Two-level emitter.

    ``polarizability_f`` is in C m^2 / V; see :data:`ANGSTROM3_TO_SI` for the
    conversion from a polarizability volume.
    """

    omega_a: float
    dipole_d: float
    gamma_s: float = 0.0
    polarizability_f: float = 0.0
    n_excitation: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.n_excitation <= 1.0:
            raise PhysicsError("n_excitation must lie in [0, 1]")
        if self.gamma_s < 0:
            raise PhysicsError("gamma_s must be non-negative")
        if self.polarizability_f < 0:
            raise PhysicsError("polarizability_f must be non-negative")
        if not self.omega_a > 0:
            raise PhysicsError("omega_a must be positive")


@dataclass(frozen=True)
class HybridScenario:
    ti: TIMaterial
    host: HostMedium
    geom: SphereGeometry
    qd: QuantumDot
    separation_r: float
    orientation: Orientation = Orientation.LONGITUDINAL

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        R = self.geom.radius_R
        if not self.separation_r > R:
            raise PhysicsError(
                f"separation inside nanoparticle: r={self.separation_r:.3e} m <= R={R:.3e} m"
            )
        if self.separation_r < 2.0 * R:
            warnings.warn(
                f"dipolar approximation questionable: r={self.separation_r:.3e} m < 2R",
                PhysicsWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class QuantizationConstants:
    norm_factor_sq_inv: float  # 1/N^2 in (V/m)^-2
    U0: float
    V_m: float
    field_amp: float  # V/m
    Omega: float


def _depolarization_factors(ti, host, consts):
    s = magnetoelectric_term(ti, host, consts)
    eps_static = static_permittivity(ti.dielectric)
    if eps_static - 1.0 <= 0:
        raise PhysicsError("degenerate permittivity: eps1(0) == 1 (zero oscillator strength)")
    P = 2.0 * host.epsilon_2 + 1.0 + s
    P_static = 2.0 * host.epsilon_2 + eps_static + s
    return s, P, P_static, eps_static - 1.0


def dispersive_slope(ti: TIMaterial, host: HostMedium, consts: PhysicalConstants = SI) -> float:
    """``d Re(omega eps1) / d omega`` at the mode frequency, undamped limit."""
    ratio2 = (ti.dielectric.omega_e / derived_frequencies(ti, host, consts).omega_0) ** 2
    return 1.0 + ratio2 + 2.0 * ratio2**2 * (ti.dielectric.omega_R / ti.dielectric.omega_e) ** 2


def normalization_constants(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    Omega: float | None = None,
    consts: PhysicalConstants = SI,
) -> QuantizationConstants:
    if Omega is None:
        Omega = derived_frequencies(ti, host, consts).Omega
    s, P, P_static, Q = _depolarization_factors(ti, host, consts)
    R3 = geom.radius_R**3
    mu_e = effective_permeability(ti, host)
    inv_n2 = 4.0 * math.pi * consts.epsilon_0 * R3 / (3.0 * consts.hbar * Omega) * P * P_static / Q
    # interior energy density: dispersive slope 1 + P + 2 P^2 / Q plus the magnetic part
    U0 = 2.0 * (host.epsilon_2 + 1.0) + s * (1.0 + mu_e / ti.mu_1) + 2.0 * P**2 / Q
    V_m = 8.0 * math.pi * R3 / 3.0 * P * P_static / (U0 * Q)
    field_amp = math.sqrt(consts.hbar * Omega / (2.0 * consts.epsilon_0 * V_m))
    return QuantizationConstants(norm_factor_sq_inv=inv_n2, U0=U0, V_m=V_m, field_amp=field_amp, Omega=Omega)


def coupling_strength(
    scenario: HybridScenario,
    constants: QuantizationConstants,
    Omega: float | None = None,
    consts: PhysicalConstants = SI,
) -> float:
    """Signed Rabi frequency g(r) in rad/s (+2 longitudinal, -1 transverse)."""
    if Omega is None:
        Omega = constants.Omega
    vacuum_field = math.sqrt(consts.hbar * Omega / (2.0 * consts.epsilon_0 * constants.V_m * constants.U0))
    base = scenario.qd.dipole_d / consts.hbar * vacuum_field * (scenario.geom.radius_R / scenario.separation_r) ** 3
    return scenario.orientation.factor * base


def radiative_decay_rate(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    Omega: float | None = None,
    consts: PhysicalConstants = SI,
) -> float:
    """Scattering rate of the dipolar mode into free-space modes (1/s)."""
    if Omega is None:
        Omega = derived_frequencies(ti, host, consts).Omega
    s, P, P_static, Q = _depolarization_factors(ti, host, consts)
    eps2, mu2 = host.epsilon_2, host.mu_2
    magnetic = 1.0 + (effective_permeability(ti, host) * alpha_tilde(ti, consts) / (2.0 * eps2 * mu2)) ** 2
    prefactor = 2.0 * mu2 * eps2**2 * geom.radius_R**3 * Omega**4 / consts.c**3
    return prefactor * Q * magnetic / (P * P_static)


@dataclass(frozen=True)
class StarkEstimate:
    shift_J: float
    shift_eV: float
    threshold_field: float  # 2 d / f, V/m
    admissible: bool


def stark_shift_bound(scenario: HybridScenario, E_magnitude: float, consts: PhysicalConstants = SI) -> StarkEstimate:
    """Quadratic Stark shift ``f |E|^2 / 2`` and whether ``|E|`` sits well below ``2 d / f``.

    An order-of-magnitude advisory: the shift is admissible when ``|E| < 0.1 * 2 d / f``.
    """
    f = scenario.qd.polarizability_f
    if not f > 0:
        raise PhysicsError("QD polarizability must be positive for the Stark estimate")
    threshold = 2.0 * scenario.qd.dipole_d / f
    shift = 0.5 * f * E_magnitude**2
    return StarkEstimate(
        shift_J=shift,
        shift_eV=shift / 1.602176634e-19,
        threshold_field=threshold,
        admissible=bool(E_magnitude < 0.1 * threshold),
    )
