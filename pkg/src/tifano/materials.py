"""Material models for the magnetoelectric sphere and its host medium.

All quantities are SI. Angular frequencies are in rad/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PhysicsError, PhysicsWarning

__all__ = [
    "PhysicalConstants",
    "SI",
    "DielectricModel",
    "TIMaterial",
    "HostMedium",
    "epsilon1",
    "static_permittivity",
    "alpha_tilde",
    "effective_permeability",
    "magnetoelectric_term",
]


@dataclass(frozen=True)
class PhysicalConstants:
    epsilon_0: float
    mu_0: float
    c: float
    hbar: float
    alpha_fs: float

    def __post_init__(self):
        c_check = (self.mu_0 * self.epsilon_0) ** -0.5
        if abs(c_check / self.c - 1.0) > 1e-12:
            raise ValueError("c is inconsistent with mu_0 and epsilon_0")
        if abs(self.alpha_fs - 1.0 / 137.036) > 1e-4:
            raise ValueError("fine-structure constant out of range")


_C = 299_792_458.0
_MU0 = 1.25663706212e-6

# epsilon_0 is derived from mu_0 and c so that c = (mu_0 eps_0)^-1/2 holds exactly.
SI = PhysicalConstants(
    epsilon_0=1.0 / (_MU0 * _C**2),
    mu_0=_MU0,
    c=_C,
    hbar=1.054571817e-34,
    alpha_fs=7.2973525693e-3,
)


@dataclass(frozen=True)
class DielectricModel:
    """Single Lorentz oscillator ``1 + omega_e^2 / (omega_R^2 - omega(omega + i gamma_0))``."""

    omega_e: float
    omega_R: float
    gamma_0: float = 0.0

    def __post_init__(self):
        if not self.omega_e > 0:
            raise PhysicsError("omega_e must be positive")
        if not self.omega_R > 0:
            raise PhysicsError("omega_R must be positive")
        if not self.gamma_0 >= 0:
            raise PhysicsError("gamma_0 must be non-negative")
        if self.gamma_0 >= self.omega_R / 10:
            warnings.warn(
                f"gamma_0={self.gamma_0:.3e} is not small compared to omega_R={self.omega_R:.3e}; "
                "high-Q approximations will be inaccurate",
                PhysicsWarning,
                stacklevel=2,
            )

    @property
    def high_q(self) -> bool:
        return self.gamma_0 < self.omega_R / 10


@dataclass(frozen=True)
class TIMaterial:
    """Bulk dielectric response plus the axion angle, stored as ``theta / pi``."""

    dielectric: DielectricModel
    mu_1: float = 1.0
    theta_over_pi: float = 1.0
    quantized_theta: bool = False

    def __post_init__(self):
        if not self.mu_1 > 0:
            raise PhysicsError("mu_1 must be positive")
        if self.quantized_theta:
            t = self.theta_over_pi
            if t != round(t) or int(round(t)) % 2 == 0:
                raise PhysicsError(
                    f"theta/pi={t} is not an odd integer (quantized_theta is on)"
                )


@dataclass(frozen=True)
class HostMedium:
    epsilon_2: float = 1.0
    mu_2: float = 1.0

    def __post_init__(self):
        if not self.epsilon_2 >= 1:
            raise PhysicsError("epsilon_2 must be >= 1")
        if not self.mu_2 > 0:
            raise PhysicsError("mu_2 must be positive")


def epsilon1(model: DielectricModel, omega):
    """Complex relative permittivity of the TI bulk at angular frequency ``omega``.

    Accepts scalars or arrays. Raises :class:`PhysicsError` when evaluated exactly
    on the undamped resonance.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise PhysicsError("omega must be non-negative")
    denom = model.omega_R**2 - w * (w + 1j * model.gamma_0)
    if np.any(denom == 0):
        raise PhysicsError("undamped resonance singularity: omega == omega_R with gamma_0 == 0")
    out = 1.0 + model.omega_e**2 / denom
    return out if out.ndim else complex(out)


def static_permittivity(model: DielectricModel) -> float:
    """``epsilon1(0) = 1 + (omega_e / omega_R)^2``."""
    return 1.0 + (model.omega_e / model.omega_R) ** 2


def alpha_tilde(ti: TIMaterial, consts: PhysicalConstants = SI) -> float:
    return consts.alpha_fs * ti.theta_over_pi


def effective_permeability(ti: TIMaterial, host: HostMedium) -> float:
    mu1, mu2 = ti.mu_1, host.mu_2
    return 2.0 * mu1 * mu2 / (mu1 + 2.0 * mu2)


def magnetoelectric_term(ti: TIMaterial, host: HostMedium, consts: PhysicalConstants = SI) -> float:
    """The combination ``mu_e * alpha_tilde**2`` that shifts every depolarization denominator."""
    return effective_permeability(ti, host) * alpha_tilde(ti, consts) ** 2
