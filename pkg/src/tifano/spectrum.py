"""Absorption line shape of the hybrid from the retarded Green function of the TI mode.

Reservoirs are flat-band: the couplings ``T_i`` are frequency independent, so
every self-energy is purely imaginary (no Lamb shift).
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.signal import peak_prominences

from .errors import PhysicsError
from .materials import SI, PhysicalConstants, static_permittivity
from .quantization import (
    HybridScenario,
    Orientation,
    QuantizationConstants,
    coupling_strength,
    normalization_constants,
    radiative_decay_rate,
)
from .quasistatics import DerivedFrequencies, derived_frequencies, dielectric_from_mode

__all__ = [
    "ReservoirCouplings",
    "FanoParameters",
    "ModelParameters",
    "Extremum",
    "Spectrum",
    "SweepError",
    "SWEEP_AXES",
    "varpi",
    "fano_parameters",
    "absorption",
    "zg_sigma_ratio",
    "absorption_via_equations_of_motion",
    "derive_parameters",
    "compute_spectrum",
    "annotate_extrema",
    "fit_lorentzian",
    "sweep",
    "with_axis_value",
]


@dataclass(frozen=True)
class ReservoirCouplings:
    gamma_r: float
    gamma_0: float
    gamma_s: float

    def __post_init__(self):
        for name in ("gamma_r", "gamma_0", "gamma_s"):
            if getattr(self, name) < 0:
                raise PhysicsError(f"{name} must be non-negative")

    @property
    def T1(self) -> float:
        return math.sqrt(self.gamma_r / (2.0 * math.pi))

    @property
    def T2(self) -> float:
        return math.sqrt(self.gamma_0 / (2.0 * math.pi))

    @property
    def T3(self) -> float:
        return math.sqrt(self.gamma_s / (2.0 * math.pi))

    def T(self, i: int) -> float:
        return (self.T1, self.T2, self.T3)[i - 1]


def varpi(i: int, j: int, couplings: ReservoirCouplings, omega=None) -> complex:
    """Reservoir self-energy ``i pi T_i T_j`` (rad/s); frequency independent for flat bands."""
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError("reservoir indices run over 1, 2, 3")
    return 1j * math.pi * couplings.T(i) * couplings.T(j)


# relative size below which the absorption denominator is indistinguishable from rounding
_CANCELLATION = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class FanoParameters:
    W_frak: complex  # dressed TI mode frequency
    W_cal: complex  # dressed emitter frequency
    Gamma_big: complex  # interference strength, (rad/s)^2


def fano_parameters(scenario: HybridScenario, g: float, Omega: float, couplings: ReservoirCouplings) -> FanoParameters:
    inversion = 1.0 - 2.0 * scenario.qd.n_excitation
    return FanoParameters(
        W_frak=Omega + varpi(1, 1, couplings) + varpi(2, 2, couplings),
        W_cal=scenario.qd.omega_a + inversion * varpi(3, 3, couplings),
        Gamma_big=inversion * (g + varpi(1, 3, couplings)) * (g + varpi(3, 1, couplings)),
    )


def absorption(omega, fano: FanoParameters):
    """``Im[omega - W_frak - Gamma / (omega - W_cal)]^-1`` in arbitrary units."""
    w = np.asarray(omega, dtype=float)
    detuning = w - fano.W_cal
    with np.errstate(divide="ignore", invalid="ignore"):
        # exactly on a lossless emitter line the self-energy diverges and the response vanishes
        self_energy = np.where(
            (fano.Gamma_big == 0) | (detuning == 0), 0.0, fano.Gamma_big / np.where(detuning == 0, 1.0, detuning)
        )
    bare = w - fano.W_frak
    denom = bare - self_energy
    pinned = (detuning == 0) & (fano.Gamma_big != 0)
    # a denominator lost to cancellation means omega sits on a real pole: either a fully lossless
    # system or a normal mode that fully correlated damping has decoupled from every bath
    cancelled = np.abs(denom) <= _CANCELLATION * (np.abs(bare) + np.abs(self_energy))
    if np.any(cancelled & ~pinned):
        raise PhysicsError("absorption singularity in a lossless configuration; add nonzero decay")
    out = np.where(pinned, 0.0, np.imag(1.0 / np.where(denom == 0, 1.0, denom)))
    return out if out.ndim else float(out)


def zg_sigma_ratio(omega, fano: FanoParameters, g: float, couplings: ReservoirCouplings, n: float):
    """Ratio of the emitter-mode Green function to the mode propagator."""
    w = np.asarray(omega, dtype=float)
    detuning = w - fano.W_cal
    if np.any(detuning == 0):
        raise PhysicsError("emitter pole: omega equals the dressed emitter frequency")
    out = (1.0 - 2.0 * n) * (g + varpi(3, 1, couplings)) / detuning
    return out if out.ndim else complex(out)


def absorption_via_equations_of_motion(
    omega, Omega: float, omega_a: float, g: float, couplings: ReservoirCouplings, n: float
):
    """Same spectrum assembled step by step from the equation-of-motion chain.

    The mode propagator is ``[omega - Omega - varpi11 - varpi22 - (g + varpi13) * ratio]^-1``
    with the emitter ratio solved from its own truncated equation of motion.
    """
    w = np.asarray(omega, dtype=float)
    v11, v22, v13, v31, v33 = (
        varpi(1, 1, couplings),
        varpi(2, 2, couplings),
        varpi(1, 3, couplings),
        varpi(3, 1, couplings),
        varpi(3, 3, couplings),
    )
    ratio = (1.0 - 2.0 * n) * (g + v31) / (w - omega_a - (1.0 - 2.0 * n) * v33)
    propagator = 1.0 / (w - Omega - v11 - v22 - (g + v13) * ratio)
    out = np.imag(propagator)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class ModelParameters:
    """Everything derived from a scenario that the line shape depends on."""

    frequencies: DerivedFrequencies
    constants: QuantizationConstants
    Omega: float
    g: float
    couplings: ReservoirCouplings
    fano: FanoParameters


OVERRIDABLE = ("Omega", "g", "gamma_r")


def derive_parameters(
    scenario: HybridScenario,
    overrides: Mapping[str, float] | None = None,
    consts: PhysicalConstants = SI,
) -> ModelParameters:
    overrides = dict(overrides or {})
    unknown = set(overrides) - set(OVERRIDABLE)
    if unknown:
        raise ValueError(f"cannot override {sorted(unknown)}; allowed: {OVERRIDABLE}")
    freqs = derived_frequencies(scenario.ti, scenario.host, consts)
    Omega = overrides.get("Omega", freqs.Omega)
    constants = normalization_constants(scenario.ti, scenario.host, scenario.geom, Omega, consts)
    g = overrides.get("g")
    if g is None:
        g = coupling_strength(scenario, constants, Omega, consts)
    gamma_r = overrides.get("gamma_r")
    if gamma_r is None:
        gamma_r = radiative_decay_rate(scenario.ti, scenario.host, scenario.geom, Omega, consts)
    couplings = ReservoirCouplings(
        gamma_r=gamma_r, gamma_0=scenario.ti.dielectric.gamma_0, gamma_s=scenario.qd.gamma_s
    )
    return ModelParameters(
        frequencies=freqs,
        constants=constants,
        Omega=Omega,
        g=g,
        couplings=couplings,
        fano=fano_parameters(scenario, g, Omega, couplings),
    )


# --- line-shape analysis ---------------------------------------------------


@dataclass(frozen=True)
class Extremum:
    kind: str  # "peak" or "dip"
    omega: float
    height: float
    prominence: float
    index: int
    fano: bool = False  # dip flanked by two qualifying peaks


def _refine(x, y, i):
    """Vertex of the parabola through the three samples around index ``i``."""
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    # shift and scale so that the fit is well conditioned on large absolute frequencies
    h = max(x2 - x1, x1 - x0)
    u0, u2 = (x0 - x1) / h, (x2 - x1) / h
    denom = u0 * u2 * (u0 - u2)
    a = (u2 * (y0 - y1) - u0 * (y2 - y1)) / denom
    b = (u0 * u0 * (y2 - y1) - u2 * u2 * (y0 - y1)) / denom
    if a == 0:
        return x1, y1
    u = -b / (2.0 * a)
    if not (u0 <= u <= u2):
        return x1, y1
    return x1 + u * h, y1 + b * u + a * u * u


def annotate_extrema(omegas, sigma, threshold: float = 0.01) -> list[Extremum]:
    """Peaks and dips with prominence at least ``threshold`` times the global maximum.

    Candidates come from a three-point scan; positions and heights are refined by one
    quadratic interpolation.
    """
    x = np.asarray(omegas, dtype=float)
    y = np.asarray(sigma, dtype=float)
    if x.size < 3:
        return []
    floor = threshold * float(np.max(y))
    mid = slice(1, -1)
    maxima = np.flatnonzero((y[mid] > y[:-2]) & (y[mid] >= y[2:])) + 1
    minima = np.flatnonzero((y[mid] < y[:-2]) & (y[mid] <= y[2:])) + 1
    found = []
    if maxima.size:
        prom = peak_prominences(y, maxima)[0]
        for i, p in zip(maxima, prom):
            if p >= floor:
                xo, yo = _refine(x, y, i)
                found.append(Extremum("peak", float(xo), float(yo), float(p), int(i)))
    peak_idx = [e.index for e in found]
    if minima.size:
        prom = peak_prominences(-y, minima)[0]
        for i, p in zip(minima, prom):
            if p >= floor:
                xo, yo = _refine(x, y, i)
                flanked = any(k < i for k in peak_idx) and any(k > i for k in peak_idx)
                found.append(Extremum("dip", float(xo), float(yo), float(p), int(i), fano=flanked))
    found.sort(key=lambda e: e.index)
    return found


def fit_lorentzian(omegas, sigma, window: float = 0.5):
    """Centre, FWHM and area of a Lorentzian through the samples above ``window * max``.

    ``1/sigma`` of a Lorentzian is an exact quadratic in frequency, so the fit is a
    linear least-squares problem in a shifted, scaled variable.
    """
    x = np.asarray(omegas, dtype=float)
    y = np.asarray(sigma, dtype=float)
    keep = y >= window * np.max(y)
    if keep.sum() < 3:
        raise ValueError("not enough samples above the fitting window")
    xs, ys = x[keep], y[keep]
    ref = xs[np.argmax(ys)]
    h = max(xs[-1] - xs[0], np.finfo(float).tiny)
    u = (xs - ref) / h
    A = np.stack([u * u, u, np.ones_like(u)], axis=1)
    coef, *_ = np.linalg.lstsq(A, 1.0 / ys, rcond=None)
    a, b, c = coef
    u0 = -b / (2.0 * a)
    minimum = c - b * b / (4.0 * a)
    center = ref + u0 * h
    fwhm = 2.0 * math.sqrt(minimum / a) * h
    area = 2.0 * math.pi / (a / h**2 * fwhm)
    return center, fwhm, area


# --- spectra and sweeps ------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    omegas: np.ndarray
    sigma: np.ndarray
    scenario: HybridScenario
    parameters: ModelParameters
    annotations: list = field(default_factory=list)

    def __post_init__(self):
        if self.omegas.shape != self.sigma.shape:
            raise ValueError("omegas and sigma must have the same length")
        if not np.all(np.isfinite(self.sigma)):
            raise PhysicsError("non-finite absorption values")


def compute_spectrum(
    scenario: HybridScenario,
    omegas,
    overrides: Mapping[str, float] | None = None,
    threshold: float = 0.01,
) -> Spectrum:
    w = np.asarray(omegas, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("frequency grid must be a non-empty 1-D array")
    if np.any(np.diff(w) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    params = derive_parameters(scenario, overrides)
    sigma = np.asarray(absorption(w, params.fano), dtype=float)
    return Spectrum(
        omegas=w,
        sigma=sigma,
        scenario=scenario,
        parameters=params,
        annotations=annotate_extrema(w, sigma, threshold),
    )


SWEEP_AXES = ("omega_a", "r", "alpha_tilde", "n", "orientation")


class SweepError(PhysicsError):
    def __init__(self, axis, value, cause):
        super().__init__(f"{axis}={value!r}: {cause}")
        self.axis = axis
        self.value = value
        self.cause = cause


def with_axis_value(scenario: HybridScenario, axis: str, value: Any) -> HybridScenario:
    """Copy of ``scenario`` with one sweep coordinate replaced.

    ``alpha_tilde`` values are multiples of the fine-structure constant (i.e. ``theta / pi``).
    The mode energy and the static permittivity are held fixed, so the oscillator parameters
    are re-derived for every value; otherwise the axion term would detune the mode.
    """
    if axis == "omega_a":
        return dataclasses.replace(scenario, qd=dataclasses.replace(scenario.qd, omega_a=float(value)))
    if axis == "r":
        return dataclasses.replace(scenario, separation_r=float(value))
    if axis == "alpha_tilde":
        ti, host = scenario.ti, scenario.host
        dielectric = dielectric_from_mode(
            derived_frequencies(ti, host).Omega,
            static_permittivity(ti.dielectric),
            host,
            mu_1=ti.mu_1,
            theta_over_pi=float(value),
            gamma_0=ti.dielectric.gamma_0,
        )
        new_ti = dataclasses.replace(ti, dielectric=dielectric, theta_over_pi=float(value))
        return dataclasses.replace(scenario, ti=new_ti)
    if axis == "n":
        return dataclasses.replace(scenario, qd=dataclasses.replace(scenario.qd, n_excitation=float(value)))
    if axis == "orientation":
        return dataclasses.replace(scenario, orientation=Orientation(value))
    raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")


def sweep(
    scenario: HybridScenario,
    omega_grid,
    sweep_axis: str,
    values: Sequence[Any],
    overrides: Mapping[str, float] | None = None,
    workers: int | None = None,
) -> list[Spectrum]:
    """One spectrum per value, each rebuilt from scratch; output order follows ``values``."""
    if sweep_axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {sweep_axis!r}; choose from {SWEEP_AXES}")
    if len(values) == 0:
        raise ValueError("sweep values must be non-empty")

    def one(value):
        try:
            return compute_spectrum(with_axis_value(scenario, sweep_axis, value), omega_grid, overrides)
        except PhysicsError as exc:
            raise SweepError(sweep_axis, value, exc) from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, values))
    return [one(v) for v in values]
