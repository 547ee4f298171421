"""Quasistatic response of a magnetoelectric sphere in a uniform field.

Conventions
-----------
* Phasors follow ``Re{F exp(-i omega t)}``.
* The surface ``r == R`` belongs to the exterior branch of :func:`g_vector` and
  :func:`xi`; callers that need one-sided limits use the ``interior`` /
  ``exterior`` evaluators directly.
* The induced magnetic field of a localized mode is ``B = kappa * xi(r) * E``
  with ``kappa = -mu_e * alpha_tilde / (2 c)``. The sign is the one that
  satisfies the interface conditions of axion electrodynamics together with
  the interior solution ``B_in = +3 eps_2 mu_e alpha_tilde / c / D * E_0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import PhysicsError, PhysicsWarning, QuadratureError
from .materials import (
    SI,
    DielectricModel,
    HostMedium,
    PhysicalConstants,
    TIMaterial,
    alpha_tilde,
    effective_permeability,
    epsilon1,
    magnetoelectric_term,
)

__all__ = [
    "AXES",
    "SphereGeometry",
    "FieldSample",
    "DipoleMoments",
    "DerivedFrequencies",
    "InterfaceMedia",
    "SphereResponse",
    "LorentzianResponse",
    "QuadratureSpec",
    "QuadratureResult",
    "axis_index",
    "g_vector",
    "xi",
    "derived_frequencies",
    "dielectric_from_mode",
    "mode_magnetic_factor",
    "check_quasistatic",
    "solve_sphere_response",
    "lorentzian_response",
    "impulse_fields",
    "orthogonality_integral",
    "sphere_nodes",
    "export_field_grid",
]

AXES = ("x", "y", "z")


def axis_index(i) -> int:
    if isinstance(i, str):
        try:
            return AXES.index(i.lower())
        except ValueError:
            raise ValueError(f"unknown axis {i!r}") from None
    i = int(i)
    if i not in (0, 1, 2):
        raise ValueError(f"axis index out of range: {i}")
    return i


@dataclass(frozen=True)
class SphereGeometry:
    radius_R: float

    def __post_init__(self):
        if not self.radius_R > 0:
            raise PhysicsError("radius_R must be positive")


@dataclass(frozen=True)
class FieldSample:
    position: np.ndarray
    E: np.ndarray
    B: np.ndarray


@dataclass(frozen=True)
class DipoleMoments:
    p: np.ndarray  # C m
    m: np.ndarray  # A m^2


@dataclass(frozen=True)
class DerivedFrequencies:
    omega_0: float
    eta: float
    Omega: float


def _as_points(position) -> np.ndarray:
    pts = np.asarray(position, dtype=float)
    if pts.shape[-1] != 3:
        raise ValueError("positions must have a trailing dimension of 3")
    return pts


def _radial(pts):
    r = np.linalg.norm(pts, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        rhat = np.where(r[..., None] > 0, pts / r[..., None], 0.0)
    return r, rhat


def g_vector(i, position, R: float) -> np.ndarray:
    """Dimensionless mode profile for drive along axis ``i``.

    Uniform unit vector inside the sphere, minus a unit dipole field scaled by
    ``(R/r)^3`` outside. Works on a single point or an ``(..., 3)`` array.
    """
    k = axis_index(i)
    pts = _as_points(position)
    r, rhat = _radial(pts)
    e = np.zeros(3)
    e[k] = 1.0
    outside = r >= R
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(outside, (R / np.where(r > 0, r, R)) ** 3, 0.0)
    proj = rhat[..., k]
    ext = -scale[..., None] * (3.0 * proj[..., None] * rhat - e)
    return np.where(outside[..., None], ext, e)


def xi(r, R: float):
    """1 outside (and on) the surface, -2 inside."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    out = np.where(r >= R, 1.0, -2.0)
    return out if out.ndim else float(out)


def derived_frequencies(ti: TIMaterial, host: HostMedium, consts: PhysicalConstants = SI) -> DerivedFrequencies:
    P = 2.0 * host.epsilon_2 + 1.0 + magnetoelectric_term(ti, host, consts)
    d = ti.dielectric
    omega_0 = d.omega_e / math.sqrt(P)
    eta = 3.0 * host.epsilon_2 / P
    Omega = math.sqrt(omega_0**2 + d.omega_R**2)
    return DerivedFrequencies(omega_0=omega_0, eta=eta, Omega=Omega)


def dielectric_from_mode(
    Omega: float,
    eps_static: float,
    host: HostMedium,
    *,
    mu_1: float = 1.0,
    theta_over_pi: float = 1.0,
    gamma_0: float = 0.0,
    consts: PhysicalConstants = SI,
) -> DielectricModel:
    """Oscillator parameters that put the dipolar mode at ``Omega`` with static permittivity ``eps_static``.

    Uses ``Omega^2 = omega_R^2 + omega_e^2 / P`` and ``(omega_e/omega_R)^2 = eps_static - 1``,
    where ``P = 2 eps_2 + 1 + mu_e alpha_tilde^2`` is fixed by the host and the axion angle.
    """
    if not eps_static > 1:
        raise PhysicsError("static permittivity must exceed 1 (zero oscillator strength otherwise)")
    probe = TIMaterial(DielectricModel(1.0, 1.0), mu_1=mu_1, theta_over_pi=theta_over_pi)
    P = 2.0 * host.epsilon_2 + 1.0 + magnetoelectric_term(probe, host, consts)
    Q = eps_static - 1.0
    omega_R = Omega / math.sqrt(1.0 + Q / P)
    return DielectricModel(omega_e=omega_R * math.sqrt(Q), omega_R=omega_R, gamma_0=gamma_0)


def mode_magnetic_factor(ti: TIMaterial, host: HostMedium, consts: PhysicalConstants = SI) -> float:
    """``kappa`` in ``B = kappa * xi(r) * E`` for the localized dipolar mode (tesla per V/m)."""
    return -effective_permeability(ti, host) * alpha_tilde(ti, consts) / (2.0 * consts.c)


def check_quasistatic(geom: SphereGeometry, Omega: float, consts: PhysicalConstants = SI) -> bool:
    """Warn (and return False) when the free-space wavelength is under ten radii."""
    wavelength = 2.0 * math.pi * consts.c / Omega
    ok = wavelength >= 10.0 * geom.radius_R
    if not ok:
        warnings.warn(
            f"quasistatic approximation questionable: wavelength {wavelength:.3e} m < 10 R",
            PhysicsWarning,
            stacklevel=2,
        )
    return ok


@dataclass(frozen=True)
class InterfaceMedia:
    """Material data on both sides of the sphere surface, as needed by jump conditions."""

    eps_in: complex
    eps_out: float
    mu_in: float
    mu_out: float
    alpha_tilde: float
    c: float


def _dipole_shape(pts, vec):
    """``[3 (v.rhat) rhat - v] / r^3`` for complex vector ``v``."""
    r, rhat = _radial(pts)
    proj = rhat @ vec
    return (3.0 * proj[..., None] * rhat - vec) / (r**3)[..., None]


@dataclass(frozen=True)
class SphereResponse:
    """Exact quasistatic fields of the sphere driven by a uniform phasor field ``E0``."""

    radius: float
    E0: np.ndarray
    E_in: np.ndarray
    B_in: np.ndarray
    dipoles: DipoleMoments
    media: InterfaceMedia
    consts: PhysicalConstants = field(default=SI, repr=False)

    def interior(self, points):
        pts = _as_points(points)
        shape = pts.shape[:-1] + (3,)
        return np.broadcast_to(self.E_in, shape).copy(), np.broadcast_to(self.B_in, shape).copy()

    def exterior(self, points):
        pts = _as_points(points)
        k = self.consts
        eps2, mu2 = self.media.eps_out, self.media.mu_out
        E = self.E0 + _dipole_shape(pts, self.dipoles.p) / (4.0 * math.pi * k.epsilon_0 * eps2)
        B = k.mu_0 * mu2 / (4.0 * math.pi) * _dipole_shape(pts, self.dipoles.m)
        return E, B

    def fields(self, points):
        pts = _as_points(points)
        r = np.linalg.norm(pts, axis=-1)
        Ei, Bi = self.interior(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            Eo, Bo = self.exterior(np.where(r[..., None] >= self.radius, pts, self.radius))
        inside = (r < self.radius)[..., None]
        return np.where(inside, Ei, Eo), np.where(inside, Bi, Bo)

    def induced_electric(self, points):
        """The sphere's own field, total minus the applied ``E0``."""
        E, _ = self.fields(points)
        return E - self.E0


def solve_sphere_response(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    E0,
    omega: float,
    consts: PhysicalConstants = SI,
) -> SphereResponse:
    E0 = np.asarray(E0, dtype=float).reshape(3)
    eps1 = epsilon1(ti.dielectric, omega)
    eps2, mu2 = host.epsilon_2, host.mu_2
    mu_e = effective_permeability(ti, host)
    at = alpha_tilde(ti, consts)
    s = mu_e * at**2
    D = 2.0 * eps2 + eps1 + s
    if D == 0:
        raise PhysicsError(
            f"plasmon pole: 2 eps_2 + eps_1 + mu_e alpha_tilde^2 vanishes at omega={omega:.6e}"
        )
    R3 = geom.radius_R**3
    E_in = 3.0 * eps2 / D * E0
    B_in = 3.0 * eps2 * mu_e * at / consts.c / D * E0
    p = 4.0 * math.pi * consts.epsilon_0 * eps2 * (eps1 - eps2 + s) / D * R3 * E0
    m = 2.0 * math.pi / (consts.mu_0 * mu2) * (3.0 * eps2 * mu_e * at / consts.c) / D * R3 * E0
    media = InterfaceMedia(eps_in=complex(eps1), eps_out=eps2, mu_in=ti.mu_1, mu_out=mu2, alpha_tilde=at, c=consts.c)
    return SphereResponse(
        radius=geom.radius_R,
        E0=E0.astype(complex),
        E_in=np.asarray(E_in, dtype=complex),
        B_in=np.asarray(B_in, dtype=complex),
        dipoles=DipoleMoments(p=np.asarray(p, dtype=complex), m=np.asarray(m, dtype=complex)),
        media=media,
        consts=consts,
    )


@dataclass(frozen=True)
class LorentzianResponse:
    """High-Q approximation of the sphere's own field near the dipolar mode."""

    radius: float
    amplitude: np.ndarray  # complex coefficient of G_i per axis, V/m
    magnetic_factor: float
    frequencies: DerivedFrequencies

    def electric(self, points):
        pts = _as_points(points)
        return sum(self.amplitude[k] * g_vector(k, pts, self.radius) for k in range(3))

    def magnetic(self, points):
        pts = _as_points(points)
        r = np.linalg.norm(pts, axis=-1)
        return self.magnetic_factor * np.asarray(xi(r, self.radius))[..., None] * self.electric(pts)


def lorentzian_response(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    E0,
    omega: float,
    consts: PhysicalConstants = SI,
) -> LorentzianResponse:
    freqs = derived_frequencies(ti, host, consts)
    gamma_0 = ti.dielectric.gamma_0
    if gamma_0 >= omega / 10:
        warnings.warn(
            f"Lorentzian response requires gamma_0 << omega (gamma_0={gamma_0:.3e}, omega={omega:.3e})",
            PhysicsWarning,
            stacklevel=2,
        )
    E0 = np.asarray(E0, dtype=float).reshape(3)
    line = freqs.eta * (freqs.omega_0**2 / (2.0 * freqs.Omega)) / (omega - freqs.Omega + 0.5j * gamma_0)
    return LorentzianResponse(
        radius=geom.radius_R,
        amplitude=line * E0,
        magnetic_factor=mode_magnetic_factor(ti, host, consts),
        frequencies=freqs,
    )


def impulse_fields(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    E0_impulse,
    t: float,
    position,
    consts: PhysicalConstants = SI,
) -> FieldSample:
    """Ringing of the dipolar mode after a delta-function kick ``E0_impulse * delta(t)`` (V s/m)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    freqs = derived_frequencies(ti, host, consts)
    E0_impulse = np.asarray(E0_impulse, dtype=float).reshape(3)
    Lam = E0_impulse * freqs.eta * freqs.omega_0**2 / (2.0 * freqs.Omega)
    envelope = math.sin(freqs.Omega * t) * math.exp(-ti.dielectric.gamma_0 * t / 2.0)
    pts = _as_points(position)
    E = envelope * sum(Lam[k] * g_vector(k, pts, geom.radius_R) for k in range(3))
    r = np.linalg.norm(pts, axis=-1)
    B = mode_magnetic_factor(ti, host, consts) * np.asarray(xi(r, geom.radius_R))[..., None] * E
    return FieldSample(position=pts, E=E, B=B)


# --- quadrature -----------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Kronrod in radius times product Gauss-Legendre/trapezoid on the sphere.

    ``rel_tol`` scales the absolute target ``rel_tol * (4 pi R^3 / 3) * max|F|^2``.
    """

    n_theta: int = 12
    n_phi: int = 24
    r_max_factor: float = 1e3
    rel_tol: float = 1e-8
    limit: int = 200


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error: float


def sphere_nodes(n_theta: int, n_phi: int):
    """Unit vectors and weights of a product rule on the unit sphere (weights sum to 4 pi)."""
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - x**2)
    u = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(x, n_phi),
        ],
        axis=-1,
    )
    w = np.repeat(wx, n_phi) * (2.0 * np.pi / n_phi)
    return u, w


def _radial_quad(fn, a, b, epsabs, spec, label):
    # log-spaced breakpoints keep QUADPACK efficient over several decades of a power-law tail
    if a > 0 and b / a > 4:
        pts = np.geomspace(a, b, int(np.ceil(np.log2(b / a))) + 1)[1:-1]
        value, err = 0.0, 0.0
        edges = np.concatenate([[a], pts, [b]])
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = integrate.quad(fn, lo, hi, epsabs=epsabs / len(edges), epsrel=1e-13, limit=spec.limit)
            value += v
            err += e
    else:
        value, err = integrate.quad(fn, a, b, epsabs=epsabs, epsrel=1e-13, limit=spec.limit)
    if err > epsabs:
        raise QuadratureError(f"{label}: radial quadrature did not converge (error {err:.3e} > {epsabs:.3e})", err)
    return value, err


def integrate_ball(density, R: float, region: str = "all", spec: QuadratureSpec = QuadratureSpec(), scale=None):
    """Integrate ``density(points) -> (...)`` over the interior and/or exterior of a sphere of radius R.

    ``density`` receives an ``(M, 3)`` array of points at fixed radius and must return ``(M,)`` values.
    The exterior is truncated at ``r_max_factor * R`` and the remaining tail is added assuming an
    ``r^-6`` fall-off of the density.
    """
    if region not in ("all", "interior", "exterior"):
        raise ValueError(f"unknown region {region!r}")
    u, w = sphere_nodes(spec.n_theta, spec.n_phi)

    def shell(r):
        return float(np.real(np.sum(w * density(r * u)))) * r * r

    if scale is None:
        scale = max(
            float(np.max(np.abs(density(R * (1 - 1e-12) * u)))),
            float(np.max(np.abs(density(R * (1 + 1e-12) * u)))),
            1e-300,
        )
    epsabs = spec.rel_tol * (4.0 * math.pi * R**3 / 3.0) * scale

    total, err = 0.0, 0.0
    if region in ("all", "interior"):
        v, e = _radial_quad(shell, 0.0, R, epsabs, spec, "interior")
        total += v
        err += e
    if region in ("all", "exterior"):
        r_max = spec.r_max_factor * R
        v, e = _radial_quad(shell, R, r_max, epsabs, spec, "exterior")
        tail = shell(r_max) * r_max / 3.0
        total += v + tail
        err += e
    return QuadratureResult(value=total, abs_error=err)


def orthogonality_integral(
    i,
    j,
    R: float,
    field_kind: str = "E",
    *,
    region: str = "all",
    amplitude: complex = 1.0,
    magnetic_factor: float = 1.0,
    spec: QuadratureSpec = QuadratureSpec(),
) -> QuadratureResult:
    """Overlap ``int F_i . conj(F_j) d^3r`` of two mode profiles.

    ``field_kind="E"`` uses ``F_i = amplitude * G_i``; ``"B"`` uses
    ``F_i = magnetic_factor * xi(r) * amplitude * G_i``.
    """
    ki, kj = axis_index(i), axis_index(j)
    if field_kind not in ("E", "B"):
        raise ValueError("field_kind must be 'E' or 'B'")
    amp2 = abs(amplitude) ** 2

    def density(pts):
        prod = np.sum(g_vector(ki, pts, R) * g_vector(kj, pts, R), axis=-1) * amp2
        if field_kind == "B":
            r = np.linalg.norm(pts, axis=-1)
            prod = prod * (magnetic_factor * xi(r, R)) ** 2
        return prod

    scale = amp2 * (16.0 * magnetic_factor**2 if field_kind == "B" else 4.0)
    return integrate_ball(density, R, region=region, spec=spec, scale=scale)


def export_field_grid(response: SphereResponse, points, path) -> None:
    """Write total E and B at ``points`` as CSV (SI units, one row per point)."""
    from .io import format_float

    pts = _as_points(points).reshape(-1, 3)
    E, B = response.fields(pts)
    cols = ["x_m", "y_m", "z_m"]
    for name in ("E", "B"):
        for ax in AXES:
            cols += [f"re_{name}{ax}", f"im_{name}{ax}"]
    lines = ["# fields of the driven sphere; E in V/m, B in T, positions in m", ",".join(cols)]
    for p, e, b in zip(pts, E, B):
        vals = list(p)
        for v in (e, b):
            for comp in v:
                vals += [comp.real, comp.imag]
        lines.append(",".join(format_float(x) for x in vals))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
