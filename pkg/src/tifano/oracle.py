"""Brute-force reference solutions used to check the closed forms.

Nothing here calls the field or constant formulas of the main modules. The sphere
problem is re-solved from the scalar potentials

    phi_in = sum_l A_l r^l P_l,       phi_out = -E0 r cos(t) + sum_l C_l r^(-l-1) P_l,
    psi_in = sum_l D_l r^l P_l,       psi_out = sum_l F_l r^(-l-1) P_l,

with ``E = -grad phi`` and ``B = -grad psi``, by imposing the four interface
conditions order by order. Energies and radiated powers are then obtained by
quadrature and by time averaging, not from their closed forms.

Coefficients are stored dimensionless, scaled to surface values:
``a = A R^(l-1) / E0``, ``c = C R^(-l-2) / E0``, ``d = c_light D R^(l-1) / E0`` and
``f = c_light F R^(-l-2) / E0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import optimize

from .errors import PhysicsError
from .materials import SI, HostMedium, PhysicalConstants, TIMaterial
from .quasistatics import QuadratureSpec, SphereGeometry, integrate_ball

__all__ = [
    "LegendreSeriesSolution",
    "ResidualReport",
    "EnergyIntegrals",
    "LarmorBalance",
    "solve_legendre_series",
    "boundary_residuals",
    "numeric_energy_integral",
    "larmor_balance",
]

DEFAULT_SEED = 20240527


def _lorentz(ti: TIMaterial, omega):
    d = ti.dielectric
    return 1.0 + d.omega_e**2 / (d.omega_R**2 - omega * (omega + 1j * d.gamma_0))


def _axion(ti, consts):
    return consts.alpha_fs * ti.theta_over_pi


def _system(ell, eps_in, eps_out, mu_in, mu_out, at):
    """Interface conditions for one multipole order in the unknowns (a, c, d, f)."""
    return np.array(
        [
            [1.0, -1.0, 0.0, 0.0],  # continuity of phi (tangential E)
            [0.0, 0.0, ell, ell + 1.0],  # continuity of psi (normal B)
            [eps_in * ell, eps_out * (ell + 1.0), at * ell, 0.0],  # normal D with axion charge
            [at, 0.0, -1.0 / mu_in, 1.0 / mu_out],  # tangential H with axion current
        ],
        dtype=complex,
    )


def _drive(ell, eps_out):
    if ell != 1:
        return np.zeros(4, dtype=complex)
    return np.array([-1.0, 0.0, -eps_out, 0.0], dtype=complex)


@dataclass(frozen=True)
class LegendreSeriesSolution:
    ell_max: int
    radius: float
    E0_magnitude: float
    axis: np.ndarray  # unit vector of the drive
    A: np.ndarray  # per-l scaled coefficients, index 0 <-> l = 1
    C: np.ndarray
    D: np.ndarray
    F: np.ndarray
    eps_in: complex
    eps_out: float
    mu_in: float
    mu_out: float
    alpha_tilde: float
    c: float
    driven: bool = True

    def _angular(self, points):
        pts = np.asarray(points, dtype=float)
        r = np.linalg.norm(pts, axis=-1)
        rhat = pts / r[..., None]
        mu = rhat @ self.axis
        tangential = self.axis - mu[..., None] * rhat
        return r / self.radius, rhat, mu, tangential

    def _series(self, coeffs, rho, rhat, mu, tangential, inside):
        out = np.zeros(rho.shape + (3,), dtype=complex)
        for k, coef in enumerate(coeffs):
            ell = k + 1
            if coef == 0:
                continue
            basis = np.zeros(ell + 1)
            basis[ell] = 1.0
            P = npleg.legval(mu, basis)
            dP = npleg.legval(mu, npleg.legder(basis))
            if inside:
                # grad(rho^l P_l) in units of 1/R
                radial, power = ell * P, rho ** (ell - 1)
            else:
                radial, power = -(ell + 1.0) * P, rho ** (-ell - 2.0)
            out += coef * power[..., None] * (radial[..., None] * rhat + dP[..., None] * tangential)
        return out

    def interior(self, points):
        rho, rhat, mu, tan = self._angular(points)
        E = -self.E0_magnitude * self._series(self.A, rho, rhat, mu, tan, True)
        B = -self.E0_magnitude / self.c * self._series(self.D, rho, rhat, mu, tan, True)
        return E, B

    def exterior(self, points):
        rho, rhat, mu, tan = self._angular(points)
        E = -self.E0_magnitude * self._series(self.C, rho, rhat, mu, tan, False)
        if self.driven:
            E = E + self.E0_magnitude * self.axis
        B = -self.E0_magnitude / self.c * self._series(self.F, rho, rhat, mu, tan, False)
        return E, B

    def perturbed(self, ell: int = 1, factor: float = 1.01) -> "LegendreSeriesSolution":
        """Copy with one exterior electric coefficient scaled; a fault-injection hook."""
        C = self.C.copy()
        C[ell - 1] *= factor
        return _replace(self, C=C)


def _replace(sol, **kw):
    from dataclasses import replace

    return replace(sol, **kw)


def _solve_orders(ell_max, eps_in, eps_out, mu_in, mu_out, at):
    coeffs = np.zeros((ell_max, 4), dtype=complex)
    for ell in range(1, ell_max + 1):
        M = _system(ell, eps_in, eps_out, mu_in, mu_out, at)
        if np.linalg.cond(M) > 1e13:
            raise PhysicsError(f"singular interface system at l={ell}: plasmon pole")
        coeffs[ell - 1] = np.linalg.solve(M, _drive(ell, eps_out))
    return coeffs


def solve_legendre_series(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    E0,
    omega: float,
    ell_max: int = 4,
    consts: PhysicalConstants = SI,
) -> LegendreSeriesSolution:
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    E0 = np.asarray(E0, dtype=float).reshape(3)
    mag = float(np.linalg.norm(E0))
    axis = E0 / mag if mag > 0 else np.array([0.0, 0.0, 1.0])
    eps_in = complex(_lorentz(ti, omega))
    at = _axion(ti, consts)
    k = _solve_orders(ell_max, eps_in, host.epsilon_2, ti.mu_1, host.mu_2, at)
    return LegendreSeriesSolution(
        ell_max=ell_max,
        radius=geom.radius_R,
        E0_magnitude=mag,
        axis=axis,
        A=k[:, 0],
        C=k[:, 1],
        D=k[:, 2],
        F=k[:, 3],
        eps_in=eps_in,
        eps_out=host.epsilon_2,
        mu_in=ti.mu_1,
        mu_out=host.mu_2,
        alpha_tilde=at,
        c=consts.c,
    )


# --- interface residuals ----------------------------------------------------


CONDITIONS = ("normal_D", "tangential_E", "normal_B", "tangential_H")


@dataclass(frozen=True)
class ResidualReport:
    residuals: dict  # condition -> max relative residual
    trivial: dict  # condition -> True when both sides vanish identically

    def max(self) -> float:
        return max(self.residuals.values())


def random_surface_points(n_points: int, radius: float, seed: int = DEFAULT_SEED):
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_points, 3))
    return radius * v / np.linalg.norm(v, axis=1)[:, None]


def boundary_residuals(solution, n_points: int = 100, seed: int = DEFAULT_SEED, offset: float = 0.0) -> ResidualReport:
    """Maximum relative violation of each interface condition over random surface points.

    ``solution`` needs ``radius``, ``interior(points)``, ``exterior(points)`` and a
    ``media``-like set of attributes (``eps_in``, ``eps_out``, ``mu_in``, ``mu_out``,
    ``alpha_tilde``, ``c``), either directly or on ``solution.media``. With ``offset > 0``
    the two sides are sampled at ``R (1 -+ offset)`` instead of exactly on the surface.
    """
    media = getattr(solution, "media", solution)
    pts = random_surface_points(n_points, solution.radius, seed)
    n = pts / np.linalg.norm(pts, axis=1)[:, None]
    Ei, Bi = solution.interior(pts * (1.0 - offset))
    Eo, Bo = solution.exterior(pts * (1.0 + offset))
    at, c = media.alpha_tilde, media.c

    def normal(v):
        return np.sum(v * n, axis=-1)

    def cross(v):
        return np.cross(n, v)

    def mag(v):
        return np.linalg.norm(v, axis=-1) if v.ndim > 1 else np.abs(v)

    terms = {
        "normal_D": [media.eps_out * normal(Eo), -media.eps_in * normal(Ei), -at * c * normal(Bo)],
        "tangential_E": [cross(Eo), -cross(Ei)],
        "normal_B": [normal(Bo), -normal(Bi)],
        "tangential_H": [cross(Bo) / media.mu_out, -cross(Bi) / media.mu_in, at / c * cross(Eo)],
    }
    residuals, trivial = {}, {}
    for name, parts in terms.items():
        total = sum(parts)
        scale = max(float(np.max(mag(p))) for p in parts)
        if scale == 0.0:
            residuals[name], trivial[name] = 0.0, True
        else:
            residuals[name], trivial[name] = float(np.max(mag(total))) / scale, False
    return ResidualReport(residuals=residuals, trivial=trivial)


# --- mode energy by quadrature ----------------------------------------------


def _mode_solution(ti, host, geom, consts):
    """Source-free l = 1 solution normalised to unit interior field along z."""
    at = _axion(ti, consts)
    args = (host.epsilon_2, ti.mu_1, host.mu_2, at)
    # the l = 1 determinant is affine in the interior permittivity
    d0 = np.linalg.det(_system(1, 0.0, *args))
    d1 = np.linalg.det(_system(1, 1.0, *args))
    eps_res = float(np.real(-d0 / (d1 - d0)))
    _, _, vh = np.linalg.svd(_system(1, eps_res, *args))
    null = vh[-1].conj()
    null = null / (-null[0])  # a = -1, so the interior field is +z
    sol = LegendreSeriesSolution(
        ell_max=1,
        radius=geom.radius_R,
        E0_magnitude=1.0,
        axis=np.array([0.0, 0.0, 1.0]),
        A=null[0:1],
        C=null[1:2],
        D=null[2:3],
        F=null[3:4],
        eps_in=eps_res,
        eps_out=host.epsilon_2,
        mu_in=ti.mu_1,
        mu_out=host.mu_2,
        alpha_tilde=at,
        c=consts.c,
        driven=False,
    )
    return sol, eps_res


def _mode_frequency(ti, eps_res):
    d = ti.dielectric
    if d.gamma_0 != 0:
        d = type(d)(d.omega_e, d.omega_R, 0.0)

    def f(w):
        return 1.0 + d.omega_e**2 / (d.omega_R**2 - w * w) - eps_res

    lo = d.omega_R * (1.0 + 1e-12)
    hi = 2.0 * d.omega_R
    while f(hi) < 0:
        hi *= 2.0
    return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def _slope(ti, Omega):
    """``d(omega eps1)/d omega`` at ``Omega`` by complex step, undamped oscillator."""
    d = ti.dielectric
    h = 1e-20 * Omega
    w = Omega + 1j * h
    return float(np.imag(w * (1.0 + d.omega_e**2 / (d.omega_R**2 - w * w))) / h)


@dataclass(frozen=True)
class EnergyIntegrals:
    inv_norm_sq: float  # (V/m)^-2
    V_m: float  # m^3
    U0: float
    interior_integral: float  # int_in |E|^2 for unit interior field, m^3
    exterior_integral: float  # int_out |E|^2, m^3
    Omega: float
    slope: float
    abs_error: float


def numeric_energy_integral(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    Omega: float | None = None,
    spec: QuadratureSpec = QuadratureSpec(),
    consts: PhysicalConstants = SI,
) -> EnergyIntegrals:
    """Quantization integrals of the dipolar mode by direct quadrature.

    The mode frequency (when ``Omega`` is not given) is the root of the oscillator
    permittivity at the value that makes the l = 1 interface system singular.
    """
    mode, eps_res = _mode_solution(ti, host, geom, consts)
    if Omega is None:
        Omega = _mode_frequency(ti, eps_res)
    slope = _slope(ti, Omega)
    R = geom.radius_R
    c2 = consts.c**2

    def e2(fields):
        E, _ = fields
        return np.sum(np.abs(E) ** 2, axis=-1)

    def b2(fields):
        _, B = fields
        return np.sum(np.abs(B) ** 2, axis=-1)

    def density_in(pts):
        f = mode.interior(pts)
        return slope * e2(f) + c2 * b2(f) / ti.mu_1

    def density_out(pts):
        f = mode.exterior(pts)
        return host.epsilon_2 * e2(f) + c2 * b2(f) / host.mu_2

    scale = max(slope, 4.0 * host.epsilon_2)
    w_in = integrate_ball(density_in, R, "interior", spec, scale=scale)
    w_out = integrate_ball(density_out, R, "exterior", spec, scale=scale)
    I_in = integrate_ball(lambda p: e2(mode.interior(p)), R, "interior", spec, scale=1.0)
    I_out = integrate_ball(lambda p: e2(mode.exterior(p)), R, "exterior", spec, scale=4.0)

    origin = np.array([[0.0, 0.0, 1e-30 * R]])
    U0 = float(density_in(origin)[0])
    total = w_in.value + w_out.value
    inv_n2 = consts.epsilon_0 / (2.0 * consts.hbar * Omega) * total
    return EnergyIntegrals(
        inv_norm_sq=inv_n2,
        V_m=total / U0,
        U0=U0,
        interior_integral=I_in.value,
        exterior_integral=I_out.value,
        Omega=Omega,
        slope=slope,
        abs_error=w_in.abs_error + w_out.abs_error,
    )


# --- radiative balance --------------------------------------------------------


@dataclass(frozen=True)
class LarmorBalance:
    power: float  # W, period averaged
    energy: float  # J, period averaged
    gamma_r: float  # 1/s


def larmor_balance(
    ti: TIMaterial,
    host: HostMedium,
    geom: SphereGeometry,
    amplitude: float = 1.0,
    n_samples: int = 64,
    spec: QuadratureSpec = QuadratureSpec(),
    consts: PhysicalConstants = SI,
) -> LarmorBalance:
    """Radiated power over stored energy of the freely ringing mode.

    The interior field oscillates as ``amplitude * sin(Omega t)``; the dipoles are read
    off the exterior potential coefficients and the period averages are taken by the
    periodic trapezoid rule, which is exact for these trigonometric polynomials.
    """
    ints = numeric_energy_integral(ti, host, geom, spec=spec, consts=consts)
    mode, _ = _mode_solution(ti, host, geom, consts)
    R3 = geom.radius_R**3
    Omega = ints.Omega
    p0 = 4.0 * math.pi * consts.epsilon_0 * host.epsilon_2 * abs(mode.C[0]) * amplitude * R3
    m0 = 4.0 * math.pi / (consts.mu_0 * host.mu_2) * abs(mode.F[0]) * amplitude * R3 / consts.c
    t = 2.0 * math.pi / Omega * np.arange(n_samples) / n_samples
    wave = np.sin(Omega * t)
    p_dd = -(Omega**2) * p0 * wave
    m_dd = -(Omega**2) * m0 * wave
    power = consts.mu_0 * host.mu_2 / (6.0 * math.pi * consts.c) * (p_dd**2 + m_dd**2 / consts.c**2)
    # energy per unit squared interior amplitude is (eps_0 / 2) * int w
    stored = 0.5 * consts.epsilon_0 * ints.U0 * ints.V_m * amplitude**2 * wave**2
    P_avg = float(np.mean(power))
    U_avg = float(np.mean(stored))
    return LarmorBalance(power=P_avg, energy=U_avg, gamma_r=P_avg / U_avg)
