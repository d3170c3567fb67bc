"""Global profile v(Z) on [0, inf) and the physical fields built from it.

Pieces, in increasing Z:

    A  origin series                       Z in [0, Z_a]
    B  Z-v trajectory carrying int J       Z in [Z_a, Z_b]     (stops at Psi_z = +zeta_use)
    D  sonic series mapped through Theta   z in [-zeta_use, +zeta_use]
    E  Z-v trajectory carrying int J       Z in [Z_c, Z_max]
    F  W = 1/Z trajectory carrying int J~  W in [0, 1/Z_max]

The density is rho_hat = exp((ell+1)/ell * int_0^Z J), normalised to 1 at Z = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .criticality import admissible
from .errors import RegionError, SeamError
from .fields import Landmarks, barrier_poly, field_W, field_Zv, landmarks
from .matcher import find_R0, MatchConfig
from .ode import Event, integrate, psi_z_equals
from .params import CoeffTable, ParamSet, SonicData, b_constants, params_from_R, sonic_data
from .renorm import psi_raw, theta_raw
from .series import (TaylorSeries, eval_series, eval_series_deriv, p0_series, q1_series,
                     seed_point)

__all__ = [
    "ProfileConfig",
    "Seam",
    "GlobalProfile",
    "build_global_v",
    "solve_profile",
    "eval_J",
    "J_forms",
    "J_tilde",
    "build_density",
    "profile_at",
    "even_extension_check",
    "barrier_compliance",
    "delta_Z_sign_change",
    "pde_residual",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass(frozen=True)
class ProfileConfig:
    rtol: float = 1e-11
    atol: float = 1e-11
    Z_max: float = 10.0
    zeta_cap: float = 0.02
    zeta_radius_frac: float = 0.5
    N_origin: int = 40
    N_sonic: int = 60
    seed_tol: float = 1e-13
    seed_cap: float = 0.05
    window_panels: int = 32
    c0_tol: float = 1e-9
    c1_tol: float = 1e-7


@dataclass(frozen=True)
class Seam:
    name: str
    location: float
    c0: float
    c1: float


def _gl(f, a, b):
    if a == b:
        return 0.0
    h = 0.5 * (b - a)
    c = 0.5 * (b + a)
    return h * sum(w * f(c + h * x) for x, w in zip(_GL_X, _GL_W))


def _J3(params, Z, v, dv):
    m, ell = params.m, params.ell
    w = 1.0 - v * v
    return (m * v * w + ell * dv * (Z - v)) / ((1.0 - Z * v) * w)


def _Jdef(params, Z, v, dv):
    m, k = params.m, params.k
    w = 1.0 - v * v
    return ((-m + k * v / Z) * w + dv * (1.0 - Z * v)) / ((Z - v) * w)


def _J(params, Z, v, dv):
    return _J3(params, Z, v, dv) if Z <= 1.0 else _Jdef(params, Z, v, dv)


def J_tilde(params: ParamSet, W, vt, dvt):
    k, m = params.k, params.m
    w = 1.0 - vt * vt
    return ((k - m) * vt * w - dvt * (W - vt)) / ((1.0 - W * vt) * w)


def _theta_derivs(z, u, du, gamma):
    """Z, v and their z-derivatives along a (z, u(z)) curve."""
    S = u + (1.0 - z) ** 2
    T = u + (1.0 + gamma) * (1.0 - z)
    rS = math.sqrt(S)
    Z = (1.0 + gamma) * rS / T
    v = (1.0 - z) / rS
    dS = du - 2.0 * (1.0 - z)
    dT = du - (1.0 + gamma)
    dZ = (1.0 + gamma) * (0.5 * dS / rS * T - rS * dT) / (T * T)
    dv = (-rS - (1.0 - z) * 0.5 * dS / rS) / S
    return Z, v, dZ, dv


@dataclass
class GlobalProfile:
    params: ParamSet
    R0: float
    sonic: SonicData
    coeffs: CoeffTable
    marks: Landmarks
    config: ProfileConfig
    origin: TaylorSeries
    sonic_series: TaylorSeries
    Z_a: float
    traj_B: object = field(repr=False)
    zeta_use: float = 0.0
    Z_D_lo: float = 0.0
    Z_D_hi: float = 0.0
    traj_E: object = field(default=None, repr=False)
    traj_F: object = field(default=None, repr=False)
    window_z: np.ndarray = field(default=None, repr=False)
    window_I: np.ndarray = field(default=None, repr=False)
    v_inf: float = math.nan
    beta: float = math.nan
    rho_tilde_W0: float = math.nan
    rho_star: float = math.nan
    u0_star: float = math.nan
    u_star: float = math.nan
    black_crossing: tuple | None = None
    seams: list = field(default_factory=list)
    match: object = None
    post_sonic_region: str = ""

    # -- sonic window helpers ------------------------------------------------
    def _uL(self, z):
        return eval_series(self.sonic_series, z, 1.0)[0]

    def _window_point(self, z):
        u = self._uL(z)
        du = eval_series_deriv(self.sonic_series, z)
        return _theta_derivs(z, u, du, self.params.gamma)

    def _window_z_of_Z(self, Z):
        zs = self.zeta_use
        return brentq(lambda z: self._window_point(z)[0] - Z, -zs, zs, xtol=1e-16, rtol=8.9e-16)

    def _window_I(self, z):
        zs = self.window_z
        # panels run from +zeta_use down to -zeta_use
        j = int(np.clip(np.searchsorted(-zs, -z, side="right") - 1, 0, len(zs) - 2))
        return self.window_I[j] + _gl(self._window_integrand, zs[j], z)

    def _window_integrand(self, z):
        Z, v, dZ, dv = self._window_point(z)
        p = self.params
        w = 1.0 - v * v
        return (p.m * v * w * dZ + p.ell * (Z - v) * dv) / ((1.0 - Z * v) * w)

    # -- origin helpers ------------------------------------------------------
    def _I_origin(self, Z):
        def integrand(s):
            v = eval_series(self.origin, s, 1.0)[0]
            dv = eval_series_deriv(self.origin, s)
            return _J3(self.params, s, v, dv)
        return _gl(integrand, 0.0, Z)

    # -- public evaluation ---------------------------------------------------
    def piece(self, Z):
        if Z < 0.0:
            raise ValueError("Z must be non-negative")
        if Z <= self.Z_a:
            return "A"
        if Z <= self.traj_B.x_end:
            return "B"
        if Z <= self.Z_D_hi:
            return "D"
        if Z <= self.config.Z_max:
            return "E"
        return "F"

    def state(self, Z):
        """(v, dv/dZ, I) with I = int_0^Z J."""
        pc = self.piece(Z)
        p = self.params
        if pc == "A":
            v = eval_series(self.origin, Z, 1.0)[0]
            return v, eval_series_deriv(self.origin, Z), self._I_origin(Z)
        if pc in ("B", "E"):
            tr = self.traj_B if pc == "B" else self.traj_E
            v, I = tr(Z)
            Dv, DZ = field_Zv(Z, v, p)
            return float(v), float(Dv / DZ), float(I)
        if pc == "D":
            Zc = max(Z, self.Z_D_lo)
            z = self._window_z_of_Z(Zc)
            _, v, dZ, dv = self._window_point(z)
            return v, dv / dZ, self._window_I(z)
        W = 1.0 / Z
        vt, It = self.traj_F(W)
        num, den = field_W(W, vt, p)
        return float(vt), float(-W * W * num / den), float(It)

    def v(self, Z):
        if math.isinf(Z):
            return self.v_inf
        return self.state(Z)[0]

    def dv(self, Z):
        return self.state(Z)[1]

    def rho_hat(self, Z):
        p = self.params
        if math.isinf(Z):
            return 0.0
        v, dv, I = self.state(Z)
        if Z > self.config.Z_max:
            W = 1.0 / Z
            return W ** p.beta * self.rho_tilde_W0 * math.exp(-(p.beta / p.m) * I)
        return math.exp((p.ell + 1.0) / p.ell * I)

    def rho_tilde(self, W):
        p = self.params
        if W == 0.0:
            return self.rho_star
        W0 = 1.0 / self.config.Z_max
        if W <= W0:
            return self.rho_tilde_W0 * math.exp(-(p.beta / p.m) * float(self.traj_F(W)[1]))
        return W ** (-p.beta) * self.rho_hat(1.0 / W)

    def scalars(self) -> dict:
        p = self.params
        out = p.as_dict()
        out.update(R0=self.R0, Z1=self.marks.Z1, v1=self.marks.v1, v_inf=self.v_inf,
                   rho_star=self.rho_star, u0_star=self.u0_star, u_star=self.u_star)
        if self.match is not None:
            out["residual"] = self.match.residual
        if self.black_crossing is not None:
            out["Z_black"], out["v_black"] = self.black_crossing
        return out


def build_global_v(k: int, ell: float, R0: float, cfg: ProfileConfig = ProfileConfig()) -> GlobalProfile:
    params = params_from_R(k, ell, R0)
    sonic = sonic_data(params)
    coeffs = b_constants(params, sonic)
    lm = landmarks(params)
    g = params.gamma

    origin = p0_series(params, cfg.N_origin)
    Z_a = seed_point(origin, cfg.seed_tol, x_max=min(cfg.seed_cap, 0.5 * lm.Z1))
    qs = q1_series(params, sonic, cfg.N_sonic)
    zeta_use = min(cfg.zeta_radius_frac * qs.radius_estimate, cfg.zeta_cap)

    def rhs_Zv(Z, y):
        Dv, DZ = field_Zv(Z, y[0], params)
        dv = Dv / DZ
        return np.array([dv, _J(params, Z, y[0], dv)])

    prof = GlobalProfile(params, R0, sonic, coeffs, lm, cfg, origin, qs, Z_a, None, zeta_use)

    # B: origin seed to Psi_z = +zeta_use
    v_a = eval_series(origin, Z_a, cfg.seed_tol)[0]
    I_a = prof._I_origin(Z_a)
    trB = integrate(rhs_Zv, Z_a, [v_a, I_a], lm.Z1, events=[psi_z_equals(zeta_use, params)],
                    rtol=cfg.rtol, atol=cfg.atol)
    if trB.termination.kind != "event":
        raise RegionError("pre-sonic trajectory did not reach the sonic window")
    prof.traj_B = trB

    # D: sonic window, z from +zeta_use to -zeta_use
    zs = np.linspace(zeta_use, -zeta_use, cfg.window_panels + 1)
    prof.window_z = zs
    Is = [float(trB.y_end[1])]
    for a, b in zip(zs[:-1], zs[1:]):
        Is.append(Is[-1] + _gl(prof._window_integrand, a, b))
    prof.window_I = np.array(Is)
    prof.Z_D_lo = prof._window_point(zeta_use)[0]
    prof.Z_D_hi = prof._window_point(-zeta_use)[0]

    # post-sonic start must sit under the trapping barrier
    z_c = -zeta_use
    u_c = prof._uL(z_c)
    in_K1 = admissible(k, ell).in_K1
    bname = "u3" if in_K1 else "U3star"
    bar = barrier_poly(bname, params, sonic, coeffs)
    if not (0.0 < u_c < bar(z_c) and lm.zg < z_c < 0.0):
        raise RegionError(f"post-sonic point (z, u) = ({z_c!r}, {u_c!r}) is not under {bname}")
    prof.post_sonic_region = "D2prime" if in_K1 else "D2doubleprime"

    # E: Z_c to Z_max, watching for the Delta_v = 0 crossing
    Zc, vc, _, _ = prof._window_point(z_c)
    black = Event("delta_v_zero", lambda Z, y: field_Zv(Z, y[0], params)[0], terminal=False)
    trE = integrate(rhs_Zv, Zc, [vc, prof.window_I[-1]], cfg.Z_max, events=[black],
                    rtol=cfg.rtol, atol=cfg.atol)
    prof.traj_E = trE
    if trE.events:
        _, Zb, yb = trE.events[0]
        prof.black_crossing = (float(Zb), float(yb[0]))

    # F: compactified tail W in [0, 1/Z_max]
    W0 = 1.0 / cfg.Z_max
    v_max = float(trE.y_end[0])

    def rhs_W(W, y):
        num, den = field_W(W, y[0], params)
        dvt = num / den
        return np.array([dvt, J_tilde(params, W, y[0], dvt)])

    trF = integrate(rhs_W, W0, [v_max, 0.0], 0.0, rtol=cfg.rtol, atol=cfg.atol)
    prof.traj_F = trF
    prof.v_inf = float(trF.y_end[0])
    prof.beta = params.beta
    rho_Zmax = math.exp((params.ell + 1.0) / params.ell * float(trE.y_end[1]))
    prof.rho_tilde_W0 = W0 ** (-params.beta) * rho_Zmax
    prof.rho_star = prof.rho_tilde_W0 * math.exp(-(params.beta / params.m) * float(trF.y_end[1]))
    s = math.sqrt(1.0 - prof.v_inf ** 2)
    prof.u0_star = -1.0 / s
    prof.u_star = prof.v_inf / s

    prof.seams = _seams(prof)
    bad = [sm for sm in prof.seams if sm.c0 > cfg.c0_tol or sm.c1 > cfg.c1_tol]
    if bad:
        raise SeamError(f"seam mismatch beyond tolerance: {bad}")
    return prof


def _seams(prof: GlobalProfile) -> list:
    p = prof.params
    out = []
    # A | B
    Za = prof.Z_a
    Dv, DZ = field_Zv(Za, prof.traj_B.y[0][0], p)
    out.append(Seam("origin|pre-sonic", Za, 0.0, abs(eval_series_deriv(prof.origin, Za) - Dv / DZ)))
    # B | D, compared in the (z, u) plane at z = +zeta_use and in (Z, v)
    ZB, vB = prof.traj_B.x_end, float(prof.traj_B.y_end[0])
    _, uB = psi_raw(ZB, vB, p.gamma)
    zD = prof.zeta_use
    ZD, vD, dZD, dvD = prof._window_point(zD)
    DvB, DZB = field_Zv(ZB, vB, p)
    c0 = max(abs(uB - prof._uL(zD)) / max(1.0, abs(uB)), abs(ZB - ZD), abs(vB - vD))
    out.append(Seam("pre-sonic|window", ZB, c0, abs(DvB / DZB - dvD / dZD)))
    # D | E
    ZE, vE = prof.traj_E.x[0], float(prof.traj_E.y[0][0])
    ZD, vD, dZD, dvD = prof._window_point(-prof.zeta_use)
    DvE, DZE = field_Zv(ZE, vE, p)
    out.append(Seam("window|post-sonic", ZE, max(abs(ZE - ZD), abs(vE - vD)), abs(DvE / DZE - dvD / dZD)))
    # E | F
    Zm = prof.config.Z_max
    vE = float(prof.traj_E.y_end[0])
    DvE, DZE = field_Zv(Zm, vE, p)
    W = 1.0 / Zm
    num, den = field_W(W, float(prof.traj_F.y[0][0]), p)
    out.append(Seam("post-sonic|tail", Zm, abs(vE - float(prof.traj_F.y[0][0])),
                    abs(DvE / DZE + W * W * num / den)))
    return out


def solve_profile(k: int, ell: float, match_cfg: MatchConfig = MatchConfig(),
                  cfg: ProfileConfig = ProfileConfig()) -> GlobalProfile:
    res = find_R0(k, ell, match_cfg)
    prof = build_global_v(k, ell, res.R0, cfg)
    prof.match = res
    return prof


def J_forms(profile: GlobalProfile, Z: float) -> tuple:
    """(regular form, defining form) of J at Z; the second needs Z > v."""
    v, dv, _ = profile.state(Z)
    p = profile.params
    return _J3(p, Z, v, dv), (_Jdef(p, Z, v, dv) if Z > 0.0 else math.nan)


def eval_J(profile: GlobalProfile, Z: float) -> float:
    if Z == 0.0:
        return 0.0
    v, dv, _ = profile.state(Z)
    return _J(profile.params, Z, v, dv)


def build_density(profile: GlobalProfile, grid) -> dict:
    grid = np.asarray(grid, dtype=float)
    rho = np.array([profile.rho_hat(Z) for Z in grid])
    W = np.array([1.0 / Z for Z in grid if Z >= profile.config.Z_max] + [0.0])
    return {"Z": grid, "rho_hat": rho, "W": W,
            "rho_tilde": np.array([profile.rho_tilde(w) for w in W]),
            "rho_star": profile.rho_star}


def profile_at(profile: GlobalProfile, Z: float) -> tuple:
    v = profile.v(Z)
    rho = profile.rho_hat(Z)
    s = math.sqrt(1.0 - v * v)
    return v, rho, -1.0 / s, v / s


def even_extension_check(profile: GlobalProfile, width: float = 0.05, degree: int = 9,
                         n: int = 80, tol: float = 1e-8) -> dict:
    """Fit degree-9 polynomials in x = Z/width on (0, width] and report odd coefficients."""
    Zs = width * np.linspace(0.0, 1.0, n + 1)[1:]
    cols = {"v_over_Z": [], "u_over_Z": [], "rho_hat": [], "u0_hat": []}
    for Z in Zs:
        v, rho, u0, u = profile_at(profile, Z)
        cols["v_over_Z"].append(v / Z)
        cols["u_over_Z"].append(u / Z)
        cols["rho_hat"].append(rho)
        cols["u0_hat"].append(u0)
    x = Zs / width
    report = {}
    for name, vals in cols.items():
        c = np.polynomial.polynomial.polyfit(x, np.array(vals), degree)
        odd = [float(abs(c[i])) for i in (1, 3, 5)]
        report[name] = {"odd_coeffs": odd, "ok": max(odd) < tol}
    report["ok"] = all(r["ok"] for r in report.values() if isinstance(r, dict))
    return report


def barrier_compliance(profile: GlobalProfile, n_window: int = 40) -> dict:
    """Largest value of u - barrier(z) along the post-sonic arc with z < 0 (negative is compliant)."""
    p = profile.params
    name = "u3" if profile.post_sonic_region == "D2prime" else "U3star"
    bar = barrier_poly(name, p, profile.sonic, profile.coeffs)
    worst = -math.inf
    zmin = math.inf
    for z in np.linspace(-profile.zeta_use, 0.0, n_window, endpoint=False):
        worst = max(worst, profile._uL(z) - bar(z))
        zmin = min(zmin, z)
    trE = profile.traj_E
    for Z, y in zip(trE.x, trE.y):
        z, u = psi_raw(Z, y[0], p.gamma)
        if z >= 0.0:
            break
        worst = max(worst, u - bar(z))
        zmin = min(zmin, z)
    zg = profile.marks.zg
    return {"barrier": name, "max_excess": worst, "z_min": zmin, "z_g": zg,
            "ok": worst < 0.0 and zmin > zg}


def delta_Z_sign_change(profile: GlobalProfile, grid) -> dict:
    """Sign changes of Delta_Z(Z, v(Z)) on the grid, each refined by bisection."""
    p = profile.params

    def DZ(Z):
        return field_Zv(Z, profile.v(Z), p)[1]

    grid = np.asarray(grid, dtype=float)
    vals = [DZ(Z) for Z in grid]
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(DZ, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16))
    return {"roots": roots, "values": vals}


def pde_residual(profile: GlobalProfile, t_grid, r_grid, h: float = 1e-4) -> dict:
    """Central-difference residuals of the two reduced balance laws with T* = 1."""
    p = profile.params
    a = p.ell / (p.ell + 1.0)
    b = 1.0 / (p.ell + 1.0)
    k = p.k

    def fields(t, r):
        Z = r / (1.0 - t)
        v, rho_h, u0, u = profile_at(profile, Z)
        rho = (1.0 - t) ** (-p.beta) * rho_h
        return rho, u0, u

    def q1(t, r):
        rho, u0, _ = fields(t, r)
        return rho ** a * u0

    def q2(t, r):
        rho, _, u = fields(t, r)
        return rho ** a * u

    def q3(t, r):
        rho, u0, _ = fields(t, r)
        return rho ** b * u0

    def q4(t, r):
        rho, _, u = fields(t, r)
        return rho ** b * u

    r1 = np.zeros((len(t_grid), len(r_grid)))
    r2 = np.zeros_like(r1)
    for i, t in enumerate(t_grid):
        for j, r in enumerate(r_grid):
            dt1 = (q1(t + h, r) - q1(t - h, r)) / (2 * h)
            dr2 = (q2(t, r + h) - q2(t, r - h)) / (2 * h)
            r1[i, j] = dt1 + dr2 + k / r * q2(t, r)
            dr3 = (q3(t, r + h) - q3(t, r - h)) / (2 * h)
            dt4 = (q4(t + h, r) - q4(t - h, r)) / (2 * h)
            r2[i, j] = dr3 + dt4
    return {"pde1": r1, "pde2": r2, "max1": float(np.max(np.abs(r1))),
            "max2": float(np.max(np.abs(r2)))}
