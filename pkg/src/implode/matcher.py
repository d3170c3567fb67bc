"""Shooting in the eigenvalue ratio R.

For each R the branch leaving the origin, u_F, is integrated up to the
matching abscissa zeta and compared with the analytic sonic branch u_L.
The sign change of g(R) = u_L(zeta) - u_F(zeta) locates R0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .criticality import admissible, ell1
from .errors import (BracketError, EventMissed, InadmissibleError, MultipleRoots,
                     NoSignChange)
from .fields import field_zu, landmarks
from .ode import integrate, psi_z_equals
from .params import ParamSet, params_from_R, r_inf, sonic_data
from .renorm import psi_raw
from .series import (DEFAULT_N, TaylorSeries, eval_series, eval_series_deriv, p0_series,
                     q1_series, seed_point)

__all__ = [
    "R_STAR",
    "MatchConfig",
    "Residual",
    "MatchResult",
    "default_bracket",
    "zeta_policy",
    "FBranch",
    "u_F_branch",
    "u_F_at",
    "u_L_at",
    "residual_g",
    "find_R0",
    "seam_jump",
]

log = logging.getLogger(__name__)

R_STAR = 100.0 / 27.0


@dataclass(frozen=True)
class MatchConfig:
    zeta: float | None = None  # None: chosen per R
    zeta_scale: float = 0.25
    zeta_cap: float = 0.8  # times 1/(k+1)
    bracket: tuple | None = None
    tol_R: float = 1e-12
    tol_residual: float = 1e-8
    rtol: float = 1e-11
    atol: float = 1e-11
    n_scan: int = 33
    N: int = DEFAULT_N
    N_origin: int = 40
    seed_tol: float = 1e-13
    seed_cap: float = 0.05
    switch_frac: float = 0.5  # (z, u) finish starts at switch_frac/(k+1)
    allow_multiple: bool = False


def default_bracket(k: int, ell: float) -> tuple:
    if k == 2 and ell >= ell1(2):
        return (3.001, min(4.0 - 1.0 / ell, R_STAR) - 1e-6)
    return (3.001, 4.0 - 1e-3)


def zeta_policy(series: TaylorSeries, k: int, cfg: MatchConfig) -> float:
    if cfg.zeta is not None:
        return cfg.zeta
    return min(cfg.zeta_scale * series.radius_estimate, cfg.zeta_cap / (k + 1.0))


@dataclass
class FBranch:
    """u_F on [zeta, z_switch]: Z-v trajectory up to the switch, then (z, u) trajectory."""

    params: ParamSet
    Z_seed: float
    zv: object
    zu: object | None
    z_switch: float
    Z_switch: float
    u_switch: float
    zeta: float

    def u(self, z: float) -> float:
        if self.zu is not None and self.zeta <= z <= self.z_switch:
            return float(self.zu(z)[0])
        raise ValueError("z outside the (z, u) leg of the branch")


def u_F_branch(zeta: float, params: ParamSet, cfg: MatchConfig = MatchConfig()) -> FBranch:
    k = params.k
    if not 0.0 < zeta < 1.0 / (k + 1.0):
        raise ValueError(f"zeta={zeta!r} must lie in (0, 1/(k+1))")
    lm = landmarks(params)
    ps = p0_series(params, cfg.N_origin)
    Z0 = seed_point(ps, cfg.seed_tol, x_max=min(cfg.seed_cap, 0.5 * lm.Z1))
    v0, _ = eval_series(ps, Z0, cfg.seed_tol)
    zs = max(cfg.switch_frac / (k + 1.0), zeta)
    traj = integrate("Zv", Z0, [v0], lm.Z1, events=[psi_z_equals(zs, params)],
                     rtol=cfg.rtol, atol=cfg.atol, params=params)
    if traj.termination.kind != "event":
        raise EventMissed(f"Psi_z never reached {zs!r} before Z1={lm.Z1!r}")
    Ze, ve = traj.termination.location, traj.termination.state[0]
    _, u0 = psi_raw(Ze, ve, params.gamma)
    zu = None
    if zs > zeta:
        zu = integrate("zu", zs, [u0], zeta, rtol=cfg.rtol, atol=cfg.atol, params=params)
    return FBranch(params, Z0, traj, zu, zs, Ze, float(u0), zeta)


def u_F_at(zeta: float, R: float, k: int, ell: float, cfg: MatchConfig = MatchConfig()) -> float:
    params = params_from_R(k, ell, R)
    br = u_F_branch(zeta, params, cfg)
    if br.zu is None:
        return br.u_switch
    return float(br.zu.y_end[0])


def u_L_at(zeta: float, R: float, k: int, ell: float, cfg: MatchConfig = MatchConfig()) -> float:
    params = params_from_R(k, ell, R)
    s = q1_series(params, sonic_data(params), cfg.N)
    val, _ = eval_series(s, zeta, cfg.tol_residual / 10.0)
    return val


@dataclass(frozen=True)
class Residual:
    R: float
    g: float
    zeta: float
    u_L: float
    u_F: float
    radius: float
    params: ParamSet


def residual_g(R: float, k: int, ell: float, cfg: MatchConfig = MatchConfig()) -> Residual:
    params = params_from_R(k, ell, R)
    s = q1_series(params, sonic_data(params), cfg.N)
    zeta = zeta_policy(s, k, cfg)
    uL, _ = eval_series(s, zeta, cfg.tol_residual / 10.0)
    br = u_F_branch(zeta, params, cfg)
    uF = br.u_switch if br.zu is None else float(br.zu.y_end[0])
    return Residual(R, uL - uF, zeta, uL, uF, s.radius_estimate, params)


@dataclass
class MatchResult:
    k: int
    ell: float
    R0: float
    residual: float
    gamma: float
    zeta: float
    roots: list
    samples: list = field(repr=False)
    bracket: tuple = ()
    evaluations: int = 0

    def as_dict(self) -> dict:
        return {"k": self.k, "ell": self.ell, "R0": self.R0, "residual": self.residual,
                "gamma": self.gamma, "zeta": self.zeta, "roots": list(self.roots),
                "bracket": list(self.bracket), "evaluations": self.evaluations}


def find_R0(k: int, ell: float, cfg: MatchConfig = MatchConfig()) -> MatchResult:
    adm = admissible(k, ell)
    if not adm.in_Kstar:
        raise InadmissibleError(
            f"(k, ell) = ({k}, {ell!r}) is outside K*: ell*({k}) = {ell1(k)!r}")
    lo, hi = cfg.bracket if cfg.bracket is not None else default_bracket(k, ell)
    rinf = r_inf(k, ell)
    if lo <= rinf:
        raise BracketError(f"bracket start {lo!r} not above R_inf={rinf!r}")
    count = [0]

    def g(R):
        count[0] += 1
        return float(residual_g(R, k, ell, cfg).g)

    grid = np.linspace(lo, hi, cfg.n_scan)
    vals = [g(R) for R in grid]
    samples = list(zip(grid.tolist(), vals))
    log.info("scan k=%s ell=%s: %s", k, ell, samples)
    changes = [i for i in range(len(vals) - 1) if vals[i] * vals[i + 1] < 0.0 or vals[i] == 0.0]
    if not changes:
        raise NoSignChange(f"g keeps one sign on [{lo!r}, {hi!r}] for k={k}, ell={ell!r}", samples)
    roots = [_refine(g, grid[i], grid[i + 1], vals[i], cfg.tol_R) for i in changes]
    if len(roots) > 1 and not cfg.allow_multiple:
        raise MultipleRoots(f"{len(roots)} sign changes; smallest root {min(roots)!r}", roots)
    R0 = min(roots)
    res = residual_g(R0, k, ell, cfg)
    return MatchResult(k, float(ell), R0, res.g, res.params.gamma, res.zeta, roots, samples,
                       (lo, hi), count[0] + 1)


def _refine(g, a, b, ga, tol):
    if ga == 0.0:
        return float(a)
    return float(brentq(g, a, b, xtol=0.1 * tol, rtol=8.9e-16, maxiter=200))


def seam_jump(result: MatchResult, cfg: MatchConfig = MatchConfig(), frac: float = 0.5) -> dict:
    """Value and slope jump between u_L and u_F at frac * zeta for the matched R0."""
    params = params_from_R(result.k, result.ell, result.R0)
    s = q1_series(params, sonic_data(params), cfg.N)
    zeta = zeta_policy(s, result.k, cfg)
    zq = frac * zeta
    br = u_F_branch(zq, params, cfg)
    uF = br.u_switch if br.zu is None else float(br.zu.y_end[0])
    uL, _ = eval_series(s, zq, cfg.tol_residual / 10.0)
    Du, Dz = field_zu(zq, uF, params)
    return {"z": zq, "value_jump": abs(uL - uF), "slope_jump": abs(eval_series_deriv(s, zq) - Du / Dz)}
