"""Birational change of variables between the (Z, v) and (z, u) planes."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .fields import ZuPoint, ZvPoint, barrier_poly, field_Zv
from .params import CoeffTable, ParamSet, SonicData

__all__ = [
    "RegionTag",
    "psi",
    "theta",
    "psi_raw",
    "theta_raw",
    "psi_partials",
    "N_factor",
    "classify",
]


@dataclass(frozen=True)
class RegionTag:
    plane: str
    tag: str


def psi_raw(Z, v, gamma):
    """Unchecked map; accepts arrays."""
    w = 1.0 - v * v
    c = 1.0 - Z * v
    z = ((1.0 + gamma * v * v) * Z - (1.0 + gamma) * v) / (Z * w)
    u = (1.0 + gamma) ** 2 * c * c / (Z * Z * w)
    return z, u


def theta_raw(z, u, gamma):
    s = u + (1.0 - z) ** 2
    rs = s ** 0.5
    Z = (1.0 + gamma) * rs / (u + (1.0 + gamma) * (1.0 - z))
    v = (1.0 - z) / rs
    return Z, v


def psi(p: ZvPoint, params: ParamSet) -> ZuPoint:
    Z, v = p.Z, p.v
    if not (0.0 < v < 1.0 and 0.0 < Z * v < 1.0):
        raise DomainError(f"(Z, v) = ({Z!r}, {v!r}) lies outside 0<v<1, 0<Zv<1")
    z, u = psi_raw(Z, v, params.gamma)
    return ZuPoint(z, u)


def theta(q: ZuPoint, params: ParamSet) -> ZvPoint:
    z, u = q.z, q.u
    if not (u > 0.0 and z < 1.0):
        raise DomainError(f"(z, u) = ({z!r}, {u!r}) lies outside u>0, z<1")
    Z, v = theta_raw(z, u, params.gamma)
    return ZvPoint(Z, v)


def psi_partials(Z, v, gamma):
    """Analytic Jacobian ((dz/dZ, dz/dv), (du/dZ, du/dv))."""
    g = gamma
    w = 1.0 - v * v
    c = 1.0 - Z * v
    # z = (1+g v^2)/w - (1+g) v / (Z w)
    dz_dZ = (1.0 + g) * v / (Z * Z * w)
    dz_dv = (2.0 * g * v * w + 2.0 * v * (1.0 + g * v * v)) / (w * w) \
        - (1.0 + g) * (1.0 + v * v) / (Z * w * w)
    K = (1.0 + g) ** 2
    du_dZ = K * (-2.0 * v * c * Z * Z * w - c * c * 2.0 * Z * w) / (Z ** 4 * w * w)
    du_dv = K * (-2.0 * Z * c * w + c * c * 2.0 * v) / (Z * Z * w * w)
    return (dz_dZ, dz_dv), (du_dZ, du_dv)


def N_factor(z, u, gamma):
    return (u + (1.0 - z) ** 2) * (u + (1.0 + gamma) * (1.0 - z)) / u


def classify(p, plane: str, params: ParamSet, sonic: SonicData | None = None,
             coeffs: CoeffTable | None = None) -> RegionTag:
    """Region membership from the defining inequalities.

    In the (z, u) plane the finer tags D2prime and D2doubleprime need the
    sonic coefficient table; without it only D0/D1/D2 are reported.
    """
    g, ell = params.gamma, params.ell
    if plane == "Zv":
        Z, v = p.Z, p.v
        if not (0.0 < v < 1.0 and 0.0 < Z * v < 1.0):
            return RegionTag(plane, "outside")
        Dv, DZ = field_Zv(Z, v, params)
        if Dv > 0.0 and DZ > 0.0:
            return RegionTag(plane, "R1")
        if Dv < 0.0 and DZ < 0.0 and v < Z:
            return RegionTag(plane, "R2")
        sl = math.sqrt(ell)
        v1 = params.m / ((params.k - params.m) * sl)
        if v1 < v and abs(Z - (sl * v + 1.0) / (v + sl)) <= 1e-12 * max(1.0, Z):
            return RegionTag(plane, "R2plus")
        return RegionTag(plane, "R0")
    if plane == "zu":
        z, u = p.z, p.u
        if not (u > 0.0 and z < 1.0):
            return RegionTag(plane, "outside")
        ug = ell * (z + g) ** 2 - (1.0 - z) ** 2
        if 0.0 < z < 1.0 and u > ug:
            return RegionTag(plane, "D1")
        sl = math.sqrt(ell)
        zg = (1.0 - sl * g) / (sl + 1.0)
        if zg < z < 0.0 and u < ug:
            if sonic is not None and coeffs is not None:
                if u < barrier_poly("u3", params, sonic, coeffs)(z):
                    return RegionTag(plane, "D2prime")
                if u < barrier_poly("U3star", params, sonic, coeffs)(z):
                    return RegionTag(plane, "D2doubleprime")
            return RegionTag(plane, "D2")
        return RegionTag(plane, "D0")
    raise DomainError(f"plane must be 'Zv' or 'zu', got {plane!r}")
