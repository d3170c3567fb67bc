"""Vector fields, named curves, the quasi-linear operator L and barrier polynomials.

Polynomials are coefficient arrays in increasing degree and are evaluated
with numpy's Horner routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError
from .params import CoeffTable, ParamSet, SonicData

__all__ = [
    "ZvPoint",
    "ZuPoint",
    "Landmarks",
    "landmarks",
    "field_Zv",
    "field_zu",
    "field_W",
    "f_coeffs",
    "f_of_z",
    "curve_eval",
    "CURVES",
    "L_apply",
    "L_poly",
    "Barrier",
    "barrier_poly",
    "BARRIERS",
    "u_g_coeffs",
]


@dataclass(frozen=True)
class ZvPoint:
    Z: float
    v: float


@dataclass(frozen=True)
class ZuPoint:
    z: float
    u: float


@dataclass(frozen=True)
class Landmarks:
    Z1: float
    v1: float
    Ze: float
    zg: float
    zg_minus: float
    zQ0: float


def landmarks(params: ParamSet) -> Landmarks:
    k, m, ell, g = params.k, params.m, params.ell, params.gamma
    sl = math.sqrt(ell)
    return Landmarks(
        Z1=k * sl / (ell * (k - m) + m),
        v1=m / ((k - m) * sl),
        Ze=k / (2.0 * math.sqrt((k - m) * m)),
        zg=(1.0 - sl * g) / (sl + 1.0),
        zg_minus=-(1.0 + sl * g) / (sl - 1.0),
        zQ0=1.0 / (k + 1.0),
    )


def field_Zv(Z, v, params: ParamSet):
    """(Delta_v, Delta_Z); works on scalars or arrays."""
    m, k, ell = params.m, params.k, params.ell
    w = 1.0 - v * v
    Dv = w * (m * w * Z - k * v * (1.0 - v * Z))
    DZ = Z * ((1.0 - Z * v) ** 2 - ell * (v - Z) ** 2)
    return Dv, DZ


def f_coeffs(params: ParamSet) -> np.ndarray:
    return np.array([-params.eps, -params.A, params.B])


def f_of_z(z, params: ParamSet):
    return -params.eps + z * (-params.A + params.B * z)


def field_zu(z, u, params: ParamSet):
    """(Delta_u, Delta_z); works on scalars or arrays."""
    k = params.k
    f = f_of_z(z, params)
    Du = 2.0 * u * (u + f + k * z * (1.0 - z))
    Dz = ((k + 1.0) * z - 1.0) * u + (z - 1.0) * f
    return Du, Dz


def field_W(W, vt, params: ParamSet):
    """Numerator and denominator of dv~/dW for v~(W) = v(1/W)."""
    m, k, ell = params.m, params.k, params.ell
    w = 1.0 - vt * vt
    num = w * (m * w - k * vt * (W - vt))
    den = ell * (W * vt - 1.0) ** 2 - (W - vt) ** 2
    return num, den


def u_g_coeffs(params: ParamSet) -> np.ndarray:
    g, ell = params.gamma, params.ell
    return np.array([ell * g * g - 1.0, 2.0 * (1.0 + ell * g), ell - 1.0])


def _u_p(z, p):
    return (p.k - p.B) * z * z + (p.A - p.k) * z + p.eps


def _u_b(z, p):
    den = 1.0 - (p.k + 1.0) * z
    if np.any(np.abs(den) == 0.0):
        raise DomainError("u_b is singular at z = 1/(k+1)")
    return (p.eps + (p.A - p.eps) * z - (p.A + p.B) * z * z + p.B * z ** 3) / den


def _u_g(z, p):
    return p.ell * (z + p.gamma) ** 2 - (1.0 - z) ** 2


def _v12_root(Z, p):
    k, m = p.k, p.m
    disc = k * k - 4.0 * (k - m) * m * Z * Z
    if np.any(disc < 0.0):
        raise DomainError("v1/v2 are defined only for |Z| <= Ze")
    return np.sqrt(disc)


def _v1(Z, p):
    # rationalised so that Z = 0 gives 0
    s = _v12_root(Z, p)
    return 2.0 * p.m * Z / (p.k + s)


def _v2(Z, p):
    if np.any(Z == 0.0):
        raise DomainError("v2 is singular at Z = 0")
    s = _v12_root(Z, p)
    return (p.k + s) / (2.0 * (p.k - p.m) * Z)


def _v_plus(Z, p):
    sl = math.sqrt(p.ell)
    return (sl * Z + 1.0) / (Z + sl)


def _v_minus(Z, p):
    sl = math.sqrt(p.ell)
    if np.any(Z == sl):
        raise DomainError("v_minus is singular at Z = sqrt(ell)")
    return (1.0 - sl * Z) / (Z - sl)


def _Z_b(v, p):
    return p.k * v / (p.m + (p.k - p.m) * v * v)


def _Z_g(v, p):
    sl = math.sqrt(p.ell)
    return (sl * v + 1.0) / (v + sl)


def _f(z, p):
    return f_of_z(z, p)


CURVES = {
    "u_p": _u_p,
    "u_b": _u_b,
    "u_g": _u_g,
    "f": _f,
    "v1": _v1,
    "v2": _v2,
    "v_plus": _v_plus,
    "v_minus": _v_minus,
    "Z_b": _Z_b,
    "Z_g": _Z_g,
}


def curve_eval(name: str, x, params: ParamSet):
    try:
        fn = CURVES[name]
    except KeyError:
        raise DomainError(f"unknown curve {name!r}; expected one of {sorted(CURVES)}") from None
    return fn(x, params)


def L_poly(u_coeffs, params: ParamSet) -> np.ndarray:
    """Coefficients of L(u) = -Delta_z(z, u) u' + Delta_u(z, u) for polynomial u."""
    u = np.asarray(u_coeffs, dtype=float)
    k = params.k
    f = f_coeffs(params)
    du = P.polyder(u) if len(u) > 1 else np.zeros(1)
    zq = np.array([0.0, k, -float(k)])  # k z (1 - z)
    Dz = P.polyadd(P.polymul([-1.0, k + 1.0], u), P.polymul([-1.0, 1.0], f))
    Du = 2.0 * P.polymul(u, P.polyadd(P.polyadd(u, f), zq))
    return P.polysub(Du, P.polymul(Dz, du))


def L_apply(u_coeffs, z, params: ParamSet):
    """Pointwise L(u)(z) from the fields and the analytic derivative."""
    u = np.asarray(u_coeffs, dtype=float)
    uz = P.polyval(z, u)
    duz = P.polyval(z, P.polyder(u)) if len(u) > 1 else 0.0 * z
    Du, Dz = field_zu(z, uz, params)
    return -Dz * duz + Du


@dataclass(frozen=True)
class Barrier:
    """Piecewise polynomial; pieces are (left end, coefficients) sorted by left end."""

    name: str
    pieces: tuple
    breakpoint: float | None = None

    def _piece(self, z):
        idx = 0
        for i, (lo, _) in enumerate(self.pieces):
            if z >= lo:
                idx = i
        return self.pieces[idx][1]

    def __call__(self, z):
        if np.ndim(z) == 0:
            return float(P.polyval(z, self._piece(z)))
        return np.array([P.polyval(t, self._piece(t)) for t in np.asarray(z)])

    def deriv(self, z):
        c = self._piece(z)
        return float(P.polyval(z, P.polyder(c)))

    @property
    def coeffs(self):
        # the piece that contains the sonic point z = 0
        return self._piece(0.0)


def barrier_poly(name: str, params: ParamSet, sonic: SonicData, coeffs: CoeffTable) -> Barrier:
    eps, a1 = params.eps, sonic.a1
    a2, a3, a4 = coeffs.a2, coeffs.a3, coeffs.a4
    u1 = np.array([eps, a1])
    u2 = np.array([eps, a1, a2])
    u3 = np.array([eps, a1, a2, a3])
    ninf = -math.inf
    if name == "u1":
        return Barrier(name, ((ninf, u1),))
    if name == "u2":
        return Barrier(name, ((ninf, u2),))
    if name == "u3":
        return Barrier(name, ((ninf, u3),))
    if name == "U1":
        return Barrier(name, ((ninf, np.append(u3, coeffs.M1)),))
    if name == "U2":
        return Barrier(name, ((ninf, np.append(u3, [0.5 * a4, coeffs.M2])),))
    U3 = np.append(u3, coeffs.M)
    if name == "U3":
        return Barrier(name, ((ninf, U3),))
    if name == "U3star":
        zb = 2.0 * coeffs.xi2
        return Barrier(name, ((ninf, np.append(u1, [0.0, 0.0, 0.0])), (zb, U3)), breakpoint=zb)
    raise DomainError(f"unknown barrier {name!r}; expected one of {BARRIERS}")


BARRIERS = ("u1", "u2", "u3", "U1", "U2", "U3", "U3star")
