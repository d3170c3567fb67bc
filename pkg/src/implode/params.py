"""Scalar parameter algebra.

The profile ODE depends on the space dimension through ``k = d - 1``, on the
equation of state through ``ell > 1`` and on the self-similar rate through
``gamma``.  Everything else (``m``, ``beta``, ``eps``, ``A``, ``B``, ``mu``) and
all linearisation data at the sonic point are explicit functions of these
three numbers.  The sonic data are most naturally parametrised by the
eigenvalue ratio ``R``, so the inverse map ``gamma(k, ell, R)`` lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import BracketError, DomainError, NumericalError, PoleError

__all__ = [
    "ParamSet",
    "SonicData",
    "CoeffTable",
    "Lem8Values",
    "derive_params",
    "ratio_R",
    "r_inf",
    "gamma_upper",
    "gamma_from_R",
    "sonic_data",
    "p0_quadratic",
    "b_constants",
    "lem8_closed_forms",
    "params_from_R",
]

POLE_GUARD = 1e-8


@dataclass(frozen=True)
class ParamSet:
    k: int
    ell: float
    gamma: float
    m: float
    beta: float
    eps: float
    A: float
    B: float
    mu: float

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in
                ("k", "ell", "gamma", "m", "beta", "eps", "A", "B", "mu")}


@dataclass(frozen=True)
class SonicData:
    c1: float
    c2: float
    c3: float
    c4: float
    lam_plus: float
    lam_minus: float
    delta: float
    R: float
    a1: float


@dataclass(frozen=True)
class CoeffTable:
    B0: float
    B1: float
    B2: float
    B3: float
    B4: float
    a2: float
    a3: float
    a4: float
    M1: float
    M2: float
    M: float
    xi1: float
    xi2: float
    a2_alt: float


@dataclass(frozen=True)
class Lem8Values:
    eps: float
    delta: float
    a1: float
    A: float
    a2: float


def _check_k_ell(k, ell):
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not ell > 1.0:
        raise DomainError(f"ell must exceed 1, got {ell!r}")


def derive_params(k: int, ell: float, gamma: float) -> ParamSet:
    """Build the parameter bundle from (k, ell, gamma)."""
    _check_k_ell(k, ell)
    k = int(k)
    if not gamma > 1.0 / math.sqrt(ell):
        raise DomainError(f"gamma={gamma!r} must exceed 1/sqrt(ell)={1 / math.sqrt(ell)!r}")
    eps = ell * gamma * gamma - 1.0
    if not eps > 0.0:
        raise DomainError(f"gamma={gamma!r} too close to 1/sqrt(ell): eps={eps!r}")
    m = k / (gamma + 1.0)
    return ParamSet(
        k=k,
        ell=float(ell),
        gamma=float(gamma),
        m=m,
        beta=m * (ell + 1.0) / ell,
        eps=eps,
        A=k + 2.0 - (k - 2.0 * ell) * gamma,
        B=2.0 * k + 1.0 - ell,
        mu=(k + 2.0) ** 2 - (k - 2.0 * ell) ** 2 / ell,
    )


def _ratio_from_s(s: float) -> float:
    # larger root of R^2 - (s - 2) R + 1 = 0, where s = (R + 1)^2 / R
    if s < 4.0:
        raise NumericalError(f"(R+1)^2/R = {s!r} < 4 has no real root")
    return 0.5 * ((s - 2.0) + math.sqrt(s * (s - 4.0)))


def _s_of_gamma(k, ell, gamma):
    num = (k + 2.0) * ell * gamma - (k - 2.0 * ell)
    return num * num / (2.0 * k * ell * (ell * gamma * gamma - 1.0))


def ratio_R(params: ParamSet) -> float:
    """Eigenvalue ratio R > 1 at the sonic point."""
    return _ratio_from_s(_s_of_gamma(params.k, params.ell, params.gamma))


def r_inf(k: int, ell: float) -> float:
    """Infimum of R over the admissible gamma interval."""
    _check_k_ell(k, ell)
    if k <= 2.0 * ell:
        return max(k / 2.0, 2.0 / k)
    s = ((k + 2.0) ** 2 * ell - (k - 2.0 * ell) ** 2) / (2.0 * k * ell)
    return _ratio_from_s(s)


def gamma_upper(k: int, ell: float) -> float:
    """Right end of the gamma interval on which A > 0 (inf when k <= 2 ell)."""
    if k > 2.0 * ell:
        return (k + 2.0) / (k - 2.0 * ell)
    return math.inf


def gamma_from_R(k: int, ell: float, R: float, tol: float = 1e-12) -> float:
    """Invert the strictly decreasing map gamma -> R on {gamma > 1/sqrt(ell), A > 0}."""
    _check_k_ell(k, ell)
    rinf = r_inf(k, ell)
    if not R > rinf * (1.0 + tol):
        raise BracketError(f"R={R!r} is not above R_inf(k={k}, ell={ell})={rinf!r}")

    def resid(g):
        return _ratio_from_s(_s_of_gamma(k, ell, g)) - R

    lo = 1.0 / math.sqrt(ell) + 1e-9
    while resid(lo) < 0.0:
        # R above the value reachable 1e-9 from the left end: move closer
        step = (lo - 1.0 / math.sqrt(ell)) * 1e-3
        if step < 1e-300:
            raise BracketError(f"R={R!r} too large to bracket")
        lo = 1.0 / math.sqrt(ell) + step
    gA = gamma_upper(k, ell)
    if math.isfinite(gA):
        hi = gA - 1e-9
        if resid(hi) > 0.0:
            hi = gA * (1.0 - 1e-15)
            if resid(hi) > 0.0:
                raise BracketError(f"R={R!r} too close to R_inf={rinf!r}")
    else:
        hi = max(2.0 * lo, 2.0)
        while resid(hi) > 0.0:
            hi *= 2.0
            if hi > 1e150:
                raise BracketError(f"R={R!r} too close to R_inf={rinf!r}")
    g = brentq(resid, lo, hi, xtol=1e-300, rtol=4.0 * 2.220446049250313e-16, maxiter=500)
    if abs(resid(g)) > 1e-12 * R:
        raise BracketError(f"gamma search stalled: residual {resid(g)!r}")
    return g


def params_from_R(k: int, ell: float, R: float) -> ParamSet:
    return derive_params(k, ell, gamma_from_R(k, ell, R))


def p0_quadratic(params: ParamSet, a: float) -> float:
    """Slope polynomial at the sonic point; its larger root is a1."""
    k, eps, A = params.k, params.eps, params.A
    return a * a - ((k - 2.0) * eps + A) * a + 2.0 * (k - A) * eps


def _larger_root(p, q):
    # larger root of x^2 - p x + q
    disc = p * p - 4.0 * q
    if disc < 0.0:
        raise NumericalError(f"negative discriminant {disc!r}")
    sq = math.sqrt(disc)
    if p >= 0.0:
        return 0.5 * (p + sq)
    return 2.0 * q / (p - sq)


def sonic_data(params: ParamSet) -> SonicData:
    """Linearisation of the (z, u) field at the sonic point (0, eps)."""
    k, eps, A = params.k, params.eps, params.A
    b = (k + 2.0) * eps + A
    c = 2.0 * k * eps * (1.0 + eps)
    disc = b * b - 4.0 * c
    if disc < 0.0 or b <= 0.0:
        raise NumericalError(f"eigenvalue discriminant {disc!r} (trace {b!r}) invalid")
    lam_plus = 0.5 * (b + math.sqrt(disc))
    lam_minus = c / lam_plus
    a1 = _larger_root((k - 2.0) * eps + A, 2.0 * (k - A) * eps)
    return SonicData(
        c1=2.0 * eps,
        c2=-1.0,
        c3=2.0 * eps * (k - A),
        c4=k * eps + A,
        lam_plus=lam_plus,
        lam_minus=lam_minus,
        delta=lam_minus,
        R=lam_plus / lam_minus,
        a1=a1,
    )


def _guard_poles(R):
    for n in (2, 3, 4):
        if abs(R - n) < POLE_GUARD:
            raise PoleError(f"R={R!r} within {POLE_GUARD} of the pole at {n}")


def b_constants(params: ParamSet, sonic: SonicData) -> CoeffTable:
    """Low-order sonic Taylor coefficients and the auxiliary barrier constants."""
    R = sonic.R
    _guard_poles(R)
    k, ell, eps, A, B = params.k, params.ell, params.eps, params.A, params.B
    d, a1 = sonic.delta, sonic.a1

    a2 = ((k - 1.0) * a1 * a1 - (-A + B + 2.0 * k) * a1 + 2.0 * (k - B) * eps) / ((R - 2.0) * d)
    a2_alt = (((k - 3.0) * R + 1.0) * a1 + 3.0 * A * R - (2.0 * k + B) * R) / (R - 2.0)
    if abs(a2 - a2_alt) > 1e-9 * max(1.0, abs(a2)):
        raise NumericalError(f"a2 routes disagree: {a2!r} vs {a2_alt!r}")

    B0 = (k - 2.0) * a1 + 2.0 * A - 4.0 * k
    B1 = (3.0 * k - 1.0) * a1 - 2.0 * a2 - 2.0 * (k + B)
    a3 = (B1 * a2 + (ell - 1.0) * a1) / ((R - 3.0) * d)
    B2 = -5.0 * a2 + 4.0 * k * a1 - (2.0 * k + A + 3.0 * B)
    a4 = (B2 * a3 + 2.0 * k * a2 * (a2 + 1.0)) / ((R - 4.0) * d)
    B3 = 3.0 * a3 - (5.0 * k + 1.0) * a2 - B - 2.0 * k
    B4 = 6.0 * a2 - (5.0 * k + 1.0) * a1 + 2.0 * A + 4.0 * B + 2.0 * k
    return CoeffTable(
        B0=B0, B1=B1, B2=B2, B3=B3, B4=B4,
        a2=a2, a3=a3, a4=a4,
        M1=a4 - 1.0,
        M2=(4.0 - R) ** -1.25 if R < 4.0 else math.nan,
        M=a3 * a3 / (4.0 * a2),
        xi1=-eps / a1,
        xi2=-a2 / a3,
        a2_alt=a2_alt,
    )


def lem8_closed_forms(ell: float, R: float) -> Lem8Values:
    """Explicit radicals for eps, delta, a1, A, a2 at k = 2 as functions of (ell, R)."""
    if not ell > 1.0:
        raise DomainError(f"ell must exceed 1, got {ell!r}")
    if not R > 2.0:
        raise DomainError(f"R must exceed 2, got {R!r}")
    q = (ell - 1.0) ** 2 / ell
    w = (ell - 1.0) / ell * math.sqrt(R * (ell - 1.0) ** 2 + ell * (R - 1.0) ** 2)
    r1 = R - 1.0
    eps = R * (R * R + 6.0 * R + 1.0) / r1 ** 4 * q + 4.0 * R / r1 ** 2 + 4.0 * R * (R + 1.0) / r1 ** 4 * w
    delta = 8.0 * R * (R + 1.0) / r1 ** 4 * q + 4.0 * (R + 1.0) / r1 ** 2 + 2.0 * (R * R + 6.0 * R + 1.0) / r1 ** 4 * w
    a1 = 2.0 * R * (3.0 * R + 1.0) / r1 ** 3 * q + 4.0 * R / r1 + 2.0 * R * (R + 3.0) / r1 ** 3 * w
    A = 4.0 * R / r1 ** 2 * q + 4.0 + 2.0 * (R + 1.0) / r1 ** 2 * w
    a2 = (2.0 * R * (3.0 * R - 1.0) / r1 ** 2 * q + 4.0 * R * R / r1 ** 2 * w + R * (ell - 1.0)) / (R - 2.0)
    return Lem8Values(eps=eps, delta=delta, a1=a1, A=A, a2=a2)
