"""Critical exponents in ell and the admissible (k, ell) sets.

The sign of B2 at R = 3 reduces to F(k, ell) = f3(k, eps*(k, ell)) + 52k - 12 ell + 12,
where eps*(k, ell) inverts f1(k, eps) = f2(k, ell).  Its zero ell1(k) bounds the
range of ell in which the barrier argument on R in (3, 4) closes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError, RangeError
from .params import ParamSet, r_inf

__all__ = [
    "f1",
    "f2",
    "f3",
    "f_functions",
    "E_k_upper",
    "ell_minus",
    "ell_plus",
    "ell0",
    "epsilon_star",
    "F_value",
    "ell1",
    "ell_star",
    "ELL_STAR_3",
    "ell0_Rinf",
    "Admissibility",
    "admissible",
    "BetaGap",
    "beta_gap",
    "CriticalityReport",
    "criticality_report",
]

INF = math.inf
ELL_STAR_3 = (76.0 - 4.0 * math.sqrt(154.0)) / 23.0
_ROOT_RTOL = 4.0 * 2.220446049250313e-16


def _check_k(k):
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return int(k)


def f1(k, eps):
    if eps < 0.0:
        raise DomainError(f"eps must be non-negative, got {eps!r}")
    # rationalised: the naive difference cancels catastrophically for large eps
    num = (k + 2.0) ** 2 + eps * (3.0 * k - 2.0) * (k - 6.0) / 3.0
    den = (k + 2.0) * math.sqrt(1.0 + eps) + 4.0 * math.sqrt(2.0 * k * eps / 3.0)
    return num / den


def f2(k, ell):
    if not ell > 0.0:
        raise DomainError(f"ell must be positive, got {ell!r}")
    return k / math.sqrt(ell) - 2.0 * math.sqrt(ell)


def f3(k, eps):
    if eps < 0.0:
        raise DomainError(f"eps must be non-negative, got {eps!r}")
    return (68.0 * k + 12.0) * eps - (33.0 * k + 64.0) * math.sqrt(2.0 * k / 3.0) * math.sqrt(eps * (1.0 + eps))


def f_functions(k, eps=None, ell=None) -> dict:
    out = {}
    if eps is not None:
        out["f1"] = f1(k, eps)
        out["f3"] = f3(k, eps)
    if ell is not None:
        out["f2"] = f2(k, ell)
    return out


def E_k_upper(k) -> float:
    k = _check_k(k)
    if k <= 6:
        return INF
    return 32.0 * k / ((3.0 * k - 2.0) * (k - 6.0))


def _ell_from_f2(k, c):
    # positive root s = sqrt(ell) of 2 s^2 + c s - k = 0
    s = (-c + math.sqrt(c * c + 8.0 * k)) / 4.0
    return s * s


def ell_minus(k) -> float:
    k = _check_k(k)
    return _ell_from_f2(k, k + 2.0)


def ell_plus(k) -> float:
    """Supremum of ell over which eps*(k, ell) is defined, from the f1 limit on E_k."""
    k = _check_k(k)
    if k <= 5:
        return INF
    if k == 6:
        return _ell_from_f2(k, 0.0)
    return _ell_from_f2(k, math.sqrt((3.0 * k - 2.0) * (k - 6.0) / 3.0))


def ell0(k) -> float:
    """Upper end in ell of the set where R can reach (3, 4); closed-form radical."""
    k = _check_k(k)
    if k <= 5:
        return INF
    b = 3.0 * k * k - 8.0 * k + 12.0
    disc = (3.0 * k - 2.0) * (k - 6.0) * (3.0 * k * k + 4.0 * k + 12.0)
    return (b - math.sqrt(disc)) / 24.0


def epsilon_star(k, ell) -> float:
    """The eps in E_k solving f1(k, eps) = f2(k, ell)."""
    k = _check_k(k)
    if k < 2:
        raise DomainError("eps* is defined for k >= 2")
    lo_ell, hi_ell = ell_minus(k), ell_plus(k)
    if not lo_ell < ell < hi_ell:
        raise RangeError(f"ell={ell!r} outside ({lo_ell!r}, {hi_ell!r}) for k={k}")
    target = f2(k, ell)

    def h(e):
        return f1(k, e) - target

    up = E_k_upper(k)
    if math.isfinite(up):
        hi = up
    else:
        hi = 1e6
        while h(hi) > 0.0:
            hi *= 1e3
            if hi > 1e300:
                raise RangeError(f"eps*({k}, {ell!r}) exceeds 1e300")
    if h(hi) > 0.0:
        raise RangeError(f"no root of f1 - f2 in E_k for k={k}, ell={ell!r}")
    return brentq(h, 0.0, hi, xtol=1e-300, rtol=_ROOT_RTOL, maxiter=500)


def F_value(k, ell) -> float:
    return f3(k, epsilon_star(k, ell)) + 52.0 * k - 12.0 * ell + 12.0


def ell1(k) -> float:
    """Zero of ell -> F(k, ell) on (1, ell_plus(k)); +inf for k = 1."""
    k = _check_k(k)
    if k == 1:
        return INF
    hi = ell_plus(k)
    hi = 50.0 if not math.isfinite(hi) else hi - 1e-9
    return brentq(lambda l: F_value(k, l), 1.0 + 1e-9, hi, xtol=1e-15, rtol=_ROOT_RTOL, maxiter=500)


def ell_star(k) -> float:
    k = _check_k(k)
    return INF if k <= 2 else ell1(k)


def ell0_Rinf(k, ell) -> dict:
    return {"ell0": ell0(k), "R_inf": r_inf(k, ell)}


@dataclass(frozen=True)
class Admissibility:
    in_K: bool
    in_K1: bool
    in_Kstar: bool

    def failing(self) -> list:
        return [name for name, ok in (("K", self.in_K), ("K1", self.in_K1), ("K*", self.in_Kstar)) if not ok]


def admissible(k, ell) -> Admissibility:
    k = _check_k(k)
    if not ell > 1.0:
        return Admissibility(False, False, False)
    l1 = ell1(k) if k >= 2 else INF
    return Admissibility(
        in_K=(k <= 5) or ell < ell0(k),
        in_K1=ell < l1,
        in_Kstar=ell < (INF if k <= 2 else l1),
    )


@dataclass(frozen=True)
class BetaGap:
    beta: float
    ell_plus_1: float
    satisfied: bool
    sufficient_condition: bool
    guaranteed: bool


def beta_gap(k, ell, profile) -> BetaGap:
    """Compare beta with ell + 1; profile may be a built profile or a ParamSet."""
    p: ParamSet = getattr(profile, "params", profile)
    guaranteed = (k == 4 and ell < ell1(4)) or (k == 3 and ell < ELL_STAR_3)
    return BetaGap(
        beta=p.beta,
        ell_plus_1=ell + 1.0,
        satisfied=p.beta > ell + 1.0,
        sufficient_condition=k > ell * (p.gamma + 1.0),
        guaranteed=guaranteed,
    )


@dataclass(frozen=True)
class CriticalityReport:
    k: int
    ell0: float
    ell1: float
    ell_star: float
    ell_minus: float
    ell_plus: float
    E_k_upper: float
    eps_star_at_ell1: float | None
    ell: float | None = None
    R_inf: float | None = None
    in_K: bool | None = None
    in_K1: bool | None = None
    in_Kstar: bool | None = None

    def R_inf_fn(self, ell):
        return r_inf(self.k, ell)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def criticality_report(k, ell=None) -> CriticalityReport:
    k = _check_k(k)
    l1 = ell1(k)
    eps1 = epsilon_star(k, l1) if math.isfinite(l1) else None
    extra = {}
    if ell is not None:
        adm = admissible(k, ell)
        extra = dict(ell=float(ell), R_inf=r_inf(k, ell), in_K=adm.in_K, in_K1=adm.in_K1,
                     in_Kstar=adm.in_Kstar)
    return CriticalityReport(
        k=k, ell0=ell0(k), ell1=l1, ell_star=ell_star(k), ell_minus=ell_minus(k),
        ell_plus=ell_plus(k), E_k_upper=E_k_upper(k), eps_star_at_ell1=eps1, **extra,
    )
