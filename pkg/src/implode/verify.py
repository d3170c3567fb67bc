"""Inequality and identity suites evaluated on parameter grids.

Each suite returns a list of Check records.  ``margin`` is the slack of the
inequality in the direction that makes it hold, so a check passes exactly
when its margin is positive (identity suites use tol - |error|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criticality import admissible, ell1
from .fields import L_apply, barrier_poly, f_of_z, u_g_coeffs
from .matcher import R_STAR
from .params import (b_constants, derive_params, lem8_closed_forms, p0_quadratic, params_from_R,
                     r_inf, sonic_data)
from .renorm import psi_raw, theta_raw

__all__ = ["Check", "SUITES", "run_suite", "run_suites", "k1_grid"]


@dataclass(frozen=True)
class Check:
    suite: str
    point: dict
    margin: float

    @property
    def ok(self) -> bool:
        return bool(self.margin > 0.0)


def k1_grid(ks=(1, 2, 3, 4, 5, 6), n_ell: int = 4, n_R: int = 9):
    """(k, ell, R) triples with (k, ell) in K1 and R strictly inside (3, 4)."""
    Rs = np.linspace(3.0, 4.0, n_R + 2)[1:-1]
    for k in ks:
        top = 10.0 if k == 1 else ell1(k)
        for ell in np.linspace(1.0, top, n_ell + 2)[1:-1]:
            if not admissible(k, ell).in_K1:
                continue
            for R in Rs:
                if R > r_inf(k, ell):
                    yield k, float(ell), float(R)


def _setup(k, ell, R):
    p = params_from_R(k, ell, R)
    s = sonic_data(p)
    return p, s


def _a2_B0(p, s):
    k, A, B, eps = p.k, p.A, p.B, p.eps
    a1, d, R = s.a1, s.delta, s.R
    a2 = ((k - 1.0) * a1 * a1 - (-A + B + 2.0 * k) * a1 + 2.0 * (k - B) * eps) / ((R - 2.0) * d)
    return a2, (k - 2.0) * a1 + 2.0 * A - 4.0 * k


def _B2(p, s):
    # only a2 enters, so R = 3 and R = 4 are admissible here
    a2, _ = _a2_B0(p, s)
    return -5.0 * a2 + 4.0 * p.k * s.a1 - (2.0 * p.k + p.A + 3.0 * p.B)


def suite_Lug(n=1000, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(1, 7))
        ell = float(rng.uniform(1.01, 10.0))
        gamma = float(rng.uniform(1.0 / math.sqrt(ell) + 0.01, 5.0))
        z = float(rng.uniform(-2.0, 2.0))
        p = derive_params(k, ell, gamma)
        lhs = float(L_apply(u_g_coeffs(p), z, p))
        rhs = 2.0 * k * ell * (1.0 - ell) * z * (gamma + z) ** 3
        tol = 1e-10 * (1.0 + abs(rhs))
        out.append(Check("Lug_identity", dict(k=k, ell=ell, gamma=gamma, z=z), tol - abs(lhs - rhs)))
    return out


def suite_sonic_identities():
    out = []
    for k, ell, R in k1_grid(n_ell=3, n_R=5):
        p, s = _setup(k, ell, R)
        e = p.eps
        scale = max(1.0, abs(R * s.delta ** 2))
        checks = {
            "R_delta2": (R * s.delta ** 2 - 2.0 * k * e * (1.0 + e)) / scale,
            "R1_delta": ((R + 1.0) * s.delta - (k + 2.0) * e - p.A) / max(1.0, abs(p.A)),
            "p0_a1": p0_quadratic(p, s.a1) / max(1.0, s.a1 * s.a1),
            "radical": ((k + 2.0) * math.sqrt(1.0 + e) - (1.0 + R) * math.sqrt(2.0 * k * e / R)
                        - (k - 2.0 * ell) / math.sqrt(ell)) / max(1.0, (k + 2.0) * math.sqrt(1.0 + e)),
        }
        for name, err in checks.items():
            out.append(Check("sonic_" + name, dict(k=k, ell=ell, R=R), 1e-10 - abs(err)))
    return out


def suite_roundtrip(n=1000, seed=1):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        gamma = float(rng.uniform(0.5, 4.0))
        # inside 0 < v < 1, 0 < Z v < 1, for Z up to the W-handoff at 10;
        # beyond that z -> 1 and forming 1 - z costs digits in any binary64 round trip
        Z = float(rng.uniform(0.01, 10.0))
        v = float(rng.uniform(0.01, min(0.99, 0.99 / Z)))
        z, u = psi_raw(Z, v, gamma)
        Z2, v2 = theta_raw(z, u, gamma)
        err = max(abs(Z2 - Z) / max(1.0, abs(Z)), abs(v2 - v))
        out.append(Check("psi_theta_roundtrip", dict(gamma=gamma, Z=Z, v=v), 1e-12 - err))
    return out


def suite_a2_positive():
    out = []
    for k, ell, R in k1_grid():
        p, s = _setup(k, ell, R)
        a2, B0 = _a2_B0(p, s)
        pt = dict(k=k, ell=ell, R=R)
        out.append(Check("B0>0", pt, B0))
        out.append(Check("a2>0", pt, a2))
    return out


def suite_a3_signs():
    out = []
    for k, ell, R in k1_grid():
        p, s = _setup(k, ell, R)
        c = b_constants(p, s)
        pt = dict(k=k, ell=ell, R=R)
        out.append(Check("B1>0", pt, c.B1))
        out.append(Check("a3>0", pt, c.a3))
        out.append(Check("a4<0", pt, -c.a4))
        out.append(Check("a3/a2>2k-1", pt, c.a3 / c.a2 - (2.0 * k - 1.0)))
        out.append(Check("2k-1>kR/2-1", pt, (2.0 * k - 1.0) - (k * R / 2.0 - 1.0)))
        out.append(Check("kR/2-1>a1/eps", pt, (k * R / 2.0 - 1.0) - s.a1 / p.eps))
    return out


def suite_B2_k1():
    out = []
    for ell in (1.1, 2.0, 10.0):
        for R in np.linspace(3.0, 4.0, 21):
            p, s = _setup(1, ell, float(R))
            out.append(Check("B2>0 (k=1)", dict(k=1, ell=ell, R=float(R)), _B2(p, s)))
    return out


def _section9_grid(n_R=9):
    for ell in (2.0, 4.0, 10.0):
        top = min(R_STAR, 4.0 - 1.0 / ell)
        for R in np.linspace(3.0, top, n_R + 2)[1:-1]:
            yield ell, float(R)


def suite_a4_lt_M():
    out = []
    for ell, R in _section9_grid():
        if R >= R_STAR:
            continue
        p, s = _setup(2, ell, R)
        c = b_constants(p, s)
        pt = dict(k=2, ell=ell, R=R)
        out.append(Check("M>a4", pt, c.M - c.a4))
        out.append(Check("a3>4a2", pt, c.a3 - 4.0 * c.a2))
    return out


def suite_a1_lt():
    out = []
    for ell, R in _section9_grid():
        if ell <= 1.5 or R >= 4.0 - 1.0 / ell:
            continue
        p, s = _setup(2, ell, R)
        c = b_constants(p, s)
        pt = dict(k=2, ell=ell, R=R)
        out.append(Check("a1<2eps", pt, 2.0 * p.eps - s.a1))
        out.append(Check("a2>7", pt, c.a2 - 7.0))
    return out


def suite_L_u3():
    out = []
    for k, ell, R in k1_grid(n_ell=3, n_R=5):
        p, s = _setup(k, ell, R)
        c = b_constants(p, s)
        u3 = barrier_poly("u3", p, s, c).coeffs
        z0 = -p.eps / s.a1
        worst = max(float(L_apply(u3, z, p)) for z in np.linspace(z0, 0.0, 21)[:-1])
        out.append(Check("L(u3)<0", dict(k=k, ell=ell, R=R), -worst))
    return out


def suite_f_negative():
    out = []
    for k, ell, R in k1_grid(n_ell=3, n_R=5):
        p, s = _setup(k, ell, R)
        z0 = -p.eps / s.a1
        worst = max(float(f_of_z(z, p)) for z in np.linspace(z0, 0.0, 20))
        out.append(Check("f<0", dict(k=k, ell=ell, R=R), -worst))
    return out


def suite_lem8():
    out = []
    for ell in np.linspace(1.2, 5.0, 20):
        for R in np.linspace(2.1, 3.9, 20):
            if abs(R - 3.0) < 1e-6:
                continue
            p, s = _setup(2, float(ell), float(R))
            ref = lem8_closed_forms(float(ell), float(R))
            a2, _ = _a2_B0(p, s)
            err = max(abs(x - y) / max(1.0, abs(y)) for x, y in
                      ((p.eps, ref.eps), (s.delta, ref.delta), (s.a1, ref.a1), (p.A, ref.A), (a2, ref.a2)))
            out.append(Check("lem8_agreement", dict(k=2, ell=float(ell), R=float(R)), 1e-10 - err))
    return out


SUITES = {
    "Lug": suite_Lug,
    "sonic": suite_sonic_identities,
    "roundtrip": suite_roundtrip,
    "a2": suite_a2_positive,
    "a3": suite_a3_signs,
    "B2k1": suite_B2_k1,
    "a4M": suite_a4_lt_M,
    "a1": suite_a1_lt,
    "Lu3": suite_L_u3,
    "f": suite_f_negative,
    "lem8": suite_lem8,
}


def run_suite(name: str) -> list:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'all'") from None
    return fn()


def run_suites(names) -> dict:
    if names == "all" or names == ["all"]:
        names = list(SUITES)
    return {n: run_suite(n) for n in names}
