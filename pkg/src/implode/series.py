"""Taylor expansions at the two singular points.

At the origin of the (Z, v) plane the solution is odd, v(Z) = Z * sum phi_n Z^(2n),
so the P0 series is stored in the variable kappa = Z^2.  At the sonic point
the (z, u) solution is u(z) = sum a_n z^n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, PoleError, RadiusError, TailWarning
from .params import ParamSet, SonicData, b_constants

__all__ = [
    "TaylorSeries",
    "p0_series",
    "q1_series",
    "eval_series",
    "eval_series_deriv",
    "radius_estimate",
    "tail_bound",
    "seed_point",
    "DEFAULT_N",
    "MAX_N",
]

DEFAULT_N = 60
MAX_N = 200
POLE_GUARD = 1e-8


@dataclass(frozen=True)
class TaylorSeries:
    center: float
    coeffs: tuple
    radius_estimate: float
    kind: str  # "P0_phi" (variable kappa = Z^2, value times Z) or "Q1_a"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def N(self):
        return len(self.coeffs) - 1


def radius_estimate(coeffs) -> float:
    """0.5 / max_{n >= N/2} |c_n|^(1/n); 1e6 if that tail vanishes."""
    c = np.asarray(coeffs, dtype=float)
    N = len(c) - 1
    vals = [abs(c[n]) ** (1.0 / n) for n in range(max(1, N // 2), N + 1) if c[n] != 0.0]
    if not vals or max(vals) == 0.0:
        return 1e6
    return 0.5 / max(vals)


def _envelope(c, w=4):
    # running max over a window of w coefficients; hides isolated near-zeros
    a = np.abs(np.asarray(c, dtype=float))
    return np.array([a[n:n + w].max() for n in range(len(a) - w + 1)])


def _ratio_limsup(c, w=4):
    """Largest growth factor per index over the last half, measured on the envelope."""
    N = len(c) - 1
    if N < 2 * w:
        nz = [abs(c[n]) ** (1.0 / n) for n in range(1, N + 1) if c[n] != 0.0]
        return max(nz) if nz else 0.0
    e = _envelope(c, w)
    lo = max(1, N // 2)
    rs = [(e[n + w] / e[n]) ** (1.0 / w) for n in range(lo, len(e) - w) if e[n] > 0.0]
    return max(rs) if rs else 0.0


def _var(s: TaylorSeries, x):
    t = x - s.center
    return t * t if s.kind == "P0_phi" else t


def tail_bound(s: TaylorSeries, x) -> float:
    """|last kept term| * r / (1 - r), r = |x| times the empirical growth factor."""
    c = np.asarray(s.coeffs, dtype=float)
    t = abs(_var(s, x))
    r = t * _ratio_limsup(c)
    w = min(4, len(c))
    last = float(np.max(np.abs(c[-w:]))) * t ** (len(c) - 1)
    if s.kind == "P0_phi":
        last *= abs(x - s.center)
    if last == 0.0:
        return 0.0
    if r >= 1.0:
        return math.inf
    return last * r / (1.0 - r)


def eval_series(s: TaylorSeries, x: float, tol: float = 1e-13):
    """Horner value and an empirical tail bound; warns when the bound exceeds tol."""
    t = _var(s, x)
    if abs(t) > s.radius_estimate:
        raise RadiusError(f"|x - center| = {abs(x - s.center)!r} outside the estimated radius "
                          f"{s.radius_estimate!r} ({s.kind})")
    c = s.coeffs
    acc = 0.0
    for a in reversed(c):
        acc = acc * t + a
    if s.kind == "P0_phi":
        acc *= x - s.center
    tb = tail_bound(s, x)
    if not tb < tol * max(1.0, abs(acc)):
        warnings.warn(f"series tail bound {tb:.3e} exceeds {tol:.1e} at x={x!r}", TailWarning,
                      stacklevel=2)
    return acc, tb


def eval_series_deriv(s: TaylorSeries, x: float) -> float:
    """Derivative with respect to x of the represented function."""
    c = s.coeffs
    dx = x - s.center
    if s.kind == "P0_phi":
        # d/dZ [ sum phi_n Z^(2n+1) ] = sum (2n+1) phi_n Z^(2n)
        k2 = dx * dx
        acc = 0.0
        for n in range(len(c) - 1, -1, -1):
            acc = acc * k2 + (2 * n + 1) * c[n]
        return acc
    acc = 0.0
    for n in range(len(c) - 1, 0, -1):
        acc = acc * dx + n * c[n]
    return acc


def seed_point(s: TaylorSeries, tol: float = 1e-13, x_max: float | None = None,
               shrink: float = 0.8) -> float:
    """Largest x (on a geometric ladder) whose tail bound is below tol."""
    if s.kind == "P0_phi":
        x = math.sqrt(s.radius_estimate)
    else:
        x = s.radius_estimate
    if x_max is not None:
        x = min(x, x_max)
    for _ in range(400):
        if tail_bound(s, s.center + x) < tol:
            return x
        x *= shrink
    raise RadiusError("no seed point meets the tail tolerance")


def p0_series(params: ParamSet, N: int = 40) -> TaylorSeries:
    """Coefficients phi_n of v(Z) = Z sum phi_n Z^(2n) near the origin."""
    N = _check_N(N)
    k, m, ell = params.k, params.m, params.ell
    phi = [m / (k + 1.0)]
    # running Cauchy products, index j holds the coefficient of kappa^j
    ff, fff, f4, fn, ffn = [], [], [], [], []

    def extend(n):
        nf = [i * phi[i] for i in range(n + 1)]
        ff.append(sum(phi[i] * phi[n - i] for i in range(n + 1)))
        fff.append(sum(ff[i] * phi[n - i] for i in range(n + 1)))
        f4.append(sum(fff[i] * phi[n - i] for i in range(n + 1)))
        fn.append(sum(phi[i] * nf[n - i] for i in range(n + 1)))
        ffn.append(sum(ff[i] * nf[n - i] for i in range(n + 1)))

    extend(0)
    for n in range(1, N + 1):
        j = n - 1
        rhs = (ell * phi[j]
               + (k - 2.0 * m - 2.0 * ell + 2.0) * ff[j]
               + (k + ell) * fff[j]
               + 2.0 * ell * j * phi[j]
               - 4.0 * (ell - 1.0) * fn[j]
               + 2.0 * ell * ffn[j])
        if n >= 2:
            rhs += -fff[n - 2] + (m - k) * f4[n - 2] - 2.0 * ffn[n - 2]
        phi.append(rhs / (k + 1.0 + 2.0 * n))
        extend(n)
    return TaylorSeries(0.0, tuple(phi), radius_estimate(phi), "P0_phi")


def q1_series(params: ParamSet, sonic: SonicData, N: int = DEFAULT_N,
              check: bool = True) -> TaylorSeries:
    """Coefficients a_n of the analytic sonic branch u(z) = sum a_n z^n."""
    N = _check_N(N)
    R, d = sonic.R, sonic.delta
    for n in range(2, N + 1):
        if abs(R - n) < POLE_GUARD:
            raise PoleError(f"R={R!r} within {POLE_GUARD} of the pole at {n}")
    k, A, B = params.k, params.A, params.B
    a = [params.eps, sonic.a1]
    for n in range(2, N + 1):
        s1 = sum(a[j] * a[n + 1 - j] for j in range(2, n))
        s2 = sum(a[j] * a[n - j] for j in range(1, n))
        E = (-(n + 1) / 2.0 * s1
             - (2.0 - (k + 1.0) * n / 2.0) * s2
             - ((n - 3.0) * A + (n - 1.0) * B + 2.0 * k) * a[n - 1]
             + ((n - 4.0) * B + 2.0 * k) * a[n - 2])
        a.append(E / ((R - n) * d))
    if check and N >= 4:
        ct = b_constants(params, sonic)
        for n, ref in ((2, ct.a2), (3, ct.a3), (4, ct.a4)):
            if abs(a[n] - ref) > 1e-9 * max(1.0, abs(ref)):
                raise NumericalError(f"a_{n} recurrence {a[n]!r} disagrees with closed form {ref!r}")
    return TaylorSeries(0.0, tuple(a), radius_estimate(a), "Q1_a", {"R": R})


def _check_N(N):
    N = int(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_N:
        raise ValueError(f"N capped at {MAX_N}")
    return N
