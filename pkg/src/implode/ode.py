"""Adaptive Runge-Kutta driver with dense output and event location.

The stepping itself is scipy's DOP853 pair; this module owns the loop so that
steps are capped at a fraction of the span, step-size collapse is reported as
a singularity, and every event sign change inside a step is located on the
dense interpolant.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import DOP853
from scipy.optimize import brentq

from .errors import DomainError, StepFailure
from .fields import field_W, field_zu, field_Zv
from .params import ParamSet
from .renorm import psi_raw

__all__ = [
    "Event",
    "Termination",
    "Trajectory",
    "integrate",
    "field_rhs",
    "psi_z_equals",
    "delta_v_zero",
    "Z_reaches",
    "v_minus_Zb_zero",
    "event_fn",
]

DEFAULT_TOL = 1e-11


@dataclass
class Event:
    name: str
    fn: Callable[[float, np.ndarray], float]
    terminal: bool = True
    direction: int = 0  # 0: any crossing, +1: upward only, -1: downward only


@dataclass(frozen=True)
class Termination:
    kind: str  # "reached_end", "event", "step_failure"
    name: str | None = None
    location: float | None = None
    state: tuple | None = None


@dataclass
class Trajectory:
    x: np.ndarray
    y: np.ndarray  # shape (n_points, dim)
    segments: list = field(repr=False)
    termination: Termination
    events: list = field(default_factory=list)  # (name, x, y) in order of occurrence

    @property
    def x_end(self):
        return float(self.x[-1])

    @property
    def y_end(self):
        return self.y[-1].copy()

    def __call__(self, xq):
        """Dense evaluation; raises DomainError outside the integrated range."""
        lo, hi = min(self.x[0], self.x[-1]), max(self.x[0], self.x[-1])
        if not lo - 1e-14 * max(1.0, abs(lo)) <= xq <= hi + 1e-14 * max(1.0, abs(hi)):
            raise DomainError(f"x={xq!r} outside trajectory range [{lo!r}, {hi!r}]")
        if not self.segments:
            return self.y[0].copy()
        fwd = self.x[-1] >= self.x[0]
        ends = [s.t_max if fwd else -s.t_min for s in self.segments]
        key = xq if fwd else -xq
        i = min(bisect.bisect_left(ends, key), len(self.segments) - 1)
        return np.asarray(self.segments[i](xq), dtype=float)


def integrate(rhs, x0: float, y0, x_end: float, events: Sequence[Event] = (),
              rtol: float = DEFAULT_TOL, atol: float = DEFAULT_TOL,
              max_step_frac: float = 1.0 / 50.0, params: ParamSet | None = None,
              event_xtol: float = 1e-13) -> Trajectory:
    """Integrate y' = rhs(x, y) from x0 toward x_end.

    rhs may be a callable or one of the field names "Zv", "zu", "W" (then
    params is required).  Terminal events stop the run at the located point.
    """
    if isinstance(rhs, str):
        if params is None:
            raise DomainError("params are required for a named field")
        rhs = field_rhs(rhs, params)
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    span = abs(x_end - x0)
    if span == 0.0:
        raise DomainError("empty integration span")
    solver = DOP853(rhs, x0, y0, x_end, rtol=rtol, atol=atol,
                    max_step=span * max_step_frac, first_step=None)
    xs, ys, segs, found = [x0], [y0.copy()], [], []
    g_prev = [ev.fn(x0, y0) for ev in events]
    h_floor = 1e-15 * span
    while True:
        if solver.status == "finished":
            term = Termination("reached_end", location=float(solver.t), state=tuple(solver.y))
            break
        msg = solver.step()
        if solver.status == "failed":
            raise StepFailure(f"integrator failed at x={solver.t!r}: {msg}")
        if solver.status == "running" and solver.step_size is not None and solver.step_size < h_floor:
            raise StepFailure(f"step size {solver.step_size!r} underflowed at x={solver.t!r}")
        dense = solver.dense_output()
        x_new, y_new = float(solver.t), solver.y.copy()
        if not np.all(np.isfinite(y_new)):
            raise StepFailure(f"non-finite state at x={x_new!r}")
        hits = []
        g_new = []
        for i, ev in enumerate(events):
            gn = ev.fn(x_new, y_new)
            g_new.append(gn)
            gp = g_prev[i]
            if _crossed(gp, gn, ev.direction):
                xe = _locate(ev, dense, solver.t_old, x_new, gp, gn, event_xtol)
                hits.append((abs(xe - solver.t_old), i, xe))
        hits.sort()
        stop = None
        for _, i, xe in hits:
            ye = np.asarray(dense(xe), dtype=float)
            found.append((events[i].name, xe, ye))
            if events[i].terminal:
                stop = (i, xe, ye)
                break
        if stop is not None:
            i, xe, ye = stop
            segs.append(dense)
            xs.append(xe)
            ys.append(ye)
            term = Termination("event", events[i].name, xe, tuple(ye))
            break
        segs.append(dense)
        xs.append(x_new)
        ys.append(y_new)
        g_prev = g_new
    return Trajectory(np.array(xs), np.array(ys), segs, term, found)


def _crossed(gp, gn, direction):
    if gp == 0.0 or not (math.isfinite(gp) and math.isfinite(gn)):
        return False
    if gp * gn > 0.0:
        return False
    if direction > 0:
        return gp < 0.0
    if direction < 0:
        return gp > 0.0
    return True


def _locate(ev, dense, xa, xb, ga, gb, xtol):
    if gb == 0.0:
        return xb

    def g(x):
        return ev.fn(x, np.asarray(dense(x), dtype=float))

    scale = max(abs(xa), abs(xb), 1.0)
    return brentq(g, xa, xb, xtol=max(xtol * 1e-3, 4e-16 * scale), rtol=8.9e-16, maxiter=200)


def field_rhs(name: str, params: ParamSet):
    """Slope function for a named field: dv/dZ, du/dz or dv~/dW."""
    if name == "Zv":
        def rhs(Z, y):
            Dv, DZ = field_Zv(Z, y[0], params)
            return np.array([Dv / DZ])
    elif name == "zu":
        def rhs(z, y):
            Du, Dz = field_zu(z, y[0], params)
            return np.array([Du / Dz])
    elif name == "W":
        def rhs(W, y):
            num, den = field_W(W, y[0], params)
            return np.array([num / den])
    else:
        raise DomainError(f"unknown field {name!r}; expected 'Zv', 'zu' or 'W'")
    return rhs


# event factories; each returns an Event acting on the state of the named field

def psi_z_equals(zeta: float, params: ParamSet, terminal: bool = True) -> Event:
    g = params.gamma
    return Event(f"psi_z_equals({zeta:g})",
                 lambda Z, y: psi_raw(Z, y[0], g)[0] - zeta, terminal)


def delta_v_zero(params: ParamSet, plane: str = "Zv", terminal: bool = False) -> Event:
    if plane == "Zv":
        return Event("delta_v_zero", lambda Z, y: field_Zv(Z, y[0], params)[0], terminal)
    if plane == "W":
        return Event("delta_v_zero", lambda W, y: field_W(W, y[0], params)[0], terminal)
    raise DomainError(f"delta_v_zero is defined on the 'Zv' and 'W' planes, not {plane!r}")


def Z_reaches(Z_max: float, terminal: bool = True) -> Event:
    return Event(f"Z_reaches({Z_max:g})", lambda Z, y: Z - Z_max, terminal)


def v_minus_Zb_zero(params: ParamSet, terminal: bool = False) -> Event:
    """Signed distance Z - Z_b(v) to the curve on which Delta_v vanishes."""
    k, m = params.k, params.m
    return Event("v_minus_Zb_zero",
                 lambda Z, y: Z - k * y[0] / (m + (k - m) * y[0] * y[0]), terminal)


_FACTORIES = {
    "psi_z_equals": psi_z_equals,
    "delta_v_zero": delta_v_zero,
    "Z_reaches": Z_reaches,
    "v_minus_Zb_zero": v_minus_Zb_zero,
}


def event_fn(name: str, *args, **kwargs) -> Event:
    try:
        return _FACTORIES[name](*args, **kwargs)
    except KeyError:
        raise DomainError(f"unknown event {name!r}; expected one of {sorted(_FACTORIES)}") from None
