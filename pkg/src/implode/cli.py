"""Command-line interface.

Usage:
    implode critical-ell --k 2..6
    implode solve --k 2 --ell 2
    implode profile --k 2 --ell 2 --grid 0:10:101 --out profile.csv
    implode portrait --plane Zv --k 3 --ell 2 --m 1 --window 0:3,-1:1 --n 21
    implode verify --suite all

Exit codes: 0 ok, 2 usage, 3 inadmissible parameters, 4 numerical failure.
The log level is read from IMPLODE_LOG (default WARNING).
"""

from __future__ import annotations

import logging
import math
import os
import sys
from dataclasses import dataclass, field

import click
import numpy as np

from .criticality import admissible, criticality_report
from .errors import DomainError, InadmissibleError, NumericalError
from .export import PROFILE_COLUMNS, dumps_json, write_table
from .fields import CURVES, field_zu, field_Zv
from .matcher import MatchConfig
from .params import derive_params, r_inf
from .profile import ProfileConfig, profile_at, solve_profile
from .verify import SUITES, run_suites

__all__ = ["cli", "main", "RunConfig", "parse_k_range", "parse_grid", "parse_window"]

EXIT_USAGE = 2
EXIT_INADMISSIBLE = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("implode")


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"


def parse_k_range(text: str) -> list:
    """'3' -> [3]; '2..6' -> [2, 3, 4, 5, 6]; '2,4' -> [2, 4]."""
    ks = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            ks.extend(range(lo, hi + 1))
        else:
            ks.append(int(part))
    if not ks or min(ks) < 1:
        raise ValueError("k must be a positive integer")
    return ks


def parse_grid(text: str) -> np.ndarray:
    """'Z0:Z1:n' -> n equally spaced points, strictly increasing, Z0 >= 0."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like Z0:Z1:n, got {text!r}")
    z0, z1, n = float(parts[0]), float(parts[1]), int(parts[2])
    if not (z0 >= 0.0 and z1 > z0 and n >= 2 and math.isfinite(z1)):
        raise ValueError(f"grid {text!r} is not a monotone grid on [0, inf) with n >= 2")
    return np.linspace(z0, z1, n)


def parse_window(text: str) -> tuple:
    """'x0:x1,y0:y1' -> ((x0, x1), (y0, y1)) with x0 < x1 and y0 < y1."""
    try:
        xs, ys = text.split(",")
        x0, x1 = (float(t) for t in xs.split(":"))
        y0, y1 = (float(t) for t in ys.split(":"))
    except ValueError:
        raise ValueError(f"window must look like x0:x1,y0:y1, got {text!r}") from None
    if not (x0 < x1 and y0 < y1):
        raise ValueError(f"window {text!r} is empty")
    return (x0, x1), (y0, y1)


def _log_config(command, params, out, fmt):
    log.debug("%s", RunConfig(command, params, out, fmt))


def _emit(text: str, out: str | None):
    if out is None:
        click.echo(text, nl=not text.endswith("\n"))
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _run(fn):
    """Map library exceptions onto the documented exit codes."""
    try:
        return fn()
    except InadmissibleError as exc:
        click.echo(f"inadmissible: {exc}", err=True)
        sys.exit(EXIT_INADMISSIBLE)
    except NumericalError as exc:
        click.echo(f"numerical failure ({type(exc).__name__}): {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    except (DomainError, ValueError) as exc:
        click.echo(f"usage: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _configure_logging():
    level = os.environ.get("IMPLODE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


@click.group()
def cli():
    """Self-similar imploding profiles: critical exponents, solves and exports."""
    _configure_logging()


_format = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
_out = click.option("--out", type=click.Path(dir_okay=False), default=None)


@cli.command("critical-ell")
@click.option("--k", "k_text", required=True, help="k, a range 2..6, or a list 2,4")
@_format
@_out
def critical_ell(k_text, fmt, out):
    """Table of ell0, ell1, ell*, eps*(ell1) and R_inf(ell1) for each k."""
    try:
        ks = parse_k_range(k_text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--k")

    def work():
        rows = []
        for k in ks:
            r = criticality_report(k)
            rows.append(dict(k=k, ell0=r.ell0, ell1=r.ell1, ell_star=r.ell_star,
                             eps_star=r.eps_star_at_ell1, ell_minus=r.ell_minus,
                             ell_plus=r.ell_plus, k_minus_k_over_ell1=k - k / r.ell1,
                             R_inf_at_ell1=r_inf(k, r.ell1) if math.isfinite(r.ell1) else None))
        return rows

    _log_config("critical-ell", dict(k=ks), out, fmt)
    rows = _run(work)
    if fmt == "json":
        _emit(dumps_json(rows) + "\n", out)
    else:
        cols = list(rows[0])
        _emit(write_table(cols, [[_cell(r[c]) for c in cols] for r in rows]), out)


def _cell(x):
    if x is None:
        return ""
    return float(x) if isinstance(x, float) else x


def _configs(rtol, atol):
    return MatchConfig(rtol=rtol, atol=atol), ProfileConfig(rtol=rtol, atol=atol)


def _solve(k, ell, rtol, atol):
    adm = admissible(k, ell)
    if not adm.in_Kstar:
        raise InadmissibleError(f"(k, ell) = ({k}, {ell!r}) fails membership in {adm.failing()}"
                                + _ell1_note(k))
    mc, pc = _configs(rtol, atol)
    return solve_profile(k, ell, mc, pc)


def _ell1_note(k):
    r = criticality_report(k)
    return f"; ell1({k}) = {r.ell1!r}, ell0({k}) = {r.ell0!r}"


def _summary(prof) -> dict:
    s = prof.scalars()
    out = {"k": s["k"], "ell": s["ell"], "R0": s["R0"], "residual": s.get("residual"),
           "Z1": s["Z1"], "v1": s["v1"], "beta": s["beta"], "v_inf": s["v_inf"]}
    out.update({key: s[key] for key in ("gamma", "m", "eps", "A", "B", "rho_star") if key in s})
    if "Z_black" in s:
        out["Z_black"] = s["Z_black"]
    return out


@cli.command()
@click.option("--k", type=int, required=True)
@click.option("--ell", type=float, required=True)
@click.option("--rtol", type=float, default=1e-11, show_default=True)
@click.option("--atol", type=float, default=1e-11, show_default=True)
@_format
@_out
def solve(k, ell, rtol, atol, fmt, out):
    """Find R0 and build the global profile; print the scalar summary."""
    _log_config("solve", dict(k=k, ell=ell, rtol=rtol, atol=atol), out, fmt)
    prof = _run(lambda: _solve(k, ell, rtol, atol))
    s = _summary(prof)
    if fmt == "json":
        _emit(dumps_json(s) + "\n", out)
    else:
        _emit(write_table(list(s), [[_cell(x) for x in s.values()]]), out)


@cli.command()
@click.option("--k", type=int, required=True)
@click.option("--ell", type=float, required=True)
@click.option("--grid", "grid_text", default="0:10:201", show_default=True, help="Z0:Z1:n")
@click.option("--rtol", type=float, default=1e-11, show_default=True)
@click.option("--atol", type=float, default=1e-11, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@_out
def profile(k, ell, grid_text, rtol, atol, fmt, out):
    """Tabulate (Z, v, rho_hat, u0_hat, u_hat) on a grid."""
    try:
        grid = parse_grid(grid_text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--grid")
    _log_config("profile", dict(k=k, ell=ell, grid=grid_text, rtol=rtol, atol=atol), out, fmt)
    prof = _run(lambda: _solve(k, ell, rtol, atol))
    rows = _run(lambda: [[float(Z), *profile_at(prof, float(Z))] for Z in grid])
    header = prof.scalars()
    header = {key: header[key] for key in ("k", "ell", "gamma", "m", "beta", "eps", "A", "B", "R0",
                                           "Z1", "v1", "v_inf", "rho_star")}
    if fmt == "csv":
        _emit(write_table(PROFILE_COLUMNS, rows, header), out)
    else:
        _emit(dumps_json({"header": header, "columns": list(PROFILE_COLUMNS), "rows": rows}) + "\n", out)


_PLANE_CURVES = {
    "Zv": (("v1", "x"), ("v2", "x"), ("v_plus", "x"), ("v_minus", "x"), ("Z_b", "y"), ("Z_g", "y")),
    "zu": (("u_p", "x"), ("u_b", "x"), ("u_g", "x")),
}


def portrait_rows(plane, params, window, n):
    """Nullcline polylines and unit direction samples inside the window."""
    (x0, x1), (y0, y1) = window
    rows = []
    xs = np.linspace(x0, x1, 4 * n + 1)
    ys = np.linspace(y0, y1, 4 * n + 1)
    for name, var in _PLANE_CURVES[plane]:
        fn = CURVES[name]
        for t in (xs if var == "x" else ys):
            try:
                val = float(fn(float(t), params))
            except (DomainError, ZeroDivisionError):
                continue
            x, y = (float(t), val) if var == "x" else (val, float(t))
            if math.isfinite(val) and x0 <= x <= x1 and y0 <= y <= y1:
                rows.append(["curve", name, x, y, "", ""])
    for x in np.linspace(x0, x1, n):
        for y in np.linspace(y0, y1, n):
            if plane == "Zv":
                dy, dx = field_Zv(float(x), float(y), params)
            else:
                dy, dx = field_zu(float(x), float(y), params)
            norm = math.hypot(dx, dy)
            if norm == 0.0 or not math.isfinite(norm):
                continue
            rows.append(["direction", "", float(x), float(y), dx / norm, dy / norm])
    return rows


@cli.command()
@click.option("--plane", type=click.Choice(["Zv", "zu"]), required=True)
@click.option("--k", type=int, required=True)
@click.option("--ell", type=float, required=True)
@click.option("--m", type=float, default=None, help="sets gamma = k/m - 1")
@click.option("--gamma", type=float, default=None)
@click.option("--window", "window_text", required=True, help="x0:x1,y0:y1")
@click.option("--n", type=click.IntRange(min=2), default=21, show_default=True)
@_out
def portrait(plane, k, ell, m, gamma, window_text, n, out):
    """Nullclines and direction field samples for external plotting."""
    try:
        window = parse_window(window_text)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--window")
    if (m is None) == (gamma is None):
        raise click.UsageError("give exactly one of --m and --gamma")
    if m is not None:
        if not m > 0.0:
            raise click.BadParameter("m must be positive", param_hint="--m")
        gamma = k / m - 1.0
    _log_config("portrait", dict(plane=plane, k=k, ell=ell, gamma=gamma, window=window, n=n), out, "csv")
    params = _run(lambda: derive_params(k, ell, gamma))
    rows = portrait_rows(plane, params, window, n)
    _emit(write_table(["kind", "name", "x", "y", "dx", "dy"], rows), out)


@cli.command()
@click.option("--suite", "suites", multiple=True, default=("all",), show_default=True,
              help=f"one of {sorted(SUITES)} or all; repeatable")
@_format
@_out
def verify(suites, fmt, out):
    """Run the inequality and identity suites; exit 4 if any check fails."""
    names = list(suites)
    if "all" in names:
        names = list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise click.BadParameter(f"unknown suite(s) {unknown}; expected {sorted(SUITES)}",
                                 param_hint="--suite")
    _log_config("verify", dict(suites=names), out, fmt)
    results = _run(lambda: run_suites(names))
    report = []
    failed = 0
    for name, checks in results.items():
        bad = [c for c in checks if not c.ok]
        failed += len(bad)
        worst = min(checks, key=lambda c: c.margin)
        report.append({"suite": name, "checks": len(checks), "failed": len(bad),
                       "min_margin": worst.margin, "worst_point": worst.point,
                       "names": sorted({c.suite for c in checks}),
                       "failures": [{"check": c.suite, "point": c.point, "margin": c.margin} for c in bad]})
    if fmt == "json":
        _emit(dumps_json(report) + "\n", out)
    else:
        cols = ["suite", "checks", "failed", "min_margin"]
        _emit(write_table(cols, [[r[c] for c in cols] for r in report]), out)
    if failed:
        sys.exit(EXIT_NUMERICAL)


def main(argv=None):
    return cli.main(args=argv, prog_name="implode")


if __name__ == "__main__":
    main()
