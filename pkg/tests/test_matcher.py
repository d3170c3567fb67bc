import dataclasses

import mpmath as mp
import numpy as np
import pytest

import oracles
import implode.matcher as matcher
from implode.errors import BracketError, InadmissibleError, MultipleRoots, NoSignChange
from implode.fields import curve_eval
from implode.matcher import (MatchConfig, default_bracket, find_R0, residual_g, seam_jump,
                             u_F_at, u_F_branch, u_L_at)
from implode.params import params_from_R, sonic_data


def _u_L_oracle(k, ell, R, zeta, N=40):
    p = params_from_R(k, ell, R)
    a = oracles.sonic_coeffs_mp(oracles.params(k, ell, p.gamma), sonic_data(p).a1, N)
    with mp.workdps(40):
        return float(oracles.poly_eval_mp(a, mp.mpf(zeta)))


def test_u_F_against_rk4_oracle():
    got = u_F_at(0.02, 3.3, 2, 2.0)
    assert got == pytest.approx(oracles.u_F_rk4(2, 2.0, 3.3, 0.02, h=1e-5), abs=1e-8)


def test_u_L_against_oracle_and_at_zero():
    p = params_from_R(2, 2.0, 3.3)
    assert u_L_at(0.0, 3.3, 2, 2.0) == p.eps
    assert u_L_at(0.01, 3.3, 2, 2.0) == pytest.approx(_u_L_oracle(2, 2.0, 3.3, 0.01), abs=1e-11)


def test_u_F_between_bounding_curves():
    p = params_from_R(2, 2.0, 3.3)
    br = u_F_branch(0.02, p)
    for z, u in zip(br.zu.x[1:], br.zu.y[1:, 0]):
        assert curve_eval("u_g", z, p) < u < curve_eval("u_b", z, p)


def test_u_F_tends_to_sonic_value():
    p = params_from_R(2, 2.0, 3.3)
    gaps = [u_F_at(z, 3.3, 2, 2.0) - p.eps for z in (0.02, 0.01, 0.005)]
    assert all(g > 0 for g in gaps)
    assert gaps[1] / gaps[0] == pytest.approx(0.5, abs=0.02)
    assert gaps[2] / gaps[1] == pytest.approx(0.5, abs=0.02)


@pytest.mark.parametrize("R", [3.05, 3.45])
def test_residual_sign_matches_oracle(R):
    res = residual_g(R, 2, 2.0)
    g_or = _u_L_oracle(2, 2.0, R, res.zeta) - oracles.u_F_rk4(2, 2.0, R, res.zeta)
    assert np.sign(res.g) == np.sign(g_or)
    assert res.g == pytest.approx(g_or, abs=1e-8)


def test_find_R0_k2_ell2():
    r = find_R0(2, 2.0)
    assert 3.0 < r.R0 < 3.5
    assert abs(r.residual) < 1e-8
    assert r.roots == [r.R0] and r.bracket == default_bracket(2, 2.0)
    # independent route: the oracle residual changes sign across R0
    lo, hi = r.R0 - 1e-6, r.R0 + 1e-6
    g = [_u_L_oracle(2, 2.0, R, residual_g(R, 2, 2.0).zeta)
         - oracles.u_F_rk4(2, 2.0, R, residual_g(R, 2, 2.0).zeta) for R in (lo, hi)]
    assert g[0] * g[1] < 0
    assert r.as_dict()["R0"] == r.R0


def test_find_R0_insensitive_to_matching_point():
    base = find_R0(2, 2.0)
    half = find_R0(2, 2.0, MatchConfig(zeta_scale=0.125))
    assert abs(half.R0 - base.R0) < 1e-9
    assert half.zeta < base.zeta


def test_seam_is_smooth():
    jumps = seam_jump(find_R0(2, 2.0))
    assert jumps["value_jump"] < 1e-8
    assert jumps["slope_jump"] < 1e-6


def test_inadmissible_and_bad_bracket():
    with pytest.raises(InadmissibleError):
        find_R0(3, 2.0)
    with pytest.raises(BracketError):
        find_R0(1, 3.0, MatchConfig(bracket=(2.0, 3.9)))


def test_no_sign_change_reports_samples():
    with pytest.raises(NoSignChange) as exc:
        find_R0(2, 2.0, MatchConfig(bracket=(3.5, 3.9), n_scan=5))
    assert len(exc.value.samples) == 5


def test_multiple_roots(monkeypatch):
    fake = lambda R, k, ell, cfg=MatchConfig(): dataclasses.replace(
        residual_g(3.3, 2, 2.0), R=R, g=(R - 3.2) * (R - 3.6))
    monkeypatch.setattr(matcher, "residual_g", fake)
    with pytest.raises(MultipleRoots) as exc:
        find_R0(2, 2.0, MatchConfig(bracket=(3.01, 3.9), n_scan=9))
    assert exc.value.roots == pytest.approx([3.2, 3.6], abs=1e-10)
    r = find_R0(2, 2.0, MatchConfig(bracket=(3.01, 3.9), n_scan=9, allow_multiple=True))
    assert r.R0 == pytest.approx(3.2, abs=1e-10)


def test_u_F_branch_rejects_bad_zeta():
    with pytest.raises(ValueError):
        u_F_branch(0.5, params_from_R(2, 2.0, 3.3))
