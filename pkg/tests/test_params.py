import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from implode.errors import BracketError, DomainError, PoleError
from implode.params import (b_constants, derive_params, gamma_from_R, lem8_closed_forms,
                            p0_quadratic, params_from_R, r_inf, ratio_R, sonic_data)


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def test_derive_params_k2_ell2_gamma2():
    p = derive_params(2, 2.0, 2.0)
    assert (p.eps, p.A, p.B) == (7.0, 8.0, 3.0)
    assert p.m == pytest.approx(2 / 3, rel=1e-15)
    assert p.beta == pytest.approx(1.0, rel=1e-15)


def test_derive_params_k3():
    p = derive_params(3, 2.0, 2.0)
    assert p.m == 1.0 and p.beta == 1.5 and p.B == 5.0


@pytest.mark.parametrize("args", [(1, 4.0, 0.5), (0, 2.0, 2.0), (2, 1.0, 2.0), (2.5, 2.0, 2.0)])
def test_derive_params_rejects(args):
    with pytest.raises(DomainError):
        derive_params(*args)


def test_ratio_R_examples():
    assert ratio_R(derive_params(2, 2.0, 2.0)) == pytest.approx(3.5, abs=1e-13)
    R = ratio_R(derive_params(3, 2.0, 2.0))
    assert (R + 1) ** 2 / R == pytest.approx(441 / 84, rel=1e-13)
    # brute-force scan of the monotone quantity (R+1)^2/R on (1, 100)
    grid = np.linspace(1.0 + 1e-9, 100.0, 2_000_001)
    s = (grid + 1) ** 2 / grid
    assert R == pytest.approx(grid[np.argmin(abs(s - 5.25))], abs=1e-4)


def test_ratio_R_blows_up_near_lower_gamma():
    ell = 2.0
    Rs = [ratio_R(derive_params(2, ell, 1 / math.sqrt(ell) + d)) for d in (1e-2, 1e-4, 1e-6)]
    assert Rs[0] < Rs[1] < Rs[2] and Rs[2] > 1e3


def test_gamma_from_R_examples():
    assert gamma_from_R(2, 2.0, 3.5) == pytest.approx(2.0, abs=1e-12)
    assert ratio_R(derive_params(2, 2.0, gamma_from_R(2, 2.0, 3.5))) == pytest.approx(3.5, abs=1e-12)
    assert r_inf(5, 3.0) == 2.5
    with pytest.raises(BracketError):
        gamma_from_R(5, 3.0, 2.0)


def test_gamma_from_R_matches_bisection_oracle():
    for k, ell, R in [(1, 3.0, 3.2), (2, 5.0, 3.6), (4, 1.2, 3.1), (6, 1.1, 3.9)]:
        assert gamma_from_R(k, ell, R) == pytest.approx(oracles.gamma_of_R(k, ell, R), rel=1e-11)


def test_sonic_data_k2_ell2():
    s = sonic_data(derive_params(2, 2.0, 2.0))
    lp, lm = oracles.char_roots(oracles.params(2, 2.0, 2.0))
    assert (s.lam_plus, s.lam_minus) == pytest.approx((lp, lm), rel=1e-14)
    assert (s.lam_plus, s.lam_minus, s.delta) == pytest.approx((28.0, 8.0, 8.0), rel=1e-14)
    assert s.R == pytest.approx(3.5, rel=1e-14)
    assert s.a1 == pytest.approx(14.0, rel=1e-14)
    # the other root of p0 is -6
    assert p0_quadratic(derive_params(2, 2.0, 2.0), -6.0) == pytest.approx(0.0, abs=1e-12)


def test_b_constants_exact_fractions():
    p = params_from_R(2, 2.0, 3.5)
    c = b_constants(p, sonic_data(p))
    exact = dict(a2=Fraction(49, 3), B1=Fraction(82, 3), B2=Fraction(28, 3), a3=Fraction(1036, 9))
    for name, val in exact.items():
        assert rel(getattr(c, name), float(val)) < 1e-12, name
    # second route for a2 and a direct evaluation of the a4 recurrence
    assert rel(c.a2_alt, 49 / 3) < 1e-12
    a4 = (Fraction(28, 3) * Fraction(1036, 9) + 4 * Fraction(49, 3) * Fraction(52, 3)) / Fraction(-4)
    assert rel(c.a4, float(a4)) < 1e-10
    assert c.M == pytest.approx((1036 / 9) ** 2 / (4 * 49 / 3), rel=1e-12)


@pytest.mark.parametrize("R", [2.0, 3.0, 4.0, 3.0 + 5e-9])
def test_b_constants_poles(R):
    p = params_from_R(2, 2.0, 3.5)
    s = sonic_data(p)
    with pytest.raises(PoleError):
        b_constants(p, s.__class__(**{**s.__dict__, "R": R}))


def test_lem8_values():
    v = lem8_closed_forms(2.0, 3.5)
    for got, want in ((v.eps, 7), (v.delta, 8), (v.a1, 14), (v.A, 8), (v.a2, 49 / 3)):
        assert rel(got, want) < 1e-12


def test_lem8_limit_ell_to_one():
    R = 3.3
    v = lem8_closed_forms(1.0 + 1e-12, R)
    assert v.eps == pytest.approx(4 * R / (R - 1) ** 2, rel=1e-9)
    assert v.A == pytest.approx(4.0, rel=1e-9)


def test_lem8_rejects():
    with pytest.raises(DomainError):
        lem8_closed_forms(1.0, 3.0)
    with pytest.raises(DomainError):
        lem8_closed_forms(2.0, 2.0)


def test_lem8_grid_agreement():
    for ell in np.linspace(1.2, 5.0, 20):
        for R in np.linspace(2.1, 3.9, 20):
            p = params_from_R(2, ell, R)
            s = sonic_data(p)
            v = lem8_closed_forms(ell, R)
            for got, want in ((p.eps, v.eps), (s.delta, v.delta), (s.a1, v.a1), (p.A, v.A)):
                assert rel(got, want) < 1e-10
            if abs(R - 3.0) > 1e-6:
                assert rel(b_constants(p, s).a2, v.a2) < 1e-10


def test_monotonicity_spot_checks():
    Rs = 100 / 27
    ratios = []
    for ell in (1.5, 2.0, 3.0, 5.0, 10.0):
        p = params_from_R(2, ell, Rs)
        s = sonic_data(p)
        c = b_constants(p, s)
        ratios.append((c.B2 / c.a2, s.delta / c.a2))
    assert all(a[0] > b[0] and a[1] > b[1] for a, b in zip(ratios, ratios[1:]))
    a2s = [b_constants(params_from_R(2, 2.0, R), sonic_data(params_from_R(2, 2.0, R))).a2
           for R in np.linspace(2.1, 3.9, 15) if abs(R - 3.0) > 1e-6]
    assert all(x > y for x, y in zip(a2s, a2s[1:]))


admissible_triples = st.tuples(
    st.integers(1, 6), st.floats(1.05, 5.0), st.floats(0.1, 6.0)
).map(lambda t: (t[0], t[1], max(r_inf(t[0], t[1]), 2.0) + t[2]))


@settings(max_examples=150, deadline=None)
@given(admissible_triples)
def test_sonic_identities(t):
    k, ell, R = t
    p = params_from_R(k, ell, R)
    s = sonic_data(p)
    e = p.eps
    assert rel(R * s.delta ** 2, 2 * k * e * (1 + e)) < 1e-12
    assert rel((R + 1) * s.delta, (k + 2) * e + p.A) < 1e-12
    assert abs(p0_quadratic(p, s.a1)) <= 1e-10 * s.a1 ** 2
    assert s.a1 > 2 * (1 + ell * p.gamma)
    assert abs(s.a1 + 2 * e - R * s.delta) <= 1e-12 * R * s.delta
    lhs = (k + 2) * math.sqrt(1 + e)
    rhs = (1 + R) * math.sqrt(2 * k * e / R) + (k - 2 * ell) / math.sqrt(ell)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, lhs)
    assert s.a1 == pytest.approx(oracles.a1_of(oracles.params(k, ell, p.gamma)), rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(admissible_triples)
def test_gamma_R_roundtrip(t):
    k, ell, R = t
    if R > 10:
        return
    assert ratio_R(derive_params(k, ell, gamma_from_R(k, ell, R))) == pytest.approx(R, rel=1e-10)
