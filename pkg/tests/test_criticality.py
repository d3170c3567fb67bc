import math

import numpy as np
import pytest

from implode.criticality import (ELL_STAR_3, E_k_upper, F_value, admissible, beta_gap,
                                 criticality_report, ell0, ell0_Rinf, ell1, ell_minus, ell_plus,
                                 ell_star, epsilon_star, f1, f2, f3, f_functions)
from implode.errors import DomainError, RangeError
from implode.params import params_from_R

TABLE = {
    2: (1.881587232, 9.581746731, 0.937067617),
    3: (1.391124091, 3.045800645, 0.8434706),
    4: (1.2622855, 1.74343538, 0.83114477),
    5: (1.199483016, 1.207995911, 0.831537476),
    6: (1.161595181, 0.92023964, 0.834689316),
}


@pytest.mark.parametrize("k", sorted(TABLE))
def test_table_row(k):
    l1_ref, eps_ref, gap_ref = TABLE[k]
    l1 = ell1(k)
    assert abs(l1 - l1_ref) < 1e-6
    assert abs(epsilon_star(k, l1) - eps_ref) < 1e-6
    assert abs(k - k / l1 - gap_ref) < 1e-6
    assert abs(F_value(k, l1)) < 1e-8
    assert l1 < 2


def test_f_function_examples():
    assert f2(3, 1.0) == 1.0
    assert f1(2, 0.0) == 4.0
    for k in range(2, 7):
        assert f1(k, 24 * k / (3 * k - 2) ** 2) == pytest.approx(k - 2, abs=1e-12)
    out = f_functions(3, eps=0.5, ell=1.5)
    assert out == {"f1": f1(3, 0.5), "f2": f2(3, 1.5), "f3": f3(3, 0.5)}
    with pytest.raises(DomainError):
        f1(2, -1.0)
    with pytest.raises(DomainError):
        f2(2, 0.0)


def test_epsilon_star_examples():
    assert epsilon_star(2, 1.0) == pytest.approx(3.0, rel=1e-12)
    assert epsilon_star(3, 1.0) == pytest.approx(72 / 49, rel=1e-12)
    for k, ell in ((2, 1.5), (4, 1.1), (7, 1.3)):
        e = epsilon_star(k, ell)
        assert f1(k, e) == pytest.approx(f2(k, ell), abs=1e-11)
    with pytest.raises(RangeError):
        epsilon_star(7, 5.0)


def test_F_examples_and_monotonicity():
    assert F_value(2, 1.0) == pytest.approx(4 * 2 * 14 / 4, rel=1e-10)
    assert F_value(2, 3.0) < 0
    for k in range(2, 7):
        top = min(ell_plus(k), 3.0)
        vals = [F_value(k, l) for l in np.linspace(1.0, top, 22)[1:-1]]
        assert all(a > b for a, b in zip(vals, vals[1:])), k


def test_ell0_and_R_inf():
    assert ell0(6) == pytest.approx(3.0, abs=1e-12)
    assert ell0(7) == pytest.approx(1.81, abs=0.01)
    assert all(ell0(k) == math.inf for k in range(1, 6))
    assert ell0_Rinf(5, 3.0) == {"ell0": math.inf, "R_inf": 2.5}
    for k in (6, 7):
        assert ell_plus(k) == pytest.approx(ell0(k), abs=1e-9)


def test_sets_and_markers():
    assert ell1(1) == math.inf
    assert ell_star(1) == ell_star(2) == math.inf
    assert ell_star(4) == ell1(4)
    assert E_k_upper(5) == math.inf
    assert E_k_upper(8) == pytest.approx(32 * 8 / (22 * 2))
    assert ell_minus(2) < 1 < ell_plus(2)
    a = admissible(2, 5.0)
    assert a.in_Kstar and not a.in_K1 and a.failing() == ["K1"]
    assert not admissible(3, 2.0).in_Kstar
    b = admissible(1, 100.0)
    assert b.in_K and b.in_K1 and b.in_Kstar
    assert admissible(2, 1.0).failing() == ["K", "K1", "K*"]
    with pytest.raises(DomainError):
        ell1(0)


def test_beta_gap():
    assert ELL_STAR_3 == pytest.approx(1.14614, abs=1e-5)
    p = params_from_R(4, 1.2, 3.5)
    g = beta_gap(4, 1.2, p)
    assert g.guaranteed and g.sufficient_condition and g.satisfied
    assert g.beta == p.beta and g.ell_plus_1 == 2.2
    for k, ell in ((1, 3.0), (2, 1.5)):
        q = params_from_R(k, ell, 3.5)
        gk = beta_gap(k, ell, q)
        assert not gk.guaranteed and not gk.sufficient_condition


def test_report():
    r = criticality_report(3, 1.2)
    assert r.ell1 == ell1(3) and r.in_Kstar and r.R_inf == r.R_inf_fn(1.2)
    assert r.eps_star_at_ell1 == pytest.approx(3.045800645, abs=1e-6)
    r1 = criticality_report(1)
    assert r1.eps_star_at_ell1 is None and r1.ell is None
    assert r1.as_dict()["k"] == 1
