from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from higherwp.cutjoin import apply_J, apply_Lo
from higherwp.polyring import GradedPoly, monomial
from higherwp.recursion import (InsufficientLevels, IntersectionQuery, TauLevel, compute_tau, exp_levels,
                                free_energy, intersection_number, required_level, tau_polys, translated_tau,
                                verify_translation, verify_virasoro, virasoro_operator)

P = GradedPoly.from_text


def test_low_levels_alpha0():
    tau = tau_polys(0, 2, 0)
    assert tau[0] == 1
    assert tau[1] == P("1/8*t1")
    assert tau[2] == P("9/128*t1^2")


def test_low_levels_alpha1():
    tau = tau_polys(1, 2, 0)
    assert tau[1] == P("1/6*t1^3 + 1/8*t3")
    assert tau[2] == P("5/8*t1*t5 + 25/48*t1^3*t3 + 1/72*t1^6 + 25/128*t3^2")


@pytest.mark.parametrize("alpha,P_,cap", [(0, 6, 0), (1, 4, 0), (0, 3, 2), (1, 3, 2), (1, 2, None)])
def test_levels_homogeneous(alpha, P_, cap):
    for lv in compute_tau(alpha, P_, cap):
        assert lv.value.is_homogeneous((2 * alpha + 1) * lv.level)


def test_tau_level_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        TauLevel(0, 1, P("t1 + t3"), 1, 0)


def test_free_energy_values():
    F = free_energy(tau_polys(0, 2, 0))
    assert F[1] == P("1/8*t1")
    assert F[2] == P("1/16*t1^2")


@pytest.mark.parametrize("alpha", [0, 1])
def test_exp_log_round_trip(alpha):
    tau = tau_polys(alpha, 4, 1)
    assert exp_levels(free_energy(tau)) == tau


@pytest.mark.parametrize("alpha,psi,kappa,value,genus", [
    (1, (0, 0, 0), (), Fraction(1), 0),
    (1, (1,), (), Fraction(1, 24), 1),
    (1, (0,), (1,), Fraction(1, 24), 1),
    (1, (4,), (), Fraction(1, 1152), 2),
    (1, (), (3,), Fraction(1, 1152), 2),
    (1, (), (1, 1, 1), Fraction(43, 2880), 2),
    (1, (0, 0, 0, 0), (1,), Fraction(1), 0),
    (1, (1, 1), (), Fraction(1, 24), 1),
    (1, (0, 0, 0, 1), (), Fraction(1), 0),
    (0, (0,), (), Fraction(1, 8), 1),
    (0, (0, 0), (), Fraction(1, 8), 1),
    (0, (1,), (), Fraction(3, 128), 2),
])
def test_intersection_numbers(alpha, psi, kappa, value, genus):
    res = intersection_number(IntersectionQuery(alpha, psi, kappa))
    assert res.status == "ok"
    assert res.value == value
    assert res.genus == genus


@given(st.sampled_from([0, 1]), st.lists(st.integers(0, 4), max_size=3), st.lists(st.integers(1, 3), max_size=2))
@settings(max_examples=60, deadline=None)
def test_dimension_constraint(alpha, psi, kappa):
    if not psi and not kappa:
        return
    q = IntersectionQuery(alpha, psi, kappa)
    g = q.genus()
    stable = g.denominator == 1 and g >= 0 and 2 * g - 2 + len(psi) > 0
    if stable:
        assert required_level(q)[0] == 2 * g - 2 + len(psi)
    else:
        res = intersection_number(q, [])
        assert res.value == 0 and res.status == "dimension mismatch" and res.level is None


def test_insufficient_levels_message():
    q = IntersectionQuery(1, (4,))
    with pytest.raises(InsufficientLevels, match="level 3"):
        intersection_number(q, free_energy(tau_polys(1, 1, 0)), s_degree_cap=0)


@pytest.mark.parametrize("psi,kappa", [((), ()), ((-1,), ()), ((0,), (0,))])
def test_invalid_queries(psi, kappa):
    with pytest.raises(ValueError):
        IntersectionQuery(1, psi, kappa)


def test_virasoro_hand_check():
    tau = tau_polys(0, 2, 0)
    assert not virasoro_operator(0, 0, 1, tau)
    assert not virasoro_operator(0, 0, 0, tau)


@pytest.mark.parametrize("alpha,P_", [(0, 6), (1, 4)])
def test_virasoro_suite(alpha, P_):
    rep = verify_virasoro(alpha, P_)
    assert rep.passed and rep.checked > 0


def test_virasoro_detects_corruption():
    tau = tau_polys(1, 3, 0)
    tau[2] = tau[2] + P("1/1000*t1^6")
    rep = verify_virasoro(1, 3, tau)
    assert not rep.passed
    assert rep.failure["level"] in (1, 2)


def _constraint(alpha, k):
    def op(p):
        out = apply_Lo(2 * k, p) * Fraction(1, 2) - apply_J(2 * k + 1 + 2 * alpha, p) * Fraction(1, 2)
        return out + p * Fraction(1, 16) if k == 0 else out
    return op


@given(st.sampled_from([0, 1]), st.integers(-1, 3), st.integers(-1, 3),
       st.lists(st.sampled_from([1, 3, 5, 7]), min_size=0, max_size=3))
@settings(max_examples=60, deadline=None)
def test_constraint_operators_close(alpha, k, m, ts):
    # [L_k, L_m] = (k - m) L_{k+m}, with hbar set to 1
    if k < -alpha or m < -alpha:
        return
    p = GradedPoly.from_monomial(monomial(t={i: ts.count(i) for i in set(ts)}))
    Lk, Lm, Lkm = _constraint(alpha, k), _constraint(alpha, m), _constraint(alpha, k + m)
    assert Lk(Lm(p)) - Lm(Lk(p)) == Lkm(p) * (k - m)


@pytest.mark.parametrize("alpha", [0, 1])
def test_translation_trivial_cap(alpha):
    assert verify_translation(alpha, 2, 0).passed


@pytest.mark.parametrize("alpha", [0, 1])
@pytest.mark.parametrize("D", [1, 2])
def test_translation_small(alpha, D):
    assert verify_translation(alpha, 2, D).passed


def test_translation_needs_enough_levels():
    with pytest.raises(ValueError):
        translated_tau(0, tau_polys(0, 2, 0), 2, 1)


def test_kappa_number_two_ways():
    moved = translated_tau(1, tau_polys(1, 2, 0), 1, 1)
    via_translation = free_energy(moved)[1].coeff(monomial(t={1: 1}, s={1: 1}))
    direct = intersection_number(IntersectionQuery(1, (0,), (1,))).value
    assert via_translation == direct == Fraction(1, 24)
