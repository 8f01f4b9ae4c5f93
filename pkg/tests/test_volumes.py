from fractions import Fraction

import pytest

from higherwp.polyring import GradedPoly, unit_t
from higherwp.volumes import (check_f0_closed_form, check_f1_closed_form, closed_form_coeffs,
                              closed_form_offdiagonal, q2_polynomial, specialize_kappa1,
                              verify_closed_forms, volume_polynomial)


@pytest.mark.parametrize("text,expected", [
    ("s2*t1", {}),
    ("s1*t1", {(1, unit_t(1)): Fraction(2)}),
    ("s1^2", {(2, 0): Fraction(4)}),
    ("3*t3 + s1*s2", {(0, unit_t(3)): Fraction(3)}),
])
def test_specialize_kappa1(text, expected):
    assert specialize_kappa1(GradedPoly.from_text(text)) == expected


def test_q2_rewrite():
    assert q2_polynomial(GradedPoly.from_text("5/3*s1")) == {1: Fraction(-5, 6)}
    assert q2_polynomial(GradedPoly.from_text("7/720*s1^2 + 1/120*s2")) == {2: Fraction(7, 2880)}


def test_closed_form_examples():
    a, c = closed_form_coeffs(0, 1)
    assert a == {1: Fraction(-5, 6)}
    _, c1 = closed_form_coeffs(0, 1)
    assert c1 == {2: Fraction(7, 2880)}
    assert closed_form_offdiagonal(1) == {1: Fraction(-1, 6)}


def test_closed_forms_match_generic():
    rep = verify_closed_forms(6)
    assert rep.passed, rep.failure


def test_series_closed_forms():
    assert check_f0_closed_form(15).passed
    assert check_f1_closed_form(15).passed


@pytest.mark.parametrize("alpha,g,n,expected", [
    (1, 1, 1, {(1, (0,)): Fraction(1, 12), (0, (1,)): Fraction(1, 48)}),
    (1, 0, 4, {(1, (0, 0, 0, 0)): Fraction(2), **{(0, tuple(int(i == j) for i in range(4))): Fraction(1, 2)
                                                  for j in range(4)}}),
    (1, 0, 3, {(0, (0, 0, 0)): Fraction(1)}),
    (0, 1, 1, {(0, (0,)): Fraction(1, 8)}),
])
def test_small_volumes(alpha, g, n, expected):
    assert volume_polynomial(alpha, g, n).terms == expected


def test_genus_two_one_boundary():
    # (4 pi^2 + L^2)(12 pi^2 + L^2)(6960 pi^4 + 384 pi^2 L^2 + 5 L^4) / 2211840
    V = volume_polynomial(1, 2, 1)
    for pi2, L2 in [(1, 0), (0, 1), (2, 3), (Fraction(1, 3), 5)]:
        expected = (4 * pi2 + L2) * (12 * pi2 + L2) * (6960 * pi2 ** 2 + 384 * pi2 * L2 + 5 * L2 ** 2)
        assert V.evaluate(pi2, [L2]) == Fraction(expected, 2211840)


@pytest.mark.parametrize("alpha,g,n", [(1, 1, 2), (1, 0, 5), (0, 1, 3), (0, 2, 2), (1, 1, 3)])
def test_volumes_symmetric(alpha, g, n):
    V = volume_polynomial(alpha, g, n)
    assert V.terms and V.is_symmetric()


def test_volume_text_and_json():
    V = volume_polynomial(1, 1, 1)
    assert V.to_text() == "1/48*L1sq + 1/12*pi2"
    js = V.to_json()
    assert js["variables"] == ["pi2", "L1sq"]
    assert {"exponents": [1, 0], "coeff": "1/12"} in js["terms"]


def test_unstable_volume_rejected():
    with pytest.raises(ValueError):
        volume_polynomial(1, 0, 2)
