"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

All comparisons are exact rational equality.
"""
from fractions import Fraction

import pytest

from higherwp.cache import CacheError, TauCache
from higherwp.cutjoin import coeff_A, coeff_A_diagonal, coeff_C, z_max_for_level
from higherwp.polyring import GradedPoly, monomial
from higherwp.recursion import (IntersectionQuery, compute_tau, free_energy, intersection_number, tau_polys,
                                verify_dual, verify_translation, verify_virasoro)
from higherwp.series import build_f
from higherwp.volumes import check_f0_closed_form, check_f1_closed_form, verify_closed_forms
from reference_data import A_DIAGONAL, A_OFFDIAGONAL, C_COEFFS, F_SERIES

Z = 30


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, failures: list[str]) -> None:
        status = "PASS" if not failures else "FAIL"
        line = f"criterion {number} [{status}] {title}"
        if failures:
            line += ": " + "; ".join(failures[:5])
        with capsys.disabled():
            print("\n" + line)
        assert not failures, line
    return emit


def _coefficient_mismatches(Z_max: int, s_extra: int | None = None) -> list[str]:
    bad = []
    for alpha in (0, 1):
        for m, text in A_DIAGONAL[alpha].items():
            cap = None if s_extra is None else m + s_extra
            if coeff_A_diagonal(alpha, m, Z_max=Z_max, s_cap=cap) != GradedPoly.from_text(text):
                bad.append(f"A^{alpha}_{m}")
        for (k, m), text in A_OFFDIAGONAL[alpha].items():
            cap = None if s_extra is None else m + s_extra
            if coeff_A(alpha, k, m, Z_max=Z_max, s_cap=cap) != GradedPoly.from_text(text):
                bad.append(f"A^{alpha}_{k},{m}")
        for k, text in C_COEFFS[alpha].items():
            cap = None if s_extra is None else k + alpha + 1 + s_extra
            if coeff_C(alpha, k, Z_max=Z_max, s_cap=cap) != GradedPoly.from_text(text):
                bad.append(f"C^{alpha}_{k}")
    return bad


def _series_mismatches(Z_max: int, s_cap: int | None = None) -> list[str]:
    bad = []
    for alpha in (0, 1):
        f = build_f(alpha, Z_max, s_cap)
        expected = {1: GradedPoly.one()}
        expected.update({n: GradedPoly.from_text(t) * c for n, (c, t) in F_SERIES[alpha].items()})
        for n in range(1, 10):
            if f[n] != expected.get(n, GradedPoly()):
                bad.append(f"f_{alpha}[z^{n}]")
    return bad


def _classical_values(Z_extra: int = 0, s_extra: int = 0) -> dict[str, Fraction]:
    def F(alpha, P, cap):
        kw = {"Z_max": z_max_for_level(alpha, P) + Z_extra} if Z_extra else {}
        return free_energy(tau_polys(alpha, P, cap + s_extra, **kw))

    F1, F0 = F(1, 1, 0), F(0, 2, 0)
    vals = {
        "<tau0^3>_0 (a=1)": intersection_number(IntersectionQuery(1, (0, 0, 0)), F1).value,
        "<tau1>_1 (a=1)": intersection_number(IntersectionQuery(1, (1,)), F1).value,
        "<tau0>_1 (a=0)": intersection_number(IntersectionQuery(0, (0,)), F0).value,
    }
    f2 = F0[2].at_s_zero()
    vals["F2|s=0 (a=0) / t1^2"] = f2.coeff(monomial(t={1: 2}))
    vals["F2|s=0 (a=0) is a single term"] = Fraction(len(f2))
    return vals


def test_criterion_1_coefficient_tables(report):
    report(1, "cut-and-join coefficient tables reproduced", _coefficient_mismatches(Z))


def test_criterion_2_printed_series(report):
    report(2, "series f_0, f_1 through z^9", _series_mismatches(12))


def test_criterion_3_dual_construction(report):
    bad = []
    for alpha in (0, 1):
        for D in range(4):
            rep = verify_dual(alpha, 3, D)
            if not rep.passed:
                bad.append(f"alpha={alpha} s-degree={D}: {rep.failure}")
    report(3, "factored and dressed operators agree on tau levels <= 3", bad)


def test_criterion_4_virasoro(report):
    bad = []
    for alpha, P in ((1, 6), (0, 8)):
        rep = verify_virasoro(alpha, P)
        if not rep.passed:
            bad.append(f"alpha={alpha}: {rep.failure}")
    report(4, "Virasoro constraints at s = 0 (alpha=1 P=6, alpha=0 P=8)", bad)


def test_criterion_5_translation(report):
    bad = []
    for alpha in (0, 1):
        rep = verify_translation(alpha, 3, 3)
        if not rep.passed:
            bad.append(f"alpha={alpha}: {rep.failure}")
    report(5, "deformed recursion equals translated s = 0 tau (level 3, s-degree 3)", bad)


def test_criterion_6_closed_forms(report):
    bad = []
    for rep in (verify_closed_forms(6), check_f0_closed_form(15), check_f1_closed_form(15)):
        if not rep.passed:
            bad.append(f"{rep.suite}: {rep.failure}")
    report(6, "Euler/Bernoulli closed forms for m <= 6", bad)


def test_criterion_7_classical_values(report):
    vals = _classical_values()
    expected = {
        "<tau0^3>_0 (a=1)": Fraction(1),
        "<tau1>_1 (a=1)": Fraction(1, 24),
        "<tau0>_1 (a=0)": Fraction(1, 8),
        "F2|s=0 (a=0) / t1^2": Fraction(1, 16),
        "F2|s=0 (a=0) is a single term": Fraction(1),
    }
    bad = [f"{k} = {vals[k]} (expected {v})" for k, v in expected.items() if vals[k] != v]
    report(7, "classical anchor values", bad)


def test_criterion_8_homogeneity(report, tmp_path):
    bad = []
    cache = TauCache(tmp_path)
    for alpha, P, D in ((1, 6, 0), (0, 8, 0), (0, 6, 0), (1, 4, 0), (0, 3, 3), (1, 3, 3)):
        for lv in compute_tau(alpha, P, D, cache=cache):
            if not lv.value.is_homogeneous((2 * alpha + 1) * lv.level):
                bad.append(f"alpha={alpha} level={lv.level} s-degree={D}")
    try:
        cache.store(0, 0, [GradedPoly.one(), GradedPoly.from_text("t1 + t3")])
        bad.append("cache accepted a non-homogeneous level")
    except CacheError:
        pass
    report(8, "every tau level homogeneous, enforced on cache writes", bad)


def test_criterion_9_truncation_stability(report):
    bad = []
    bad += [f"coefficients: {x}" for x in _coefficient_mismatches(Z + 10, s_extra=1)]
    bad += [f"series: {x}" for x in _series_mismatches(22, s_cap=5)]
    for alpha, P, D in ((0, 3, 3), (1, 3, 3), (1, 6, 0), (0, 8, 0)):
        base = tau_polys(alpha, P, D)
        wider = tau_polys(alpha, P, D + 1, Z_max=z_max_for_level(alpha, P) + 10)
        if [w.truncate_s(D) for w in wider] != base:
            bad.append(f"tau alpha={alpha} P={P} s-degree={D}")
    for alpha in (0, 1):
        if not verify_translation(alpha, 3, 3, Z_max=z_max_for_level(alpha, 6) + 10).passed:
            bad.append(f"translation alpha={alpha} with wider Z")
    if not verify_closed_forms(6, Z_max=50).passed:
        bad.append("closed forms with wider Z")
    if _classical_values(Z_extra=10, s_extra=1) != _classical_values():
        bad.append("classical values")
    report(9, "results unchanged with Z_max + 10 and s-degree cap + 1", bad)
