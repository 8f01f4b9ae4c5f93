"""The kappa_1 specialization: closed-form coefficient checks and volume polynomials.

``pi^2`` is a formal symbol throughout.  Polynomials in it are dicts
``{(pi2 exponent, packed t-monomial): Fraction}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

from .cutjoin import coeff_A, coeff_A_diagonal, coeff_C
from .exact import bernoulli_at_half, euler_number
from .polyring import GradedPoly, monomial_exponents
from .recursion import (IntersectionQuery, InsufficientLevels, VerificationReport, free_energy,
                        intersection_number, tau_polys)
from .series import build_f

__all__ = [
    "specialize_kappa1",
    "q2_polynomial",
    "closed_form_coeffs",
    "closed_form_offdiagonal",
    "verify_closed_forms",
    "check_f0_closed_form",
    "check_f1_closed_form",
    "VolumePolynomial",
    "volume_level",
    "volume_polynomial",
]


def specialize_kappa1(poly: GradedPoly) -> dict[tuple[int, int], Fraction]:
    """``s_1 -> 2 pi^2`` and ``s_j -> 0`` for j >= 2."""
    out: dict[tuple[int, int], Fraction] = {}
    for tm, spoly in poly.split_t_s().items():
        for sm, c in spoly.terms.items():
            _, s = monomial_exponents(sm)
            if any(j != 1 for j, _ in s):
                continue
            e = s[0][1] if s else 0
            key = (e, tm)
            v = out.get(key, Fraction(0)) + c * 2 ** e
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def q2_polynomial(poly: GradedPoly) -> dict[int, Fraction]:
    """Specialize an s-polynomial at ``s_k = s delta_{k,1}`` and rewrite in ``q^2 = -2 s``.

    Returns ``{power of q^2: coefficient}``.
    """
    if not poly.is_s_only():
        raise ValueError("expected a polynomial in the s-variables only")
    out: dict[int, Fraction] = {}
    for m, c in poly.restrict_s([1]).terms.items():
        _, s = monomial_exponents(m)
        e = s[0][1] if s else 0
        out[e] = out.get(e, Fraction(0)) + c * Fraction(-1, 2) ** e
    return {e: c for e, c in sorted(out.items()) if c}


def closed_form_coeffs(alpha: int, m: int) -> tuple[dict[int, Fraction], dict[int, Fraction]]:
    """``(A_m, C_m)`` at ``s_k = s delta_{k,1}`` as ``{power of q^2: coefficient}``.

    For alpha = 1 only ``A_m`` has a closed form; ``C_m`` is returned empty.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if alpha == 0:
        a = -euler_number(2 * m + 2) / factorial(2 * m + 1)
        c = Fraction(2) ** (2 * m + 2) * bernoulli_at_half(2 * m + 2) / (8 * factorial(2 * m + 2))
        return _nz({m: a}), _nz({m + 1: c})
    if alpha == 1:
        a = -12 * Fraction(2) ** (2 * m) * bernoulli_at_half(2 * m + 2) / factorial(2 * m + 1)
        return _nz({m: a}), {}
    raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")


def closed_form_offdiagonal(m: int) -> dict[int, Fraction]:
    """``A^0_{m-1,m}`` at ``s_k = s delta_{k,1}``.

    Writing ``(h' h^-2)_+ = h' h^-2 - z^-2`` splits the residue into ``A_m``
    and ``res w^-2m / (f f')``; with ``f f' = sinh(2qw) / (2q)`` the second
    piece is ``2^(4m) B_2m(1/2) q^2m / (2m)!``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    c = -(Fraction(2) ** (4 * m) * bernoulli_at_half(2 * m)
          + euler_number(2 * m + 2) / (2 * m + 1)) / factorial(2 * m)
    return _nz({m: c})


def _nz(d: dict[int, Fraction]) -> dict[int, Fraction]:
    return {k: v for k, v in d.items() if v}


def verify_closed_forms(max_m: int = 6, Z_max: int = 40) -> VerificationReport:
    """Compare every closed form with the generic residue coefficients for ``m <= max_m``."""
    rep = VerificationReport("closedform", -1, {"max_m": max_m, "z_max": Z_max})
    for alpha in (0, 1):
        for m in range(max_m + 1):
            a_cf, c_cf = closed_form_coeffs(alpha, m)
            checks = [("A", a_cf, coeff_A_diagonal(alpha, m, Z_max=Z_max, s_cap=m + 1))]
            if alpha == 0:
                checks.append(("C", c_cf, coeff_C(0, m, Z_max=Z_max, s_cap=m + 2)))
                if m >= 1:
                    checks.append(("A_offdiag", closed_form_offdiagonal(m),
                                   coeff_A(0, m - 1, m, Z_max=Z_max, s_cap=m + 1)))
            for name, expected, generic in checks:
                got = q2_polynomial(generic)
                ok = got == expected
                rep.checked += 1
                rep.details.append({"alpha": alpha, "coefficient": name, "m": m, "ok": ok})
                if not ok:
                    rep.fail(alpha=alpha, coefficient=name, m=m,
                             closed_form={str(k): str(v) for k, v in expected.items()},
                             generic={str(k): str(v) for k, v in got.items()})
    return rep


def _f_specialized(alpha: int, Z_max: int) -> dict[int, dict[int, Fraction]]:
    f = build_f(alpha, Z_max + 1, Z_max)
    return {n: q2_polynomial(f[n]) for n in range(1, Z_max + 1)}


def check_f0_closed_form(Z_max: int = 15) -> VerificationReport:
    """``f_0`` at ``s_k = s delta_{k,1}`` against ``sinh(qz)/q``."""
    if Z_max < 9:
        raise ValueError("Z_max must be >= 9")
    rep = VerificationReport("f0_sinh", 0, {"z_max": Z_max})
    got = _f_specialized(0, Z_max)
    for n in range(1, Z_max + 1):
        expected = {(n - 1) // 2: Fraction(1, factorial(n))} if n % 2 else {}
        rep.checked += 1
        if got[n] != expected:
            rep.fail(power=n, expected=str(expected), got=str(got[n]))
    return rep


def check_f1_closed_form(Z_max: int = 15) -> VerificationReport:
    """``f_1^3`` at ``s_k = s delta_{k,1}`` against ``3 (qz cosh(qz) - sinh(qz)) / q^3``."""
    rep = VerificationReport("f1_cube", 1, {"z_max": Z_max})
    f = build_f(1, Z_max + 1, Z_max)
    cube = f * f * f
    for n in range(1, Z_max + 1):
        got = q2_polynomial(cube[n])
        if n % 2 and n >= 3:
            k = (n - 1) // 2
            # 3 (1/(2k)! - 1/(2k+1)!) q^(2k-2) = 6k q^(2k-2) / (2k+1)!
            expected = {k - 1: Fraction(6 * k, factorial(2 * k + 1))}
        else:
            expected = {}
        rep.checked += 1
        if got != expected:
            rep.fail(power=n, expected=str(expected), got=str(got))
    return rep


# ---------------------------------------------------------------------------
# volume polynomials

@dataclass(frozen=True)
class VolumePolynomial:
    """``V^alpha_{g,n}`` as ``{(pi2 exponent, (L1sq exponent, ..., Lnsq exponent)): coefficient}``."""

    alpha: int
    g: int
    n: int
    terms: dict

    def is_symmetric(self) -> bool:
        for (e, ls), c in self.terms.items():
            for perm in set(permutations(ls)):
                if self.terms.get((e, perm)) != c:
                    return False
        return True

    def evaluate(self, pi2=0, lengths_sq=None) -> Fraction:
        lengths_sq = lengths_sq or [0] * self.n
        total = Fraction(0)
        for (e, ls), c in self.terms.items():
            term = c * Fraction(pi2) ** e
            for x, k in zip(lengths_sq, ls):
                term *= Fraction(x) ** k
            total += term
        return total

    def _sorted(self):
        return sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + sum(kv[0][1])), tuple(-x for x in kv[0][1]), kv[0][0]))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for i, ((e, ls), c) in enumerate(self._sorted()):
            vars_ = ([("pi2", e)] if e else []) + [(f"L{j + 1}sq", k) for j, k in enumerate(ls) if k]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in vars_)
            a = abs(c)
            num = str(a) if a.denominator != 1 else str(a.numerator)
            body = num if not mono else (mono if a == 1 else f"{num}*{mono}")
            if i == 0:
                chunks.append(body if c > 0 else "-" + body)
            else:
                chunks.append(f" {'+' if c > 0 else '-'} {body}")
        return "".join(chunks)

    def to_json(self) -> dict:
        variables = ["pi2"] + [f"L{j + 1}sq" for j in range(self.n)]
        return {
            "alpha": self.alpha,
            "genus": self.g,
            "npoints": self.n,
            "variables": variables,
            "terms": [{"exponents": [e, *ls], "coeff": _fmt(c)} for (e, ls), c in self._sorted()],
        }

    def __str__(self) -> str:
        return self.to_text()


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def volume_level(alpha: int, g: int, n: int) -> tuple[int, int]:
    """(tau level, s-weight) needed for ``V_{g,n}``: all of level ``2g-2+n`` that has n t-factors."""
    p = 2 * g - 2 + n
    return p, max(((2 * alpha + 1) * p - n) // 2, 0)


def volume_polynomial(alpha: int, g: int, n: int, F: list[GradedPoly] | None = None, *,
                      s_degree_cap: int | None = None) -> VolumePolynomial:
    """``sum <kappa_1^m prod tau_{a_i}> (2 pi^2)^m / m! prod L_i^(2 a_i) / (2^a_i a_i!)``.

    The sum runs over ordered tuples ``(a_1, ..., a_n)``; each bracket is read
    from the n-point part of ``F`` at level ``2g - 2 + n``.
    """
    if alpha not in (0, 1):
        raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")
    if n < 1 or g < 0 or 2 * g - 2 + n <= 0:
        raise ValueError(f"(g, n) = ({g}, {n}) is not stable with n >= 1")
    p = 2 * g - 2 + n
    # degree budget of level p: 2 sum a + n + 2 m = (2a+1) p
    budget = (2 * alpha + 1) * p - n
    if budget < 0 or budget % 2:
        return VolumePolynomial(alpha, g, n, {})
    half = budget // 2
    if F is None:
        F = free_energy(tau_polys(alpha, p, half))
        s_degree_cap = half
    if len(F) - 1 < p or (s_degree_cap is not None and s_degree_cap < half):
        raise InsufficientLevels(p, half, len(F) - 1, s_degree_cap)
    terms = {}
    for tup in _compositions(half, n):
        m = half - sum(tup)
        kappa = (1,) * m
        # genus check: psi + kappa must land at genus g
        q = IntersectionQuery(alpha, tup, kappa)
        if q.genus() != g:
            continue
        val = intersection_number(q, F, s_degree_cap=s_degree_cap).value
        if not val:
            continue
        coef = val * Fraction(2) ** m / factorial(m)
        for a in tup:
            coef /= 2 ** a * factorial(a)
        terms[(m, tup)] = coef
    return VolumePolynomial(alpha, g, n, terms)


def _compositions(total_max: int, n: int):
    """All n-tuples of non-negative ints with sum <= total_max."""
    if n == 0:
        yield ()
        return
    for a in range(total_max + 1):
        for rest in _compositions(total_max - a, n - 1):
            yield (a, *rest)
