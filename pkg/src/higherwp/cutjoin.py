"""Cut-and-join operators acting on polynomials in the odd times.

Two independent constructions of the deformed operator ``W_alpha(s)`` live here:

* :func:`assemble_W` / :func:`apply_W` use the residue coefficients
  ``A_{k,m}`` and ``C_k`` and apply ``sum A_{k,m} J_{2m-2k-1} L_{2k-2a} + sum C_k J_{2k+1}``
  with the products kept factored;
* :func:`apply_W_dressed` conjugates the undeformed cubic operator by
  replacing every current ``J_k`` with ``sum_m rho[k, m] J_m``.

They share nothing but the series ``f_alpha`` and the elementary actions of
``J_k``, which is what makes their agreement a meaningful check.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .polyring import GradedPoly, d_dt, monomial_exponents, mul_t, unit_t, _mono_mul
from .series import ParamSeries, build_f, build_h, power_laurent, rho

__all__ = [
    "apply_J",
    "apply_Lo",
    "coeff_A",
    "coeff_A_diagonal",
    "coeff_C",
    "OperatorTerm",
    "CutJoinOperator",
    "assemble_W",
    "apply_W",
    "apply_W_dressed",
    "z_max_for_level",
    "index_bounds",
]


def apply_J(k: int, p: GradedPoly) -> GradedPoly:
    """Heisenberg mode: ``d/dt_k`` for k > 0, multiplication by ``|k| t_|k|`` for k < 0."""
    if k % 2 == 0:
        if k == 0:
            return GradedPoly({}, p.cap)
        raise ValueError(f"only odd current modes act on the odd times, got J_{k}")
    if k > 0:
        return d_dt(k, p)
    return mul_t(-k, p)


def apply_Lo(n: int, p: GradedPoly) -> GradedPoly:
    """Mode ``n`` of ``1/2 :J(z)^2:`` with zero normal-ordering constant.

    Only the finitely many pieces that can act on ``p`` are enumerated.
    """
    if n % 2:
        raise ValueError(f"L^o_n needs even n, got {n}")
    create = [(c, -n - c) for c in range(1, -n, 2)] if n <= -2 else []
    create_units = [(unit_t(c) + unit_t(d), Fraction(c * d, 2)) for c, d in create]
    out: dict[int, Fraction] = defaultdict(Fraction)
    for m, coef in p.terms.items():
        t, _ = monomial_exponents(m)
        if n >= 2 and t:
            exps = dict(t)
            for a, ea in t:
                b = n - a
                if b < 1:
                    break
                eb = exps.get(b)
                if not eb:
                    continue
                w = ea * (ea - 1) if a == b else ea * eb
                if w:
                    out[m - unit_t(a) - unit_t(b)] += coef * Fraction(w, 2)
        for j, ej in t:
            c = j - n
            if c >= 1:
                out[_mono_mul(m - unit_t(j), unit_t(c))] += coef * (ej * c)
        for u, w in create_units:
            out[_mono_mul(m, u)] += coef * w
    return GradedPoly(out)


# ---------------------------------------------------------------------------
# residue coefficients

def z_max_for_level(alpha: int, P: int) -> int:
    """Conservative z-truncation for the coefficients needed at recursion level P."""
    return 2 * (2 * alpha + 1) * P + 4 * alpha + 10


def index_bounds(alpha: int, degree: int) -> tuple[int, int, int]:
    """Largest (k, m) of the A-sum and largest k of the C-sum that can act on degree ``degree``.

    For ``degree = (2a+1)(P-1)`` these are the bounds of the level-P recursion.
    """
    kmax = (degree + 2 * alpha) // 2
    mmax = (degree + 2 * alpha + 1) // 2
    cmax = (degree - 1) // 2
    return kmax, mmax, cmax


class _Residues:
    """Memoized powers of ``h``, ``h'``, ``f`` and ``f'`` for one (alpha, Z, cap)."""

    def __init__(self, alpha: int, f: ParamSeries, h: ParamSeries):
        self.alpha = alpha
        self.f = f
        self.h = h
        self.hp = h.derivative()
        self.fp = f.derivative()
        self._hpow: dict[int, ParamSeries] = {}
        self._fpow: dict[int, ParamSeries] = {}
        self._fp_inv2 = None

    def hpow(self, j: int) -> ParamSeries:
        if j not in self._hpow:
            self._hpow[j] = power_laurent(self.h, j)
        return self._hpow[j]

    def fpow(self, j: int) -> ParamSeries:
        if j not in self._fpow:
            self._fpow[j] = power_laurent(self.f, j)
        return self._fpow[j]

    def fp_inv2(self) -> ParamSeries:
        if self._fp_inv2 is None:
            self._fp_inv2 = power_laurent(self.fp, -2)
        return self._fp_inv2

    def A_general(self, k: int, m: int):
        a = self.alpha
        left = (self.hp * self.hpow(2 * k - 2 * m)).plus_part()
        right = self.hp * self.hp * self.hpow(2 * a - 2 * k - 2)
        return (left * right).shift(1 - 2 * a).residue()

    def A_diagonal(self, m: int):
        a = self.alpha
        g = self.fp_inv2() * self.fpow(1 - 2 * a)
        return g.shift(2 * a - 2 * m - 2).residue()

    def C(self, k: int):
        a = self.alpha
        val = self.fpow(-(2 * a + 1)).shift(-2 * k - 2).residue() * Fraction(1, 8)
        if a == 1:
            s1 = GradedPoly.s(1, Fraction(1, 30))
            val = val + self.fpow(-1).shift(-2 * k - 2).residue() * s1
            if self.f.cap is not None:
                val = val.truncate_s(self.f.cap)
        return val


@lru_cache(maxsize=None)
def _residues(alpha: int, Z: int, s_cap: int | None) -> _Residues:
    return _Residues(alpha, build_f(alpha, Z, s_cap), build_h(alpha, Z, s_cap))


def _residues_for(alpha, h, f) -> _Residues:
    if h is None and f is None:
        raise ValueError("need the series f (and h) or a truncation order")
    if f is None:
        f = h.revert()
    if h is None:
        h = f.revert()
    return _Residues(alpha, f, h)


def coeff_A(alpha: int, k: int, m: int, h: ParamSeries | None = None, f: ParamSeries | None = None,
            *, Z_max: int | None = None, s_cap: int | None = None) -> GradedPoly:
    """``A_{k,m} = res z^(1-2a) (h' h^(2k-2m))_+ h'^2 h^(2a-2k-2)``.

    For ``k >= m`` the value is also computed from ``f`` alone and the two
    routes must agree.
    """
    if k < 0 or m < 0:
        raise ValueError("A_{k,m} needs k, m >= 0")
    r = _residues(alpha, Z_max, s_cap) if Z_max is not None else _residues_for(alpha, h, f)
    val = r.A_general(k, m)
    if k >= m:
        other = r.A_diagonal(m)
        if other != val:
            raise ArithmeticError(f"A_{{{k},{m}}}: residue routes disagree: {val} vs {other}")
    return val


def coeff_A_diagonal(alpha: int, m: int, f: ParamSeries | None = None, *, Z_max: int | None = None,
                     s_cap: int | None = None) -> GradedPoly:
    """``A_m = res z^(2a-2m-2) / (f'^2 f^(2a-1))``, the k-independent value for k >= m."""
    r = _residues(alpha, Z_max, s_cap) if Z_max is not None else _residues_for(alpha, None, f)
    return r.A_diagonal(m)


def coeff_C(alpha: int, k: int, f: ParamSeries | None = None, *, Z_max: int | None = None,
            s_cap: int | None = None) -> GradedPoly:
    """``C_k = 1/8 res 1/(f^(2a+1) z^(2k+2)) + [a=1] s_1/30 res 1/(f z^(2k+2))``."""
    if k < -alpha - 1:
        raise ValueError(f"C_k starts at k = {-alpha - 1}")
    r = _residues(alpha, Z_max, s_cap) if Z_max is not None else _residues_for(alpha, None, f)
    return r.C(k)


# ---------------------------------------------------------------------------
# operators

@dataclass(eq=False)
class OperatorTerm:
    """``coeff * prod J_{-c} * prod J_a`` with creations ``c`` left of annihilations ``a``."""

    coeff: GradedPoly
    creations: tuple[int, ...]
    annihilations: tuple[int, ...]

    def apply(self, p: GradedPoly) -> GradedPoly:
        for a in self.annihilations:
            p = d_dt(a, p)
        for c in self.creations:
            p = mul_t(c, p)
        return p * self.coeff


def _lo_terms(n: int, max_index: int) -> dict[tuple, Fraction]:
    """Normal-ordered pieces of ``L^o_n`` with every index <= max_index."""
    out: dict[tuple, Fraction] = defaultdict(Fraction)
    for a in range(1, max_index + 1, 2):
        b = n - a
        if 1 <= b <= max_index:
            out[((), tuple(sorted((a, b))))] += Fraction(1, 2)
    for c in range(1, max_index + 1, 2):
        j = n + c
        if 1 <= j <= max_index:
            out[((c,), (j,))] += 1
    for c in range(1, max_index + 1, 2):
        d = -n - c
        if 1 <= d <= max_index:
            out[(tuple(sorted((c, d))), ())] += Fraction(1, 2)
    return out


def _left_J(a: int, key: tuple) -> list[tuple[tuple, Fraction]]:
    """Normal-order ``J_a * (creations)(annihilations)``."""
    cre, ann = key
    if a < 0:
        return [((tuple(sorted(cre + (-a,))), ann), Fraction(1))]
    out = [((cre, tuple(sorted(ann + (a,)))), Fraction(1))]
    mult = cre.count(a)
    if mult:
        rest = list(cre)
        rest.remove(a)
        out.append(((tuple(rest), ann), Fraction(a * mult)))
    return out


@dataclass(eq=False)
class CutJoinOperator:
    """``W_alpha(s)`` stored as its coefficient tables.

    ``A[(k, m)]`` multiplies ``J_{2m-2k-1} L^o_{2k-2a}``; ``C[k]`` multiplies
    ``J_{2k+1}``; everything carries the overall factor ``1/(2a+1)``.  The
    tables are complete for inputs of total degree ``<= max_degree``.
    """

    alpha: int
    A: dict[tuple[int, int], GradedPoly]
    C: dict[int, GradedPoly]
    max_degree: int
    s_cap: int | None = None
    z_max: int = 0
    _lo_cache: dict = field(default_factory=dict, repr=False)

    @property
    def max_level(self) -> int:
        return self.max_degree // (2 * self.alpha + 1) + 1

    def expand(self, max_index: int) -> dict[tuple, GradedPoly]:
        """Normal-ordered terms ``{(creations, annihilations): coefficient}`` with indices <= max_index."""
        a_ = self.alpha
        acc: dict[tuple, GradedPoly] = defaultdict(GradedPoly)
        scale = Fraction(1, 2 * a_ + 1)
        for (k, m), coef in self.A.items():
            j = 2 * m - 2 * k - 1
            if abs(j) > max_index:
                continue
            for key, w in _lo_terms(2 * k - 2 * a_, max_index).items():
                for nkey, w2 in _left_J(j, key):
                    acc[nkey] = acc[nkey] + coef * (w * w2 * scale)
        for k, coef in self.C.items():
            j = 2 * k + 1
            if abs(j) <= max_index:
                key = ((-j,), ()) if j < 0 else ((), (j,))
                acc[key] = acc[key] + coef * scale
        return {key: c for key, c in acc.items() if c}

    def terms(self, max_index: int) -> list[OperatorTerm]:
        return [OperatorTerm(c, cre, ann) for (cre, ann), c in sorted(self.expand(max_index).items(),
                                                                        key=lambda kv: kv[0])]

    def apply(self, p: GradedPoly) -> GradedPoly:
        return apply_W(self, p)


@lru_cache(maxsize=None)
def _assemble(alpha: int, max_degree: int, s_cap: int | None, Z: int) -> CutJoinOperator:
    r = _residues(alpha, Z, s_cap)
    kmax, mmax, cmax = index_bounds(alpha, max_degree)
    diag = {m: r.A_diagonal(m) for m in range(mmax + 1)}
    A = {}
    for k in range(kmax + 1):
        for m in range(mmax + 1):
            A[(k, m)] = diag[m] if k >= m else r.A_general(k, m)
    C = {k: r.C(k) for k in range(-alpha - 1, cmax + 1)}
    return CutJoinOperator(alpha, A, C, max_degree, s_cap, Z)


def assemble_W(alpha: int, P: int, s_degree_cap: int | None = None, *, Z_max: int | None = None) -> CutJoinOperator:
    """Operator valid through recursion level ``P`` (inputs of degree <= (2a+1)(P-1))."""
    if alpha not in (0, 1):
        raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")
    if P < 1:
        raise ValueError("P must be >= 1")
    Z = Z_max if Z_max is not None else z_max_for_level(alpha, P)
    return _assemble(alpha, (2 * alpha + 1) * (P - 1), s_degree_cap, Z)


def apply_W(W: CutJoinOperator, p: GradedPoly) -> GradedPoly:
    """``W_alpha(s) . p`` using the factored coefficient form."""
    deg = p.degree()
    if deg > W.max_degree:
        raise ValueError(
            f"operator assembled for inputs of degree <= {W.max_degree}; got degree {deg} "
            f"(assemble for a higher level)"
        )
    a_ = W.alpha
    kmax, mmax, cmax = index_bounds(a_, max(deg, 0))
    out = GradedPoly()
    for k in range(kmax + 1):
        lo = apply_Lo(2 * k - 2 * a_, p)
        if not lo:
            continue
        for m in range(mmax + 1):
            coef = W.A.get((k, m))
            if not coef:
                continue
            jp = apply_J(2 * m - 2 * k - 1, lo)
            if jp:
                out = out + (coef * jp).truncate_s(W.s_cap)
    for k in range(-a_ - 1, cmax + 1):
        coef = W.C.get(k)
        if coef:
            jp = apply_J(2 * k + 1, p)
            if jp:
                out = out + (coef * jp).truncate_s(W.s_cap)
    return out * Fraction(1, 2 * a_ + 1)


# ---------------------------------------------------------------------------
# dressed-current form

def _dressed(alpha: int, j: int, p: GradedPoly, Z: int, s_cap: int | None) -> GradedPoly:
    """``sum_{m >= j} rho[j, m] J_m . p``."""
    if not p:
        return p
    top = p.max_t_index()
    out = GradedPoly()
    for m in range(j, top + 1, 2):
        r = rho(alpha, j, m, Z, s_cap)
        if r:
            out = out + r * apply_J(m, p)
    return out.truncate_s(s_cap)


def apply_W_dressed(alpha: int, p: GradedPoly, s_cap: int | None = None, Z_max: int | None = None) -> GradedPoly:
    """``W_alpha(s) . p`` from the cubic operator with every current dressed by ``rho``."""
    if alpha not in (0, 1):
        raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")
    if not p:
        return p
    d = max(p.degree(), 1)
    Z = Z_max if Z_max is not None else 2 * d + 2 * alpha + 8

    def J(j, q):
        return _dressed(alpha, j, q, Z, s_cap) if q else q

    top = p.max_t_index()
    lift = 1 + 2 * alpha
    cubic = GradedPoly()
    # J_{-k} J_{-m} J_{k+m-1-2a}; modes with index < 1 on the right are excluded
    for k in range(1, top + lift + 1, 2):
        for m in range(1, top + lift + 1, 2):
            idx = k + m - lift
            if idx < 1 or idx > top:
                continue
            cubic = cubic + J(-k, J(-m, J(idx, p)))
    # 1/2 J_{-k-m-1-2a} J_k J_m
    half = Fraction(1, 2)
    for m in range(1, top + 1, 2):
        jm = J(m, p)
        if not jm:
            continue
        for k in range(1, top + 1, 2):
            jk = J(k, jm)
            if jk:
                cubic = cubic + J(-k - m - lift, jk) * half
    out = cubic * Fraction(1, 2 * alpha + 1)
    if alpha == 0:
        out = out + J(-1, p) * Fraction(1, 8)
    else:
        out = out + J(-1, J(-1, J(-1, p))) * Fraction(1, 6) + J(-3, p) * Fraction(1, 24)
    return out.truncate_s(s_cap)
