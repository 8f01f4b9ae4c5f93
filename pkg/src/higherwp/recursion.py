"""Tau levels, free energies, intersection numbers and the two verification oracles.

The formal expansion parameter hbar is never represented symbolically: a
series ``sum hbar^p X_p`` is a list (or dict) indexed by ``p``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .cache import TauCache
from .cutjoin import apply_J, apply_Lo, apply_W, apply_W_dressed, assemble_W
from .exact import double_factorial
from .polyring import GradedPoly, monomial, translate_t
from .series import elementary_q

__all__ = [
    "TauLevel",
    "IntersectionQuery",
    "IntersectionResult",
    "InsufficientLevels",
    "VerificationReport",
    "compute_tau",
    "tau_polys",
    "free_energy",
    "exp_levels",
    "intersection_number",
    "required_level",
    "virasoro_operator",
    "verify_virasoro",
    "translated_tau",
    "verify_translation",
    "verify_dual",
]


def _check_alpha(alpha: int) -> None:
    if alpha not in (0, 1):
        raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")


@dataclass(frozen=True)
class TauLevel:
    alpha: int
    level: int
    value: GradedPoly
    max_level: int
    s_degree_cap: int | None

    def __post_init__(self):
        d = (2 * self.alpha + 1) * self.level
        if not self.value.is_homogeneous(d):
            raise ValueError(f"tau level {self.level} is not homogeneous of degree {d}")
        if self.level == 0 and self.value != 1:
            raise ValueError("tau level 0 must be the constant 1")


def compute_tau(alpha: int, P: int, s_degree_cap: int | None = None, cache: TauCache | None = None,
                *, Z_max: int | None = None) -> list[TauLevel]:
    """Levels ``0..P`` of ``exp(hbar W_alpha(s)) . 1``.

    ``s_degree_cap`` bounds the s-weight of every monomial kept (``None``
    keeps all, which is only finite because each level is homogeneous).
    With a cache, stored levels are reused and new results are written back.
    """
    _check_alpha(alpha)
    if P < 0:
        raise ValueError("P must be >= 0")
    if s_degree_cap is not None and s_degree_cap < 0:
        raise ValueError("s-degree cap must be >= 0")
    polys = None
    if cache is not None and Z_max is None:
        polys = cache.load(alpha, P, s_degree_cap)
    if polys is None:
        polys = [GradedPoly.one()]
        if P >= 1:
            W = assemble_W(alpha, P, s_degree_cap, Z_max=Z_max)
            for p in range(1, P + 1):
                polys.append(apply_W(W, polys[-1]) * Fraction(1, p))
        if cache is not None and Z_max is None:
            cache.store(alpha, s_degree_cap, polys)
    return [TauLevel(alpha, p, v, P, s_degree_cap) for p, v in enumerate(polys)]


def tau_polys(alpha: int, P: int, s_degree_cap: int | None = None, **kw) -> list[GradedPoly]:
    return [lv.value for lv in compute_tau(alpha, P, s_degree_cap, **kw)]


def _values(levels) -> list[GradedPoly]:
    return [lv.value if isinstance(lv, TauLevel) else lv for lv in levels]


def free_energy(levels) -> list[GradedPoly]:
    """Connected parts: ``log(sum hbar^p tau_p) = sum hbar^p F_p`` with ``F_0 = 0``.

    Uses ``p F_p = p tau_p - sum_{k<p} k F_k tau_{p-k}``.
    """
    tau = _values(levels)
    if not tau:
        raise ValueError("free_energy needs at least level 0")
    if tau[0] != 1:
        raise ValueError("level 0 must be the constant 1")
    F = [GradedPoly()]
    for p in range(1, len(tau)):
        acc = tau[p] * p
        for k in range(1, p):
            if F[k] and tau[p - k]:
                acc = acc - F[k] * tau[p - k] * k
        F.append(acc * Fraction(1, p))
    return F


def exp_levels(F: list[GradedPoly]) -> list[GradedPoly]:
    """Inverse of :func:`free_energy`: ``p tau_p = sum_{k=1}^p k F_k tau_{p-k}``."""
    tau = [GradedPoly.one()]
    for p in range(1, len(F)):
        acc = GradedPoly()
        for k in range(1, p + 1):
            if F[k]:
                acc = acc + F[k] * tau[p - k] * k
        tau.append(acc * Fraction(1, p))
    return tau


# ---------------------------------------------------------------------------
# intersection numbers

@dataclass(frozen=True)
class IntersectionQuery:
    alpha: int
    psi: tuple[int, ...] = ()
    kappa: tuple[int, ...] = ()

    def __post_init__(self):
        _check_alpha(self.alpha)
        object.__setattr__(self, "psi", tuple(sorted(int(a) for a in self.psi)))
        object.__setattr__(self, "kappa", tuple(sorted(int(b) for b in self.kappa)))
        if not self.psi and not self.kappa:
            raise ValueError("an intersection needs at least one psi or kappa insertion")
        if any(a < 0 for a in self.psi):
            raise ValueError("psi exponents must be >= 0")
        if any(b < 1 for b in self.kappa):
            raise ValueError("kappa indices must be >= 1")

    @property
    def n(self) -> int:
        return len(self.psi)

    def genus(self) -> Fraction:
        """Genus forced by the dimension count (possibly non-integral)."""
        total = sum(self.psi) + sum(self.kappa)
        if self.alpha == 0:
            return Fraction(total + 1)
        return Fraction(total + 3 - self.n, 3)

    def monomial(self) -> int:
        t = Counter(2 * a + 1 for a in self.psi)
        s = Counter(self.kappa)
        return monomial(t=t, s=s)

    def normalization(self) -> Fraction:
        out = Fraction(1)
        for a, c in Counter(self.psi).items():
            out *= Fraction(factorial(c)) / double_factorial(2 * a + 1) ** c
        for c in Counter(self.kappa).values():
            out *= factorial(c)
        return out


@dataclass(frozen=True)
class IntersectionResult:
    query: IntersectionQuery
    value: Fraction
    genus: Fraction
    level: int | None
    status: str
    dimension: str


class InsufficientLevels(LookupError):
    def __init__(self, needed_level: int, needed_s: int, have_level: int, have_s: int | None):
        self.needed_level = needed_level
        self.needed_s = needed_s
        have = ("no usable cached levels" if have_level < 0 else
                f"have level {have_level}, s-degree {'all' if have_s is None else have_s}")
        super().__init__(
            f"need tau through level {needed_level} with s-degree >= {needed_s}; {have} "
            f"(increase P: run `tau --max-level {needed_level} --s-degree {needed_s}`)"
        )


def _dimension_report(q: IntersectionQuery) -> tuple[Fraction, int | None, str]:
    g = q.genus()
    if g.denominator != 1 or g < 0:
        return g, None, f"dimension mismatch: inferred genus {g} is not a non-negative integer"
    p = 2 * int(g) - 2 + q.n
    if p <= 0:
        return g, None, f"dimension mismatch: (g, n) = ({g}, {q.n}) is unstable"
    deg = sum(2 * a + 1 for a in q.psi) + 2 * sum(q.kappa)
    return g, p, f"ok: degree {deg} = (2*{q.alpha}+1)*{p} at g = {g}, n = {q.n}"


def required_level(q: IntersectionQuery) -> tuple[int | None, int]:
    """(level, s-weight) of tau needed to answer ``q``; level is None when the bracket vanishes."""
    _, p, _ = _dimension_report(q)
    return p, sum(q.kappa)


def intersection_number(q: IntersectionQuery, F: list[GradedPoly] | None = None, *,
                        s_degree_cap: int | None = None) -> IntersectionResult:
    """Read ``<prod kappa_b prod tau_a>`` from the free energy.

    ``F`` is the list of free-energy levels (as from :func:`free_energy`); when
    omitted the needed tau levels are computed.  ``s_degree_cap`` describes
    the cap ``F`` was computed with, for the sufficiency check.
    """
    g, p, dim = _dimension_report(q)
    if p is None:
        return IntersectionResult(q, Fraction(0), g, None, "dimension mismatch", dim)
    need_s = sum(q.kappa)
    if F is None:
        F = free_energy(compute_tau(q.alpha, p, need_s))
        s_degree_cap = need_s
    have = len(F) - 1
    if have < p or (s_degree_cap is not None and s_degree_cap < need_s):
        raise InsufficientLevels(p, need_s, have, s_degree_cap)
    value = F[p].coeff(q.monomial()) * q.normalization()
    return IntersectionResult(q, value, g, p, "ok", dim)


# ---------------------------------------------------------------------------
# verification oracles

@dataclass
class VerificationReport:
    suite: str
    alpha: int
    params: dict
    passed: bool = True
    checked: int = 0
    failure: dict | None = None
    details: list = field(default_factory=list)

    def fail(self, **info) -> None:
        if self.passed:
            self.passed = False
            self.failure = info

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "alpha": self.alpha,
            "params": self.params,
            "passed": self.passed,
            "checked": self.checked,
            "failure": self.failure,
            "details": self.details,
        }


def virasoro_operator(alpha: int, k: int, level: int, tau: list[GradedPoly]) -> GradedPoly:
    """hbar^level part of ``(1/2 L_{2k} - 1/2 hbar^-1 d/dt_{2k+1+2a} + [k=0]/16) tau``."""
    _check_alpha(alpha)
    if k < -alpha:
        raise ValueError(f"constraints start at k = {-alpha}")
    cur = tau[level]
    out = apply_Lo(2 * k, cur) * Fraction(1, 2)
    if k == 0:
        out = out + cur * Fraction(1, 16)
    if level + 1 < len(tau):
        out = out - apply_J(2 * k + 1 + 2 * alpha, tau[level + 1]) * Fraction(1, 2)
    return out


def verify_virasoro(alpha: int, P: int, tau: list[GradedPoly] | None = None, *,
                    cache: TauCache | None = None) -> VerificationReport:
    """Check every constraint at s = 0 on levels ``0..P-1`` (level P enters via the hbar^-1 term)."""
    _check_alpha(alpha)
    if tau is None:
        tau = tau_polys(alpha, P, 0, cache=cache)
    tau = _values(tau)[: P + 1]
    if len(tau) < P + 1:
        raise ValueError(f"need tau levels 0..{P}")
    rep = VerificationReport("virasoro", alpha, {"max_level": P})
    k_max = ((2 * alpha + 1) * P - 1 - 2 * alpha) // 2
    for p in range(P):
        for k in range(-alpha, k_max + 1):
            residual = virasoro_operator(alpha, k, p, tau)
            rep.checked += 1
            if residual:
                m, c = next(residual.items())
                rep.fail(k=k, level=p, monomial=GradedPoly.from_monomial(m).to_text(), residual=str(c))
            rep.details.append({"k": k, "level": p, "ok": not residual})
    return rep


def translated_tau(alpha: int, tau0: list[GradedPoly], P: int, s_degree_cap: int) -> list[GradedPoly]:
    """Levels ``0..P`` of the s = 0 tau after ``t_{2k+1} -> t_{2k+1} + q_{k-a}(s) / ((2k+1)!! hbar)``.

    ``tau0`` must reach level ``P + s_degree_cap``.
    """
    _check_alpha(alpha)
    if s_degree_cap <= 0:
        return [lv for lv in tau0[: P + 1]]
    need = P + s_degree_cap
    if len(tau0) < need + 1:
        raise ValueError(f"translation needs s = 0 tau through level {need}, got {len(tau0) - 1}")
    q = elementary_q(s_degree_cap, s_degree_cap)
    shifts = {}
    for j in range(1, s_degree_cap + 1):
        i = 2 * (j + alpha) + 1
        shifts[i] = q[j - 1].with_cap(None) / double_factorial(i)
    out = [GradedPoly() for _ in range(P + 1)]
    for src in range(need + 1):
        for lvl, poly in translate_t(tau0[src], shifts, src, alpha=alpha, s_cap=s_degree_cap).items():
            if 0 <= lvl <= P:
                out[lvl] = out[lvl] + poly
    return out


def verify_translation(alpha: int, P: int, s_degree_cap: int, *, cache: TauCache | None = None,
                       Z_max: int | None = None) -> VerificationReport:
    """Generic-s tau from the deformed recursion against the translated s = 0 tau."""
    _check_alpha(alpha)
    rep = VerificationReport("translation", alpha, {"max_level": P, "s_degree": s_degree_cap})
    tau0 = tau_polys(alpha, P + s_degree_cap, 0, cache=cache, Z_max=Z_max)
    generic = tau_polys(alpha, P, s_degree_cap, cache=cache, Z_max=Z_max)
    moved = translated_tau(alpha, tau0, P, s_degree_cap)
    for p in range(P + 1):
        diff = generic[p] - moved[p]
        rep.checked += 1
        rep.details.append({"level": p, "ok": not diff, "terms": len(generic[p])})
        if diff:
            m, c = next(diff.items())
            rep.fail(level=p, monomial=GradedPoly.from_monomial(m).to_text(), difference=str(c))
    return rep


def verify_dual(alpha: int, P: int, s_degree_cap: int | None = None) -> VerificationReport:
    """Residue-coefficient operator against the dressed-current operator on tau levels ``0..P``."""
    _check_alpha(alpha)
    rep = VerificationReport("dual", alpha, {"max_level": P, "s_degree": s_degree_cap})
    tau = tau_polys(alpha, P, s_degree_cap)
    W = assemble_W(alpha, P + 1, s_degree_cap)
    for p, poly in enumerate(tau):
        diff = apply_W(W, poly) - apply_W_dressed(alpha, poly, s_degree_cap)
        rep.checked += 1
        rep.details.append({"level": p, "ok": not diff})
        if diff:
            m, c = next(diff.items())
            rep.fail(level=p, monomial=GradedPoly.from_monomial(m).to_text(), difference=str(c))
    return rep
