"""Truncated Laurent series in ``z`` with s-polynomial coefficients.

A :class:`ParamSeries` knows its coefficients for exponents ``start <= n < prec``
and nothing beyond: every operation propagates the absolute precision
pessimistically, and asking for a coefficient outside the window raises
:class:`PrecisionError` rather than returning a silently wrong zero.

The module also builds the concrete series of the construction: the
polynomials ``q_j(s)``, the translation series ``v^alpha``, the series
``f_alpha`` with ``f^(2a+1) = z^(2a+1) - (2a+1) v^alpha``, and its
compositional inverse ``h_alpha``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .exact import double_factorial
from .polyring import GradedPoly

__all__ = [
    "PrecisionError",
    "ParamSeries",
    "elementary_q",
    "build_v",
    "build_f",
    "build_h",
    "invert_composition",
    "power_laurent",
    "residue",
    "plus_part",
    "derivative_z",
    "rho",
]


class PrecisionError(ArithmeticError):
    """A requested coefficient lies outside the known truncation window."""


def _zero(cap):
    return GradedPoly({}, cap)


def _as_poly(c, cap=None) -> GradedPoly:
    if isinstance(c, GradedPoly):
        return c if cap is None or c.cap == cap else c.with_cap(cap)
    return GradedPoly.const(c, cap)


def _parity_of(coeffs: list[GradedPoly], start: int) -> str | None:
    odd = even = False
    for i, c in enumerate(coeffs):
        if c:
            if (start + i) % 2:
                odd = True
            else:
                even = True
    if odd and not even:
        return "odd"
    if even and not odd:
        return "even"
    return None


class ParamSeries:
    """``sum_{n=start}^{prec-1} c_n z^n + O(z^prec)`` with ``c_n`` polynomials in s.

    ``cap`` is an optional bound on the s-weight of coefficients (stored as the
    total-degree cap ``2*cap`` on each coefficient polynomial).
    """

    __slots__ = ("start", "coeffs", "prec", "cap", "parity")

    def __init__(self, start: int, coeffs, prec: int | None = None, cap: int | None = None,
                 parity: str | None = None):
        pcap = None if cap is None else 2 * cap
        coeffs = [_as_poly(c, pcap) for c in coeffs]
        if prec is None:
            prec = start + len(coeffs)
        if prec < start:
            start = prec
            coeffs = []
        coeffs = coeffs[: prec - start]
        coeffs += [_zero(pcap)] * (prec - start - len(coeffs))
        self.start = start
        self.coeffs = coeffs
        self.prec = prec
        self.cap = cap
        if parity is not None:
            bad = 1 if parity == "even" else 0
            for i, c in enumerate(coeffs):
                if c and (start + i) % 2 == bad:
                    raise ValueError(f"{parity} series has a z^{start + i} term")
        self.parity = parity

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_terms(cls, terms: Mapping[int, object], prec: int, cap: int | None = None,
                   parity: str | None = None) -> "ParamSeries":
        live = [n for n in terms if n < prec]
        start = min(live, default=prec)
        coeffs = [terms.get(n, 0) for n in range(start, prec)]
        return cls(start, coeffs, prec, cap, parity)

    @classmethod
    def monomial(cls, n: int, prec: int, c=1, cap: int | None = None) -> "ParamSeries":
        return cls.from_terms({n: c}, prec, cap, "odd" if n % 2 else "even")

    @classmethod
    def z(cls, prec: int, cap: int | None = None) -> "ParamSeries":
        return cls.monomial(1, prec, 1, cap)

    # -- access -----------------------------------------------------------
    def __getitem__(self, n: int) -> GradedPoly:
        if n >= self.prec:
            raise PrecisionError(f"z^{n} is beyond the known window O(z^{self.prec})")
        if n < self.start:
            return _zero(self._pcap)
        return self.coeffs[n - self.start]

    coefficient = __getitem__

    @property
    def _pcap(self):
        return None if self.cap is None else 2 * self.cap

    def valuation(self) -> int:
        """Exponent of the first nonzero known coefficient (``prec`` if none)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return self.start + i
        return self.prec

    def terms(self) -> dict[int, GradedPoly]:
        return {self.start + i: c for i, c in enumerate(self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def truncate(self, prec: int) -> "ParamSeries":
        if prec >= self.prec:
            return self
        return ParamSeries(self.start, self.coeffs[: max(prec - self.start, 0)], prec, self.cap, self.parity)

    def map_coefficients(self, fn) -> "ParamSeries":
        return ParamSeries(self.start, [fn(c) for c in self.coeffs], self.prec, self.cap)

    def __repr__(self) -> str:
        shown = " + ".join(f"({c})*z^{n}" for n, c in self.terms().items()) or "0"
        return f"ParamSeries({shown} + O(z^{self.prec}))"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        lo = min(self.start, other.start)
        return all(self[n] == other[n] for n in range(lo, prec))

    __hash__ = None

    # -- ring operations --------------------------------------------------
    def _combine_cap(self, other: "ParamSeries"):
        if self.cap is None:
            return other.cap
        if other.cap is None:
            return self.cap
        return min(self.cap, other.cap)

    def __add__(self, other) -> "ParamSeries":
        if not isinstance(other, ParamSeries):
            other = ParamSeries(0, [other], self.prec, self.cap)
        prec = min(self.prec, other.prec)
        start = min(self.start, other.start)
        cap = self._combine_cap(other)
        coeffs = [self[n] + other[n] for n in range(start, prec)]
        par = self.parity if self.parity == other.parity else None
        return ParamSeries(start, coeffs, prec, cap, par)

    __radd__ = __add__

    def __neg__(self) -> "ParamSeries":
        return ParamSeries(self.start, [-c for c in self.coeffs], self.prec, self.cap, self.parity)

    def __sub__(self, other) -> "ParamSeries":
        return self + (-other)

    def __rsub__(self, other) -> "ParamSeries":
        return (-self) + other

    def scale(self, c) -> "ParamSeries":
        """Multiply by a scalar or by an s-polynomial."""
        if isinstance(c, GradedPoly):
            return ParamSeries(self.start, [x * c for x in self.coeffs], self.prec, self.cap, self.parity)
        c = Fraction(c)
        return ParamSeries(self.start, [x * c for x in self.coeffs], self.prec, self.cap, self.parity)

    def shift(self, n: int) -> "ParamSeries":
        """Multiply by ``z^n``."""
        par = self.parity
        if par is not None and n % 2:
            par = "even" if par == "odd" else "odd"
        return ParamSeries(self.start + n, self.coeffs, self.prec + n, self.cap, par)

    def __mul__(self, other) -> "ParamSeries":
        if not isinstance(other, ParamSeries):
            return self.scale(other)
        va, vb = self.valuation(), other.valuation()
        prec = min(va + other.prec, vb + self.prec)
        cap = self._combine_cap(other)
        pcap = None if cap is None else 2 * cap
        start = va + vb
        out = [_zero(pcap) for _ in range(max(prec - start, 0))]
        a = [(n, self[n]) for n in range(va, self.prec) if self[n]]
        b = [(n, other[n]) for n in range(vb, other.prec) if other[n]]
        for na, ca in a:
            for nb, cb in b:
                n = na + nb
                if n >= prec:
                    break
                out[n - start] = out[n - start] + ca * cb
        par = None
        if self.parity and other.parity:
            par = "even" if self.parity == other.parity else "odd"
        return ParamSeries(start, out, prec, cap, par)

    __rmul__ = __mul__

    def _unit_split(self):
        """Write ``self = c z^v (1 + g)`` with c a nonzero rational; return (v, c, 1+g as series in z)."""
        v = self.valuation()
        if v >= self.prec:
            raise PrecisionError("series vanishes to its known precision; no leading term")
        lead = self[v]
        if not lead or lead.degree() != 0 or len(lead) != 1:
            raise ValueError("leading coefficient must be a nonzero rational constant")
        c = lead.constant()
        unit = self.shift(-v).scale(1 / c)
        return v, c, unit

    def rpow(self, r) -> "ParamSeries":
        """``self^r`` for rational r, for a series of the form ``1 + O(z)``.

        Uses the recurrence from ``g y' = r g' y``; O(N^2) coefficient products.
        """
        r = Fraction(r)
        if self.valuation() != 0 or self.start < 0 or self[0] != 1:
            raise ValueError("rational powers need a series of the form 1 + O(z)")
        n_terms = self.prec
        g = [self[n] for n in range(n_terms)]
        y = [GradedPoly.const(1, self._pcap)]
        for n in range(1, n_terms):
            acc = _zero(self._pcap)
            for k in range(1, n + 1):
                if g[k] and y[n - k]:
                    w = (r + 1) * k - n
                    if w:
                        acc = acc + g[k] * y[n - k] * w
            y.append(acc * Fraction(1, n))
        par = "even" if self.parity == "even" else None
        return ParamSeries(0, y, n_terms, self.cap, par)

    def __pow__(self, k: int) -> "ParamSeries":
        return power_laurent(self, k)

    def derivative(self) -> "ParamSeries":
        coeffs = [self[n] * n for n in range(self.start, self.prec)]
        par = {"odd": "even", "even": "odd"}.get(self.parity) if self.parity else None
        out = ParamSeries(self.start - 1, coeffs, self.prec - 1, self.cap, par)
        return out

    def plus_part(self) -> "ParamSeries":
        if self.start >= 0:
            return self
        return ParamSeries(0, [self[n] for n in range(0, self.prec)], max(self.prec, 0), self.cap, self.parity)

    def residue(self) -> GradedPoly:
        if self.prec <= -1:
            raise PrecisionError(f"residue needs the z^-1 coefficient; series known only to O(z^{self.prec})")
        return self[-1].with_cap(None)

    def compose(self, inner: "ParamSeries") -> "ParamSeries":
        """``self(inner(z))`` for a power series ``self`` and ``inner`` with positive valuation."""
        if self.start < 0:
            raise ValueError("outer series must be a power series")
        vi = inner.valuation()
        if vi < 1:
            raise ValueError("inner series must have positive valuation")
        nonconst = [n for n in range(max(self.start, 1), self.prec) if self[n]]
        j0 = nonconst[0] if nonconst else self.prec
        prec = min(self.prec * vi, inner.prec + (j0 - 1) * vi)
        cap = self._combine_cap(inner)
        acc = ParamSeries(0, [self[0]], prec, cap)
        power = inner.truncate(prec)
        for n in range(1, self.prec):
            if n * vi >= prec:
                break
            if self[n]:
                acc = acc + power.scale(self[n])
            power = (power * inner).truncate(prec)
        acc = acc.truncate(prec)
        par = None
        if self.parity == "odd" and inner.parity == "odd":
            par = "odd"
        return ParamSeries(acc.start, acc.coeffs, acc.prec, acc.cap, par)

    def revert(self) -> "ParamSeries":
        """Compositional inverse of ``z + O(z^2)`` by Newton iteration on ``f(h) = z``."""
        if self.valuation() != 1 or self[1] != 1 or self.start < 0:
            raise ValueError("reversion needs a series of the form z + O(z^2)")
        target = self.prec
        fprime = self.derivative()
        h = ParamSeries.z(min(3, target), self.cap)
        have = min(3, target)  # z + O(z^3)-correct whenever f has no z^2 term; checked below
        if self.prec > 2 and self[2]:
            have = 2
            h = ParamSeries.z(2, self.cap)
        while have < target:
            n = min(2 * have, target)
            hw = ParamSeries(h.start, h.coeffs, n, self.cap)
            f_of_h = self.truncate(n).compose(hw)
            d = fprime.truncate(n).compose(hw)
            resid = f_of_h - ParamSeries.z(n, self.cap)
            h = (hw - (resid * power_laurent(d, -1))).truncate(n)
            have = n
        if self.parity == "odd":
            h = ParamSeries(h.start, h.coeffs, h.prec, h.cap, "odd")
        return h


# ---------------------------------------------------------------------------
# module-level operations

def power_laurent(f: ParamSeries, k: int) -> ParamSeries:
    """``f^k`` for any integer k; negative k needs a rational nonzero leading coefficient."""
    if k == 0:
        return ParamSeries(0, [1], max(f.prec - f.valuation(), 1), f.cap, "even")
    if k > 0 and k <= 2:
        out = f
        for _ in range(k - 1):
            out = out * f
        return out
    v, c, unit = f._unit_split()
    powered = unit.rpow(k).scale(c ** k)
    out = powered.shift(v * k)
    par = None
    if f.parity:
        par = "odd" if (f.parity == "odd" and k % 2) else "even"
    return ParamSeries(out.start, out.coeffs, out.prec, out.cap, par)


def residue(g: ParamSeries) -> GradedPoly:
    return g.residue()


def plus_part(g: ParamSeries) -> ParamSeries:
    return g.plus_part()


def derivative_z(g: ParamSeries) -> ParamSeries:
    return g.derivative()


def invert_composition(f: ParamSeries) -> ParamSeries:
    return f.revert()


@lru_cache(maxsize=None)
def elementary_q(max_j: int, s_cap: int | None = None) -> tuple[GradedPoly, ...]:
    """``(q_1, ..., q_max_j)`` from ``1 - exp(-sum s_i z^i) = sum q_j z^j``."""
    if max_j < 1:
        raise ValueError("max_j must be >= 1")
    pcap = None if s_cap is None else 2 * s_cap
    # E = exp(-S):  n E_n = -sum_k k s_k E_{n-k}
    e = [GradedPoly.const(1, pcap)]
    for n in range(1, max_j + 1):
        acc = _zero(pcap)
        for k in range(1, n + 1):
            acc = acc + GradedPoly.s(k).with_cap(pcap) * e[n - k] * k
        e.append(acc * Fraction(-1, n))
    return tuple(-x for x in e[1:])


def build_v(alpha: int, K: int, s_cap: int | None = None) -> ParamSeries:
    """``v^alpha = sum_k q_k z^(2k+2a+1)/(2k+2a+1)!!`` known to ``O(z^K)``."""
    _check_alpha(alpha)
    if K < 2 * alpha + 3:
        raise ValueError("K must be at least 2*alpha + 3")
    kmax = (K - 2 * alpha - 2) // 2
    q = elementary_q(max(kmax, 1), s_cap)
    terms = {}
    for k in range(1, kmax + 1):
        n = 2 * k + 2 * alpha + 1
        if n < K:
            terms[n] = q[k - 1] * (1 / double_factorial(n))
    return ParamSeries.from_terms(terms, K, s_cap, "odd")


@lru_cache(maxsize=None)
def build_f(alpha: int, Z_max: int, s_cap: int | None = None) -> ParamSeries:
    """Odd series ``f_alpha = z (1 - (2a+1) v / z^(2a+1))^(1/(2a+1))`` to ``O(z^Z_max)``."""
    _check_alpha(alpha)
    if Z_max < 2:
        raise ValueError("Z_max must be >= 2")
    d = 2 * alpha + 1
    v = build_v(alpha, max(Z_max + 2 * alpha, 2 * alpha + 3), s_cap)
    inner = ParamSeries(0, [1], Z_max - 1, s_cap) - v.shift(-d).scale(d).truncate(Z_max - 1)
    inner = ParamSeries(inner.start, inner.coeffs, inner.prec, s_cap, "even")
    root = inner if d == 1 else inner.rpow(Fraction(1, d))
    f = root.shift(1)
    return ParamSeries(f.start, f.coeffs, f.prec, s_cap, "odd")


@lru_cache(maxsize=None)
def build_h(alpha: int, Z_max: int, s_cap: int | None = None) -> ParamSeries:
    """Compositional inverse of :func:`build_f`."""
    return build_f(alpha, Z_max, s_cap).revert()


@lru_cache(maxsize=None)
def _f_power(alpha: int, Z_max: int, s_cap: int | None, k: int) -> ParamSeries:
    return power_laurent(build_f(alpha, Z_max, s_cap), k)


def rho(alpha: int, k: int, m: int, Z_max: int, s_cap: int | None = None) -> GradedPoly:
    """``[z^m] f_alpha(z)^k``."""
    if m < k or (m - k) % 2:
        return GradedPoly()
    return _f_power(alpha, Z_max, s_cap, k)[m].with_cap(None)


def _check_alpha(alpha: int) -> None:
    if alpha not in (0, 1):
        raise ValueError(f"alpha must be 0 or 1, got {alpha!r}")
