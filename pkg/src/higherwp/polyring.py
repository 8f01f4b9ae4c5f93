"""Sparse graded polynomials in the odd times ``t_1, t_3, ...`` and the ``s_j``.

Grading: ``deg t_k = k`` and ``deg s_j = 2 j``.  The *s-weight* of a monomial is
``sum j * exp(s_j)``, i.e. half its s-degree.

Monomials are packed into a single Python int::

    bits 0..23                total degree
    bits 24 + 8*slot ...      one byte per variable, 7 exponent bits + 1 guard bit

with slot ``k - 1`` for ``t_k`` (k odd) and slot ``2 j - 1`` for ``s_j``.  A
product of monomials is integer addition, which keeps the degree field in
sync for free.  Overflowing an exponent sets a guard bit and raises.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Mapping

__all__ = [
    "MAX_INDEX",
    "MAX_EXPONENT",
    "GradedPoly",
    "monomial",
    "monomial_degree",
    "monomial_exponents",
    "t_exponent",
    "s_weight",
    "unit_t",
    "unit_s",
    "poly_add",
    "poly_mul",
    "d_dt",
    "mul_t",
    "coeff_of",
    "translate_t",
]

MAX_INDEX = 201
MAX_EXPONENT = 127

_DEG_BITS = 24
_DEG_MASK = (1 << _DEG_BITS) - 1
_SLOT_BITS = 8
_N_SLOTS = 2 * MAX_INDEX


def _shift(slot: int) -> int:
    return _DEG_BITS + _SLOT_BITS * slot


_GUARD = sum(1 << (_shift(i) + 7) for i in range(_N_SLOTS))
_S_SLOTS = sum(0xFF << _shift(i) for i in range(1, _N_SLOTS, 2))


def _check_t(k: int) -> None:
    if k < 1 or k % 2 == 0:
        raise ValueError(f"t-variables carry odd positive indices, got t_{k}")
    if k > MAX_INDEX:
        raise OverflowError(f"t_{k} exceeds the supported index range (<= {MAX_INDEX})")


def _check_s(j: int) -> None:
    if j < 1:
        raise ValueError(f"s-variables carry positive indices, got s_{j}")
    if j > MAX_INDEX:
        raise OverflowError(f"s_{j} exceeds the supported index range (<= {MAX_INDEX})")


_UNIT_T: dict[int, int] = {}
_UNIT_S: dict[int, int] = {}


def unit_t(k: int) -> int:
    """Packed monomial ``t_k``."""
    u = _UNIT_T.get(k)
    if u is None:
        _check_t(k)
        u = _UNIT_T[k] = (1 << _shift(k - 1)) | k
    return u


def unit_s(j: int) -> int:
    """Packed monomial ``s_j``."""
    u = _UNIT_S.get(j)
    if u is None:
        _check_s(j)
        u = _UNIT_S[j] = (1 << _shift(2 * j - 1)) | (2 * j)
    return u


def _mono_mul(a: int, b: int) -> int:
    m = a + b
    if m & _GUARD:
        raise OverflowError(f"monomial exponent exceeds {MAX_EXPONENT}")
    return m


def monomial(t: Mapping[int, int] | None = None, s: Mapping[int, int] | None = None) -> int:
    """Pack ``prod t_k^t[k] * prod s_j^s[j]``."""
    m = 0
    for k, e in (t or {}).items():
        _check_t(k)
        if not 0 <= e <= MAX_EXPONENT:
            raise OverflowError(f"exponent {e} of t_{k} out of range")
        m += e * unit_t(k)
    for j, e in (s or {}).items():
        _check_s(j)
        if not 0 <= e <= MAX_EXPONENT:
            raise OverflowError(f"exponent {e} of s_{j} out of range")
        m += e * unit_s(j)
    return m


def monomial_degree(m: int) -> int:
    return m & _DEG_MASK


def t_exponent(m: int, k: int) -> int:
    return (m >> _shift(k - 1)) & 0x7F


_DECODED: dict[int, tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]] = {}


def monomial_exponents(m: int) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Return ``((k, e), ...)`` for the t-part and ``((j, e), ...)`` for the s-part."""
    hit = _DECODED.get(m)
    if hit is not None:
        return hit
    body = m >> _DEG_BITS
    raw = body.to_bytes((body.bit_length() + 7) // 8, "little")
    t = []
    s = []
    for slot, e in enumerate(raw):
        if e:
            if slot % 2 == 0:
                t.append((slot + 1, e))
            else:
                s.append(((slot + 1) // 2, e))
    out = (tuple(t), tuple(s))
    if len(_DECODED) < 1 << 20:
        _DECODED[m] = out
    return out


def s_weight(m: int) -> int:
    """``sum j * exp(s_j)`` of a packed monomial."""
    if not m & _S_SLOTS:
        return 0
    return sum(j * e for j, e in monomial_exponents(m)[1])


def _split(m: int) -> tuple[int, int]:
    """Split into (t-part, s-part) packed monomials."""
    s_bits = m & _S_SLOTS
    if not s_bits:
        return m, 0
    sw = s_weight(m)
    s_mono = s_bits | (2 * sw)
    return m - s_mono, s_mono


def _sort_key(m: int):
    t, s = monomial_exponents(m)
    return (m & _DEG_MASK, t, s)


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_monomial(m: int) -> str:
    t, s = monomial_exponents(m)
    parts = [f"t{k}" if e == 1 else f"t{k}^{e}" for k, e in t]
    parts += [f"s{j}" if e == 1 else f"s{j}^{e}" for j, e in s]
    return "*".join(parts)


class GradedPoly:
    """Immutable-by-convention sparse polynomial ``{packed monomial: Fraction}``.

    ``cap`` is an optional bound on the total degree; terms above it are
    dropped on construction and in every product.
    """

    __slots__ = ("terms", "cap")

    def __init__(self, terms: Mapping[int, Fraction] | None = None, cap: int | None = None):
        clean: dict[int, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c and (cap is None or (m & _DEG_MASK) <= cap):
                    clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self.terms = clean
        self.cap = cap

    @classmethod
    def _raw(cls, terms: dict[int, Fraction], cap: int | None = None) -> "GradedPoly":
        # terms already pruned and capped
        out = cls.__new__(cls)
        out.terms = terms
        out.cap = cap
        return out

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c, cap: int | None = None) -> "GradedPoly":
        return cls({0: Fraction(c)}, cap)

    @classmethod
    def one(cls) -> "GradedPoly":
        return cls.const(1)

    @classmethod
    def t(cls, k: int, c=1) -> "GradedPoly":
        return cls({unit_t(k): Fraction(c)})

    @classmethod
    def s(cls, j: int, c=1) -> "GradedPoly":
        return cls({unit_s(j): Fraction(c)})

    @classmethod
    def from_monomial(cls, m: int, c=1) -> "GradedPoly":
        return cls({m: Fraction(c)})

    # -- inspection -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        """Terms in canonical (graded-lex) order."""
        for m in sorted(self.terms, key=_sort_key):
            yield m, self.terms[m]

    def coeff(self, m: int) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def constant(self) -> Fraction:
        return self.terms.get(0, Fraction(0))

    def degree(self) -> int:
        """Largest total degree present (-1 for the zero polynomial)."""
        return max((m & _DEG_MASK for m in self.terms), default=-1)

    def degrees(self) -> set[int]:
        return {m & _DEG_MASK for m in self.terms}

    def is_homogeneous(self, d: int) -> bool:
        return all((m & _DEG_MASK) == d for m in self.terms)

    def max_t_index(self) -> int:
        top = 0
        for m in self.terms:
            t, _ = monomial_exponents(m)
            if t:
                top = max(top, t[-1][0])
        return top

    def max_s_weight(self) -> int:
        return max((s_weight(m) for m in self.terms), default=0)

    def is_s_only(self) -> bool:
        return all(not monomial_exponents(m)[0] for m in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, GradedPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: Fraction(other)} if other else {})
        return NotImplemented

    __hash__ = None

    def __neg__(self) -> "GradedPoly":
        return GradedPoly._raw({m: -c for m, c in self.terms.items()}, self.cap)

    def __add__(self, other) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            other = GradedPoly.const(other)
        return poly_add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            other = GradedPoly.const(other)
        return poly_add(self, -other)

    def __rsub__(self, other) -> "GradedPoly":
        return (-self) + other

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            return poly_mul(self, other)
        c = Fraction(other)
        if not c:
            return GradedPoly._raw({}, self.cap)
        return GradedPoly._raw({m: c * v for m, v in self.terms.items()}, self.cap)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GradedPoly":
        return self * (1 / Fraction(other))

    def __pow__(self, n: int) -> "GradedPoly":
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        out = GradedPoly.const(1, self.cap)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- truncation and specialization ------------------------------------
    def with_cap(self, cap: int | None) -> "GradedPoly":
        return GradedPoly(self.terms, cap)

    def truncate_s(self, max_weight: int | None) -> "GradedPoly":
        """Drop monomials whose s-weight exceeds ``max_weight``."""
        if max_weight is None:
            return self
        return GradedPoly._raw(
            {m: c for m, c in self.terms.items() if s_weight(m) <= max_weight}, self.cap
        )

    def restrict_s(self, allowed: Iterable[int]) -> "GradedPoly":
        """Set ``s_j = 0`` for every j outside ``allowed``."""
        allowed = set(allowed)
        keep = {}
        for m, c in self.terms.items():
            if all(j in allowed for j, _ in monomial_exponents(m)[1]):
                keep[m] = c
        return GradedPoly._raw(keep, self.cap)

    def at_s_zero(self) -> "GradedPoly":
        return self.restrict_s(())

    def homogeneous_part(self, d: int) -> "GradedPoly":
        return GradedPoly._raw({m: c for m, c in self.terms.items() if (m & _DEG_MASK) == d}, self.cap)

    def t_degree_part(self, n: int) -> "GradedPoly":
        """Monomials with exactly ``n`` t-factors (counted with multiplicity)."""
        keep = {}
        for m, c in self.terms.items():
            if sum(e for _, e in monomial_exponents(m)[0]) == n:
                keep[m] = c
        return GradedPoly._raw(keep, self.cap)

    def split_t_s(self) -> dict[int, "GradedPoly"]:
        """Group as ``{t-monomial: s-polynomial coefficient}``."""
        out: dict[int, dict[int, Fraction]] = {}
        for m, c in self.terms.items():
            tm, sm = _split(m)
            out.setdefault(tm, {})[sm] = c
        return {tm: GradedPoly._raw(d) for tm, d in out.items()}

    # -- text -------------------------------------------------------------
    def to_text(self) -> str:
        """Canonical rendering, e.g. ``9/128*t1^2 + 1/8*t1*s1``."""
        if not self.terms:
            return "0"
        chunks = []
        for i, (m, c) in enumerate(self.items()):
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            mono = _fmt_monomial(m)
            if not mono:
                body = _fmt_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{_fmt_rational(a)}*{mono}"
            if i == 0:
                chunks.append(body if sign == "+" else "-" + body)
            else:
                chunks.append(f" {sign} {body}")
        return "".join(chunks)

    @classmethod
    def from_text(cls, text: str, cap: int | None = None) -> "GradedPoly":
        """Parse the output of :meth:`to_text` (and simple hand-written variants)."""
        src = text.replace(" ", "")
        if src in ("", "0"):
            return cls({}, cap)
        if src[0] not in "+-":
            src = "+" + src
        terms: dict[int, Fraction] = {}
        pos = 0
        for match in _TERM_RE.finditer(src):
            if match.start() != pos:
                raise ValueError(f"cannot parse polynomial near {src[pos:pos + 20]!r}")
            pos = match.end()
            sign, coef, mono = match.group("sign", "coef", "mono")
            c = Fraction(coef) if coef else Fraction(1)
            if sign == "-":
                c = -c
            m = 0
            if mono:
                for var in mono.split("*"):
                    vm = _VAR_RE.fullmatch(var)
                    if vm is None:
                        raise ValueError(f"bad variable {var!r}")
                    idx = int(vm.group(2))
                    e = int(vm.group(3) or 1)
                    u = unit_t(idx) if vm.group(1) == "t" else unit_s(idx)
                    for _ in range(e):
                        m = _mono_mul(m, u)
            terms[m] = terms.get(m, Fraction(0)) + c
        if pos != len(src):
            raise ValueError(f"cannot parse polynomial near {src[pos:pos + 20]!r}")
        return cls(terms, cap)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"GradedPoly({self.to_text()!r})"


_VAR_RE = re.compile(r"([ts])(\d+)(?:\^(\d+))?")
_TERM_RE = re.compile(
    r"(?P<sign>[+-])"
    r"(?:(?P<coef>\d+(?:/\d+)?)(?:\*(?=[ts]))?)?"
    r"(?P<mono>[ts]\d+(?:\^\d+)?(?:\*[ts]\d+(?:\^\d+)?)*)?"
)


def _min_cap(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def poly_add(a: GradedPoly, b: GradedPoly) -> GradedPoly:
    cap = _min_cap(a.cap, b.cap)
    out = dict(a.terms)
    for m, c in b.terms.items():
        v = out.get(m)
        if v is None:
            out[m] = c
        else:
            v += c
            if v:
                out[m] = v
            else:
                del out[m]
    if cap is not None:
        out = {m: c for m, c in out.items() if (m & _DEG_MASK) <= cap}
    return GradedPoly._raw(out, cap)


def poly_mul(a: GradedPoly, b: GradedPoly, cap: int | None = None) -> GradedPoly:
    """Exact product; monomials of degree above the effective cap are discarded."""
    cap = _min_cap(cap, _min_cap(a.cap, b.cap))
    out: dict[int, Fraction] = {}
    get = out.get
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            m = ma + mb
            if cap is not None and (m & _DEG_MASK) > cap:
                continue
            if m & _GUARD:
                raise OverflowError(f"monomial exponent exceeds {MAX_EXPONENT}")
            out[m] = get(m, 0) + ca * cb
    return GradedPoly._raw({m: c for m, c in out.items() if c}, cap)


def d_dt(k: int, p: GradedPoly) -> GradedPoly:
    """Partial derivative with respect to ``t_k``."""
    u = unit_t(k)
    sh = _shift(k - 1)
    out = {}
    for m, c in p.terms.items():
        e = (m >> sh) & 0x7F
        if e:
            out[m - u] = e * c
    return GradedPoly._raw(out, p.cap)


def mul_t(k: int, p: GradedPoly) -> GradedPoly:
    """``k * t_k * p``: the action of the creation mode J_{-k}."""
    u = unit_t(k)
    cap = p.cap
    out = {}
    for m, c in p.terms.items():
        n = m + u
        if cap is not None and (n & _DEG_MASK) > cap:
            continue
        if n & _GUARD:
            raise OverflowError(f"exponent of t_{k} exceeds {MAX_EXPONENT}")
        out[n] = k * c
    return GradedPoly._raw(out, cap)


def coeff_of(p: GradedPoly, m: int) -> Fraction:
    return p.coeff(m)


def translate_t(
    p: GradedPoly,
    shifts: Mapping[int, GradedPoly],
    order: int,
    *,
    alpha: int | None = None,
    s_cap: int | None = None,
) -> dict[int, GradedPoly]:
    """Substitute ``t_i -> t_i + shifts[i] / hbar`` in a polynomial sitting at hbar-order ``order``.

    Every substitution lowers the hbar-order by one, so the result is returned
    as ``{hbar order: polynomial}``.  With ``alpha`` given, only ``t_{2k+1}``
    with ``k > alpha`` may be shifted.  ``s_cap`` bounds the s-weight kept.
    """
    for i in shifts:
        _check_t(i)
        if alpha is not None and i < 2 * alpha + 3:
            raise ValueError(f"t_{i} may not be translated when alpha = {alpha}")
    active = {i: c for i, c in shifts.items() if c}
    powers: dict[tuple[int, int], GradedPoly] = {}

    def power(i: int, r: int) -> GradedPoly:
        key = (i, r)
        if key not in powers:
            powers[key] = GradedPoly.one() if r == 0 else (power(i, r - 1) * active[i]).truncate_s(s_cap)
        return powers[key]

    acc: dict[int, dict[int, Fraction]] = {}
    for m, c in p.terms.items():
        exps = [(i, t_exponent(m, i)) for i in active]
        exps = [(i, e) for i, e in exps if e]
        # enumerate how many copies of each shifted variable get replaced
        partial = [(0, m, GradedPoly.const(c))]
        for i, e in exps:
            u = unit_t(i)
            nxt = []
            for r_tot, mono, coef in partial:
                for r in range(e + 1):
                    term = coef * power(i, r) * comb(e, r) if r else coef
                    if r:
                        term = term.truncate_s(s_cap)
                        if not term:
                            continue
                    nxt.append((r_tot + r, mono - r * u, term))
            partial = nxt
        for r_tot, mono, coef in partial:
            bucket = acc.setdefault(order - r_tot, {})
            for sm, v in coef.terms.items():
                n = _mono_mul(mono, sm)
                if s_cap is not None and s_weight(n) > s_cap:
                    continue
                bucket[n] = bucket.get(n, 0) + v
    return {lvl: GradedPoly(d, p.cap) for lvl, d in sorted(acc.items())}
