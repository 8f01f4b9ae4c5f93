"""Exact rational scalars and the classical sequences used by the closed forms.

All scalars in the package are :class:`fractions.Fraction`; nothing is ever
converted to floating point.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from functools import lru_cache
from math import comb

__all__ = [
    "Rational",
    "as_rational",
    "double_factorial",
    "euler_number",
    "bernoulli_number",
    "bernoulli_at_half",
]

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact scalar {x!r}")
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


@lru_cache(maxsize=None)
def double_factorial(n: int) -> Fraction:
    """n!! for odd n >= -1, with (-1)!! = 1."""
    if n < -1 or n % 2 == 0:
        raise ValueError(f"double_factorial needs an odd integer >= -1, got {n}")
    out = 1
    for j in range(3, n + 1, 2):
        out *= j
    return Fraction(out)


class _Sequence:
    """Append-only memo table; reads are lock-free, extension is serialized."""

    def __init__(self, first, step):
        self._values = [first]
        self._step = step
        self._lock = threading.Lock()

    def __getitem__(self, n: int) -> Fraction:
        values = self._values
        if n < len(values):
            return values[n]
        with self._lock:
            while len(self._values) <= n:
                # build a new list so concurrent readers never see a partial append
                self._values = self._values + [self._step(self._values)]
            return self._values[n]


def _next_secant(done: list[Fraction]) -> Fraction:
    # done[i] = E_{2i};  sum_{i<=n} C(2n, 2i) E_{2i} = 0 for n >= 1
    n = len(done)
    return -sum(comb(2 * n, 2 * i) * done[i] for i in range(n))


def _next_bernoulli(done: list[Fraction]) -> Fraction:
    # sum_{k<=n} C(n+1, k) B_k = 0 for n >= 1 (B_1 = -1/2)
    n = len(done)
    return -sum(comb(n + 1, k) * done[k] for k in range(n)) / (n + 1)


_SECANT = _Sequence(Fraction(1), _next_secant)
_BERNOULLI = _Sequence(Fraction(1), _next_bernoulli)


def euler_number(k: int) -> Fraction:
    """Secant Euler number: ``1/cosh(z) = sum E_k z^k / k!``.

    Odd indices give 0.  E_2 = -1, E_4 = 5, E_6 = -61.
    """
    if k < 0:
        raise ValueError("euler_number needs k >= 0")
    if k % 2:
        return Fraction(0)
    return _SECANT[k // 2]


def bernoulli_number(k: int) -> Fraction:
    """B_k from ``z/(e^z - 1) = sum B_k z^k / k!`` (so B_1 = -1/2)."""
    if k < 0:
        raise ValueError("bernoulli_number needs k >= 0")
    return _BERNOULLI[k]


def bernoulli_at_half(k: int) -> Fraction:
    """Bernoulli polynomial value B_k(1/2) = (2^(1-k) - 1) B_k."""
    if k < 0:
        raise ValueError("bernoulli_at_half needs k >= 0")
    return (Fraction(2) ** (1 - k) - 1) * bernoulli_number(k)
