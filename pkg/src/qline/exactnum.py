"""Exact rational and complex-rational scalars.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  Complex rationals are a small immutable pair on top of it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

BigRat = Fraction

Scalar = Union[int, Fraction, "CplxRat"]


def _rat(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot convert {v!r} to an exact rational")


@dataclass(frozen=True, slots=True)
class CplxRat:
    """Exact complex number ``re + im*i`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _rat(self.re))
        object.__setattr__(self, "im", _rat(self.im))

    @classmethod
    def of(cls, v) -> "CplxRat":
        if isinstance(v, CplxRat):
            return v
        if isinstance(v, complex):
            raise TypeError("floating complex values are not exact")
        return cls(_rat(v), Fraction(0))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = CplxRat.of(other)
        except TypeError:
            return NotImplemented
        return CplxRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CplxRat(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = CplxRat.of(other)
        except TypeError:
            return NotImplemented
        return CplxRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return CplxRat.of(other) - self

    def __mul__(self, other):
        try:
            o = CplxRat.of(other)
        except TypeError:
            return NotImplemented
        return CplxRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "CplxRat":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return CplxRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = CplxRat.of(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return CplxRat.of(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        out = CplxRat(1)
        for _ in range(abs(n)):
            out = out * base
        return out

    def conj(self) -> "CplxRat":
        return CplxRat(self.re, -self.im)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (CplxRat, int, Fraction)):
            o = CplxRat.of(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return format_cplx(self)

    def __repr__(self):
        return f"CplxRat({format_cplx(self)})"


ZERO = CplxRat(0)
ONE = CplxRat(1)
I = CplxRat(0, 1)


def make_q(numer: int, denom: int = 1) -> Fraction:
    """Return the deformation parameter ``numer/denom`` after checking q > 1."""
    q = Fraction(numer, denom)
    if q <= 1:
        raise ValueError(f"q must exceed 1, got {q}")
    return q


def z_of(q: Fraction) -> Fraction:
    """``z = (q-1)/q``."""
    q = _rat(q)
    if q <= 1:
        raise ValueError(f"q must exceed 1, got {q}")
    return (q - 1) / q


def qpow(q: Fraction, n: int) -> Fraction:
    """Exact integer power, negative exponents allowed."""
    return _rat(q) ** int(n)


def qint(s: Fraction, n: int) -> Fraction:
    """The q-integer ``(s**n - 1)/(s - 1)``; equals ``n`` when ``s == 1``."""
    s = _rat(s)
    if s == 1:
        return Fraction(n)
    return (s**n - 1) / (s - 1)


# text form ------------------------------------------------------------------

def format_rat(r: Fraction) -> str:
    r = _rat(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def format_cplx(c: CplxRat) -> str:
    c = CplxRat.of(c)
    if c.im == 0:
        return format_rat(c.re)
    im = "i" if c.im == 1 else "-i" if c.im == -1 else f"{format_rat(c.im)}*i"
    if c.re == 0:
        return im
    if not im.startswith("-"):
        im = "+" + im
    return f"{format_rat(c.re)}{im}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_CPLX_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?P<im1>[+-](?:\d+(?:/\d+)?\*)?i)?|(?P<im2>[+-]?(?:\d+(?:/\d+)?\*)?i))$"
)


def parse_rat(text: str) -> Fraction:
    t = text.strip()
    if not re.fullmatch(_RAT, t):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(t)


def _parse_imag(t: str) -> Fraction:
    body = t[:-1].rstrip("*")
    if body in ("", "+"):
        return Fraction(1)
    if body == "-":
        return Fraction(-1)
    return Fraction(body)


def parse_cplx(text: str) -> CplxRat:
    """Parse ``"p/q"``, ``"p/q+r/s*i"``, ``"-i"`` and similar forms."""
    t = text.replace(" ", "")
    m = _CPLX_RE.match(t)
    if not m:
        raise ValueError(f"not a complex rational literal: {text!r}")
    if m.group("im2") is not None:
        return CplxRat(0, _parse_imag(m.group("im2")))
    re_part = Fraction(m.group("re"))
    im_part = _parse_imag(m.group("im1")) if m.group("im1") else Fraction(0)
    return CplxRat(re_part, im_part)
