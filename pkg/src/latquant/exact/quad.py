"""Elements of a real quadratic field Q(sqrt(d))."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC


def _is_squarefree(d: int) -> bool:
    if d < 2:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True, slots=True)
class QuadElem:
    """``r + s*sqrt(d)`` with rational ``r``, ``s`` and square-free ``d >= 2``.

    Rational operands (``int`` or ``Fraction``) mix freely.  Combining two
    elements with ``s != 0`` from different fields raises ``ValueError``.
    """

    r: Fraction
    s: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "r", _frac(self.r))
        object.__setattr__(self, "s", _frac(self.s))
        if not _is_squarefree(self.d):
            raise ValueError(f"d must be a square-free integer >= 2, got {self.d}")

    @classmethod
    def sqrt(cls, d: int) -> QuadElem:
        return cls(Fraction(0), Fraction(1), d)

    @classmethod
    def lift(cls, x, d: int) -> QuadElem:
        if isinstance(x, QuadElem):
            if x.d != d and x.s != 0:
                raise ValueError(f"cannot place an element of Q(sqrt({x.d})) in Q(sqrt({d}))")
            return x if x.d == d else cls(x.r, Fraction(0), d)
        return cls(_frac(x), Fraction(0), d)

    # -- helpers -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.d == self.d:
                return other
            if other.s == 0:
                return QuadElem(other.r, Fraction(0), self.d)
            if self.s == 0:
                # adopt the other field; caller re-dispatches
                return None
            raise ValueError(f"mixed quadratic fields sqrt({self.d}) and sqrt({other.d})")
        if isinstance(other, (int, Fraction)):
            return QuadElem(Fraction(other), Fraction(0), self.d)
        return NotImplemented

    def is_rational(self) -> bool:
        return self.s == 0

    def conjugate(self) -> QuadElem:
        return QuadElem(self.r, -self.s, self.d)

    def norm(self) -> Fraction:
        return self.r * self.r - self.d * self.s * self.s

    def sign(self) -> int:
        r, s = self.r, self.s
        sr = (r > 0) - (r < 0)
        ss = (s > 0) - (s < 0)
        if ss == 0:
            return sr
        if sr == 0 or sr == ss:
            return ss
        # opposite signs: compare r^2 with d s^2
        diff = r * r - self.d * s * s
        return sr if diff > 0 else (-sr if diff < 0 else 0)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return QuadElem.lift(self, other.d) + other
        return QuadElem(self.r + o.r, self.s + o.s, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.r, -self.s, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return QuadElem.lift(self, other.d) - other
        return QuadElem(self.r - o.r, self.s - o.s, self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return QuadElem.lift(self, other.d) * other
        return QuadElem(self.r * o.r + self.d * self.s * o.s, self.r * o.s + self.s * o.r, self.d)

    __rmul__ = __mul__

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadElem(self.r / n, -self.s / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return QuadElem.lift(self, other.d) / other
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElem(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadElem):
            if self.s == 0 and other.s == 0:
                return self.r == other.r
            return self.d == other.d and self.r == other.r and self.s == other.s
        if isinstance(other, (int, Fraction)):
            return self.s == 0 and self.r == other
        return NotImplemented

    def __hash__(self):
        if self.s == 0:
            return hash(self.r)
        return hash((self.r, self.s, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __bool__(self):
        return self.r != 0 or self.s != 0

    def __float__(self):
        return float(self.r) + float(self.s) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadElem({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Canonical literal ``p/q``, ``r/s*sqrt(d)`` or ``p/q + r/s*sqrt(d)``."""
    if isinstance(x, QuadElem):
        if x.s == 0:
            return _fmt_frac(x.r)
        mag = abs(x.s)
        rad = f"sqrt({x.d})" if mag == 1 else f"{_fmt_frac(mag)}*sqrt({x.d})"
        if x.r == 0:
            return rad if x.s > 0 else f"-{rad}"
        return f"{_fmt_frac(x.r)} {'+' if x.s > 0 else '-'} {rad}"
    if isinstance(x, (int, Fraction)):
        return _fmt_frac(Fraction(x))
    raise TypeError(f"not an exact scalar: {x!r}")
