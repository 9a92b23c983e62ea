"""High-precision floats that carry a rigorous error bound.

A :class:`BigFloat` wraps an outward-rounded interval from mpmath's interval
context.  ``value`` is the interval midpoint and ``err`` its radius, so the
true value always lies in ``value +/- err``.  Each precision gets its own
private interval context; nothing mutates mpmath's global state, which keeps
evaluation safe to run from several threads.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .quad import QuadElem

DEFAULT_DIGITS = 60
GUARD_DIGITS = 12


@functools.lru_cache(maxsize=None)
def _context(digits: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.dps = digits + GUARD_DIGITS
    return ctx


def _iv_from_exact(ctx, x):
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return ctx.mpf(x)
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / ctx.mpf(x.denominator)
    if isinstance(x, QuadElem):
        out = _iv_from_exact(ctx, x.r)
        if x.s:
            out = out + _iv_from_exact(ctx, x.s) * ctx.sqrt(ctx.mpf(x.d))
        return out
    if isinstance(x, float):
        # floats are taken at face value (exactly representable binary number)
        return ctx.mpf(mpmath.mpf(x))
    if isinstance(x, mpmath.mpf):
        return ctx.mpf(x)
    raise TypeError(f"cannot convert {type(x).__name__} to BigFloat")


class BigFloat:
    """Interval-backed high-precision number."""

    __slots__ = ("_iv", "digits")

    def __init__(self, x=0, digits: int = DEFAULT_DIGITS):
        self.digits = int(digits)
        ctx = _context(self.digits)
        if isinstance(x, BigFloat):
            self._iv = ctx.convert(x._iv) if x.digits != self.digits else x._iv
        elif isinstance(x, str):
            self._iv = ctx.mpf(x)
        else:
            self._iv = _iv_from_exact(ctx, x)

    @classmethod
    def _wrap(cls, iv, digits):
        out = cls.__new__(cls)
        out._iv = iv
        out.digits = digits
        if not (mpmath.isfinite(out.lower) and mpmath.isfinite(out.upper)):
            raise ZeroDivisionError("interval blew up (division by a value not bounded away from 0)")
        return out

    @classmethod
    def interval(cls, lo, hi, digits: int = DEFAULT_DIGITS) -> BigFloat:
        """The hull of two exact endpoints (rounded outward)."""
        ctx = _context(int(digits))
        a, b = _iv_from_exact(ctx, lo), _iv_from_exact(ctx, hi)
        return cls._wrap(ctx.mpf([a.a, b.b]), int(digits))

    def hull(self, other: BigFloat) -> BigFloat:
        return BigFloat._wrap(self.ctx.mpf([min(self.lower, other.lower), max(self.upper, other.upper)]), self.digits)

    @property
    def ctx(self) -> MPIntervalContext:
        return _context(self.digits)

    # -- views -------------------------------------------------------------
    @property
    def lower(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._iv._mpi_[0])

    @property
    def upper(self) -> mpmath.mpf:
        return mpmath.mp.make_mpf(self._iv._mpi_[1])

    @property
    def value(self) -> mpmath.mpf:
        with mpmath.workprec(self.ctx.prec + 4):
            return (self.lower + self.upper) / 2

    @property
    def err(self) -> mpmath.mpf:
        with mpmath.workprec(self.ctx.prec + 4):
            return (self.upper - self.lower) / 2

    def contains(self, x) -> bool:
        """True when the (exact or interval) ``x`` lies inside this interval."""
        other = x if isinstance(x, BigFloat) else BigFloat(x, self.digits)
        return self.lower <= other.lower and other.upper <= self.upper

    def sign(self) -> int:
        """Certified sign; ``0`` when the interval straddles zero."""
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return 0

    def __float__(self):
        return float(self.value)

    def to_decimal(self, digits: int | None = None) -> str:
        """Decimal rendering with ``digits`` significant digits."""
        k = digits if digits is not None else self.digits
        return mpmath.nstr(self.value, k, strip_zeros=False)

    def __repr__(self):
        return f"BigFloat({mpmath.nstr(self.value, min(self.digits, 30))} +/- {mpmath.nstr(self.err, 3)})"

    # -- arithmetic --------------------------------------------------------
    def _other(self, other):
        if isinstance(other, BigFloat):
            if other.digits == self.digits:
                return other._iv, self.digits
            d = min(self.digits, other.digits)
            return _context(d).convert(other._iv), d
        return _iv_from_exact(self.ctx, other), self.digits

    def _binary(self, other, op):
        try:
            o, d = self._other(other)
        except TypeError:
            return NotImplemented
        a = self._iv if d == self.digits else _context(d).convert(self._iv)
        return BigFloat._wrap(op(a, o), d)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __radd__(self, other):
        return self._binary(other, lambda a, b: b + a)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    def __rmul__(self, other):
        return self._binary(other, lambda a, b: b * a)

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binary(other, lambda a, b: b / a)

    def __neg__(self):
        return BigFloat._wrap(-self._iv, self.digits)

    def __abs__(self):
        return self if self.sign() >= 0 else -self

    def __pow__(self, k):
        if isinstance(k, int):
            return BigFloat._wrap(self._iv ** k, self.digits)
        if isinstance(k, Fraction):
            return self.rational_power(k)
        return NotImplemented

    def sqrt(self) -> BigFloat:
        if self.upper < 0:
            raise ValueError("square root of a certified-negative value")
        if self.lower < 0:
            raise ValueError("square root of a value whose sign is not certified")
        return BigFloat._wrap(self.ctx.sqrt(self._iv), self.digits)

    def rational_power(self, q: Fraction) -> BigFloat:
        """``self ** q`` for rational ``q``; needs a certified-positive base
        unless ``q`` is an integer."""
        q = Fraction(q)
        if q.denominator == 1:
            return self ** int(q)
        if self.sign() <= 0:
            raise ValueError("fractional power of a value not certified positive")
        ctx = self.ctx
        e = ctx.mpf(q.numerator) / ctx.mpf(q.denominator)
        return BigFloat._wrap(ctx.exp(ctx.log(self._iv) * e), self.digits)

    def log(self) -> BigFloat:
        if self.sign() <= 0:
            raise ValueError("log of a value not certified positive")
        return BigFloat._wrap(self.ctx.log(self._iv), self.digits)

    # -- certified comparisons --------------------------------------------
    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def certainly_positive(self) -> bool:
        return self.sign() > 0


def bf_pi(digits: int = DEFAULT_DIGITS) -> BigFloat:
    ctx = _context(digits)
    return BigFloat._wrap(ctx.pi + 0, digits)


def bf_gamma_half_integer(k2: int, digits: int = DEFAULT_DIGITS) -> BigFloat:
    """``Gamma(k2/2)`` for a positive integer ``k2``, exactly from pi."""
    if k2 <= 0:
        raise ValueError("k2 must be positive")
    if k2 % 2 == 0:
        return BigFloat(math.factorial(k2 // 2 - 1), digits)
    # Gamma(m + 1/2) = (2m)! / (4^m m!) sqrt(pi)
    m = k2 // 2
    coef = Fraction(math.factorial(2 * m), 4**m * math.factorial(m))
    return bf_pi(digits).sqrt() * coef


# -- expression trees --------------------------------------------------------


class Expr:
    """Arithmetic expression over exact constants, evaluated by :func:`bigfloat_eval`."""

    def __add__(self, o):
        return Node("+", (self, lift(o)))

    def __radd__(self, o):
        return Node("+", (lift(o), self))

    def __sub__(self, o):
        return Node("-", (self, lift(o)))

    def __rsub__(self, o):
        return Node("-", (lift(o), self))

    def __mul__(self, o):
        return Node("*", (self, lift(o)))

    def __rmul__(self, o):
        return Node("*", (lift(o), self))

    def __truediv__(self, o):
        return Node("/", (self, lift(o)))

    def __rtruediv__(self, o):
        return Node("/", (lift(o), self))

    def __neg__(self):
        return Node("neg", (self,))

    def __pow__(self, q):
        return Node("pow", (self,), Fraction(q))


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        if not isinstance(value, (int, Fraction, QuadElem)):
            raise TypeError(f"constants must be exact, got {type(value).__name__}")
        self.value = value

    def __repr__(self):
        return f"Const({self.value})"


class Node(Expr):
    __slots__ = ("op", "args", "param")

    def __init__(self, op, args, param=None):
        self.op = op
        self.args = args
        self.param = param

    def __repr__(self):
        return f"Node({self.op!r}, {self.args!r})"


def lift(x) -> Expr:
    return x if isinstance(x, Expr) else Const(x)


def sqrt(x) -> Expr:
    return Node("sqrt", (lift(x),))


def _eval(e: Expr, digits: int) -> BigFloat:
    if isinstance(e, Const):
        return BigFloat(e.value, digits)
    args = [_eval(a, digits) for a in e.args]
    op = e.op
    if op == "+":
        return args[0] + args[1]
    if op == "-":
        return args[0] - args[1]
    if op == "*":
        return args[0] * args[1]
    if op == "/":
        if args[1].sign() == 0:
            raise ZeroDivisionError("division by a value not bounded away from zero")
        return args[0] / args[1]
    if op == "neg":
        return -args[0]
    if op == "sqrt":
        return args[0].sqrt()
    if op == "pow":
        return args[0].rational_power(e.param)
    raise ValueError(f"unknown operator {op!r}")


def bigfloat_eval(expr, digits: int = DEFAULT_DIGITS) -> BigFloat:
    """Evaluate ``expr`` so that the error is below ``10**-digits`` relative.

    Precision is raised automatically (up to 8x) when cancellation eats the
    guard digits.  Exact constants pass through with zero width.
    """
    expr = lift(expr)
    work = digits
    for _ in range(4):
        out = _eval(expr, work)
        mag = abs(out.value)
        bound = mpmath.mpf(10) ** (-digits) * (mag if mag > 0 else 1)
        if out.err <= bound:
            return BigFloat(out, digits) if work != digits else out
        work *= 2
    raise ArithmeticError(f"could not reach {digits} digits (err {mpmath.nstr(out.err, 3)})")
