"""Dense-ish polynomials over Q in one or two variables, with Sturm isolation."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct
from typing import Iterable, Mapping

from .bigfloat import BigFloat


class ExactPolynomial:
    """Polynomial with rational coefficients in ``nvars`` (1 or 2) variables.

    ``coeffs`` maps exponent tuples to nonzero ``Fraction`` coefficients.
    Instances are immutable; arithmetic returns new polynomials.
    """

    __slots__ = ("nvars", "_c")

    def __init__(self, coeffs: Mapping[tuple, object] | None = None, nvars: int = 1):
        if nvars not in (1, 2):
            raise ValueError("only uni- and bivariate polynomials are supported")
        self.nvars = nvars
        c = {}
        for k, v in (coeffs or {}).items():
            k = (k,) if isinstance(k, int) else tuple(k)
            if len(k) != nvars or any(e < 0 for e in k):
                raise ValueError(f"bad exponent {k} for {nvars} variable(s)")
            v = Fraction(v)
            if v:
                c[k] = c.get(k, Fraction(0)) + v
                if not c[k]:
                    del c[k]
        self._c = c

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_dense(cls, coeffs: Iterable, highest_first: bool = False) -> ExactPolynomial:
        cs = list(coeffs)
        if highest_first:
            cs.reverse()
        return cls({(i,): c for i, c in enumerate(cs)}, 1)

    @classmethod
    def constant(cls, c, nvars: int = 1) -> ExactPolynomial:
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, index: int = 0, nvars: int = 1) -> ExactPolynomial:
        e = [0] * nvars
        e[index] = 1
        return cls({tuple(e): 1}, nvars)

    # -- basic queries -----------------------------------------------------
    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(k) for k in self._c), default=-1)

    def coeff(self, *exps) -> Fraction:
        return self._c.get(tuple(exps), Fraction(0))

    def dense(self) -> list[Fraction]:
        """Univariate coefficients, constant term first."""
        self._require_univariate()
        d = self.degree()
        return [self._c.get((i,), Fraction(0)) for i in range(d + 1)]

    def leading_coefficient(self) -> Fraction:
        self._require_univariate()
        return self._c[(self.degree(),)] if self._c else Fraction(0)

    def _require_univariate(self):
        if self.nvars != 1:
            raise ValueError("operation needs a univariate polynomial")

    def __eq__(self, other):
        if isinstance(other, ExactPolynomial):
            return self.nvars == other.nvars and self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self == ExactPolynomial.constant(other, self.nvars)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._c.items())))

    def __repr__(self):
        if not self._c:
            return "ExactPolynomial(0)"
        names = "x" if self.nvars == 1 else "xy"
        terms = []
        for k in sorted(self._c, reverse=True):
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(names, k) if e)
            terms.append(f"({self._c[k]})" + (f"*{mono}" if mono else ""))
        return "ExactPolynomial(" + " + ".join(terms) + ")"

    # -- arithmetic --------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, ExactPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return ExactPolynomial.constant(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out = dict(self._c)
        for k, v in o._c.items():
            out[k] = out.get(k, 0) + v
        return ExactPolynomial(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return ExactPolynomial({k: -v for k, v in self._c.items()}, self.nvars)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        out: dict = {}
        for k1, v1 in self._c.items():
            for k2, v2 in o._c.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return ExactPolynomial(out, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = Fraction(c)
        return ExactPolynomial({k: v / c for k, v in self._c.items()}, self.nvars)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ExactPolynomial.constant(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self, var: int = 0) -> ExactPolynomial:
        out = {}
        for k, v in self._c.items():
            if k[var]:
                kk = list(k)
                kk[var] -= 1
                out[tuple(kk)] = v * k[var]
        return ExactPolynomial(out, self.nvars)

    def substitute_power(self, power: int) -> ExactPolynomial:
        """Univariate ``p(x**power)``."""
        self._require_univariate()
        return ExactPolynomial({(k[0] * power,): v for k, v in self._c.items()}, 1)

    # -- evaluation --------------------------------------------------------
    def __call__(self, *point):
        return eval_polynomial(self, point)

    def eval_bigfloat(self, point, digits: int) -> BigFloat:
        """Interval evaluation at BigFloat (or exact) coordinates."""
        if len(point) != self.nvars:
            raise ValueError("arity mismatch")
        xs = [p if isinstance(p, BigFloat) else BigFloat(p, digits) for p in point]
        if self.nvars == 1:
            acc = BigFloat(0, digits)
            for c in reversed(self.dense()):
                acc = acc * xs[0] + c
            return acc
        # nested Horner: outer in y, inner in x
        by_y: dict = {}
        for (i, j), v in self._c.items():
            by_y.setdefault(j, {})[i] = v
        acc = BigFloat(0, digits)
        for j in range(max(by_y, default=0), -1, -1):
            row = by_y.get(j, {})
            inner = BigFloat(0, digits)
            for i in range(max(row, default=0), -1, -1):
                inner = inner * xs[0] + row.get(i, 0)
            acc = acc * xs[1] + inner
        return acc


def eval_polynomial(p: ExactPolynomial, point) -> Fraction:
    """Exact value of ``p`` at a rational point (tuple of length ``p.nvars``)."""
    if not isinstance(point, (tuple, list)):
        point = (point,)
    if len(point) != p.nvars:
        raise ValueError(f"point has arity {len(point)}, polynomial has {p.nvars} variable(s)")
    pt = [Fraction(x) for x in point]
    if p.nvars == 1:
        acc = Fraction(0)
        for c in reversed(p.dense()) if not p.is_zero() else []:
            acc = acc * pt[0] + c
        return acc
    total = Fraction(0)
    for k, v in p._c.items():
        total += v * pt[0] ** k[0] * pt[1] ** k[1]
    return total


# -- univariate algebra ------------------------------------------------------


def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _divmod_dense(a: list, b: list):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] / lb
        q[shift] = f
        for i, bc in enumerate(b):
            a[shift + i] -= f * bc
        a.pop()
    return _trim(q), _trim(a)


def _gcd_dense(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod_dense(a, b)
        a, b = b, r
    if not a:
        return a
    lc = a[-1]
    return [c / lc for c in a]


def squarefree_part(p: ExactPolynomial) -> ExactPolynomial:
    """``p / gcd(p, p')`` made monic."""
    p._require_univariate()
    if p.is_zero():
        raise ValueError("zero polynomial has no square-free part")
    a = p.dense()
    g = _gcd_dense(a, p.derivative().dense())
    q, r = _divmod_dense(a, g) if len(g) > 1 else (a, [])
    assert not r
    lc = q[-1]
    return ExactPolynomial.from_dense([c / lc for c in q])


def sturm_sequence(p: ExactPolynomial) -> list[list[Fraction]]:
    p._require_univariate()
    seq = [p.dense(), p.derivative().dense()]
    while _trim(list(seq[-1])):
        _, r = _divmod_dense(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if _trim(list(s))]


def _eval_dense(c: list, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _variations(seq, x: Fraction) -> int:
    signs = [v for v in (_eval_dense(s, x) for s in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(p: ExactPolynomial, lo, hi) -> int:
    """Distinct real roots of ``p`` in the half-open interval ``(lo, hi]``."""
    sq = squarefree_part(p)
    seq = sturm_sequence(sq)
    return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))


def isolate_real_roots(p: ExactPolynomial, interval) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals each holding exactly one distinct root.

    Roots are those in the closed input interval.  Multiple roots count once
    (isolation runs on the square-free part).  A returned interval ``(x, x)``
    means ``x`` is an exact rational root.
    """
    p._require_univariate()
    if p.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    lo, hi = (Fraction(v) for v in interval)
    if lo > hi:
        raise ValueError("interval endpoints out of order")
    sq = squarefree_part(p)
    if sq.degree() < 1:
        return []
    seq = sturm_sequence(sq)
    dense = sq.dense()
    out: list = []
    if _eval_dense(dense, lo) == 0:
        out.append((lo, lo))
    stack = [(lo, hi, _variations(seq, lo) - _variations(seq, hi))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            if _eval_dense(dense, b) == 0:
                out.append((b, b))
            else:
                out.append((a, b))
            continue
        m = (a + b) / 2
        vm = _variations(seq, m)
        stack.append((m, b, vm - _variations(seq, b)))
        stack.append((a, m, _variations(seq, a) - vm))
    out.sort()
    return out


def refine_root(p: ExactPolynomial, interval, tol) -> Fraction:
    """Midpoint of a bracket of width ``<= 2*tol`` around the isolated root.

    The bracket is maintained by exact sign evaluation of the square-free
    part, so the result is within ``tol`` of the true root.  Exact rational
    roots met along the way are returned as-is.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = (Fraction(v) for v in interval)
    sq = squarefree_part(p)
    dense = sq.dense()
    if len(dense) == 2:  # linear: exact
        return -dense[0] / dense[1]
    fa, fb = _eval_dense(dense, a), _eval_dense(dense, b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError("no certified sign change on the interval")
    while b - a > 2 * tol:
        m = (a + b) / 2
        fm = _eval_dense(dense, m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a + b) / 2


def refine_bracket(p: ExactPolynomial, interval, tol) -> tuple[Fraction, Fraction]:
    """Like :func:`refine_root` but returns the certified bracket itself."""
    tol = Fraction(tol)
    a, b = (Fraction(v) for v in interval)
    dense = squarefree_part(p).dense()
    fa = _eval_dense(dense, a)
    if fa == 0:
        return a, a
    fb = _eval_dense(dense, b)
    if fb == 0:
        return b, b
    if (fa > 0) == (fb > 0):
        raise ValueError("no certified sign change on the interval")
    while b - a > tol:
        m = (a + b) / 2
        fm = _eval_dense(dense, m)
        if fm == 0:
            return m, m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return a, b


def monomials(nvars: int, max_total_degree: int):
    """All exponent tuples with total degree <= ``max_total_degree``."""
    for k in _iproduct(range(max_total_degree + 1), repeat=nvars):
        if sum(k) <= max_total_degree:
            yield k
