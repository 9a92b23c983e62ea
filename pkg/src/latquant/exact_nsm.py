"""Closed-form second moments of the 13- and 14-dimensional families.

14 dimensions, one parameter ``a`` (``v = a^2``)::

    G(a)  = 3^(-33/14) / (14 D) * P(v) * a^(-60/7)
    f(v)  = [2 v P'(v) - (60/7) P(v)] / (27 * 14 * D)        (= 3^(-9/14) a^(67/7) G'(a))

13 dimensions, scales ``(1, a2, a3)`` (``v2 = a2^2``, ``v3 = a3^2``,
``V = a2^5 a3``)::

    G_A = N(v2, v3) / (C V^(28/13)),      N = sum c[i,j] v2^i v3^j
    G_B = G_A - Q^14 / (C_B V^(28/13)),   Q = 8 v2 - 83 v3 + 76

Each expression is only valid inside its own phase; evaluating outside is
allowed but raises a :class:`PhaseWarning`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from . import catalog
from .exact import BigFloat, ExactPolynomial, QuadElem, count_roots, isolate_real_roots
from .exact.poly import refine_bracket

ACCEPT_DIGITS = 80

PHASE14 = (Fraction(5, 3), Fraction(13, 7))  # open interval for v = a^2


class PhaseWarning(UserWarning):
    pass


class CertificationError(RuntimeError):
    pass


def _bf(x, digits):
    return x if isinstance(x, BigFloat) else BigFloat(x, digits)


def _square(a):
    """``a^2`` kept exact where possible."""
    if isinstance(a, (int, Fraction)):
        return Fraction(a) ** 2
    if isinstance(a, QuadElem):
        sq = a * a
        return sq.r if sq.is_rational else sq
    return a * a


# -- 14 dimensions -----------------------------------------------------------------


@lru_cache(maxsize=None)
def moment_poly14() -> ExactPolynomial:
    """``P(v)`` such that the second-moment integral is ``sqrt(3) P(a^2) / (D a^4)``."""
    return ExactPolynomial.from_dense(catalog.B14_MOMENT_POLY, highest_first=True)


def in_phase14(a) -> bool:
    v = _square(a)
    if isinstance(v, BigFloat):
        return (v - PHASE14[0]).sign() > 0 and (v - PHASE14[1]).sign() < 0
    if isinstance(v, float):
        return float(PHASE14[0]) < v < float(PHASE14[1])
    return PHASE14[0] < v < PHASE14[1]


def g14(a, digits: int = ACCEPT_DIGITS) -> BigFloat:
    """NSM of the 14-dimensional lattice at scale ``a``."""
    if not in_phase14(a):
        warnings.warn(f"a = {a} is outside the phase where the closed form holds", PhaseWarning, stacklevel=2)
    A = _bf(a, digits)
    v = A * A
    P = moment_poly14().eval_bigfloat((v,), digits)
    k = BigFloat(3, digits).rational_power(Fraction(-33, 14)) / (14 * catalog.B14_MOMENT_DENOM)
    return k * P * A.rational_power(Fraction(-60, 7))


def _f14_derived() -> ExactPolynomial:
    P = moment_poly14()
    v = ExactPolynomial.variable()
    return (2 * v * P.derivative() - Fraction(60, 7) * P) / (27 * 14 * catalog.B14_MOMENT_DENOM)


@lru_cache(maxsize=None)
def f14() -> ExactPolynomial:
    """Stationarity polynomial of the 14-dimensional family.

    Returns the stored coefficients after checking them against the
    derivative of the moment polynomial; a mismatch means a transcription
    error and raises.
    """
    printed = ExactPolynomial.from_dense(
        [Fraction(c, catalog.B14_STATIONARITY_DENOM) for c in catalog.B14_STATIONARITY_POLY], highest_first=True
    )
    if printed != _f14_derived():
        raise RuntimeError("stationarity coefficients disagree with the derivative of the moment polynomial")
    return printed


@dataclass(frozen=True)
class Optimum14:
    a_opt: BigFloat
    G_opt: BigFloat
    v_bracket: tuple[Fraction, Fraction]
    root_index: int
    positive_roots: int

    def to_dict(self, digits: int = 15) -> dict:
        return {
            "a_opt": self.a_opt.to_decimal(digits),
            "G_opt": self.G_opt.to_decimal(digits),
            "v_bracket": [str(x) for x in self.v_bracket],
            "root_index": self.root_index,
            "positive_roots": self.positive_roots,
        }


def _cauchy_bound(p: ExactPolynomial) -> Fraction:
    d = p.dense()
    lead = abs(d[-1])
    return 1 + max(abs(c) for c in d[:-1]) / lead


def optimize_g14(tol=Fraction(1, 10**40), digits: int = ACCEPT_DIGITS) -> Optimum14:
    """Minimize the 14-dimensional NSM over its phase.

    All positive roots of ``f`` are isolated with Sturm sequences; exactly one
    must fall inside the phase.  Its bracket is refined by exact bisection,
    so the sign change of ``f`` (hence of ``G'``) is certified.
    """
    f = f14()
    tol = Fraction(tol)
    roots = isolate_real_roots(f, (Fraction(0), _cauchy_bound(f)))
    roots = [r for r in roots if r[1] > 0]
    inside = [(i, r) for i, r in enumerate(roots) if r[0] >= PHASE14[0] and r[1] <= PHASE14[1]]
    if len(inside) != 1:
        # the isolating interval may straddle a phase endpoint; tighten
        inside = []
        for i, r in enumerate(roots):
            lo, hi = r
            if hi > PHASE14[0] and lo < PHASE14[1]:
                lo, hi = refine_bracket(f, r, Fraction(1, 10**12))
                if PHASE14[0] < lo and hi < PHASE14[1]:
                    inside.append((i, (lo, hi)))
    if len(inside) != 1:
        raise CertificationError(f"expected one stationary point in the phase, found {len(inside)}")
    idx, br = inside[0]
    lo, hi = refine_bracket(f, br, min(tol, Fraction(1, 10**40)))
    if count_roots(f, Fraction(0), hi) != idx + 1:
        raise CertificationError("root index inconsistent with the Sturm count")
    v = BigFloat.interval(lo, hi, digits)
    a = v.sqrt()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PhaseWarning)
        G = g14(a, digits)
    return Optimum14(a, G, (lo, hi), idx + 1, len(roots))


@lru_cache(maxsize=None)
def optimize_g14_cached() -> dict:
    res = optimize_g14()
    return {"a_opt": res.a_opt, "G_opt": res.G_opt}


@dataclass(frozen=True)
class SecondMomentABG:
    alpha: object
    beta: object
    gamma: object = None

    def as_tuple(self):
        return (self.alpha, self.beta) if self.gamma is None else (self.alpha, self.beta, self.gamma)


def volume14(a, digits: int = ACCEPT_DIGITS) -> BigFloat:
    A = _bf(a, digits)
    return 9 * BigFloat(QuadElem.sqrt(3), digits) * A**4


def alpha_beta_14(a, digits: int = ACCEPT_DIGITS) -> SecondMomentABG:
    """Diagonal values of the block-scalar second-moment matrix
    (``alpha`` on the first 10 coordinates, ``beta`` on the last 4)."""
    A = _bf(a, digits)
    V = volume14(A, digits)
    G = g14(A, digits)
    fv = f14().eval_bigfloat((A * A,), digits)
    base = V.rational_power(Fraction(1, 7)) * G
    corr = 5103 * fv / (V * V)
    return SecondMomentABG(base - corr / 10, base + corr / 4)


# -- 13 dimensions -------------------------------------------------------------------

C13 = catalog.B13_PHASE_A_DENOM
CB13 = catalog.B13_PHASE_B_CORRECTION_DENOM
C_OVER_CB = Fraction(C13, CB13)


@lru_cache(maxsize=None)
def numerator13() -> ExactPolynomial:
    """``N(v2, v3)`` from the 120-entry integer table."""
    return ExactPolynomial({(i, j): c for i, j, c in catalog.nsm13_table()}, nvars=2)


@lru_cache(maxsize=None)
def phase_interface13() -> ExactPolynomial:
    """``Q = 8 v2 - 83 v3 + 76``; G_A and G_B agree to high order on ``Q = 0``."""
    return ExactPolynomial({(1, 0): 8, (0, 1): -83, (0, 0): 76}, nvars=2)


@lru_cache(maxsize=None)
def numerator13_B() -> ExactPolynomial:
    """``H = N - (C / C_B) Q^14`` so that ``G_B = H / (C V^(28/13))``."""
    return numerator13() - C_OVER_CB * phase_interface13() ** 14


def _g13(H: ExactPolynomial, a2, a3, digits):
    A2, A3 = _bf(a2, digits), _bf(a3, digits)
    v2, v3 = A2 * A2, A3 * A3
    val = H.eval_bigfloat((v2, v3), digits)
    V = A2**5 * A3
    return val / (C13 * V.rational_power(Fraction(28, 13)))


def _phase_flag13(a2, a3, want_b: bool):
    q = phase_interface13()
    v2, v3 = _square(a2), _square(a3)
    if isinstance(v2, (Fraction, int)) and isinstance(v3, (Fraction, int)):
        s = q(v2, v3)
    else:
        s = 8 * float(v2) - 83 * float(v3) + 76
    if (want_b and s > 0) or (not want_b and s < 0):
        side = "A" if s > 0 else "B"
        warnings.warn(
            f"(a2, a3) = ({a2}, {a3}) lies on the phase-{side} side of 8a2^2 - 83a3^2 + 76 = 0",
            PhaseWarning,
            stacklevel=3,
        )


def gA13(a2, a3, digits: int = ACCEPT_DIGITS) -> BigFloat:
    _phase_flag13(a2, a3, want_b=False)
    return _g13(numerator13(), a2, a3, digits)


def gB13(a2, a3, digits: int = ACCEPT_DIGITS) -> BigFloat:
    _phase_flag13(a2, a3, want_b=True)
    return _g13(numerator13_B(), a2, a3, digits)


def phase_gap13(a2, a3, digits: int = ACCEPT_DIGITS) -> BigFloat:
    """``G_A - G_B = Q^14 / (C_B V^(28/13))`` evaluated directly (no cancellation)."""
    A2, A3 = _bf(a2, digits), _bf(a3, digits)
    q = phase_interface13().eval_bigfloat((A2 * A2, A3 * A3), digits)
    V = A2**5 * A3
    return q**14 / (CB13 * V.rational_power(Fraction(28, 13)))


@dataclass(frozen=True)
class FBDerivation:
    """Chain-rule bookkeeping for one partial derivative of G_B.

    ``residual_a2`` and ``residual_a3`` are the exponents of ``a2`` and
    ``a3`` left over after multiplying the derivative by its prefactor;
    both must be zero for the result to be a polynomial.
    """

    poly: ExactPolynomial
    prefactor: tuple[Fraction, Fraction]
    residual_a2: Fraction
    residual_a3: Fraction


def _derive_fB(var: int, prefactor: tuple[Fraction, Fraction]) -> FBDerivation:
    # G_B = H(v) * v2^e2 * v3^e3 / C  with  (e2, e3) = (-70/13, -14/13)
    H = numerator13_B()
    e = [Fraction(-70, 13), Fraction(-14, 13)]
    # d/da_k [H v2^e2 v3^e3] = 2 a_k v_k^(e_k - 1) v_other^(e_other) [v_k H_k + e_k H]
    vk = ExactPolynomial.variable(var, 2)
    bracket = vk * H.derivative(var) + e[var] * H
    poly = 2 * bracket / C13
    # remaining monomial: a_k * a_k^(2(e_k - 1)) * a_o^(2 e_o) times prefactor a2^p2 a3^p3
    exps = [2 * e[0], 2 * e[1]]
    exps[var] = 1 + 2 * (e[var] - 1)
    res2 = exps[0] + prefactor[0]
    res3 = exps[1] + prefactor[1]
    return FBDerivation(poly, prefactor, res2, res3)


@lru_cache(maxsize=None)
def fB_derivations() -> tuple[FBDerivation, FBDerivation]:
    d2 = _derive_fB(0, (Fraction(153, 13), Fraction(28, 13)))
    d3 = _derive_fB(1, (Fraction(140, 13), Fraction(41, 13)))
    for d in (d2, d3):
        if d.residual_a2 or d.residual_a3:
            raise RuntimeError("fractional powers do not cancel: coefficient table is inconsistent")
    return d2, d3


def fB_polys() -> tuple[ExactPolynomial, ExactPolynomial]:
    """``(f2, f3)`` with ``dG_B/da2 = f2 / (a2^(153/13) a3^(28/13))`` and
    ``dG_B/da3 = f3 / (a2^(140/13) a3^(41/13))``."""
    d2, d3 = fB_derivations()
    return d2.poly, d3.poly


def _eval2(p: ExactPolynomial, v2, v3, digits):
    return p.eval_bigfloat((v2, v3), digits)


@dataclass(frozen=True)
class Optimum13:
    a2: BigFloat
    a3: BigFloat
    G_opt: BigFloat
    v_box: tuple  # ((lo2, hi2), (lo3, hi3)) exact rationals
    newton_steps: int
    hessian: tuple
    certified: bool

    def to_dict(self, digits: int = 15) -> dict:
        return {
            "a": ["1", self.a2.to_decimal(digits), self.a3.to_decimal(digits)],
            "G_opt": self.G_opt.to_decimal(digits),
            "v_box": [[str(x) for x in r] for r in self.v_box],
            "newton_steps": self.newton_steps,
            "hessian": [[mpmath.nstr(x, 10) for x in row] for row in self.hessian],
            "certified": self.certified,
        }


def _jacobian_polys():
    f2, f3 = fB_polys()
    return ((f2.derivative(0), f2.derivative(1)), (f3.derivative(0), f3.derivative(1)))


def _newton(start, digits, max_steps=200):
    f2, f3 = fB_polys()
    J = _jacobian_polys()
    with mpmath.workdps(digits + 20):
        x = [mpmath.mpf(Fraction(start[0]).numerator) / Fraction(start[0]).denominator,
             mpmath.mpf(Fraction(start[1]).numerator) / Fraction(start[1]).denominator]
        dense = {id(p): [(k, mpmath.mpf(c.numerator) / c.denominator) for k, c in p.coeffs.items()] for p in (f2, f3, *J[0], *J[1])}

        def ev(p, x):
            return mpmath.fsum(c * x[0] ** k[0] * x[1] ** k[1] for k, c in dense[id(p)])

        def resid(x):
            return [ev(f2, x), ev(f3, x)]

        r = resid(x)
        eps = mpmath.mpf(10) ** (-(digits + 5))
        for step in range(max_steps):
            M = mpmath.matrix([[ev(J[0][0], x), ev(J[0][1], x)], [ev(J[1][0], x), ev(J[1][1], x)]])
            dx = mpmath.lu_solve(M, mpmath.matrix(r))
            lam = mpmath.mpf(1)
            nr = mpmath.norm(mpmath.matrix(r))
            while True:
                cand = [x[0] - lam * dx[0], x[1] - lam * dx[1]]
                rc = resid(cand)
                if mpmath.norm(mpmath.matrix(rc)) < nr or lam < mpmath.mpf(2) ** -30:
                    break
                lam /= 2
            x, r = cand, rc
            if mpmath.norm(dx) * lam < eps:
                return x, step + 1
        raise CertificationError("Newton iteration did not converge")


def _to_fraction(x) -> Fraction:
    if not isinstance(x, mpmath.mpf):
        x = mpmath.mpf(x)
    m, e = x.man_exp
    return Fraction(int(m)) * (Fraction(2) ** int(e))


def krawczyk_certify(center, radius: Fraction, digits: int):
    """Krawczyk test on the box ``center +- radius``.

    Returns True when ``K(X) = c - Y f(c) + (I - Y J(X)) (X - c)`` lies in the
    interior of ``X``; then ``X`` holds a unique zero of ``(f2, f3)``.
    """
    f2, f3 = fB_polys()
    J = _jacobian_polys()
    c = [Fraction(x) for x in center]
    X = [BigFloat.interval(ci - radius, ci + radius, digits) for ci in c]
    fc = [_eval2(f2, c[0], c[1], digits), _eval2(f3, c[0], c[1], digits)]
    JX = [[_eval2(J[i][j], X[0], X[1], digits) for j in range(2)] for i in range(2)]
    # Y = inverse of the midpoint Jacobian (any nonsingular matrix works)
    with mpmath.workdps(digits + 10):
        Jm = mpmath.matrix([[JX[i][j].value for j in range(2)] for i in range(2)])
        Yf = mpmath.inverse(Jm)
    Y = [[_to_fraction(Yf[i, j]) for j in range(2)] for i in range(2)]
    D = [BigFloat.interval(-radius, radius, digits)] * 2
    K = []
    for i in range(2):
        acc = BigFloat(c[i], digits) - (Y[i][0] * fc[0] + Y[i][1] * fc[1])
        for j in range(2):
            m = (1 if i == j else 0) - (Y[i][0] * JX[0][j] + Y[i][1] * JX[1][j])
            acc = acc + m * D[j]
        K.append(acc)
    ok = all(K[i].lower > X[i].lower and K[i].upper < X[i].upper for i in range(2))
    return ok, K


def _hessian_fd(v, digits, h=None):
    """Finite-difference Hessian of G_B in (a2, a3) at the point ``a = sqrt(v)``."""
    with mpmath.workdps(digits + 20):
        a = [mpmath.sqrt(mpmath.mpf(x.numerator) / x.denominator) for x in v]
        h = h or mpmath.mpf(10) ** (-(digits // 4))

        def g(x, y):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PhaseWarning)
                return _g13(numerator13_B(), BigFloat(_to_fraction(x), digits + 20), BigFloat(_to_fraction(y), digits + 20), digits + 20).value

        g0 = g(a[0], a[1])
        hxx = (g(a[0] + h, a[1]) - 2 * g0 + g(a[0] - h, a[1])) / h**2
        hyy = (g(a[0], a[1] + h) - 2 * g0 + g(a[0], a[1] - h)) / h**2
        hxy = (g(a[0] + h, a[1] + h) - g(a[0] + h, a[1] - h) - g(a[0] - h, a[1] + h) + g(a[0] - h, a[1] - h)) / (4 * h**2)
        return ((hxx, hxy), (hxy, hyy))


def optimize_g13(tol=Fraction(1, 10**40), digits: int = ACCEPT_DIGITS, start=(1, 1)) -> Optimum13:
    """Stationary point of ``G_B`` by damped Newton in ``(v2, v3)``, certified
    by a Krawczyk contraction and a positive-definite Hessian."""
    tol = Fraction(tol)
    x, steps = _newton(start, digits)
    center = (_to_fraction(x[0]), _to_fraction(x[1]))
    radius = max(tol, Fraction(1, 10 ** (digits // 2)))
    ok, K = krawczyk_certify(center, radius, digits)
    if not ok:
        raise CertificationError("Krawczyk test failed: no unique zero certified in the box")
    # K is a tighter enclosure of the same zero
    box = tuple((_to_fraction(k.lower), _to_fraction(k.upper)) for k in K)
    v2 = BigFloat.interval(*box[0], digits)
    v3 = BigFloat.interval(*box[1], digits)
    a2, a3 = v2.sqrt(), v3.sqrt()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PhaseWarning)
        G = _g13(numerator13_B(), a2, a3, digits)
    H = _hessian_fd(center, digits)
    pd = H[0][0] > 0 and H[0][0] * H[1][1] - H[0][1] ** 2 > 0
    if not pd:
        raise CertificationError("Hessian of G_B is not positive definite at the stationary point")
    return Optimum13(a2, a3, G, box, steps, H, True)


@lru_cache(maxsize=None)
def optimize_g13_cached() -> dict:
    res = optimize_g13()
    return {"a2": res.a2, "a3": res.a3, "G_opt": res.G_opt}


def volume13(a2, a3, digits: int = ACCEPT_DIGITS) -> BigFloat:
    return _bf(a2, digits) ** 5 * _bf(a3, digits)


def abg13(a2, a3, digits: int = ACCEPT_DIGITS) -> SecondMomentABG:
    """``alpha`` (last 5 diagonal), ``beta`` (first 8 diagonal) and ``gamma``
    (off-diagonal entries of the leading 8 x 8 block) for phase B."""
    A2, A3 = _bf(a2, digits), _bf(a3, digits)
    V = A2**5 * A3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PhaseWarning)
        G = _g13(numerator13_B(), A2, A3, digits)
    f2, f3 = fB_polys()
    v2, v3 = A2 * A2, A3 * A3
    F2 = f2.eval_bigfloat((v2, v3), digits)
    F3 = f3.eval_bigfloat((v2, v3), digits)
    base = V.rational_power(Fraction(2, 13)) * G
    V2 = V * V
    return SecondMomentABG(base + 13 * F2 / (10 * V2), base - 13 * F2 / (16 * V2), 13 * (F2 + 8 * F3) / (112 * V2))


def abg13_at_unit() -> SecondMomentABG:
    """Exact ``alpha, beta, gamma`` at unit scales (a different phase from B)."""
    return SecondMomentABG(*catalog.B13_UNIT_ABG)


def unit_nsm13() -> Fraction:
    return catalog.B13_UNIT_NSM


# -- step sizes for the 13-dimensional perturbation ------------------------------------


@dataclass(frozen=True)
class EpsilonSteps:
    eps1: object
    eps2: object
    isotropic: bool = False


def _is_zero(x) -> bool:
    if isinstance(x, BigFloat):
        return x.sign() == 0
    return x == 0


def epsilon_steps(alpha, beta, gamma) -> EpsilonSteps:
    """``eps1`` zeroes the perturbed ``gamma``; ``eps2`` equalizes the perturbed
    ``alpha`` and ``beta``.  Exact inputs give exact outputs."""
    d1 = 2 * (-5 * alpha + 18 * beta + 78 * gamma)
    num2 = 13 * (beta - alpha)
    d2 = 2 * (-8 * alpha * alpha + 3 * alpha * beta + 5 * beta * beta + 91 * gamma * gamma)
    eps1 = None if _is_zero(d1) else 13 / d1
    if _is_zero(d2):
        if _is_zero(num2):
            return EpsilonSteps(eps1, None, True)
        raise ZeroDivisionError("second step size has a zero denominator")
    eps2 = num2 / d2
    return EpsilonSteps(eps1, eps2, _is_zero(num2) and _is_zero(gamma))


def perturbed_abg(alpha, beta, gamma, eps):
    """Second-moment parameters after one linear perturbation step."""
    a = alpha + 16 * alpha * (beta - alpha) * eps / 13
    b = beta - 2 * (5 * beta * beta + 91 * gamma * gamma - 5 * alpha * beta) * eps / 13
    g = gamma + 2 * gamma * (5 * alpha - 18 * beta - 78 * gamma) * eps / 13
    return a, b, g


def perturbed_scales(alpha, beta, gamma, eps):
    """``(a1, a2, a3)`` with ``B' A_eps = B13(a1, a2, a3)`` for the unit-scale generator."""
    a1 = 1 - (5 * beta - 5 * alpha - 13 * gamma) * eps / 13
    a2 = 1 + 8 * (beta - alpha) * eps / 13
    a3 = 1 - (5 * beta - 5 * alpha + 91 * gamma) * eps / 13
    return a1, a2, a3
