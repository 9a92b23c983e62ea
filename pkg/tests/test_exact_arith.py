from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latquant.exact import (
    BigFloat,
    ExactPolynomial,
    QuadElem,
    bigfloat_eval,
    count_roots,
    eval_polynomial,
    format_scalar,
    isolate_real_roots,
    parse_scalar,
    refine_bracket,
    refine_root,
    sqrt,
)
from latquant.exact.bigfloat import lift
from latquant.exact.scalars import ScalarSyntaxError
from latquant import exact_nsm

x = ExactPolynomial.variable()
big = st.integers(min_value=-(10**40), max_value=10**40)
nonzero = big.filter(bool)
fractions_ = st.builds(Fraction, big, nonzero)


def test_eval_polynomial_examples():
    assert eval_polynomial(x * x - 2, (Fraction(3, 2),)) == Fraction(1, 4)
    assert eval_polynomial(ExactPolynomial(), (Fraction(7, 3),)) == 0
    with pytest.raises(ValueError):
        eval_polynomial(x * x, (1, 2))


def test_stationarity_polynomial_brackets_root():
    f = exact_nsm.f14()
    lo, hi = eval_polynomial(f, (Fraction(5, 3),)), eval_polynomial(f, (Fraction(13, 7),))
    assert lo * hi < 0
    assert f.degree() == 15
    # leading coefficient as printed
    assert f.leading_coefficient() == Fraction(-1018103123715692435, 2**24 * 3**15 * 5**5 * 7**6 * 11**2 * 13)


def test_isolate_sqrt2():
    (iv,) = isolate_real_roots(x * x - 2, (0, 2))
    assert iv[0] ** 2 <= 2 <= iv[1] ** 2
    assert count_roots(x * x - 2, 0, 2) == 1


def test_isolate_double_root():
    p = (x - 1) ** 2
    ivs = isolate_real_roots(p, (0, 2))
    assert len(ivs) == 1
    a, b = ivs[0]
    assert a <= 1 <= b


def test_isolate_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        isolate_real_roots(ExactPolynomial(), (0, 1))


def test_refine_sqrt2():
    r = refine_root(x * x - 2, (1, 2), Fraction(1, 10**12))
    assert abs(float(r) - 2**0.5) < 1e-12


def test_refine_linear_is_exact():
    assert refine_root(3 * x - 1, (0, 1), Fraction(1, 10)) == Fraction(1, 3)


def test_refine_without_sign_change():
    with pytest.raises(ValueError):
        refine_root(x * x + 1, (0, 1), Fraction(1, 100))


def test_optimum_root_of_stationarity_polynomial():
    f = exact_nsm.f14()
    ivs = isolate_real_roots(f, (Fraction(5, 3), Fraction(13, 7)))
    assert len(ivs) == 1
    v0 = refine_root(f, ivs[0], Fraction(1, 10**15))
    assert mpmath.nstr(mpmath.sqrt(mpmath.mpf(v0.numerator) / v0.denominator), 13) == "1.314224989311"


def test_unit_scale_rational_renders():
    G = exact_nsm.unit_nsm13()
    assert mpmath.nstr(bigfloat_eval(lift(G), 30).value, 11, strip_zeros=False) == "0.069698255940"
    gamma = exact_nsm.abg13_at_unit().gamma
    assert mpmath.nstr(bigfloat_eval(lift(gamma), 30).value, 2) == "-5.5e-5"


def test_sqrt3_squared_exact():
    s = QuadElem.sqrt(3)
    assert s * s == 3
    v = BigFloat(s * s)
    assert v.err == 0 and v.value == 3


def test_bigfloat_eval_sqrt_power():
    v = bigfloat_eval(sqrt(2) ** Fraction(2, 1) - 2, 50)
    assert v.contains(0)
    w = bigfloat_eval(lift(Fraction(2)) ** Fraction(1, 3), 60)
    with mpmath.workdps(90):
        assert w.contains(mpmath.cbrt(2))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3/4", Fraction(3, 4)),
        ("1/2 + 3/2*sqrt(3)", QuadElem(Fraction(1, 2), Fraction(3, 2), 3)),
        ("sqrt(12)", QuadElem(0, 2, 3)),
        ("sqrt(9)", Fraction(3)),
        ("2*a", Fraction(5, 2)),
    ],
)
def test_parse_scalar(text, expected):
    assert parse_scalar(text, {"a": Fraction(5, 4)}) == expected


def test_parse_scalar_errors():
    with pytest.raises(ZeroDivisionError):
        parse_scalar("1/0")
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("b + 1")
    with pytest.raises(ScalarSyntaxError):
        parse_scalar("1 +")


# -- properties ------------------------------------------------------------------------------


@given(fractions_, fractions_)
def test_rational_round_trip(p, q):
    assert (p + q) - q == p
    assert q == 0 or (p * q) / q == p
    assert p.denominator > 0


@given(fractions_, fractions_, st.sampled_from([2, 3, 5, 7]))
def test_quad_norm_identity(r, s, d):
    z = QuadElem(r, s, d)
    assert z * z.conjugate() == r * r - d * s * s
    assert z.norm() == r * r - d * s * s


small = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 30))


@given(small, small, small, small, st.sampled_from([2, 3]))
def test_quad_embedding_commutes(a, b, c, e, d):
    z, w = QuadElem(a, b, d), QuadElem(c, e, d)
    for op in ((lambda u, v: u + v), (lambda u, v: u * v), (lambda u, v: u - v)):
        exact = BigFloat(op(z, w), 50)
        lifted = op(BigFloat(z, 50), BigFloat(w, 50))
        assert abs(exact.value - lifted.value) <= exact.err + lifted.err + mpmath.mpf(10) ** -45


@given(st.one_of(small, st.builds(QuadElem, small, small, st.sampled_from([2, 3]))))
def test_format_parse_round_trip(z):
    assert parse_scalar(format_scalar(z)) == z


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return lift(draw(st.builds(Fraction, st.integers(1, 99), st.integers(1, 99))))
    op = draw(st.sampled_from(["+", "-", "*", "/", "sqrt", "pow"]))
    a = draw(expressions(depth=depth - 1))
    if op == "sqrt":
        return sqrt(a * a + 1)
    if op == "pow":
        return (a * a + 1) ** Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 4)))
    b = draw(expressions(depth=depth - 1))
    if op == "/":
        return a / (b * b + 1)
    return {"+": a + b, "-": a - b, "*": a * b}[op]


@settings(max_examples=60, deadline=None)
@given(expressions())
def test_bigfloat_error_is_a_true_bound(e):
    coarse = bigfloat_eval(e, 30)
    fine = bigfloat_eval(e, 60)
    assert abs(coarse.value - fine.value) <= coarse.err + fine.err


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=7).filter(lambda c: c[-1] != 0))
def test_isolate_then_refine_certifies_roots(coeffs):
    p = ExactPolynomial.from_dense(coeffs)
    tol = Fraction(1, 10**9)
    for iv in isolate_real_roots(p, (-50, 50)):
        a, b = refine_bracket(p, iv, tol)
        assert b - a <= tol
        if a == b:
            assert eval_polynomial(p, (a,)) == 0
            continue
        # mean value bound: |p(root)| <= max|p'| on the bracket * tol
        m = max(abs(a), abs(b)) + tol
        dbound = sum(abs(c) * k * m ** (k - 1) for k, c in enumerate(p.dense()) if k)
        root = refine_root(p, iv, tol)
        assert a - tol <= root <= b + tol
        assert abs(eval_polynomial(p, (root,))) <= dbound * tol
