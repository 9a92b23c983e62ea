import warnings
from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from latquant import catalog, exact_nsm
from latquant.exact import BigFloat, QuadElem, count_roots, eval_polynomial


@pytest.fixture(scope="module")
def opt14():
    return exact_nsm.optimize_g14(Fraction(1, 10**12))


@pytest.fixture(scope="module")
def opt13():
    return exact_nsm.optimize_g13()


def digits12(x: BigFloat) -> str:
    return mpmath.nstr(x.value, 12, strip_zeros=False)


def test_g14_optimum(opt14):
    assert digits12(opt14.a_opt) == "1.31422498931"
    assert abs(float(opt14.a_opt.value) - 1.314224989311) < 1e-12
    assert abs(float(opt14.G_opt.value) - 0.069261778717) < 1e-12
    assert abs(float(exact_nsm.g14(opt14.a_opt).value) - 0.069261778717) < 1e-12


def test_g14_optimum_is_second_positive_root(opt14):
    assert opt14.root_index == 2
    assert count_roots(exact_nsm.f14(), 0, opt14.v_bracket[1]) == 2


@pytest.mark.parametrize("a", [1.30, Fraction(25, 19), 1.36])
def test_g14_below_previous_record(a):
    assert float(exact_nsm.g14(a).value) < 0.06952


def test_g14_endpoints_exceed_optimum(opt14):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        for v in (Fraction(5, 3), Fraction(13, 7)):
            a = BigFloat(v, 60).sqrt()
            assert exact_nsm.g14(a) > opt14.G_opt


def test_g14_outside_phase_warns():
    with pytest.warns(exact_nsm.PhaseWarning):
        exact_nsm.g14(Fraction(5, 4))


def test_g14_is_stationary_at_optimum(opt14):
    a = opt14.a_opt
    h = Fraction(1, 10**6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        d = (exact_nsm.g14(a + h) - exact_nsm.g14(a - h)) / (2 * h)
    assert abs(float(d.value)) < 1e-9


def test_stationarity_sign_change_matches_derivative(opt14):
    # G' changes sign across the certified bracket, like f does
    lo, hi = opt14.v_bracket
    f = exact_nsm.f14()
    assert eval_polynomial(f, (lo - Fraction(1, 10**6),)) * eval_polynomial(f, (hi + Fraction(1, 10**6),)) < 0
    step = Fraction(1, 10**4)
    a_lo, a_hi = BigFloat(lo, 60).sqrt() - step, BigFloat(hi, 60).sqrt() + step
    h = Fraction(1, 10**8)

    def deriv(a):
        return (exact_nsm.g14(a + h) - exact_nsm.g14(a - h)) / (2 * h)

    assert deriv(a_lo).sign() * deriv(a_hi).sign() < 0


def test_stationarity_polynomial_matches_symbolic_derivative():
    # independent route: differentiate G(a) symbolically and strip the prefactor
    a, v = sp.symbols("a v", positive=True)
    P = sum(sp.Integer(c) * v**k for k, c in enumerate(reversed(catalog.B14_MOMENT_POLY)))
    G = 3 ** sp.Rational(-33, 14) / (14 * catalog.B14_MOMENT_DENOM) * P.subs(v, a**2) * a ** sp.Rational(-60, 7)
    f_sym = sp.expand(sp.simplify(3 ** sp.Rational(-9, 14) * a ** sp.Rational(67, 7) * sp.diff(G, a)))
    poly = sp.Poly(f_sym.subs(a, sp.sqrt(v)), v)
    stored = exact_nsm.f14()
    assert poly.degree() == stored.degree() == 15
    for (k,), c in poly.terms():
        assert Fraction(int(c.p), int(c.q)) == stored.coeff(k)


def test_alpha_beta_14_at_optimum(opt14):
    ab = exact_nsm.alpha_beta_14(opt14.a_opt)
    assert abs(float((ab.alpha - ab.beta).value)) < 1e-40


def test_trace_identity_14_exact_point():
    a = Fraction(25, 19)
    ab = exact_nsm.alpha_beta_14(a, 60)
    rhs = 14 * exact_nsm.volume14(a, 60).rational_power(Fraction(1, 7)) * exact_nsm.g14(a, 60)
    assert abs((10 * ab.alpha + 4 * ab.beta - rhs).value) < mpmath.mpf(10) ** -50


def test_alpha_beta_14_sign_follows_f():
    # alpha - beta = -(7/20) * 5103 f / V^2, so alpha > beta exactly where f < 0
    for a in (Fraction(13, 10), Fraction(4, 3)):
        ab = exact_nsm.alpha_beta_14(a)
        f = eval_polynomial(exact_nsm.f14(), (a * a,))
        assert f != 0
        assert (ab.alpha - ab.beta).sign() == (-1 if f > 0 else 1)


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=Fraction(1292, 1000), max_value=Fraction(1362, 1000), max_denominator=10**4))
def test_trace_identity_14_random(a):
    ab = exact_nsm.alpha_beta_14(a, 50)
    rhs = 14 * exact_nsm.volume14(a, 50).rational_power(Fraction(1, 7)) * exact_nsm.g14(a, 50)
    assert abs((10 * ab.alpha + 4 * ab.beta - rhs).value) < mpmath.mpf(10) ** -45


# -- 13 dimensions -----------------------------------------------------------------------------


def test_g13_optimum(opt13):
    assert abs(float(opt13.a2.value) - 1.004336185575) < 1e-12
    assert abs(float(opt13.a3.value) - 1.014983466336) < 1e-12
    assert abs(float(opt13.G_opt.value) - 0.069697638992) < 1e-12
    assert opt13.certified


def test_g13_optimum_below_unit_scale_value(opt13):
    assert opt13.G_opt < BigFloat(exact_nsm.unit_nsm13())


def test_phase_gap_at_optimum(opt13):
    gap = exact_nsm.phase_gap13(opt13.a2, opt13.a3, 80)
    assert 1.6e-31 <= float(gap.value) <= 2.0e-31
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        direct = exact_nsm.gA13(opt13.a2, opt13.a3, 80) - exact_nsm.gB13(opt13.a2, opt13.a3, 80)
    assert float(direct.value) == pytest.approx(float(gap.value), rel=1e-3)


@pytest.mark.parametrize(
    "a2, a3",
    [
        (QuadElem(0, 4, 2), Fraction(2)),  # 8 * 32 - 83 * 4 + 76 = 0
        (QuadElem(0, Fraction(2, 5), 34), Fraction(6, 5)),  # a2^2 = 136/25
    ],
)
def test_phases_agree_on_interface(a2, a3):
    v2, v3 = (a2 * a2).r, a3 * a3
    assert 8 * v2 - 83 * v3 + 76 == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        d = exact_nsm.gA13(a2, a3, 60) - exact_nsm.gB13(a2, a3, 60)
    assert d.contains(0)
    assert exact_nsm.phase_gap13(a2, a3, 60).contains(0)


def test_fB_polys_degree_and_cancellation():
    d2, d3 = exact_nsm.fB_derivations()
    assert d2.poly.degree() == d3.poly.degree() == 14
    assert d2.residual_a2 == d2.residual_a3 == d3.residual_a2 == d3.residual_a3 == 0


def test_fB_polys_vanish_at_optimum(opt13):
    f2, f3 = exact_nsm.fB_polys()
    (lo2, hi2), (lo3, hi3) = opt13.v_box
    box = (BigFloat.interval(lo2, hi2, 80), BigFloat.interval(lo3, hi3, 80))
    for f in (f2, f3):
        assert f.eval_bigfloat(box, 80).contains(0)


def test_fB2_matches_finite_difference():
    a2, a3 = Fraction(1004, 1000), Fraction(1008, 1000)
    f2, f3 = exact_nsm.fB_polys()
    A2, A3 = BigFloat(a2, 50), BigFloat(a3, 50)
    v = (A2 * A2, A3 * A3)
    pred2 = f2.eval_bigfloat(v, 50) / (A2.rational_power(Fraction(153, 13)) * A3.rational_power(Fraction(28, 13)))
    pred3 = f3.eval_bigfloat(v, 50) / (A2.rational_power(Fraction(140, 13)) * A3.rational_power(Fraction(41, 13)))
    h = Fraction(1, 10**8)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        fd2 = (exact_nsm.gB13(a2 + h, a3, 50) - exact_nsm.gB13(a2 - h, a3, 50)) / (2 * h)
        fd3 = (exact_nsm.gB13(a2, a3 + h, 50) - exact_nsm.gB13(a2, a3 - h, 50)) / (2 * h)
    assert float(((fd2 - pred2) / pred2).value) == pytest.approx(0, abs=1e-6)
    assert float(((fd3 - pred3) / pred3).value) == pytest.approx(0, abs=1e-6)


def test_fB2_matches_symbolic_derivative():
    a2, a3, v2, v3 = sp.symbols("a2 a3 v2 v3", positive=True)
    H = sum(sp.Rational(c.numerator, c.denominator) * v2**i * v3**j for (i, j), c in exact_nsm.numerator13_B().coeffs.items())
    G = H.subs({v2: a2**2, v3: a3**2}) / (catalog.B13_PHASE_A_DENOM * a2 ** sp.Rational(140, 13) * a3 ** sp.Rational(28, 13))
    D = sp.expand(sp.powsimp(sp.diff(G, a2) * a2 ** sp.Rational(153, 13) * a3 ** sp.Rational(28, 13), force=True))
    f2 = exact_nsm.fB_polys()[0]
    expect = sum(sp.Rational(c.numerator, c.denominator) * a2 ** (2 * i) * a3 ** (2 * j) for (i, j), c in f2.coeffs.items())
    assert sp.expand(D - expect) == 0


def test_newton_fixed_point(opt13):
    center = tuple((lo + hi) / 2 for lo, hi in opt13.v_box)
    again = exact_nsm.optimize_g13(start=center)
    assert again.newton_steps <= 2
    assert abs(float((again.a2 - opt13.a2).value)) < 1e-30
    assert abs(float((again.a3 - opt13.a3).value)) < 1e-30


def test_unit_scale_values():
    abg = exact_nsm.abg13_at_unit()
    assert [round(float(x), 6) for x in abg.as_tuple()] == [0.069513, 0.069814, -0.000055]
    assert 5 * abg.alpha + 8 * abg.beta == 13 * exact_nsm.unit_nsm13()
    eps = exact_nsm.epsilon_steps(*abg.as_tuple())
    assert round(float(eps.eps1), 4) == 7.1843
    assert round(float(eps.eps2), 4) == 7.1735
    # gamma vanishes exactly after a step of eps1
    assert exact_nsm.perturbed_abg(*abg.as_tuple(), eps.eps1)[2] == 0


def test_epsilon_steps_isotropic():
    eps = exact_nsm.epsilon_steps(Fraction(1, 12), Fraction(1, 12), Fraction(0))
    assert eps.eps2 is None and eps.isotropic


def test_abg13_at_optimum(opt13):
    abg = exact_nsm.abg13(opt13.a2, opt13.a3)
    assert abs(float((abg.alpha - abg.beta).value)) < 1e-30
    assert abs(float(abg.gamma.value)) < 1e-30


@settings(max_examples=20, deadline=None)
@given(
    st.fractions(min_value=Fraction(1), max_value=Fraction(102, 100), max_denominator=1000),
    st.fractions(min_value=Fraction(1), max_value=Fraction(103, 100), max_denominator=1000),
)
def test_trace_identity_13_random(a2, a3):
    abg = exact_nsm.abg13(a2, a3, 50)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        G = exact_nsm.gB13(a2, a3, 50)
    rhs = 13 * exact_nsm.volume13(a2, a3, 50).rational_power(Fraction(2, 13)) * G
    assert abs((5 * abg.alpha + 8 * abg.beta - rhs).value) < mpmath.mpf(10) ** -40
