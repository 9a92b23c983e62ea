import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latquant import catalog, exact_nsm
from latquant.exact import linalg as xl
from latquant.lattice import Lattice
from latquant.moments import estimate_nsm
from latquant.optimizer import (
    DescentConfig,
    delta_method,
    descend,
    optimal_product_scales,
    perturbation,
    scales_from_b13_generator,
    structured_U13,
    traceless,
)


def test_traceless_of_scalar_matrix():
    U = xl.scale(Fraction(1, 12), xl.identity(5))
    assert traceless(U) == xl.to_matrix([[0] * 5] * 5)
    assert not traceless(np.eye(3) * 0.3).any()


def test_traceless_of_unit_scale_matrix():
    al, be, ga = exact_nsm.abg13_at_unit().as_tuple()
    Ub = traceless(structured_U13(al, be, ga))
    mean = (8 * be + 5 * al) / 13
    assert [Ub[i][i] for i in range(13)] == [be - mean] * 8 + [al - mean] * 5
    assert sum(Ub[i][i] for i in range(13)) == 0


def test_perturbation_identity_at_zero():
    Ub = np.diag([1.0, -1.0, 0.0])
    assert np.array_equal(perturbation(Ub, 0.0), np.eye(3))
    assert np.allclose(perturbation(Ub, 0.0, "exponential"), np.eye(3))
    with pytest.raises(ValueError):
        perturbation(Ub, 0.1, "cubic")


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=16, max_size=16), st.floats(0, 5))
def test_exponential_step_preserves_volume(entries, eps):
    M = np.array(entries).reshape(4, 4)
    Ub = traceless((M + M.T) / 2)
    assert np.linalg.det(perturbation(Ub, eps, "exponential")) == pytest.approx(1.0, rel=1e-10)


def test_one_step_is_exactly_a_rescaling():
    al, be, ga = exact_nsm.abg13_at_unit().as_tuple()
    eps = exact_nsm.epsilon_steps(al, be, ga).eps1
    Ub = traceless(structured_U13(al, be, ga))
    A = xl.to_matrix([[int(i == j) - eps * Ub[i][j] for j in range(13)] for i in range(13)])
    stepped = xl.matmul(catalog.b13_unit().basis, A)
    a1, a2, a3 = exact_nsm.perturbed_scales(al, be, ga, eps)
    assert stepped == catalog.b13(a1, a2, a3).basis
    assert float(eps * max(abs(x) for r in Ub for x in r)) < 0.0014


def test_scale_readback():
    B = catalog.b13(0.99, 1.01, 1.02).float_basis
    a1, a2, a3, dev = scales_from_b13_generator(B)
    assert (a1, a2, a3) == pytest.approx((0.99, 1.01, 1.02), abs=1e-15)
    assert dev < 1e-15


def test_delta_method_linear_map():
    J = np.array([[1.0, 2.0], [0.0, -3.0], [4.0, 1.0]])
    cov = np.array([[2.0, 0.5], [0.5, 1.0]])
    y, C = delta_method(lambda x: J @ x, np.array([0.3, -0.7]), cov)
    np.testing.assert_allclose(y, J @ [0.3, -0.7])
    np.testing.assert_allclose(C, J @ cov @ J.T, rtol=1e-7)


def test_descent_stops_at_14_dim_optimum():
    state = descend(catalog.get("B14", a="opt"), DescentConfig(samples=300_000, seed=2))
    assert state.step_index == 0
    assert state.verdict == "consistent with local optimality"


@pytest.mark.parametrize("L", [catalog.integer_lattice(2), catalog.checkerboard(4)], ids=["Z2", "D4"])
def test_isotropic_lattices_are_fixed_points(L):
    state = descend(L, DescentConfig(samples=200_000, seed=3))
    assert state.verdict == "consistent with local optimality"
    assert np.array_equal(state.lattice.float_basis, L.float_basis)
    assert state.history[0]["max_abs_z"] < 4


def test_descent_requires_steps():
    with pytest.raises(ValueError):
        descend(catalog.integer_lattice(2), DescentConfig(max_steps=0))


def test_closed_form_rule_needs_structure():
    L = catalog.b14(1.20)  # outside the optimum: isotropy is rejected
    with pytest.raises(ValueError):
        descend(L, DescentConfig(samples=300_000, eps_rule="closed-form", threshold=1.0))


def test_product_of_identical_components():
    Z1 = catalog.integer_lattice(1)
    out = optimal_product_scales([(Z1, Fraction(1, 12)), (Z1, Fraction(1, 12))])
    assert out["scales"] == [1.0, 1.0]
    assert out["G_product"] == pytest.approx(1 / 12, rel=1e-15)


def test_product_with_equal_nsm_different_volumes():
    L1, L2 = catalog.integer_lattice(2), catalog.integer_lattice(3).scaled(Fraction(5))
    out = optimal_product_scales([(L1, 1 / 12), (L2, 1 / 12)])
    assert out["G_product"] == pytest.approx(1 / 12, rel=1e-14)
    assert out["G_direct"] == pytest.approx(1 / 12, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["Z", "A2", "D4", "K10p"]), st.fractions(min_value=Fraction(6, 100), max_value=Fraction(9, 100), max_denominator=1000)), min_size=1, max_size=4))
def test_product_closure(parts):
    comps = [(catalog.get(name, n=3) if name == "Z" else catalog.get(name), G) for name, G in parts]
    out = optimal_product_scales(comps)
    n = sum(L.n for L, _ in comps)
    assert math.log(out["G_product"]) * n == pytest.approx(sum(L.n * math.log(G) for L, G in comps), abs=1e-12)
    assert out["G_direct"] == pytest.approx(out["G_product"], rel=1e-12)


def test_product_lattice_is_not_optimal():
    K, D4 = catalog.k10prime(), catalog.checkerboard(4)
    rk = estimate_nsm(K, 200_000, seed=1)
    rd = estimate_nsm(D4, 200_000, seed=2)
    out = optimal_product_scales([(K, rk), (D4, rd)])
    assert out["G_product"] - 0.069261778717 > 4 * out["G_stderr"]


def test_line_search_squares_up_a_rectangle():
    L = Lattice.from_rows([[1, 0], [0, Fraction(3, 2)]])
    state = descend(L, DescentConfig(samples=200_000, seed=1, max_steps=4))
    first, last = state.history[0], state.history[-1]
    assert first["rule"] == "line-search"
    assert last["G_hat"] < first["G_hat"] - 4 * first["G_stderr"]
    assert abs(last["G_hat"] - 1 / 12) < 4 * last["G_stderr"]
    assert state.verdict == "consistent with local optimality"
