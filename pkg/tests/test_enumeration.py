import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latquant import catalog
from latquant.enumeration import (
    EnumerationCapExceeded,
    closest_points,
    enumerate_ball,
    facet_certificate,
    phase_condition_i,
    relevant_vectors,
    shortest_vectors,
    theta_image,
    verify_automorphism,
)
from latquant.exact import linalg as xl
from latquant.lattice import Lattice


def test_closest_integer_lattice():
    cs = closest_points(catalog.integer_lattice(2), (0.4, 2.6))
    assert cs.minimizers == ((0, 3),)
    assert cs.distance2 == pytest.approx(0.32)


def test_closest_tie_is_exact():
    cs = closest_points(catalog.integer_lattice(2), (Fraction(1, 2), 0))
    assert set(cs.minimizers) == {(0, 0), (1, 0)}
    assert cs.exact


def test_closest_deep_hole_of_d4_matches_brute_force():
    D4 = catalog.checkerboard(4)
    x = (Fraction(1, 2),) * 4
    cs = closest_points(D4, x)
    # brute force over coordinates in {-1,0,1,2}^4 with even sum
    pts = [p for p in itertools.product(range(-1, 3), repeat=4) if sum(p) % 2 == 0]
    d2 = {p: sum((pi - Fraction(1, 2)) ** 2 for pi in p) for p in pts}
    best = min(d2.values())
    brute = {p for p, d in d2.items() if d == best}
    assert best == 1 and len(brute) == 8 == len(cs)
    B = np.array(xl.to_float(D4.basis))
    got = {tuple(int(round(v)) for v in np.array(u) @ B) for u in cs.minimizers}
    assert got == brute


def test_ball_examples():
    Z2 = catalog.integer_lattice(2)
    assert len(list(enumerate_ball(Z2, 1.0))) == 4
    assert list(enumerate_ball(catalog.b14(1), 0.0)) == []
    L = catalog.get("B14", a="opt").unit_volume()
    assert len(list(enumerate_ball(L, 2.0))) == 24


def test_ball_cap():
    with pytest.raises(EnumerationCapExceeded):
        list(enumerate_ball(catalog.integer_lattice(8), 400.0))


def test_theta_of_unit_b13_first_steps():
    th = theta_image(catalog.b13_unit().unit_volume(), 2.5)
    counts = [(round(r, 5), c) for r, c in th.steps]
    assert counts == [(2.0, 99), (2.40625, 355), (2.5, 495)]


def test_theta_three_stacked_steps_at_13_dim_optimum():
    th = theta_image(catalog.get("B13", a="opt").unit_volume(), 2.06)
    assert [c for _, c in th.steps] == [57, 97, 99]
    assert [round(r, 4) for r, _ in th.steps] == [1.9888, 2.0061, 2.0488]


def test_shortest_vectors_examples():
    for n in (1, 3, 5):
        mn, tau = shortest_vectors(catalog.integer_lattice(n))
        assert (mn, tau) == (pytest.approx(1.0), 2 * n)
    assert shortest_vectors(catalog.b13(1, Fraction(11, 10), Fraction(6, 5))).kissing == 56
    assert shortest_vectors(catalog.b13_unit()).kissing == 98
    assert shortest_vectors(catalog.hexagonal()).kissing == 6


def test_relevant_vectors_small():
    for n in (1, 2, 4):
        assert len(relevant_vectors(catalog.integer_lattice(n))) == 2 * n
    assert len(relevant_vectors(catalog.hexagonal())) == 6
    assert len(relevant_vectors(catalog.checkerboard(4))) == 24


def test_relevant_vectors_b14_facet_count():
    rv = relevant_vectors(catalog.b14(Fraction(25, 19)))
    assert len(rv) == 13542
    assert rv.exact and not rv.flagged


def test_phase_condition_single_point_and_interior():
    assert phase_condition_i("B14", [Fraction(25, 19)]).stable
    rep = phase_condition_i("B14", [1.30, Fraction(25, 19), 1.36])
    assert rep.stable
    assert len(set(rep.counts)) == 1


def test_relevant_set_detects_a_facet_change():
    def rv(x):
        return relevant_vectors(Lattice.from_rows([[1, 0], [x, 1]]))

    square, sheared = rv(Fraction(0)), rv(Fraction(1, 4))
    assert (len(square), len(sheared)) == (4, 6)
    assert set(square.vectors) < set(sheared.vectors)
    assert square.digest() != sheared.digest()


def test_automorphisms():
    L = catalog.b14(Fraction(25, 19))
    assert verify_automorphism(L, xl.identity(14))
    gens = catalog.b14_symmetry_generators()
    assert all(verify_automorphism(L, M) for M in gens.values())
    assert not any(verify_automorphism(L, M) for M in catalog.b14_non_symmetries().values())


def test_automorphism_closure():
    L = catalog.b14(Fraction(25, 19))
    gens = list(catalog.b14_symmetry_generators().values())
    for M1, M2 in itertools.combinations(gens[:6], 2):
        assert verify_automorphism(L, xl.matmul(M1, M2))


# -- properties ------------------------------------------------------------------------------


@st.composite
def small_lattices(draw):
    n = draw(st.integers(2, 4))
    rows = draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))
    M = np.array(rows, dtype=float) + 4 * np.eye(n)
    if abs(np.linalg.det(M)) < 0.5:
        M = M + 3 * np.eye(n)
    return Lattice(xl.to_matrix([[Fraction(int(v)) for v in r] for r in M]), 1)


@settings(max_examples=30, deadline=None)
@given(small_lattices(), st.lists(st.floats(-5, 5, allow_nan=False), min_size=4, max_size=4))
def test_closest_matches_brute_force(L, xs):
    n = L.n
    x = np.array(xs[:n])
    B = np.array(xl.to_float(L.basis))
    Binv = np.linalg.inv(B)
    # Babai rounding gives a first guess; its distance bounds the search box
    u0 = np.rint(x @ Binv)
    d0 = np.linalg.norm(u0 @ B - x)
    c = x @ Binv
    half = np.ceil(d0 * np.linalg.norm(Binv, axis=0)) + 1
    ranges = [range(int(np.floor(c[i] - half[i])), int(np.ceil(c[i] + half[i])) + 1) for i in range(n)]
    best = min(float(np.sum((np.array(u) @ B - x) ** 2)) for u in itertools.product(*ranges))
    assert closest_points(L, x).distance2 == pytest.approx(best, rel=1e-9, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(small_lattices(), st.floats(0.5, 60))
def test_ball_count_is_odd(L, r2):
    assert (1 + len(list(enumerate_ball(L, r2)))) % 2 == 1


@settings(max_examples=15, deadline=None)
@given(small_lattices(), st.sampled_from([Fraction(2), Fraction(3), Fraction(1, 2)]))
def test_theta_scale_equivariance(L, rho):
    th1 = theta_image(L, 40.0)
    th2 = theta_image(L.scaled(rho), 40.0 * float(rho) ** 2)
    assert [c for _, c in th1.steps] == [c for _, c in th2.steps]
    for (r1, _), (r2, _) in zip(th1.steps, th2.steps):
        assert r2 == pytest.approx(r1 * float(rho) ** 2, rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(small_lattices())
def test_relevant_vector_properties(L):
    rv = relevant_vectors(L)
    n = L.n
    k = len(rv)
    assert k % 2 == 0 and 2 * n <= k <= 2 * (2**n - 1)
    vs = set(rv.vectors)
    assert all(tuple(-x for x in v) in vs for v in vs)
    for v in vs:
        assert facet_certificate(L, v)
    # every non-returned class of L/2L has more than two closest points to its midpoint
    classes = {tuple(x % 2 for x in v) for v in vs}
    for c in itertools.product((0, 1), repeat=n):
        if any(c) and c not in classes:
            cs = closest_points(L, [Fraction(x, 2) for x in c], coords=True)
            assert len(cs) > 2
