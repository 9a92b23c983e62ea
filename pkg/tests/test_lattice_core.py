from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latquant import catalog
from latquant.enumeration import shortest_vectors
from latquant.exact import QuadElem
from latquant.exact import linalg as xl
from latquant.lattice import (
    GlueSpec,
    Lattice,
    NonLatticeError,
    coordinates,
    dual,
    glue,
    glue_group,
    gram,
    lll_reduce,
    product_scaled,
)
from latquant.reduction import is_lll_reduced

SQRT3 = QuadElem.sqrt(3)


def identity(n):
    return xl.identity(n)


def test_gram_of_integer_lattice():
    assert gram(catalog.integer_lattice(5)) == identity(5)


def test_k10_block_gram_is_integral():
    G = gram(catalog.k10prime())
    assert xl.is_integer_matrix(G)
    assert all(G[i][i] == 4 for i in range(10))
    row2 = catalog.b14(1).basis[1]
    assert sum(x * x for x in row2) == 4  # 1^2 + sqrt3^2


def test_unit_b13_gram_is_rational_not_integral():
    # the A7 glue class has norm 7/8, so the glued lattice is not integral
    G = gram(catalog.b13_unit())
    assert all(isinstance(x, Fraction) for r in G for x in r)
    assert not xl.is_integer_matrix(G)
    assert Fraction(101, 32) in {x for r in G for x in r}


def test_gram_positive_definite_exact():
    for L in (catalog.b14(Fraction(25, 19)), catalog.b13_unit(), catalog.checkerboard(4)):
        G = gram(L)
        assert xl.is_symmetric(G)
        assert xl.leading_minors_positive(G)


def test_singular_basis_rejected():
    with pytest.raises(ValueError):
        Lattice.from_rows([[1, 2], [2, 4]])


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        Lattice.from_rows([[QuadElem.sqrt(2), 0], [0, QuadElem.sqrt(3)]])


def test_b14_determinant():
    a = Fraction(25, 19)
    assert catalog.b14(a).volume_exact() == 9 * SQRT3 * a**4


def test_dual_examples():
    Z = catalog.integer_lattice(3)
    assert gram(dual(Z)) == identity(3)
    A2 = catalog.hexagonal()
    assert gram(dual(dual(A2))) == gram(A2)
    F = A2.as_float()
    np.testing.assert_allclose(gram(dual(dual(F))), gram(F), rtol=1e-10)


def test_product_scaled_examples():
    Z1 = catalog.integer_lattice(1)
    assert gram(product_scaled([(Z1, 1), (Z1, 1)])) == identity(2)
    L = catalog.checkerboard(4)
    assert product_scaled([(L, 1)]).basis == L.basis


def test_unglued_13_dim_product_volume():
    a2, a3 = Fraction(3, 2), Fraction(5, 4)
    P = catalog.product_check_b13(1, a2, a3)
    assert P.volume_exact() == 8 * a2**5 * a3


def test_glue_trivial_group_returns_product():
    P = catalog.checkerboard(4)
    L = glue(GlueSpec(glue=(), product=P))
    assert abs(L.volume_exact()) == P.volume_exact()


def test_b14_glue_law():
    a = Fraction(25, 19)
    spec = catalog.b14_glue(a)
    assert len(glue_group(spec)) == 4
    L = glue(spec)
    assert L.volume_exact() == 9 * SQRT3 * a**4
    assert L.volume_exact() * 4 == spec.product_lattice().volume_exact()


def test_b13_glue_is_congruent_to_generator():
    from latquant.equivalence import lattice_fingerprint

    a2, a3 = Fraction(3, 2), Fraction(5, 4)
    spec = catalog.b13_glue(1, a2, a3)
    assert len(glue_group(spec)) == 8
    L = glue(spec)
    B = catalog.b13(1, a2, a3)
    assert L.volume_exact() == B.volume_exact() == a2**5 * a3
    # both bases generate the same lattice: each basis is an integer combination of the other
    assert xl.is_integer_matrix(xl.matmul(B.basis, xl.inverse(L.basis)))
    assert xl.is_integer_matrix(xl.matmul(L.basis, xl.inverse(B.basis)))
    assert lattice_fingerprint(L, shells=3).matches(lattice_fingerprint(B, shells=3))


def test_glue_membership():
    for spec in (catalog.b14_glue(Fraction(25, 19)), catalog.b13_glue(1, Fraction(3, 2), Fraction(5, 4))):
        L = glue(spec)
        for g in spec.glue:
            assert all(Fraction(c).denominator == 1 for c in coordinates(L, g))


def test_nonlattice_glue_detected():
    Z2 = catalog.integer_lattice(2)
    # two coset representatives that are not closed under addition
    spec = GlueSpec(glue=((Fraction(1, 3), 0),), is_group=True, product=Z2)
    with pytest.raises(NonLatticeError):
        glue(spec)


def test_lll_examples():
    R = lll_reduce(Lattice.from_rows([[1, 0], [100, 1]]))
    assert max(sum(x * x for x in r) for r in R.basis) <= 2
    Z = lll_reduce(catalog.integer_lattice(4))
    assert sorted(sorted(abs(x) for x in r) for r in Z.basis) == sorted(sorted(abs(x) for x in r) for r in identity(4))


def test_lll_finds_packing_diameter_of_b14():
    a_opt = 1.314224989311
    L = catalog.get("B14", a="opt")
    R = lll_reduce(L)
    assert is_lll_reduced(R.float_basis)
    shortest = np.linalg.norm(R.float_basis, axis=1).min()
    assert shortest == pytest.approx(a_opt * 2**0.5, rel=1e-11)
    assert shortest**2 == pytest.approx(shortest_vectors(L).min_norm2, rel=1e-12)


def test_catalog_entries():
    assert gram(catalog.get("Z", n=3)) == identity(3)
    B = catalog.get("B14", a=1)
    assert B.basis[1][1] == SQRT3
    table = catalog.get("AppendixA")
    assert table[0] == (0, 0, 237032097068933436616799735576002560)
    with pytest.raises(catalog.CatalogError):
        catalog.get("E8")


# -- properties ------------------------------------------------------------------------------

unimodular_steps = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(-2, 2)), min_size=1, max_size=12)


def _apply(steps, n):
    U = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i, j, c in steps:
        i, j = i % n, j % n
        if i != j:
            U[i] = [x + c * y for x, y in zip(U[i], U[j])]
    return xl.to_matrix(U)


@settings(max_examples=30, deadline=None)
@given(unimodular_steps, st.sampled_from(["D4", "Z", "A2"]))
def test_dual_involution(steps, name):
    L = catalog.get(name, n=4) if name == "Z" else catalog.get(name)
    if L.field is None:
        U = np.array(_apply(steps, L.n), dtype=float)
        M = Lattice(U @ L.float_basis, None)
        np.testing.assert_allclose(gram(dual(dual(M))), gram(M), rtol=1e-10, atol=1e-10)
    else:
        M = Lattice(xl.matmul(_apply(steps, L.n), L.basis), L.field)
        assert gram(dual(dual(M))) == gram(M)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=20), st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=20))
def test_product_law(a, b):
    L1, L2 = catalog.checkerboard(4), catalog.b14(1)
    P = product_scaled([(L1, a), (L2, b)])
    G = gram(P)
    G1, G2 = gram(L1), gram(L2)
    for i in range(18):
        for j in range(18):
            if i < 4 and j < 4:
                assert G[i][j] == a * a * G1[i][j]
            elif i >= 4 and j >= 4:
                assert G[i][j] == b * b * G2[i - 4][j - 4]
            else:
                assert G[i][j] == 0


def test_glue_determinant_law_all_catalog_specs():
    for spec in (
        catalog.b14_glue(1),
        catalog.b14_glue(Fraction(25, 19)),
        catalog.b13_glue(),
        catalog.b13_glue(1, Fraction(3, 2), Fraction(5, 4)),
    ):
        assert glue(spec).volume_exact() * len(glue_group(spec)) == spec.product_lattice().volume_exact()
