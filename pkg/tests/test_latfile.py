from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from latquant import catalog
from latquant.exact import QuadElem
from latquant.exact import linalg as xl
from latquant.lattice import GlueSpec, Lattice, glue, gram
from latquant.latfile import LatticeFileError, format_lattice_file, parse_lattice_file


def test_identity_document():
    L = parse_lattice_file("rows:\n  1 0\n  0 1\n")
    assert gram(L) == xl.identity(2)


def test_catalog_b14_document_determinant():
    a = Fraction(25, 19)
    text = format_lattice_file(catalog.b14(a))
    L = parse_lattice_file(text)
    assert L.volume_exact() == 9 * QuadElem.sqrt(3) * a**4
    assert L.params["a"] == a


def test_param_supplied_by_caller():
    text = format_lattice_file(catalog.b14(Fraction(25, 19))).replace("param a = 25/19", "param a")
    L = parse_lattice_file(text.replace("25/19", "a"), params={"a": "4/3"})
    assert L.params["a"] == Fraction(4, 3)


def test_division_by_zero_reports_position():
    with pytest.raises(LatticeFileError) as exc:
        parse_lattice_file("rows:\n  1 0\n  0 1/0\n")
    assert exc.value.line == 3
    assert exc.value.col == 5


@pytest.mark.parametrize(
    "text, line",
    [
        ("param a\nrows:\n  a\n", 1),  # unbound parameter
        ("field sqrt(2)\nrows:\n  sqrt(3) 0\n  0 1\n", 3),  # entries in the wrong field
        ("rows:\n  1 2\n  2 4\n", 2),  # singular
        ("rows:\n  1 2 3\n  0 1\n", 2),  # ragged
        ("colour blue\nrows:\n  1\n", 1),
        ("rows:\n  1 0\n  0 b\n", 3),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(LatticeFileError) as exc:
        parse_lattice_file(text)
    assert exc.value.line == line


def test_float_document_round_trip():
    L = catalog.get("B14", a="opt")
    M = parse_lattice_file(format_lattice_file(L))
    assert np.array_equal(M.float_basis, L.float_basis)


@pytest.mark.parametrize("spec", [catalog.b14_glue(Fraction(25, 19)), catalog.b13_glue(1, Fraction(3, 2), Fraction(5, 4))])
def test_glue_document_round_trip(spec):
    back = parse_lattice_file(format_lattice_file(spec))
    assert isinstance(back, GlueSpec)
    assert back.product_lattice().basis == spec.product_lattice().basis
    assert back.glue == tuple(tuple(xl.normalize(x) for x in g) for g in spec.glue)
    assert glue(back).volume_exact() == glue(spec).volume_exact()


entries = st.one_of(
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
    st.builds(QuadElem, st.fractions(min_value=-5, max_value=5, max_denominator=9), st.fractions(min_value=-5, max_value=5, max_denominator=9), st.just(3)),
)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_print_parse_round_trip(rows):
    M = xl.to_matrix(rows)
    assume(xl.det(M) != 0)
    L = Lattice(M, xl.field_of(M) if xl.field_of(M) != 1 else 3, "random")
    back = parse_lattice_file(format_lattice_file(L))
    assert back.basis == L.basis
