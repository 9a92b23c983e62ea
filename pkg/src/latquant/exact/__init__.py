"""Exact scalar arithmetic: rationals, quadratic fields, certified floats,
polynomials with real-root isolation, and small exact matrices."""

from fractions import Fraction as Rational

from .bigfloat import DEFAULT_DIGITS, BigFloat, Const, Expr, bigfloat_eval, sqrt
from .poly import (
    ExactPolynomial,
    count_roots,
    eval_polynomial,
    isolate_real_roots,
    refine_bracket,
    refine_root,
    squarefree_part,
    sturm_sequence,
)
from .quad import QuadElem, format_scalar
from .scalars import parse_scalar

__all__ = [
    "DEFAULT_DIGITS",
    "BigFloat",
    "Const",
    "ExactPolynomial",
    "Expr",
    "QuadElem",
    "Rational",
    "bigfloat_eval",
    "count_roots",
    "eval_polynomial",
    "format_scalar",
    "isolate_real_roots",
    "parse_scalar",
    "refine_bracket",
    "refine_root",
    "sqrt",
    "squarefree_part",
    "sturm_sequence",
]
