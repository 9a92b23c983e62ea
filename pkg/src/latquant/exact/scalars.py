"""Parsing of exact scalar literals such as ``-3/4 + 1/2*sqrt(3)``.

Only a tiny arithmetic grammar is accepted: integer and decimal literals,
``+ - * /``, integer powers, parentheses, ``sqrt(<integer>)`` and names bound
in a parameter mapping.  Decimal literals are read exactly (``1.30`` is
``13/10``).  Evaluation walks a restricted :mod:`ast` tree; nothing is
executed.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Mapping

from .quad import QuadElem


class ScalarSyntaxError(ValueError):
    def __init__(self, msg: str, col: int | None = None):
        self.col = col
        super().__init__(msg if col is None else f"{msg} (column {col + 1})")


def _sqrt_exact(n):
    if not isinstance(n, Fraction) or n.denominator != 1 or n < 0:
        raise ValueError("sqrt() takes a nonnegative integer")
    n = int(n)
    r = math.isqrt(n)
    if r * r == n:
        return Fraction(r)
    # pull out square factors: sqrt(12) = 2 sqrt(3)
    k, core = 1, n
    f = 2
    while f * f <= core:
        while core % (f * f) == 0:
            core //= f * f
            k *= f
        f += 1
    return QuadElem(Fraction(0), Fraction(k), core)


def _collapse(x):
    if isinstance(x, QuadElem) and x.s == 0:
        return x.r
    return x


def parse_scalar(text: str, params: Mapping[str, object] | None = None):
    """Evaluate ``text`` to a ``Fraction`` or ``QuadElem``.

    Unbound names raise :class:`ScalarSyntaxError`; division by zero raises
    ``ZeroDivisionError``.
    """
    params = params or {}
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ScalarSyntaxError(f"cannot parse scalar {text!r}", (exc.offset or 1) - 1) from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            v = node.value
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ScalarSyntaxError(f"unsupported literal {v!r}", node.col_offset)
            if isinstance(v, float):
                src = ast.get_source_segment(text.strip(), node)
                return Fraction(src)
            return Fraction(v)
        if isinstance(node, ast.Name):
            if node.id not in params:
                raise ScalarSyntaxError(f"unbound parameter {node.id!r}", node.col_offset)
            v = params[node.id]
            if isinstance(v, (QuadElem, Fraction)):
                return v
            if isinstance(v, int):
                return Fraction(v)
            if isinstance(v, str):
                return parse_scalar(v)
            raise ScalarSyntaxError(f"parameter {node.id!r} is not exact", node.col_offset)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a, b = ev(node.left), ev(node.right)
            op = node.op
            if isinstance(op, ast.Add):
                return _collapse(a + b)
            if isinstance(op, ast.Sub):
                return _collapse(a - b)
            if isinstance(op, ast.Mult):
                return _collapse(a * b)
            if isinstance(op, ast.Div):
                if not b:
                    raise ZeroDivisionError(f"division by zero in {text!r}")
                return _collapse(a / b)
            if isinstance(op, ast.Pow):
                if not (isinstance(b, Fraction) and b.denominator == 1):
                    raise ScalarSyntaxError("only integer powers are allowed", node.col_offset)
                if not a and b < 0:
                    raise ZeroDivisionError(f"division by zero in {text!r}")
                return _collapse(a ** int(b))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt":
            if len(node.args) != 1 or node.keywords:
                raise ScalarSyntaxError("sqrt() takes one argument", node.col_offset)
            try:
                return _sqrt_exact(ev(node.args[0]))
            except ValueError as exc:
                raise ScalarSyntaxError(str(exc), node.col_offset) from None
        raise ScalarSyntaxError(f"unsupported syntax in {text!r}", getattr(node, "col_offset", None))

    return ev(tree)
