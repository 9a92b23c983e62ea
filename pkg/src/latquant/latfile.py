"""Plain-text lattice documents.

A document looks like::

    # the D4 root lattice scaled by a
    name D4
    field sqrt(1)
    param a = 3/2
    rows:
      -a -a 0 0
      a -a 0 0
      0 a -a 0
      0 0 a -a

``field float`` stores the matrix as IEEE doubles (written with ``repr`` so
they round-trip).  An optional ``glue:`` block turns the document into a
:class:`GlueSpec`; the rows are then the product generator::

    glue: generators          (or: glue: group)
      component A7 1-8
      component D5 9-13
      vector 1/2 1/2 ...
"""

from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

from .exact import linalg as xl
from .exact.quad import QuadElem, format_scalar
from .exact.scalars import ScalarSyntaxError, parse_scalar
from .lattice import GlueSpec, Lattice


class LatticeFileError(ValueError):
    def __init__(self, msg: str, line: int, col: int = 1):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {msg}")


_FIELD = re.compile(r"field\s+(?:sqrt\((\d+)\)|(float))\s*$")
_PARAM = re.compile(r"param\s+([A-Za-z_]\w*)\s*=\s*(.+)$")
_RANGE = re.compile(r"component\s+(\S+)\s+(\d+)-(\d+)\s*$")


def _tokens(line: str, start: int) -> list[tuple[str, int]]:
    """Whitespace-separated scalar tokens of ``line[start:]`` with columns.
    Spaces inside parentheses do not split."""
    out, depth, cur, col0 = [], 0, [], None
    for i, ch in enumerate(line[start:], start):
        if ch.isspace() and depth == 0:
            if cur:
                out.append(("".join(cur), col0))
                cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if not cur:
            col0 = i
        cur.append(ch)
    if cur:
        out.append(("".join(cur), col0))
    return out


def _scalar(tok: str, col: int, lineno: int, params, is_float: bool):
    if is_float:
        try:
            return float(tok)
        except ValueError:
            raise LatticeFileError(f"not a float: {tok!r}", lineno, col + 1) from None
    try:
        return parse_scalar(tok, params)
    except ScalarSyntaxError as exc:
        c = col + 1 + (exc.col or 0)
        raise LatticeFileError(str(exc).split(" (column")[0], lineno, c) from None
    except ZeroDivisionError as exc:
        raise LatticeFileError(str(exc), lineno, col + 1) from None


def parse_lattice_file(text: str, params: dict | None = None):
    """Parse a lattice document into a :class:`Lattice` or :class:`GlueSpec`.

    ``params`` supplies values for parameters the document declares without
    binding (``param a``) and overrides bound ones.
    """
    field_d, is_float = 1, False
    bound: dict[str, object] = {}
    name = family = None
    rows: list[tuple[list, int]] = []
    section = "header"
    glue_mode = None
    ranges: list[tuple[int, int]] = []
    names: list[str] = []
    vectors: list[tuple[list, int]] = []
    overrides = {k: (v if isinstance(v, (Fraction, QuadElem, float)) else parse_scalar(str(v))) for k, v in (params or {}).items()}
    declared: list[str] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped == "rows:":
            if section != "header":
                raise LatticeFileError("'rows:' must follow the header", lineno, indent + 1)
            section = "rows"
            continue
        if stripped.startswith("glue:"):
            if section != "rows" or not rows:
                raise LatticeFileError("'glue:' must follow the rows", lineno, indent + 1)
            mode = stripped[5:].strip() or "generators"
            if mode not in ("group", "generators"):
                raise LatticeFileError(f"glue mode must be 'group' or 'generators', got {mode!r}", lineno, indent + 6)
            glue_mode, section = mode, "glue"
            continue
        if section == "header":
            if m := _FIELD.match(stripped):
                if m.group(2):
                    is_float = True
                else:
                    field_d = int(m.group(1))
                    if field_d < 1:
                        raise LatticeFileError("field discriminant must be positive", lineno, indent + 1)
            elif m := _PARAM.match(stripped):
                pname, val = m.group(1), m.group(2).strip()
                col = line.index(val, indent + len("param")) + 1
                bound[pname] = _scalar(val, col - 1, lineno, {**bound, **overrides}, False)
                declared.append(pname)
            elif re.fullmatch(r"param\s+[A-Za-z_]\w*", stripped):
                pname = stripped.split()[1]
                if pname not in overrides:
                    raise LatticeFileError(f"parameter {pname!r} has no value", lineno, indent + 7)
                declared.append(pname)
            elif stripped.startswith("name "):
                name = stripped[5:].strip()
            elif stripped.startswith("family "):
                family = stripped[7:].strip()
            else:
                raise LatticeFileError(f"unexpected header line {stripped!r}", lineno, indent + 1)
            continue
        env = {**bound, **overrides}
        if section == "rows":
            rows.append(([_scalar(t, c, lineno, env, is_float) for t, c in _tokens(line, 0)], lineno))
            continue
        # glue section
        if m := _RANGE.match(stripped):
            i, j = int(m.group(2)), int(m.group(3))
            if not 1 <= i <= j:
                raise LatticeFileError("component range must be i-j with 1 <= i <= j", lineno, indent + 1)
            ranges.append((i, j))
            names.append(m.group(1))
        elif stripped.startswith("vector"):
            start = line.index("vector") + len("vector")
            vectors.append(([_scalar(t, c, lineno, env, is_float) for t, c in _tokens(line, start)], lineno))
        else:
            raise LatticeFileError(f"unexpected glue line {stripped!r}", lineno, indent + 1)

    if not rows:
        raise LatticeFileError("no 'rows:' block", max(1, len(text.splitlines())))
    n = len(rows)
    for r, lineno in rows:
        if len(r) != n:
            raise LatticeFileError(f"row has {len(r)} entries, expected {n}", lineno)
    meta = {k: overrides.get(k, bound.get(k)) for k in declared}
    try:
        if is_float:
            L = Lattice(np.array([r for r, _ in rows], dtype=float), None, name or "", family, meta)
        else:
            M = xl.to_matrix([r for r, _ in rows])
            d = xl.field_of(M)
            if d not in (1, field_d):
                raise LatticeFileError(f"entries live in Q(sqrt {d}) but the header declares sqrt({field_d})", rows[0][1])
            L = Lattice(M, field_d if field_d != 1 else d, name or "", family, meta)
    except LatticeFileError:
        raise
    except ValueError as exc:
        raise LatticeFileError(str(exc), rows[0][1]) from None
    if glue_mode is None:
        return L
    for v, lineno in vectors:
        if len(v) != n:
            raise LatticeFileError(f"glue vector has {len(v)} entries, expected {n}", lineno)
    for i, j in ranges:
        if j > n:
            raise LatticeFileError(f"component range {i}-{j} exceeds dimension {n}", 0)
    return GlueSpec(
        components=tuple((nm, None) for nm in names),
        glue=tuple(tuple(v) for v, _ in vectors),
        is_group=glue_mode == "group",
        product=L,
        name=name or "",
        ranges=tuple(ranges),
    )


def _fmt(x, is_float: bool) -> str:
    return repr(float(x)) if is_float else format_scalar(x)


def _fmt_entry(x, is_float: bool) -> str:
    s = _fmt(x, is_float)
    return s.replace(" ", "") if not is_float else s


def _component_name(spec: GlueSpec, k: int) -> str:
    if k < len(spec.components):
        c = spec.components[k][0]
        nm = c if isinstance(c, str) else getattr(c, "name", "")
        if nm:
            return nm.replace(" ", "_")
    return f"C{k + 1}"


def format_lattice_file(obj) -> str:
    """Print a :class:`Lattice` or :class:`GlueSpec` as a document that parses
    back to identical entries."""
    spec = obj if isinstance(obj, GlueSpec) else None
    L = spec.product_lattice() if spec else obj
    is_float = L.field is None
    lines = []
    nm = (spec.name if spec else L.name) or L.name
    if nm:
        lines.append(f"name {nm}")
    if L.family:
        lines.append(f"family {L.family}")
    lines.append("field float" if is_float else f"field sqrt({L.field})")
    for k, v in L.params.items():
        if isinstance(v, (Fraction, QuadElem, int)):
            lines.append(f"param {k} = {format_scalar(v)}")
    lines.append("rows:")
    B = L.float_basis if is_float else L.basis
    for r in B:
        lines.append("  " + " ".join(_fmt_entry(x, is_float) for x in r))
    if spec:
        lines.append(f"glue: {'group' if spec.is_group else 'generators'}")
        for k, (i, j) in enumerate(spec.ranges):
            lines.append(f"  component {_component_name(spec, k)} {i}-{j}")
        for g in spec.glue:
            lines.append("  vector " + " ".join(_fmt_entry(xl.normalize(x) if not is_float else x, is_float) for x in g))
    return "\n".join(lines) + "\n"


def read_lattice_file(path, params: dict | None = None):
    with open(path, encoding="utf-8") as fh:
        return parse_lattice_file(fh.read(), params)
