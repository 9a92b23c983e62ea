"""Lattices given by square generator matrices, and the algebra on them.

Rows of the generator matrix are basis vectors, so lattice points are
``u @ B`` for integer row vectors ``u``.  A generator is either exact
(entries in Q or in one quadratic field Q(sqrt d)) or float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .exact import linalg as xl
from .reduction import hermite_normal_form, lll

GLUE_ORDER_LIMIT = 2**16


class NonLatticeError(ValueError):
    """Raised when a glue specification does not describe a lattice."""


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice with a square generator matrix.

    ``basis`` holds exact rows (tuples of ``Fraction`` / ``QuadElem``) when
    ``field`` is an integer (1 for Q, ``d`` for Q(sqrt d)), and a read-only
    float array when ``field`` is ``None``.  ``transform`` records the
    unimodular change of basis from the lattice this one was reduced from.
    """

    basis: object
    field: int | None
    name: str = ""
    family: str | None = None
    params: Mapping[str, object] = field(default_factory=dict)
    transform: tuple | None = None

    def __post_init__(self):
        if self.field is None:
            B = np.array(self.basis, dtype=float)
            if B.ndim != 2 or B.shape[0] != B.shape[1]:
                raise ValueError("generator matrix must be square")
            if not np.all(np.isfinite(B)):
                raise ValueError("generator matrix has non-finite entries")
            B.setflags(write=False)
            object.__setattr__(self, "basis", B)
            if abs(np.linalg.det(B)) <= 1e-300 or np.linalg.matrix_rank(B) < B.shape[0]:
                raise ValueError("singular generator matrix")
        else:
            rows = xl.to_matrix(self.basis)
            n, m = xl.shape(rows)
            if n != m or n == 0:
                raise ValueError("generator matrix must be square and nonempty")
            d = xl.field_of(rows)
            if self.field not in (1, d) and d != 1:
                raise ValueError(f"entries live in Q(sqrt {d}) but field {self.field} was declared")
            object.__setattr__(self, "basis", rows)
            if d != 1 and self.field == 1:
                object.__setattr__(self, "field", d)
            if self.det == 0:
                raise ValueError("singular generator matrix")
        object.__setattr__(self, "params", dict(self.params))

    # -- construction ------------------------------------------------------
    @classmethod
    def from_rows(cls, rows, name: str = "", family=None, params=None) -> Lattice:
        """Build from nested rows, choosing exact or float storage by entry type."""
        if isinstance(rows, np.ndarray) and rows.dtype.kind == "f":
            return cls(rows, None, name, family, params or {})
        flat = [x for r in rows for x in r]
        if any(isinstance(x, (float, np.floating)) for x in flat):
            return cls(np.array([[float(x) for x in r] for r in rows]), None, name, family, params or {})
        d = xl.field_of(xl.to_matrix(rows))
        return cls(rows, d, name, family, params or {})

    # -- basic properties --------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.basis)

    @property
    def is_exact(self) -> bool:
        return self.field is not None

    @cached_property
    def float_basis(self) -> np.ndarray:
        if self.field is None:
            return self.basis
        B = xl.to_float(self.basis)
        B.setflags(write=False)
        return B

    @cached_property
    def det(self):
        """Signed determinant (exact when the basis is exact)."""
        if self.field is None:
            return float(np.linalg.det(self.basis))
        return xl.det(self.basis)

    @cached_property
    def volume(self) -> float:
        return abs(float(self.det))

    def volume_exact(self):
        if self.field is None:
            raise TypeError("float lattice has no exact volume")
        d = self.det
        return -d if d < 0 else d

    def describe(self) -> str:
        if self.params:
            ps = ",".join(f"{k}={v}" for k, v in self.params.items())
            return f"{self.name}:{ps}"
        return self.name or f"lattice{self.n}"

    def with_basis(self, rows, **changes) -> Lattice:
        kw = dict(name=self.name, family=self.family, params=self.params)
        kw.update(changes)
        return Lattice.from_rows(rows, **kw)

    def scaled(self, c) -> Lattice:
        """The lattice ``c * L``."""
        if self.field is None or isinstance(c, (float, np.floating)):
            return Lattice(self.float_basis * float(c), None, self.name, self.family, self.params)
        return Lattice(xl.scale(c, self.basis), self.field, self.name, self.family, self.params)

    def unit_volume(self) -> Lattice:
        """Float copy rescaled to determinant 1."""
        c = self.volume ** (-1.0 / self.n)
        return Lattice(self.float_basis * c, None, self.name, self.family, self.params)

    def as_float(self) -> Lattice:
        return Lattice(self.float_basis, None, self.name, self.family, self.params)

    def __repr__(self):
        kind = "float" if self.field is None else ("Q" if self.field == 1 else f"Q(sqrt {self.field})")
        return f"Lattice({self.describe()!r}, n={self.n}, {kind})"


# -- Gram, dual, products -----------------------------------------------------


def gram(L: Lattice):
    """``B B^T``: exact tuple matrix for exact lattices, float array otherwise."""
    if L.field is None:
        B = L.basis
        A = B @ B.T
        return (A + A.T) / 2
    return xl.matmul(L.basis, xl.transpose(L.basis))


def dual(L: Lattice) -> Lattice:
    """Dual lattice, generated by ``(B^T)^{-1}``."""
    if L.field is None:
        return Lattice(np.linalg.inv(L.basis).T, None, f"{L.name}*" if L.name else "")
    return Lattice(xl.transpose(xl.inverse(L.basis)), L.field, f"{L.name}*" if L.name else "")


def _common_field(fields):
    if any(f is None for f in fields):
        return None
    ds = {f for f in fields if f != 1}
    if len(ds) > 1:
        raise ValueError(f"components live in different quadratic fields {sorted(ds)}")
    return ds.pop() if ds else 1


def product_scaled(components: Sequence[tuple[Lattice, object]], name: str = "") -> Lattice:
    """Block-diagonal product of ``a_i * L_i``."""
    if not components:
        raise ValueError("need at least one component")
    for _, a in components:
        if not (a > 0):
            raise ValueError(f"scale factors must be positive, got {a}")
    scale_fields = [None if isinstance(a, (float, np.floating)) else xl.field_of([[xl.normalize(a)]]) for _, a in components]
    fld = _common_field([L.field for L, _ in components] + scale_fields)
    n = sum(L.n for L, _ in components)
    if fld is None:
        B = np.zeros((n, n))
        off = 0
        for L, a in components:
            B[off : off + L.n, off : off + L.n] = float(a) * L.float_basis
            off += L.n
        return Lattice(B, None, name)
    zero = Fraction(0)
    rows = []
    off = 0
    for L, a in components:
        for r in L.basis:
            rows.append((zero,) * off + tuple(a * x for x in r) + (zero,) * (n - off - L.n))
        off += L.n
    return Lattice(rows, fld, name)


# -- gluing ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GlueSpec:
    """A product lattice together with glue vectors.

    ``components`` lists ``(lattice, scale)`` pairs forming a block-diagonal
    product.  When the components are not coordinate-aligned (for example a
    root lattice embedded in a hyperplane) pass the product generator
    directly as ``product`` and keep ``components`` as documentation.

    ``glue`` vectors are either the complete list of coset representatives
    (``is_group=True``; closure is verified) or generators of the group.
    """

    components: tuple = ()
    glue: tuple = ()
    is_group: bool = False
    product: Lattice | None = None
    name: str = ""
    ranges: tuple = ()

    def product_lattice(self) -> Lattice:
        if self.product is not None:
            return self.product
        return product_scaled(list(self.components), name=f"{self.name} product" if self.name else "")


def _float_to_rational_coords(c: np.ndarray) -> tuple:
    out = []
    for x in c:
        q = Fraction(float(x)).limit_denominator(GLUE_ORDER_LIMIT)
        if abs(float(q) - x) > 1e-9:
            raise NonLatticeError("glue vector coordinates are not rational with small denominators")
        out.append(q)
    return tuple(out)


def glue_coordinates(spec: GlueSpec) -> list[tuple]:
    """Glue vectors in coordinates of the product basis (rational)."""
    P = spec.product_lattice()
    coords = []
    if P.field is None:
        Pinv = np.linalg.inv(P.float_basis)
        for g in spec.glue:
            gf = np.array([float(x) for x in g])
            coords.append(_float_to_rational_coords(gf @ Pinv))
        return coords
    gs = [tuple(xl.normalize(x) for x in g) for g in spec.glue]
    for g in gs:
        if len(g) != P.n:
            raise ValueError("glue vector has the wrong dimension")
    for c in xl.solve_left_many(P.basis, gs):
        if not all(isinstance(x, Fraction) for x in c):
            raise NonLatticeError("glue vector is not a rational combination of the product basis")
        coords.append(c)
    return coords


def _reduce_mod1(c) -> tuple:
    return tuple(x - math.floor(x) for x in c)


def glue_group(spec: GlueSpec) -> list[tuple]:
    """Coset representatives of the glue group in product coordinates, in [0,1)."""
    coords = glue_coordinates(spec)
    n = spec.product_lattice().n
    zero = (Fraction(0),) * n
    for c in coords:
        order = math.lcm(*(x.denominator for x in c)) if c else 1
        if order > GLUE_ORDER_LIMIT:
            raise NonLatticeError(f"glue vector of order {order} exceeds the limit {GLUE_ORDER_LIMIT}")
    reps = {_reduce_mod1(c) for c in coords} | {zero}
    if spec.is_group:
        for a in reps:
            for b in reps:
                s = _reduce_mod1(tuple(x + y for x, y in zip(a, b)))
                if s not in reps:
                    raise NonLatticeError("glue vectors are not closed under addition: nonlattice packing")
        return sorted(reps)
    group = {zero}
    frontier = [zero]
    gens = [_reduce_mod1(c) for c in coords]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                s = _reduce_mod1(tuple(x + y for x, y in zip(a, g)))
                if s not in group:
                    group.add(s)
                    nxt.append(s)
                    if len(group) > GLUE_ORDER_LIMIT:
                        raise NonLatticeError("glue group is too large")
        frontier = nxt
    return sorted(group)


def glue(spec: GlueSpec) -> Lattice:
    """Generator matrix of the union of the glue cosets of the product lattice.

    Glue coordinates are rational; stacking them under the identity, clearing
    denominators and taking an integer Hermite normal form yields a basis of
    the glued lattice in product coordinates.  All steps are exact.
    """
    P = spec.product_lattice()
    n = P.n
    group = glue_group(spec)
    if len(group) == 1:
        return P if not spec.name else P.with_basis(P.basis if P.is_exact else P.float_basis, name=spec.name)
    D = math.lcm(*(x.denominator for c in group for x in c))
    M = [[D * int(i == j) for j in range(n)] for i in range(n)]
    M += [[int(x * D) for x in c] for c in group if any(c)]
    H = hermite_normal_form(M)
    Hq = tuple(tuple(Fraction(x, D) for x in row) for row in H)
    if P.field is None:
        B = np.array([[float(x) for x in r] for r in Hq]) @ P.float_basis
        out = Lattice(B, None, spec.name)
    else:
        out = Lattice(xl.matmul(Hq, P.basis), P.field, spec.name)
    # index check: |det H| = D^n / |Gamma|
    detH = math.prod(H[i][i] for i in range(n))
    if detH * len(group) != D**n:
        raise NonLatticeError("glued determinant does not match the glue group order")
    return out


def coordinates(L: Lattice, v) -> tuple:
    """Exact coordinates of ``v`` in the basis of ``L`` (``v = c @ B``)."""
    if L.field is None:
        return tuple(np.asarray(v, dtype=float) @ np.linalg.inv(L.float_basis))
    return xl.solve_left(L.basis, tuple(xl.normalize(x) for x in v))


def contains(L: Lattice, v, tol: float = 1e-9) -> bool:
    c = coordinates(L, v)
    if L.field is None:
        return bool(np.all(np.abs(np.asarray(c) - np.rint(c)) <= tol))
    return all(isinstance(x, Fraction) and x.denominator == 1 for x in c)


# -- reduction ---------------------------------------------------------------


def lll_reduce(L: Lattice, delta: float = 0.99) -> Lattice:
    """Same lattice with an LLL-reduced basis; ``transform`` holds ``T``
    with ``B_reduced = T @ B``."""
    T = lll(L.float_basis, delta)
    Tt = tuple(tuple(int(x) for x in row) for row in T)
    if L.field is None:
        B = T.astype(float) @ L.float_basis
        return Lattice(B, None, L.name, L.family, L.params, transform=Tt)
    Tq = tuple(tuple(Fraction(x) for x in row) for row in Tt)
    return Lattice(xl.matmul(Tq, L.basis), L.field, L.name, L.family, L.params, transform=Tt)


