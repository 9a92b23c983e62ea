"""Built-in lattices, glue specifications, symmetry generators and exact data.

Every matrix here is a verbatim transcription; nothing is rotated or
re-canonicalized.  ``get(name, **params)`` is the single lookup entry point.
"""

from __future__ import annotations

import csv
import hashlib
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .exact import linalg as xl
from .exact.quad import QuadElem
from .lattice import GlueSpec, Lattice, product_scaled

CATALOG_VERSION = "1"

H = Fraction(1, 2)
Q = QuadElem.sqrt(3)
QH = Q / 2
Z0 = Fraction(0)

NSM13_TABLE_SHA256 = "fd00b00a895e60e9f95bedaf155113499dce9dc89aef2272cd0c5c20aff7caa1"


class CatalogError(KeyError):
    pass


# -- exact constants -----------------------------------------------------------

#: Numerator polynomial of the 14-dimensional second moment in a^2, highest
#: power (a^30) first.  The full integral is sqrt(3)/(D14 a^4) * P(a^2).
B14_MOMENT_POLY = (
    -203620624743138487,
    3801139170184845180,
    -12389539784482907235,
    -360690099386364296640,
    6016931591463402618645,
    -50328772679983887733644,
    281188164016693016348265,
    -1139254272224209154665080,
    3445025447618975371649355,
    -7776389251376810821296540,
    15825068372524956384278439,
    6097536730919383009631280,
    6105246565601165070721815,
    -2678596597802952982813140,
    703635822130079540168595,
    -83994803296029834943608,
)
B14_MOMENT_DENOM = 2**24 * 3**13 * 5**6 * 7**4 * 11**2 * 13

#: Stationarity polynomial f(v) of the 14-dimensional family, v^15 first,
#: over B14_STATIONARITY_DENOM.
B14_STATIONARITY_POLY = (
    -1018103123715692435,
    17231830904837964816,
    -50384128456897156089,
    -1298484357790911467904,
    18853052319918661538421,
    -134210060479957033956384,
    618613960836724635966183,
    -1974707405188629201419472,
    4363698900317368804089183,
    -6221111401101448657037232,
    5275022790841652128092813,
    -813004897455917734617504,
    -3663147939360699042433089,
    2857169704323149848334016,
    -1078908260599455294925179,
    167989606592059669887216,
)
B14_STATIONARITY_DENOM = 2**24 * 3**15 * 5**5 * 7**6 * 11**2 * 13

#: Exact NSM of the unit-scale 13-dimensional lattice.
B13_UNIT_NSM = Fraction(264643025208158502912098205658743146287, 2**81 * 3**9 * 5**3 * 7**4 * 11**2 * 13**3)

#: Second-moment matrix entries (alpha, beta, gamma) at unit scales.
B13_UNIT_ABG = (
    Fraction(304547502154926541417266582464260350511, 2**81 * 3**10 * 5**4 * 7**4 * 11**2 * 13**2),
    Fraction(9787631469390979346380560690239381767, 2**83 * 3**10 * 5 * 7**4 * 11**2 * 13**2),
    Fraction(-972574414727556817448919098411598577, 2**83 * 3**10 * 5**4 * 7**4 * 11**2 * 13**2),
)

#: Denominator constants of the two 13-dimensional closed forms.
B13_PHASE_A_DENOM = 2**81 * 3**10 * 5**4 * 7**4 * 11**2 * 13**3
B13_PHASE_B_CORRECTION_DENOM = 2**78 * 3**5 * 5**3 * 7**2 * 11 * 13**2


@lru_cache(maxsize=None)
def nsm13_table() -> tuple[tuple[int, int, int], ...]:
    """The 120 integer coefficients ``c[i, j]`` of the phase-A numerator
    ``sum c[i, j] * a2^(2i) * a3^(2j)``, verified against a pinned checksum."""
    raw = resources.files("latquant").joinpath("data/nsm13_phase_a.csv").read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != NSM13_TABLE_SHA256:
        raise RuntimeError(f"coefficient table checksum mismatch: {digest}")
    rows = list(csv.DictReader(raw.decode("ascii").splitlines()))
    out = tuple((int(r["i"]), int(r["j"]), int(r["c"])) for r in rows)
    if len(out) != 120 or any(i + j > 14 for i, j, _ in out):
        raise RuntimeError("coefficient table has the wrong shape")
    return out


# -- helpers -------------------------------------------------------------------


def _exact(x):
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (int, Fraction, QuadElem)):
        return xl.normalize(x)
    if isinstance(x, str):
        from .exact.scalars import parse_scalar

        return parse_scalar(x)
    raise TypeError(f"unsupported parameter type {type(x).__name__}")


def _is_float(*xs) -> bool:
    return any(isinstance(x, float) for x in xs)


def _block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    rows = []
    off = 0
    for b in blocks:
        k = len(b)
        for r in b:
            rows.append((Z0,) * off + tuple(r) + (Z0,) * (n - off - k))
        off += k
    return xl.to_matrix(rows)


def _block_grid(grid, k=2):
    """Assemble a matrix from a grid of ``k x k`` blocks (``None`` = zero)."""
    rows = []
    for brow in grid:
        for i in range(k):
            row = []
            for blk in brow:
                row.extend(blk[i] if blk is not None else (Z0,) * k)
            rows.append(row)
    return xl.to_matrix(rows)


def _perm_matrix(perm):
    n = len(perm)
    return xl.to_matrix([[int(perm[i] == j) for j in range(n)] for i in range(n)])


def _diag(values):
    n = len(values)
    return xl.to_matrix([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


# -- basic lattices ---------------------------------------------------------------


def integer_lattice(n: int) -> Lattice:
    if n < 1:
        raise CatalogError("Z needs n >= 1")
    return Lattice(xl.identity(n), 1, "Z", "Z", {"n": n})


def hexagonal() -> Lattice:
    return Lattice([[1, 0], [H, QH]], 3, "A2", "A2", {})


def checkerboard(n: int) -> Lattice:
    """D_n: integer vectors with even coordinate sum."""
    if n < 2:
        raise CatalogError("D_n needs n >= 2")
    rows = [[2] + [0] * (n - 1)]
    for i in range(1, n):
        rows.append([1] + [int(j == i) for j in range(1, n)])
    return Lattice(rows, 1, f"D{n}", f"D{n}", {})


# -- 14-dimensional family ----------------------------------------------------------


def _b14_rows(a):
    ah = a / 2 if not isinstance(a, float) else a / 2.0
    rows = [
        [2, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [1, Q, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 2, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, Q, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 2, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, Q, 0, 0, 0, 0],
        [1, 0, H, -QH, H, -QH, 1, 0, 0, 0],
        [H, QH, 1, 0, 1, 0, H, QH, 0, 0],
        [H, -QH, 1, 0, H, -QH, 0, 0, 1, 0],
        [1, 0, H, QH, 1, 0, 0, 0, H, QH],
        [1, 0, 1, 0, H, QH, 0, 0, 0, 0],
        [0] * 10,
        [0] * 10,
        [H, -QH, H, -QH, 1, 0, 0, 0, 0, 0],
    ]
    tails = [
        [0, 0, 0, 0],
    ] * 10 + [
        [a, 0, 0, 0],
        [-a, a, 0, 0],
        [-a, 0, a, 0],
        [ah, ah, ah, ah],
    ]
    return [r + t for r, t in zip(rows, tails)]


def _float_rows(rows):
    return np.array([[float(x) for x in r] for r in rows])


def b14(a) -> Lattice:
    """The one-parameter 14-dimensional generator (q = sqrt 3)."""
    a = _exact(a)
    if not (a > 0):
        raise CatalogError("B14 requires a > 0")
    rows = _b14_rows(a)
    if _is_float(a):
        return Lattice(_float_rows(rows), None, "B14", "B14", {"a": a})
    return Lattice(rows, 3, "B14", "B14", {"a": a})


def k10prime() -> Lattice:
    """Top-left 10 x 10 block of the 14-dimensional generator."""
    rows = [r[:10] for r in _b14_rows(Fraction(1))[:10]]
    return Lattice(rows, 3, "K10p", "K10p", {})


def b14_glue_vectors(a):
    ah = a / 2
    return (
        (0,) * 14,
        (1, 0, 1, 0, H, QH, 0, 0, 0, 0, a, 0, 0, 0),
        (H, -QH, H, -QH, 1, 0, 0, 0, 0, 0, ah, ah, ah, ah),
        (H, QH, H, QH, -H, QH, 0, 0, 0, 0, ah, -ah, -ah, -ah),
    )


def b14_glue(a) -> GlueSpec:
    """K'10 x a D4 glued by the four listed coset representatives."""
    a = _exact(a)
    if not (a > 0):
        raise CatalogError("B14 requires a > 0")
    comps = ((k10prime(), Fraction(1)), (checkerboard(4), a))
    return GlueSpec(comps, b14_glue_vectors(a), True, None, "B14-glued", ((1, 10), (11, 14)))


# -- 13-dimensional family ----------------------------------------------------------


def _b13_rows(a1, a2, a3):
    flt = _is_float(a1, a2, a3)
    half = 0.5 if flt else H
    b = (10 * a1 + a3) / 16
    bp = b - a1
    rows = []
    for i in range(7):
        r = [-a1] + [a1 if j == i else 0 for j in range(7)] + [0] * 5
        rows.append(r)
    rows.append([0] * 8 + [2 * a2, 0, 0, 0, 0])
    for i in range(4):
        rows.append([0] * 8 + [a2] + [a2 if j == i else 0 for j in range(4)])
    rows.append([b, b, b, bp, bp, bp, bp, bp] + [a2 * half] * 5)
    return rows


def b13(a1=1, a2=1, a3=1) -> Lattice:
    """Glued a1 A7 x a2 D5 x a3 sqrt2 Z (three scale parameters)."""
    a1, a2, a3 = (_exact(x) for x in (a1, a2, a3))
    if not (a1 > 0 and a2 > 0 and a3 > 0):
        raise CatalogError("B13 requires positive scales")
    rows = _b13_rows(a1, a2, a3)
    params = {"a1": a1, "a2": a2, "a3": a3}
    if _is_float(a1, a2, a3):
        return Lattice(_float_rows(rows), None, "B13", "B13", params)
    return Lattice(rows, 1, "B13", "B13", params)


def b13_unit() -> Lattice:
    L = b13(1, 1, 1)
    return Lattice(L.basis, 1, "B13'", "B13", {"a1": Fraction(1), "a2": Fraction(1), "a3": Fraction(1)})


def b13_glue(a1=1, a2=1, a3=1) -> GlueSpec:
    """Product a1 A7 x a2 D5 x a3 sqrt2 Z in ambient coordinates, glued by
    the order-8 vector formed by the last generator row."""
    a1, a2, a3 = (_exact(x) for x in (a1, a2, a3))
    rows = _b13_rows(a1, a2, a3)
    half = 0.5 if _is_float(a1, a2, a3) else H
    line = [a3 * half] * 8 + [0] * 5
    prod_rows = rows[:12] + [line]
    if _is_float(a1, a2, a3):
        P = Lattice(_float_rows(prod_rows), None, "A7xD5xZ")
    else:
        P = Lattice(prod_rows, 1, "A7xD5xZ")
    comps = (("A7", a1), ("D5", a2), ("sqrt2 Z", a3))
    return GlueSpec(comps, (tuple(rows[12]),), False, P, "B13-glued", ((1, 8), (9, 13)))


# -- symmetry generators ---------------------------------------------------------------

W2 = xl.to_matrix([[Fraction(1, 4), -Q / 4], [Q / 4, Fraction(1, 4)]])
M2 = xl.to_matrix([[H, -QH], [-QH, -H]])
M2P = xl.to_matrix([[H, QH], [QH, -H]])
M2PP = xl.to_matrix([[1, 0], [0, -1]])
M4 = xl.scale(H, xl.to_matrix([[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]))
M4P = _diag([1, 1, 1, -1])
I2H = xl.to_matrix([[H, 0], [0, H]])
NI2H = xl.to_matrix([[-H, 0], [0, -H]])
I2 = xl.identity(2)


def _w_t():
    return xl.transpose(W2)


MREFL10 = _block_grid(
    [
        [I2H, W2, W2, NI2H, None],
        [_w_t(), I2H, NI2H, _w_t(), None],
        [_w_t(), NI2H, I2H, _w_t(), None],
        [NI2H, W2, W2, I2H, None],
        [None, None, None, None, I2],
    ]
)
M10 = _block_grid(
    [
        [M2, None, None, None, None],
        [None, None, M2PP, None, None],
        [None, M2PP, None, None, None],
        [None, None, None, M2, None],
        [None, None, None, None, M2P],
    ]
)
M10P = _block_grid(
    [
        [M2, None, None, None, None],
        [None, None, None, None, M2],
        [None, M2, None, None, None],
        [None, None, M2, None, None],
        [None, None, None, M2, None],
    ]
)


def embed10(M):
    """Block-diagonal ``diag(M, I4)``."""
    return _block_diag(M, xl.identity(4))


def embed4(M):
    """Block-diagonal ``diag(I10, M)``."""
    return _block_diag(xl.identity(10), M)


def g10_generators() -> dict:
    gens = {}
    for i in range(5):
        vals = [1] * 10
        vals[2 * i] = vals[2 * i + 1] = -1
        gens[f"pair-sign-{i + 1}"] = embed10(_diag(vals))
    # joint swap (x1,x2)<->(x3,x4) with (x7,x8)<->(x9,x10)
    p1 = [2, 3, 0, 1, 4, 5, 8, 9, 6, 7]
    # joint swap (x3,x4)<->(x7,x8) with (x5,x6)<->(x9,x10)
    p2 = [0, 1, 6, 7, 8, 9, 2, 3, 4, 5]
    gens["joint-swap-a"] = embed10(_perm_matrix(p1))
    gens["joint-swap-b"] = embed10(_perm_matrix(p2))
    gens["reflection"] = embed10(MREFL10)
    return gens


def g4_generators() -> dict:
    return {
        "transpose-12": embed4(_perm_matrix([1, 0, 2, 3])),
        "cycle-1234": embed4(_perm_matrix([1, 2, 3, 0])),
        "even-sign": embed4(_diag([-1, -1, 1, 1])),
    }


def b14_symmetry_generators() -> dict:
    """Generators of the full automorphism group of the glued 14-dim lattice."""
    gens = {**g10_generators(), **g4_generators()}
    gens["mixed-1"] = _block_diag(M10, M4)
    gens["mixed-2"] = _block_diag(M10P, M4P)
    return gens


def b14_non_symmetries() -> dict:
    """Symmetries of the components that do not survive the gluing."""
    return {"M10-alone": embed10(M10), "M10p-alone": embed10(M10P), "M4-alone": embed4(M4)}


# -- congruence certificates -----------------------------------------------------------

A1 = xl.to_matrix([
    [4, -2, -2, 1, 1, 1, -1, -1, -2, -2],
    [-2, 4, 1, -2, -2, -2, -1, -1, 1, 1],
    [-2, 1, 4, -2, -2, -2, 0, 0, 2, 0],
    [1, -2, -2, 4, 1, 1, 0, 0, -1, 0],
    [1, -2, -2, 1, 4, 1, 0, 0, -2, -1],
    [1, -2, -2, 1, 1, 4, 2, 2, 0, 0],
    [-1, -1, 0, 0, 0, 2, 4, 1, 0, 0],
    [-1, -1, 0, 0, 0, 2, 1, 4, 2, 2],
    [-2, 1, 2, -1, -2, 0, 0, 2, 4, 1],
    [-2, 1, 0, 0, -1, 0, 0, 2, 1, 4],
])
A2 = xl.to_matrix([
    [4, 1, 1, -2, 1, -2, -2, -2, 2, -2],
    [1, 4, 0, -1, 2, 1, 0, 0, 2, -2],
    [1, 0, 4, 1, 2, -2, 1, 1, 2, 1],
    [-2, -1, 1, 4, -1, 1, 2, 1, -1, 2],
    [1, 2, 2, -1, 4, -1, 1, 1, 2, 0],
    [-2, 1, -2, 1, -1, 4, 0, 1, -1, 0],
    [-2, 0, 1, 2, 1, 0, 4, 2, -1, 1],
    [-2, 0, 1, 1, 1, 1, 2, 4, -1, 2],
    [2, 2, 2, -1, 2, -1, -1, -1, 4, -1],
    [-2, -2, 1, 2, 0, 0, 1, 2, -1, 4],
])
U1 = xl.to_matrix([
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 0, 0, 1, 0, 0, 0],
    [1, 1, 0, 1, 0, -1, 1, 1, 0, 0],
    [-1, -1, 0, 0, -1, 0, -1, 0, -1, 0],
    [-2, -1, -1, 0, -1, 0, -1, 0, -1, -1],
    [1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, -1, 0, 0, 0, 0, 0],
    [0, -1, -1, 0, -1, -1, 0, 0, 0, 0],
])
U2 = xl.to_matrix([
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, -1, 0, 0, 1, 0, 0, 0, 0, 0],
    [1, -1, -1, 0, 0, 0, 1, 1, 1, 0],
    [0, -1, -1, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, -2, -1, 1, 1, -1, 0, 1],
    [0, 0, -1, 1, 1, -1, -1, 0, 0, 0],
    [0, -1, -1, 0, 1, 0, 0, 0, 1, 0],
    [1, -1, -1, 1, 1, 0, 0, 0, 0, 0],
    [1, -1, -1, 0, 0, 0, 1, 0, 1, 0],
])
B4 = xl.to_matrix([
    [2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0],
    [0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 1],
    [0, 1, 0, 1, 0, 0, 0, 0, 1, 1, 1, 0],
    [1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 1],
])
B5 = xl.to_matrix([
    [2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 0, 1, 1, 0, 0],
    [0, 0, 1, 1, 1, 1, 1, 1, 1, 0, 1, 1],
    [1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 1, 0],
    [1, 0, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 0, 1, 1, 0, 0, 1, 1],
])
U4 = xl.to_matrix([
    [2, 1, 1, 0, 0, 1, -2, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [2, 1, 1, 0, 0, 2, -3, 1, -1, 1, 0, 0],
    [0, 0, 0, 1, 0, -1, 1, -1, 1, -1, 0, 0],
    [2, 2, 1, -1, -1, 2, -4, 2, -1, 1, -1, 1],
    [2, 2, 1, -1, 0, 2, -4, 2, -1, 1, -1, 1],
    [2, 2, 0, -1, -1, 2, -4, 3, -1, 1, -1, 1],
    [0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [-1, -1, -1, 0, 0, -2, 2, -1, 1, -1, 1, 0],
    [-1, -1, -1, 0, 0, -1, 2, -1, 1, -1, 1, 0],
    [-1, -1, -1, 1, 0, -2, 3, -2, 2, -1, 1, -1],
    [-2, -3, -1, 2, 1, -4, 6, -5, 3, -2, 2, -1],
])
U5 = xl.to_matrix([
    [1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, -1, 0, 1, 0, 0],
    [1, 0, 0, 0, -1, -1, 0, 1, 0, -1, 0, 0],
    [1, 1, 0, 0, 0, -1, 0, 1, 0, 0, 0, -1],
    [0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 1],
    [0, 0, -1, -1, -1, 0, 1, 0, -1, 0, 0, 1],
    [-1, -2, -1, -1, -2, -1, 2, 0, 0, -2, 0, 2],
    [-1, -2, -1, -1, -2, -1, 1, 0, 0, -2, 1, 2],
    [-1, -2, -1, 0, -2, -1, 1, 0, 0, -2, 1, 2],
    [0, 1, -1, -1, 1, 1, 0, 0, -1, 2, -1, 0],
    [0, -1, 0, 0, -1, -1, 0, 0, 1, -1, 0, 1],
])


def congruence_data() -> dict:
    """Gram matrices, generators and unimodular certificates."""
    return {"A1": A1, "A2": A2, "U1": U1, "U2": U2, "B4": B4, "B5": B5, "U4": U4, "U5": U5}


# -- lookup ------------------------------------------------------------------------------

_ENTRIES = {
    "Z": "integer lattice Z^n (param n)",
    "A2": "hexagonal lattice",
    "D4": "checkerboard lattice D4",
    "D5": "checkerboard lattice D5",
    "K10p": "10-dimensional laminated lattice K'10 (top-left block of B14)",
    "B14": "one-parameter 14-dimensional lattice (param a > 0, or a=opt)",
    "B14-glued": "K'10 x aD4 glue specification (param a)",
    "B13": "three-scale 13-dimensional lattice (params a1, a2, a3, or a=opt)",
    "B13'": "13-dimensional lattice at unit scales",
    "B13-glued": "a1 A7 x a2 D5 x a3 sqrt2 Z glue specification (params a1, a2, a3)",
    "nsm13-table": "integer coefficient table of the 13-dimensional phase-A NSM numerator",
    "congruence-certificates": "Gram matrices and unimodular congruence certificates (10- and 12-dim)",
    "B14-symmetries": "automorphism generators of the 14-dimensional lattice",
}
_ALIASES = {
    "AppendixA": "nsm13-table",
    "AppendixB": "congruence-certificates",
    "B13prime": "B13'",
    "Z1": "Z",
}


def names() -> list[str]:
    return sorted(set(_ENTRIES) | set(_ALIASES))


def describe(name: str) -> str:
    key = _ALIASES.get(name, name)
    return _ENTRIES[key]


def _resolve_opt(family: str):
    from . import exact_nsm

    if family == "B14":
        return exact_nsm.optimize_g14_cached()
    return exact_nsm.optimize_g13_cached()


def get(name: str, **params):
    """Look up a catalog entry.  ``a="opt"`` resolves to the certified optimum
    (rounded to float for the lattice generator)."""
    key = _ALIASES.get(name, name)
    if key not in _ENTRIES:
        raise CatalogError(f"unknown catalog entry {name!r}")
    if key == "Z":
        return integer_lattice(int(params.get("n", 1)))
    if key == "A2":
        return hexagonal()
    if key in ("D4", "D5"):
        return checkerboard(int(key[1]))
    if key == "K10p":
        return k10prime()
    if key in ("B14", "B14-glued"):
        a = params.get("a", 1)
        if isinstance(a, str) and a == "opt":
            a = float(_resolve_opt("B14")["a_opt"])
        extra = set(params) - {"a"}
        if extra:
            raise CatalogError(f"unknown parameters {sorted(extra)} for {key}")
        return b14(a) if key == "B14" else b14_glue(a)
    if key in ("B13", "B13-glued"):
        if params.get("a") == "opt":
            res = _resolve_opt("B13")
            a1, a2, a3 = 1.0, float(res["a2"]), float(res["a3"])
        else:
            extra = set(params) - {"a1", "a2", "a3"}
            if extra:
                raise CatalogError(f"unknown parameters {sorted(extra)} for {key}")
            a1, a2, a3 = (params.get(k, 1) for k in ("a1", "a2", "a3"))
        return b13(a1, a2, a3) if key == "B13" else b13_glue(a1, a2, a3)
    if key == "B13'":
        return b13_unit()
    if key == "nsm13-table":
        return nsm13_table()
    if key == "congruence-certificates":
        return congruence_data()
    if key == "B14-symmetries":
        return b14_symmetry_generators()
    raise CatalogError(name)  # pragma: no cover


def product_check_b13(a1=1, a2=1, a3=1) -> Lattice:
    """Unglued block product a1 A7' x a2 D5 x a3 sqrt2 Z built from the
    ambient product rows (used for determinant checks)."""
    return b13_glue(a1, a2, a3).product_lattice()


__all__ = [
    "CATALOG_VERSION",
    "CatalogError",
    "get",
    "names",
    "describe",
    "product_scaled",
]
