"""Closest points, ball enumeration, theta images, Voronoi-relevant vectors.

All searches run on an LLL-reduced copy of the basis; results are reported
as integer coordinate vectors in the *original* basis, sorted
lexicographically.  When the Gram matrix of the lattice is rational, ties and
shells are decided with exact integer arithmetic on a cleared-denominator
Gram matrix; otherwise a relative float tolerance is used and near-ties are
flagged.
"""

from __future__ import annotations

import hashlib
import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from ..exact import linalg as xl
from ..exact.quad import QuadElem
from ..lattice import Lattice, lll_reduce
from . import _kernels as K

TIE_TOL = 1e-9
DEGENERATE_TOL = 1e-6
BALL_CAP = 20_000_000
MAX_RELEVANT_DIM = 16


class EnumerationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Prepared:
    """Immutable per-lattice search data."""

    lattice: Lattice
    T: np.ndarray  # reduced = T @ original (rows)
    Tinv: np.ndarray
    Bred: np.ndarray
    chol: np.ndarray  # lower factor of the reduced Gram
    Binv: np.ndarray  # inverse of Bred, for ambient queries
    int_gram: tuple | None  # D * reduced Gram as Python ints, when rational
    gram_denom: int | None

    @property
    def n(self) -> int:
        return self.Bred.shape[0]

    @property
    def is_rational(self) -> bool:
        return self.int_gram is not None

    def exact_norm(self, x) -> int:
        """``D * x G x^T`` for an integer vector ``x`` in reduced coordinates."""
        G = self.int_gram
        n = len(x)
        s = 0
        for i in range(n):
            xi = int(x[i])
            if xi:
                row = G[i]
                s += xi * sum(row[j] * int(x[j]) for j in range(n) if x[j])
        return s

    def to_original(self, u_red) -> tuple:
        return tuple(int(v) for v in np.asarray(u_red, dtype=np.int64) @ self.T)


_CACHE: "weakref.WeakKeyDictionary[Lattice, Prepared]" = weakref.WeakKeyDictionary()


def prepare(L: Lattice) -> Prepared:
    """LLL-reduce ``L`` once and cache the search data alongside it."""
    hit = _CACHE.get(L)
    if hit is not None:
        return hit
    R = lll_reduce(L)
    T = np.array(R.transform, dtype=np.int64)
    Tinv = np.rint(np.linalg.inv(T)).astype(np.int64)
    if not np.array_equal(T @ Tinv, np.eye(L.n, dtype=np.int64)):
        raise ArithmeticError("reduction transform is not unimodular")
    Bred = np.array(R.float_basis, dtype=float)
    int_gram = denom = None
    if R.is_exact:
        G = tuple(tuple(xl.normalize(x) for x in row) for row in xl.matmul(R.basis, xl.transpose(R.basis)))
        if all(isinstance(x, Fraction) for row in G for x in row):
            denom = math.lcm(*(x.denominator for row in G for x in row))
            int_gram = tuple(tuple(int(x * denom) for x in row) for row in G)
            Gf = np.array([[v / denom for v in row] for row in int_gram])
        else:
            Gf = Bred @ Bred.T
    else:
        Gf = Bred @ Bred.T
    Gf = (Gf + Gf.T) / 2
    chol = np.linalg.cholesky(Gf)
    p = Prepared(L, T, Tinv, Bred, np.ascontiguousarray(chol), np.linalg.inv(Bred), int_gram, denom)
    _CACHE[L] = p
    return p


# -- closest points --------------------------------------------------------------


@dataclass(frozen=True)
class ClosestSet:
    distance2: float
    minimizers: tuple
    exact: bool = False
    degenerate: bool = False
    distance2_exact: Fraction | None = None
    error_bound: float = 0.0

    def __len__(self):
        return len(self.minimizers)


def _query_coords(P: Prepared, x, coords: bool):
    """Reduced-basis coordinates of the query: (float array, exact Fractions or None)."""
    L = P.lattice
    exact_t = None
    is_exact_query = all(isinstance(v, (int, Fraction, QuadElem)) for v in x)
    if is_exact_query:
        if coords:
            # original coordinates t_o, reduced t_r = t_o T^{-1}
            t_o = [Fraction(v) if not isinstance(v, QuadElem) else v for v in x]
            if all(isinstance(v, Fraction) for v in t_o):
                exact_t = tuple(sum((t_o[i] * int(P.Tinv[i, j]) for i in range(P.n)), Fraction(0)) for j in range(P.n))
        elif L.is_exact:
            Bred_exact = xl.matmul(tuple(tuple(Fraction(int(v)) for v in row) for row in P.T), L.basis)
            sol = xl.solve_left(Bred_exact, tuple(xl.normalize(v) for v in x))
            if all(isinstance(v, Fraction) for v in sol):
                exact_t = sol
    if exact_t is not None:
        return np.array([float(v) for v in exact_t]), exact_t
    xf = np.array([float(v) for v in x])
    if coords:
        return xf @ P.Tinv.astype(float), None
    return xf @ P.Binv, None


def _run_closest(P: Prepared, t: np.ndarray, cap: int = 512):
    while True:
        out_u = np.empty((cap, P.n))
        out_d = np.empty(cap)
        m = K._closest_all(P.chol, t, TIE_TOL, DEGENERATE_TOL, out_u, out_d)
        if m >= 0:
            return out_u[:m].copy(), out_d[:m].copy()
        cap *= 4
        if cap > BALL_CAP:
            raise EnumerationCapExceeded("too many near-tied closest points")


def _classify(P: Prepared, t_float, t_exact, cand_u, cand_d, tie_tol):
    if t_exact is not None and P.is_rational:
        q = math.lcm(*(v.denominator for v in t_exact))
        num = [int(v * q) for v in t_exact]
        ex = [P.exact_norm([num[i] - q * int(u[i]) for i in range(P.n)]) for u in cand_u]
        best = min(ex)
        keep = [u for u, e in zip(cand_u, ex) if e == best]
        d_exact = Fraction(best, q * q * P.gram_denom)
        return keep, float(d_exact), True, False, d_exact
    best = float(cand_d.min())
    scale = float(np.mean(np.diag(P.chol @ P.chol.T)))
    lim = best * (1 + tie_tol) + 1e-12 * scale * tie_tol
    keep = [u for u, d in zip(cand_u, cand_d) if d <= lim]
    degenerate = bool(np.any((cand_d > lim) & (cand_d <= best * (1 + DEGENERATE_TOL))))
    return keep, best, False, degenerate, None


def closest_points(L: Lattice, x: Sequence, tie_tol: float = TIE_TOL, *, coords: bool = False) -> ClosestSet:
    """All lattice points closest to ``x``.

    ``x`` is an ambient vector, or a coordinate vector ``t`` with ``x = t B``
    when ``coords=True``.  Exact ties are decided exactly for rational Gram
    matrices and rational coordinates.
    """
    P = prepare(L)
    if len(x) != L.n:
        raise ValueError(f"query has dimension {len(x)}, lattice has {L.n}")
    t, t_exact = _query_coords(P, x, coords)
    cand_u, cand_d = _run_closest(P, np.ascontiguousarray(t))
    keep, best, exact, degenerate, d_exact = _classify(P, t, t_exact, cand_u, cand_d, tie_tol)
    mins = tuple(sorted(P.to_original(u) for u in keep))
    err = 0.0 if exact else 1e-13 * max(best, 1e-300) * L.n
    return ClosestSet(best, mins, exact, degenerate, d_exact, err)


# -- ball enumeration and theta images ----------------------------------------------


def _ball_raw(P: Prepared, r2: float):
    if r2 <= 0:
        return np.empty((0, P.n)), np.empty(0)
    vol_ball = math.pi ** (P.n / 2) * r2 ** (P.n / 2) / math.gamma(P.n / 2 + 1)
    vol = abs(np.linalg.det(P.chol))
    cap = int(min(BALL_CAP, max(1024, 4 * vol_ball / vol + 4 * 2**P.n)))
    while True:
        out_u = np.empty((cap, P.n))
        out_d = np.empty(cap)
        m = K._ball(P.chol, r2, out_u, out_d)
        if m >= 0:
            return out_u[:m].copy(), out_d[:m].copy()
        if cap >= BALL_CAP:
            raise EnumerationCapExceeded(f"more than {BALL_CAP} points in the ball of radius^2 {r2}")
        cap = min(BALL_CAP, cap * 4)


def enumerate_ball(L: Lattice, r2: float, tol: float = TIE_TOL) -> Iterator[tuple[tuple, float]]:
    """Nonzero points with ``norm^2 <= r2 (1 + tol)``, both signs, ordered by
    norm and then lexicographically by original coordinates."""
    P = prepare(L)
    U, D = _ball_raw(P, r2 * (1 + tol))
    rows = sorted((float(d), P.to_original(u)) for u, d in zip(U, D))
    for d, u in rows:
        yield u, d


@dataclass(frozen=True)
class ThetaImage:
    steps: tuple  # ((r2, cumulative count), ...)

    def count_at(self, r2: float) -> int:
        n = 1
        for s, c in self.steps:
            if s <= r2:
                n = c
            else:
                break
        return n

    def to_csv(self) -> str:
        lines = ["r2,count"] + [f"{r!r},{c}" for r, c in self.steps]
        return "\n".join(lines) + "\n"


def _shells(P: Prepared, U, D, shell_tol: float):
    """Group points into shells: list of (norm2, multiplicity)."""
    if P.is_rational:
        ex = sorted(P.exact_norm(u) for u in U)
        out = []
        for e in ex:
            if out and out[-1][0] == e:
                out[-1][1] += 1
            else:
                out.append([e, 1])
        return [(e / P.gram_denom, m) for e, m in out]
    ds = np.sort(D)
    out = []
    for d in ds:
        if out and d <= out[-1][2] * (1 + shell_tol):
            out[-1][1] += 1
        else:
            out.append([float(d), 1, float(d)])
    return [(s, m) for s, m, _ in out]


def theta_image(L: Lattice, r2_max: float, shell_tol: float = TIE_TOL, det1: bool = False) -> ThetaImage:
    """Cumulative point counts ``N(r)`` at each shell up to ``r2_max``.

    With ``det1`` the radii refer to the lattice rescaled to unit volume
    (counts are computed on ``L`` itself, so exact shell grouping survives).
    """
    P = prepare(L)
    scale = L.volume ** (2.0 / L.n) if det1 else 1.0
    U, D = _ball_raw(P, r2_max * scale * (1 + shell_tol))
    steps = []
    total = 1
    for norm, mult in _shells(P, U, D, shell_tol):
        total += mult
        steps.append((norm / scale, total))
    return ThetaImage(tuple(steps))


class ShortestVectors(NamedTuple):
    min_norm2: float
    kissing: int


def minimal_vectors(L: Lattice, tol: float = TIE_TOL) -> tuple[float, list[tuple]]:
    """Minimal squared norm and all minimal vectors (original coordinates)."""
    P = prepare(L)
    bound = float(np.min(np.sum(P.Bred**2, axis=1)))
    U, D = _ball_raw(P, bound * (1 + 1e-7))
    if P.is_rational:
        ex = [P.exact_norm(u) for u in U]
        m = min(ex)
        vecs = [u for u, e in zip(U, ex) if e == m]
        mn = m / P.gram_denom
    else:
        mn = float(D.min())
        vecs = [u for u, d in zip(U, D) if d <= mn * (1 + tol)]
    return mn, sorted(P.to_original(u) for u in vecs)


def shortest_vectors(L: Lattice, tol: float = TIE_TOL) -> ShortestVectors:
    mn, vecs = minimal_vectors(L, tol)
    return ShortestVectors(mn, len(vecs))


# -- Voronoi-relevant vectors ---------------------------------------------------------


@dataclass(frozen=True)
class RelevantVectorSet:
    vectors: tuple  # original-basis coordinates, sorted
    flagged: tuple = ()  # reduced-basis cosets whose classification was ambiguous
    exact: bool = False

    def __len__(self):
        return len(self.vectors)

    def pairs(self) -> list[tuple[tuple, tuple]]:
        s = set(self.vectors)
        out = []
        for v in self.vectors:
            neg = tuple(-x for x in v)
            if v > neg and neg in s:
                out.append((v, neg))
        return out

    def digest(self) -> str:
        h = hashlib.sha256()
        for v in self.vectors:
            h.update((",".join(map(str, v)) + ";").encode())
        return h.hexdigest()


def _coset_vector(c: int, n: int) -> np.ndarray:
    return np.array([(c >> i) & 1 for i in range(n)], dtype=float)


def _relevant_chunk(P: Prepared, cosets, tie_tol):
    n = P.n
    found, flagged = [], []
    for c in cosets:
        cv = _coset_vector(c, n)
        t = cv / 2
        cand_u, cand_d = _run_closest(P, t, cap=64)
        if P.is_rational:
            t_exact = tuple(Fraction(int(v), 2) for v in cv)
            keep, _, _, degenerate, _ = _classify(P, t, t_exact, cand_u, cand_d, tie_tol)
        else:
            keep, _, _, degenerate, _ = _classify(P, t, None, cand_u, cand_d, tie_tol)
        if degenerate:
            flagged.append(tuple(int(v) for v in cv))
        if len(keep) == 2:
            v = cv - 2 * keep[0]
            found.append(v)
            found.append(-v)
    return found, flagged


def relevant_vectors(L: Lattice, workers: int = 1, tie_tol: float = TIE_TOL) -> RelevantVectorSet:
    """Facet normals of the Voronoi cell.

    Each of the ``2^n - 1`` nonzero classes of ``L / 2L`` is represented by
    ``c B / 2``; a class whose midpoint has exactly two closest lattice
    points ``x0, x1`` contributes the pair ``+-(c B - 2 x0)``.
    """
    n = L.n
    if n > MAX_RELEVANT_DIM:
        raise ValueError(f"relevant-vector search limited to n <= {MAX_RELEVANT_DIM}")
    P = prepare(L)
    cosets = list(range(1, 2**n))
    chunks = [cosets[i :: max(1, workers)] for i in range(max(1, workers))]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda ch: _relevant_chunk(P, ch, tie_tol), chunks))
    else:
        parts = [_relevant_chunk(P, cosets, tie_tol)]
    vecs = {P.to_original(v) for f, _ in parts for v in f}
    flagged = sorted(c for _, fl in parts for c in fl)
    return RelevantVectorSet(tuple(sorted(vecs)), tuple(flagged), P.is_rational)


def facet_certificate(L: Lattice, v: Sequence[int]) -> bool:
    """True iff the closest lattice points to ``v B / 2`` are exactly ``0`` and ``v``."""
    half = [Fraction(int(x), 2) for x in v]
    cs = closest_points(L, half, coords=True)
    return set(cs.minimizers) == {tuple(0 for _ in v), tuple(int(x) for x in v)}


# -- phase condition (i) ---------------------------------------------------------------


@dataclass
class PhaseReport:
    stable: bool
    points: list
    digests: list
    counts: list
    flagged: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "points": [str(p) for p in self.points],
            "digests": self.digests,
            "facets": self.counts,
            "flagged": self.flagged,
        }


def phase_condition_i(family: str, param_points: Sequence, workers: int = 1) -> PhaseReport:
    """Compare the integer relevant-vector sets of a family at several
    parameter points (in the family's own generator coordinates)."""
    from .. import catalog

    if not param_points:
        raise ValueError("need at least one parameter point")
    digests, counts, flagged, sets = [], [], [], []
    for p in param_points:
        params = p if isinstance(p, dict) else {"a": p}
        L = catalog.get(family, **params)
        rv = relevant_vectors(L, workers=workers)
        sets.append(frozenset(rv.vectors))
        digests.append(rv.digest())
        counts.append(len(rv))
        flagged.append(len(rv.flagged))
    stable = all(s == sets[0] for s in sets)
    return PhaseReport(stable, list(param_points), digests, counts, flagged)


def default_phase_points(lo: float, hi: float, count: int = 20, margin: float = 1e-3) -> list[float]:
    """Uniform interior grid plus two points just inside each endpoint."""
    inner = np.linspace(lo, hi, count + 2)[1:-1].tolist()
    w = hi - lo
    return [lo + margin * w] + inner + [hi - margin * w]


# -- automorphisms -------------------------------------------------------------------------


def verify_automorphism(L: Lattice, M) -> bool:
    """True iff ``M`` is orthogonal and maps the lattice onto itself."""
    if L.is_exact:
        Mx = xl.to_matrix(M)
        d = xl.field_of(Mx)
        if d != 1 and L.field not in (1, d):
            raise ValueError(f"matrix lives in Q(sqrt {d}), lattice in Q(sqrt {L.field})")
        if d != 1 and L.field == 1:
            raise ValueError(f"matrix lives in Q(sqrt {d}), lattice is rational")
        n = L.n
        if xl.shape(Mx) != (n, n):
            raise ValueError("matrix dimension mismatch")
        if xl.matmul(Mx, xl.transpose(Mx)) != xl.identity(n):
            return False
        C = xl.matmul(xl.matmul(L.basis, Mx), xl.inverse(L.basis))
        return xl.is_integer_matrix(C)
    Mf = np.array(M, dtype=float)
    if not np.allclose(Mf @ Mf.T, np.eye(L.n), atol=1e-10):
        return False
    C = L.float_basis @ Mf @ np.linalg.inv(L.float_basis)
    return bool(np.allclose(C, np.rint(C), atol=1e-8))
