"""Equivalence certificates for Gram matrices, and cheap invariants that can
prove two lattices different.

Two lattices with Gram matrices ``A`` and ``A'`` are equivalent when
``A' = c U A U^T`` for a positive scalar ``c`` and an integer matrix ``U``
with determinant +-1.  Certificates are checked exactly; nothing is searched.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import catalog
from .enumeration import shortest_vectors, theta_image
from .exact import linalg as xl
from .lattice import Lattice, gram


@dataclass(frozen=True)
class CongruenceCertificate:
    A: tuple
    A_prime: tuple
    U: tuple
    c: Fraction = Fraction(1)
    label: str = ""

    def inverted(self) -> CongruenceCertificate:
        """``(A', A, U^-1, 1/c)``; valid whenever this certificate is."""
        return CongruenceCertificate(self.A_prime, self.A, xl.inverse(self.U), 1 / Fraction(self.c), f"{self.label}^-1")


def _is_unimodular(U) -> bool:
    return xl.is_integer_matrix(U) and abs(xl.det(U)) == 1


def verify_congruence(cert: CongruenceCertificate) -> bool:
    A, Ap, U = (xl.to_matrix(m) for m in (cert.A, cert.A_prime, cert.U))
    n = len(A)
    if xl.shape(A) != (n, n) or xl.shape(Ap) != (n, n) or xl.shape(U) != (n, n):
        raise ValueError("certificate matrices must be square and of equal size")
    if not cert.c > 0 or not _is_unimodular(U):
        return False
    rhs = xl.scale(cert.c, xl.matmul(xl.matmul(U, A), xl.transpose(U)))
    return rhs == Ap


def shipped_certificates() -> list[CongruenceCertificate]:
    """The 10-dimensional congruences to the K'10 Gram matrix and the
    12-dimensional mutual congruence, as single certificates."""
    d = catalog.congruence_data()
    g10 = gram(catalog.k10prime())
    g4 = xl.matmul(d["B4"], xl.transpose(d["B4"]))
    g5 = xl.matmul(d["B5"], xl.transpose(d["B5"]))
    return [
        CongruenceCertificate(d["A1"], g10, d["U1"], Fraction(1), "K10' = U1 A1 U1^T"),
        CongruenceCertificate(d["A2"], g10, d["U2"], Fraction(1), "K10' = U2 A2 U2^T"),
        # U4 G4 U4^T = U5 G5 U5^T  <=>  G4 = (U4^-1 U5) G5 (U4^-1 U5)^T
        CongruenceCertificate(g5, g4, xl.matmul(xl.inverse(d["U4"]), d["U5"]), Fraction(1), "B4 ~ B5 via U4^-1 U5"),
    ]


def _mutual_12() -> tuple[bool, tuple]:
    d = catalog.congruence_data()
    half = Fraction(1, 2)

    def side(U, B):
        return xl.scale(half, xl.matmul(xl.matmul(U, xl.matmul(B, xl.transpose(B))), xl.transpose(U)))

    left, right = side(d["U4"], d["B4"]), side(d["U5"], d["B5"])
    return left == right, left


def appendix_checks() -> dict:
    """Run every shipped certificate; each entry maps a label to pass/fail."""
    d = catalog.congruence_data()
    out = {}
    for name in ("U1", "U2", "U4", "U5"):
        out[f"det {name} = +-1"] = _is_unimodular(d[name])
    for cert in shipped_certificates():
        out[cert.label] = verify_congruence(cert)
    ok, _ = _mutual_12()
    out["1/2 U4 G4 U4^T = 1/2 U5 G5 U5^T"] = ok
    return out


def mutation_survivors(deltas=(1, -1)) -> list[str]:
    """Single-entry mutations ``U[i,j] += delta`` of the shipped unimodular
    matrices under which the certificate still verifies.

    A mutation can survive legitimately: if row ``i`` of ``U`` plus ``delta e_j``
    differs from row ``i`` by a reflection of the lattice, the mutated
    matrix is another valid certificate.
    """
    d = catalog.congruence_data()
    g10 = gram(catalog.k10prime())
    ok_left, target = _mutual_12()
    if not ok_left:
        return ["unmutated 12-dim check already fails"]
    half = Fraction(1, 2)
    survivors = []

    def mutated(U):
        M = [list(r) for r in U]
        for i in range(len(M)):
            for j in range(len(M)):
                for delta in deltas:
                    M[i][j] += delta
                    yield (i, j, delta), xl.to_matrix(M)
                    M[i][j] -= delta

    for A, name in ((d["A1"], "U1"), (d["A2"], "U2")):
        for (i, j, dl), U in mutated(d[name]):
            if verify_congruence(CongruenceCertificate(A, g10, U)):
                survivors.append(f"{name}[{i},{j}]{dl:+d}")
    for B, name in ((d["B4"], "U4"), (d["B5"], "U5")):
        G = xl.matmul(B, xl.transpose(B))
        for (i, j, dl), U in mutated(d[name]):
            if _is_unimodular(U) and xl.scale(half, xl.matmul(xl.matmul(U, G), xl.transpose(U))) == target:
                survivors.append(f"{name}[{i},{j}]{dl:+d}")
    return survivors


# -- fingerprints -----------------------------------------------------------------------


@dataclass(frozen=True)
class Fingerprint:
    n: int
    min_norm2: float
    kissing: int
    theta: tuple  # ((r2, cumulative count), ...) at unit volume

    def matches(self, other: Fingerprint, rtol: float = 1e-8) -> bool:
        if (self.n, self.kissing, len(self.theta)) != (other.n, other.kissing, len(other.theta)):
            return False
        if not np.isclose(self.min_norm2, other.min_norm2, rtol=rtol, atol=0):
            return False
        return all(c1 == c2 and np.isclose(r1, r2, rtol=rtol, atol=0) for (r1, c1), (r2, c2) in zip(self.theta, other.theta))


def lattice_fingerprint(L: Lattice, shells: int = 5) -> Fingerprint:
    """Scale-free invariants: minimal norm, kissing number and the first
    ``shells`` theta steps, all at unit volume."""
    mn, tau = shortest_vectors(L)
    scale = L.volume ** (2.0 / L.n)
    r2 = 2.0 * mn / scale
    while True:
        th = theta_image(L, r2, det1=True)
        if len(th.steps) >= shells:
            break
        r2 *= 1.5
    return Fingerprint(L.n, mn / scale, tau, th.steps[:shells])
