"""Integer basis reduction: floating-point LLL and exact Hermite normal form."""

from __future__ import annotations

import numpy as np

LLL_DELTA = 0.99


def _gso(B: np.ndarray):
    n = B.shape[0]
    Bs = np.zeros_like(B)
    mu = np.eye(n)
    norms = np.zeros(n)
    for i in range(n):
        v = B[i].copy()
        for j in range(i):
            mu[i, j] = B[i] @ Bs[j] / norms[j]
            v -= mu[i, j] * Bs[j]
        Bs[i] = v
        norms[i] = v @ v
    return mu, norms


def lll(B, delta: float = LLL_DELTA, deep: bool = True) -> np.ndarray:
    """Integer unimodular ``T`` such that the rows of ``T @ B`` are LLL-reduced.

    Works on a float copy of ``B`` (rows are basis vectors).  The returned
    transform is exact; callers apply it to exact bases themselves.  With
    ``deep`` the Lovasz test is applied against every earlier position
    (deep insertion), which usually lands the shortest vector in row 0.
    """
    B0 = np.array(B, dtype=float)
    n = B0.shape[0]
    # shortest rows first, so size reduction does not lengthen them before they are tested
    T = np.eye(n, dtype=np.int64)[np.argsort(np.einsum("ij,ij->i", B0, B0), kind="stable")]
    Bc = T.astype(float) @ B0
    mu, norms = _gso(Bc)
    k = 1
    guard = 0
    while k < n:
        for j in range(k - 1, -1, -1):
            q = int(np.rint(mu[k, j]))
            if q:
                Bc[k] -= q * Bc[j]
                T[k] -= q * T[j]
                mu[k, : j + 1] -= q * mu[j, : j + 1]
        target = k
        if deep:
            c = Bc[k] @ Bc[k]
            for i in range(k):
                if c < delta * norms[i]:
                    target = i
                    break
                c -= mu[k, i] ** 2 * norms[i]
        elif norms[k] < (delta - mu[k, k - 1] ** 2) * norms[k - 1]:
            target = k - 1
        if target == k:
            k += 1
        else:
            order = list(range(target)) + [k] + list(range(target, k)) + list(range(k + 1, n))
            T = T[order]
            # refresh from the exact transform to stop float drift
            Bc = T.astype(float) @ B0
            mu, norms = _gso(Bc)
            k = max(target, 1)
        guard += 1
        if guard > 100000:
            raise RuntimeError("LLL did not terminate")
        if np.abs(T).max() > 2**40:
            raise OverflowError("LLL transform entries too large")
    return T


def is_lll_reduced(B, delta: float = LLL_DELTA, tol: float = 1e-9) -> bool:
    mu, norms = _gso(np.array(B, dtype=float))
    n = len(norms)
    for i in range(n):
        for j in range(i):
            if abs(mu[i, j]) > 0.5 + tol:
                return False
    return all(norms[k] >= (delta - mu[k, k - 1] ** 2) * norms[k - 1] * (1 - tol) for k in range(1, n))


def hermite_normal_form(M) -> list[list[int]]:
    """Row-style HNF of an integer matrix with full column rank.

    Returns the ``n x n`` upper-triangular basis (positive diagonal, entries
    above each pivot reduced into ``[0, pivot)``) of the row module of ``M``.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if A else 0
    r = 0
    for j in range(n):
        while True:
            nz = [i for i in range(r, m) if A[i][j] != 0]
            if not nz:
                raise ValueError("matrix does not have full column rank")
            piv = min(nz, key=lambda i: abs(A[i][j]))
            A[r], A[piv] = A[piv], A[r]
            clean = True
            p = A[r][j]
            for i in range(r + 1, m):
                if A[i][j]:
                    q = A[i][j] // p
                    if q:
                        A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][j]:
                        clean = False
            if clean:
                break
        if A[r][j] < 0:
            A[r] = [-x for x in A[r]]
        p = A[r][j]
        for i in range(r):
            q = A[i][j] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
        r += 1
    return A[:n]
