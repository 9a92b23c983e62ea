"""Compiled Schnorr-Euchner search kernels.

Everything here works in the coordinates of an LLL-reduced basis.  A lattice
is handed in as the lower-triangular Cholesky factor ``L`` of its reduced
Gram matrix, so ``||(t - u) B||^2 = ||(t - u) L||^2`` for coordinate vectors
``t`` (real) and ``u`` (integer).  Levels are visited from ``n - 1`` down to
``0``; ``sig[k, j]`` caches ``sum_{i > k} (t_i - u_i) L[i, j]``.
"""

import numpy as np
from numba import njit

_INF = np.inf


@njit(cache=True, nogil=True)
def _nearest(L, t, u_out):
    """Single closest point; returns squared distance, writes ``u_out``."""
    n = L.shape[0]
    sig = np.zeros((n + 1, n))
    c = np.empty(n)
    u = np.empty(n)
    step = np.empty(n)
    d = np.zeros(n + 1)
    best = _INF

    k = n - 1
    c[k] = t[k]
    u[k] = np.round(c[k])
    y = c[k] - u[k]
    step[k] = 1.0 if y >= 0 else -1.0
    d[k] = y * y * L[k, k] * L[k, k]
    while True:
        if d[k] < best:
            if k == 0:
                best = d[0]
                for i in range(n):
                    u_out[i] = u[i]
                # next sibling at level 0
                u[0] += step[0]
                step[0] = -step[0] - (1.0 if step[0] > 0 else -1.0)
                y = c[0] - u[0]
                d[0] = d[1] + y * y * L[0, 0] * L[0, 0]
            else:
                r = t[k] - u[k]
                for j in range(k):
                    sig[k - 1, j] = sig[k, j] + r * L[k, j]
                k -= 1
                c[k] = t[k] + sig[k, k] / L[k, k]
                u[k] = np.round(c[k])
                y = c[k] - u[k]
                step[k] = 1.0 if y >= 0 else -1.0
                d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
        else:
            if k == n - 1:
                break
            k += 1
            u[k] += step[k]
            step[k] = -step[k] - (1.0 if step[k] > 0 else -1.0)
            y = c[k] - u[k]
            d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
    return best


@njit(cache=True, nogil=True)
def _closest_all(L, t, rtol, slack, out_u, out_d):
    """All points within ``(1 + slack) * best`` of the minimum.

    Returns the number of candidates written (``-1`` on buffer overflow).
    ``rtol`` is only used to size the search radius conservatively; the
    caller classifies ties.
    """
    n = L.shape[0]
    cap = out_u.shape[0]
    sig = np.zeros((n + 1, n))
    c = np.empty(n)
    u = np.empty(n)
    step = np.empty(n)
    d = np.zeros(n + 1)
    best = _INF
    bound = _INF
    count = 0
    overflow = False

    k = n - 1
    c[k] = t[k]
    u[k] = np.round(c[k])
    y = c[k] - u[k]
    step[k] = 1.0 if y >= 0 else -1.0
    d[k] = y * y * L[k, k] * L[k, k]
    while True:
        if d[k] <= bound:
            if k == 0:
                dist = d[0]
                if dist < best:
                    best = dist
                    bound = best * (1.0 + slack) + 1e-300
                    # drop stale candidates
                    m = 0
                    for q in range(count):
                        if out_d[q] <= bound:
                            out_d[m] = out_d[q]
                            for i in range(n):
                                out_u[m, i] = out_u[q, i]
                            m += 1
                    count = m
                if count < cap:
                    out_d[count] = dist
                    for i in range(n):
                        out_u[count, i] = u[i]
                    count += 1
                else:
                    overflow = True
                u[0] += step[0]
                step[0] = -step[0] - (1.0 if step[0] > 0 else -1.0)
                y = c[0] - u[0]
                d[0] = d[1] + y * y * L[0, 0] * L[0, 0]
            else:
                r = t[k] - u[k]
                for j in range(k):
                    sig[k - 1, j] = sig[k, j] + r * L[k, j]
                k -= 1
                c[k] = t[k] + sig[k, k] / L[k, k]
                u[k] = np.round(c[k])
                y = c[k] - u[k]
                step[k] = 1.0 if y >= 0 else -1.0
                d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
        else:
            if k == n - 1:
                break
            k += 1
            u[k] += step[k]
            step[k] = -step[k] - (1.0 if step[k] > 0 else -1.0)
            y = c[k] - u[k]
            d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
    if overflow:
        return -1
    return count


@njit(cache=True, nogil=True)
def _ball(L, radius2, out_u, out_d):
    """All nonzero ``u`` with ``||u L||^2 <= radius2``; ``-1`` on overflow."""
    n = L.shape[0]
    cap = out_u.shape[0]
    sig = np.zeros((n + 1, n))
    c = np.zeros(n)
    u = np.zeros(n)
    step = np.empty(n)
    d = np.zeros(n + 1)
    count = 0

    k = n - 1
    c[k] = 0.0
    u[k] = 0.0
    step[k] = 1.0
    d[k] = 0.0
    while True:
        if d[k] <= radius2:
            if k == 0:
                nonzero = False
                for i in range(n):
                    if u[i] != 0.0:
                        nonzero = True
                        break
                if nonzero:
                    if count >= cap:
                        return -1
                    out_d[count] = d[0]
                    for i in range(n):
                        out_u[count, i] = u[i]
                    count += 1
                u[0] += step[0]
                step[0] = -step[0] - (1.0 if step[0] > 0 else -1.0)
                y = c[0] - u[0]
                d[0] = d[1] + y * y * L[0, 0] * L[0, 0]
            else:
                r = -u[k]
                for j in range(k):
                    sig[k - 1, j] = sig[k, j] + r * L[k, j]
                k -= 1
                c[k] = sig[k, k] / L[k, k]
                u[k] = np.round(c[k])
                y = c[k] - u[k]
                step[k] = 1.0 if y >= 0 else -1.0
                d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
        else:
            if k == n - 1:
                break
            k += 1
            u[k] += step[k]
            step[k] = -step[k] - (1.0 if step[k] > 0 else -1.0)
            y = c[k] - u[k]
            d[k] = d[k + 1] + y * y * L[k, k] * L[k, k]
    return count


@njit(cache=True, nogil=True)
def _quantize_batch(L, Bred, Tinv, W, acc_u, norms_out):
    """Quantize points ``w B`` for rows ``w`` of ``W``.

    ``Tinv`` maps original-basis coordinates to reduced-basis coordinates.
    Accumulates into ``acc_u`` (n x n sum of e^T e and n x n sum of
    (e_i e_j)^2, stacked as ``acc_u[0]``, ``acc_u[1]``) and writes each
    squared error norm into ``norms_out``.  Returns the max error norm.
    """
    m, n = W.shape
    t = np.empty(n)
    u = np.empty(n)
    e = np.empty(n)
    worst = 0.0
    for s in range(m):
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += W[s, i] * Tinv[i, j]
            t[j] = acc
        _nearest(L, t, u)
        for j in range(n):
            acc = 0.0
            for i in range(n):
                acc += (t[i] - u[i]) * Bred[i, j]
            e[j] = acc
        nrm = 0.0
        for i in range(n):
            nrm += e[i] * e[i]
            for j in range(n):
                p = e[i] * e[j]
                acc_u[0, i, j] += p
                acc_u[1, i, j] += p * p
        norms_out[s] = nrm
        if nrm > worst:
            worst = nrm
    return worst
