"""Deterministic refinement of a generator by its second-moment matrix.

One step maps ``B`` to ``B A_eps`` with ``A_eps = I - eps * Ubar`` (or
``exp(-eps * Ubar)``), where ``Ubar`` is the traceless part of the
normalized second-moment matrix.  The step size comes from the closed-form
rules when the estimated matrix has the 13-dimensional block structure, and
from a common-random-numbers line search otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from . import exact_nsm
from .exact import linalg as xl
from .lattice import Lattice
from .moments import (
    MomentReport,
    b13_groups,
    estimate_nsm,
    estimate_second_moment_matrix,
    paired_nsm_difference,
    zamir_feder_diagnostic,
)

# -- matrices ---------------------------------------------------------------------


def traceless(U):
    """``U - (tr U / n) I``; exact for exact (tuple) input."""
    if isinstance(U, np.ndarray):
        n = U.shape[0]
        return U - np.trace(U) / n * np.eye(n)
    M = xl.to_matrix(U)
    n = len(M)
    t = sum((M[i][i] for i in range(n)), Fraction(0)) / n
    return tuple(tuple(M[i][j] - (t if i == j else 0) for j in range(n)) for i in range(n))


def perturbation(Ubar, eps: float, variant: str = "linear") -> np.ndarray:
    """``I - eps Ubar`` or ``exp(-eps Ubar)`` (volume preserving for traceless Ubar)."""
    Ub = np.asarray(xl.to_float(Ubar) if not isinstance(Ubar, np.ndarray) else Ubar, dtype=float)
    n = Ub.shape[0]
    if variant == "linear":
        return np.eye(n) - eps * Ub
    if variant == "exponential":
        return expm(-eps * Ub)
    raise ValueError(f"unknown perturbation variant {variant!r}")


def structured_U13(alpha, beta, gamma):
    """13 x 13 matrix ``[[W8, 0], [0, alpha I5]]`` with ``W8`` holding ``beta``
    on the diagonal and ``gamma`` elsewhere (exact when the inputs are)."""
    rows = []
    for i in range(13):
        row = []
        for j in range(13):
            if i < 8 and j < 8:
                row.append(beta if i == j else gamma)
            elif i >= 8 and i == j:
                row.append(alpha)
            else:
                row.append(0)
        rows.append(row)
    if any(isinstance(x, float) for x in (alpha, beta, gamma)):
        return np.array(rows, dtype=float)
    return xl.to_matrix(rows)


def structured_U14(alpha, beta):
    d = [alpha] * 10 + [beta] * 4
    if any(isinstance(x, float) for x in (alpha, beta)):
        return np.diag(np.array(d, dtype=float))
    return xl.to_matrix([[d[i] if i == j else 0 for j in range(14)] for i in range(14)])


def scales_from_b13_generator(B: np.ndarray) -> tuple[float, float, float, float]:
    """Read ``(a1, a2, a3)`` off a matrix of the three-scale 13-dimensional form
    and return them with the max deviation from that form."""
    from .catalog import b13

    B = np.asarray(B, dtype=float)
    a1 = -B[0, 0]
    a2 = B[7, 8] / 2
    b = B[12, 0]
    a3 = 16 * b - 10 * a1
    dev = float(np.max(np.abs(b13(float(a1), float(a2), float(a3)).float_basis - B)))
    return float(a1), float(a2), float(a3), dev


# -- pooled 13-dim estimates -------------------------------------------------------------


def pooled_abg13(report: MomentReport) -> dict:
    """Pooled ``alpha, beta, gamma`` (normalized) with their batch-means
    covariance, for delta-method propagation."""
    groups = b13_groups()
    sizes = report.batch_sizes.astype(float)
    BU = report.batch_U / report.norm_factor
    cols = []
    for name in ("alpha", "beta", "gamma"):
        idx = groups[name]
        ii = np.array([i for i, _ in idx])
        jj = np.array([j for _, j in idx])
        cols.append(BU[:, ii, jj].mean(axis=1))
    X = np.stack(cols, axis=1)
    w = sizes / sizes.sum()
    mean = w @ X
    D = X - mean
    k = len(sizes)
    cov = (D.T * sizes) @ D / ((k - 1) * sizes.sum())
    return {"alpha": float(mean[0]), "beta": float(mean[1]), "gamma": float(mean[2]), "cov": cov}


def delta_method(fn, x: np.ndarray, cov: np.ndarray, h: float = 1e-7) -> tuple[np.ndarray, np.ndarray]:
    """Value and covariance of ``fn(x)`` by a central-difference Jacobian."""
    x = np.asarray(x, dtype=float)
    y0 = np.asarray(fn(x), dtype=float)
    J = np.zeros((len(y0), len(x)))
    for k in range(len(x)):
        step = h * max(1.0, abs(x[k]))
        e = np.zeros_like(x)
        e[k] = step
        J[:, k] = (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * step)
    return y0, J @ cov @ J.T


def one_step_scales(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Scales reached from the unit-scale 13-dimensional lattice by one step with
    ``eps = eps1(alpha, beta, gamma)``."""
    eps = exact_nsm.epsilon_steps(alpha, beta, gamma).eps1
    return np.array(exact_nsm.perturbed_scales(alpha, beta, gamma, eps), dtype=float)


# -- descent loop -------------------------------------------------------------------------


@dataclass
class DescentConfig:
    samples: int = 1_000_000
    seed: int = 0
    eps_rule: str = "auto"  # auto | closed-form | line-search
    max_steps: int = 5
    variant: str = "linear"
    workers: int = 1
    threshold: float = 4.0


@dataclass
class DescentState:
    lattice: Lattice
    step_index: int = 0
    last_report: MomentReport | None = None
    history: list = field(default_factory=list)
    verdict: str = ""


def _has_b13_structure(L: Lattice) -> bool:
    return L.n == 13 and L.family == "B13"


def _line_search(L: Lattice, Ubar: np.ndarray, G: float, cfg: DescentConfig) -> tuple[float, dict]:
    """Three-point parabolic fit of the paired NSM change along ``eps``."""
    e0 = 1.0 / (2.0 * G)
    eps_pts = [0.0, e0 / 2, e0]
    base = estimate_nsm(L, cfg.samples, cfg.seed, cfg.workers, keep_norms=True)
    gains = [0.0]
    ses = [0.0]
    for e in eps_pts[1:]:
        Lp = Lattice(L.float_basis @ perturbation(Ubar, e, cfg.variant), None, L.name, L.family, L.params)
        d = paired_nsm_difference(L, Lp, cfg.samples, cfg.seed, cfg.workers)
        gains.append(d["difference"])
        ses.append(d["stderr"])
    # parabola through (eps, -gain): minimize G(eps) = G0 - gain(eps)
    A = np.vander(np.array(eps_pts), 3)
    c = np.linalg.solve(A, -np.array(gains))
    if c[0] > 0:
        eps = float(np.clip(-c[1] / (2 * c[0]), 0.0, 2 * e0))
    else:
        eps = eps_pts[int(np.argmax(gains))]
    info = {"eps_points": eps_pts, "gains": gains, "gain_stderr": ses, "G0": base.G_hat}
    return eps, info


def descend(L0: Lattice, config: DescentConfig | None = None, on_step=None) -> DescentState:
    """Iterate ``B <- B A_eps`` until the second-moment matrix is isotropic
    within noise or the step budget is spent.  ``on_step`` receives one dict
    per step (used for JSONL output)."""
    cfg = config or DescentConfig()
    if cfg.max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    L = L0 if L0.field is None else L0.as_float()
    state = DescentState(L)
    for step in range(cfg.max_steps):
        rep = estimate_second_moment_matrix(L, cfg.samples, cfg.seed + step, cfg.workers)
        structured = _has_b13_structure(L) and cfg.eps_rule in ("auto", "closed-form")
        diag = zamir_feder_diagnostic(rep, cfg.threshold, groups=b13_groups() if structured else None)
        rec = {"step": step, "G_hat": rep.G_hat, "G_stderr": rep.G_stderr, "max_abs_z": diag["max_abs_z"]}
        state.last_report = rep
        state.step_index = step
        if diag["max_abs_z"] < cfg.threshold:
            state.verdict = "consistent with local optimality"
            rec["verdict"] = state.verdict
            state.history.append(rec)
            if on_step:
                on_step(rec)
            return state
        if structured:
            p = pooled_abg13(rep)
            Ubar = traceless(structured_U13(p["alpha"], p["beta"], p["gamma"]))
            eps = exact_nsm.epsilon_steps(p["alpha"], p["beta"], p["gamma"]).eps1
            rec["rule"] = "closed-form"
        elif cfg.eps_rule == "closed-form":
            raise ValueError("closed-form step size needs the 13-dimensional block structure")
        else:
            Ubar = traceless(rep.U_normalized)
            eps, info = _line_search(L, Ubar, rep.G_hat, cfg)
            rec["rule"] = "line-search"
            rec["line_search"] = info
            gain_se = max(info["gain_stderr"][1:])
            if eps == 0.0 or max(info["gains"]) < 3 * gain_se:
                state.verdict = "converged at statistical resolution"
                rec["verdict"] = state.verdict
                state.history.append(rec)
                if on_step:
                    on_step(rec)
                return state
        A = perturbation(Ubar, eps, cfg.variant)
        rec["eps"] = float(eps)
        rec["max_eps_ubar"] = float(np.max(np.abs(eps * Ubar)))
        L = Lattice(L.float_basis @ A, None, L.name, L.family, L.params)
        if _has_b13_structure(L):
            a1, a2, a3, dev = scales_from_b13_generator(L.float_basis)
            if dev < 1e-12:
                L = Lattice(L.float_basis, None, L.name, "B13", {"a1": a1, "a2": a2, "a3": a3})
                rec["scales"] = [a1, a2, a3]
        state.lattice = L
        state.history.append(rec)
        if on_step:
            on_step(rec)
    state.verdict = "step budget exhausted"
    return state


# -- product scaling ---------------------------------------------------------------------


def _as_float_g(g) -> tuple[float, float]:
    if isinstance(g, MomentReport):
        return g.G_hat, g.G_stderr
    if isinstance(g, tuple):
        return float(g[0]), float(g[1])
    return float(g), 0.0


def optimal_product_scales(components) -> dict:
    """Scales ``a_i`` that equalize the per-dimension second moment of the
    components of a product lattice, and the resulting NSM.

    ``components`` are ``(lattice, G_i)`` pairs; ``G_i`` may be exact, a
    float, ``(value, stderr)`` or a :class:`MomentReport`.  At the optimum
    ``G^n = prod G_i^(n_i)``.
    """
    if not components:
        raise ValueError("need at least one component")
    ns, Vs, Gs, ses = [], [], [], []
    for L, g in components:
        G, se = _as_float_g(g)
        ns.append(L.n)
        Vs.append(L.volume)
        Gs.append(G)
        ses.append(se)
    n = sum(ns)
    per_dim = [G * V ** (2.0 / k) for G, V, k in zip(Gs, Vs, ns)]
    scales = [math.sqrt(per_dim[0] / p) for p in per_dim]
    logG = sum(k * math.log(G) for k, G in zip(ns, Gs)) / n
    G_prod = math.exp(logG)
    # direct evaluation with the chosen scales
    V = math.prod(a**k * Vv for a, k, Vv in zip(scales, ns, Vs))
    second = sum(a * a * k * p for a, k, p in zip(scales, ns, per_dim))
    G_direct = second / (n * V ** (2.0 / n))
    rel = math.sqrt(sum((k / n * se / G) ** 2 for k, se, G in zip(ns, ses, Gs)))
    return {"scales": scales, "G_product": G_prod, "G_direct": G_direct, "G_stderr": G_prod * rel}
