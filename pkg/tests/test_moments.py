import math
from fractions import Fraction

import numpy as np
import pytest

from latquant import catalog, exact_nsm
from latquant.moments import (
    MomentReport,
    b14_groups,
    estimate_nsm,
    estimate_second_moment_matrix,
    geometry_report,
    paired_nsm_difference,
    pooled_statistics,
    zamir_feder_diagnostic,
)
from latquant.optimizer import structured_U13


def hexagon_oracle() -> float:
    """NSM of the hexagonal lattice from its Voronoi cell, split into six
    triangles at the origin: a triangle (0, p, q) has second moment
    area * (|p|^2 + |q|^2 + p.q) / 6."""
    b1, b2 = np.array([1.0, 0.0]), np.array([0.5, math.sqrt(3) / 2])
    nbrs = [b1, b2, b2 - b1, -b1, -b2, b1 - b2]
    nbrs.sort(key=lambda v: math.atan2(v[1], v[0]))
    verts = []
    for v, w in zip(nbrs, nbrs[1:] + nbrs[:1]):
        # intersection of the bisectors x.v = |v|^2/2 and x.w = |w|^2/2
        verts.append(np.linalg.solve(np.array([v, w]), np.array([v @ v, w @ w]) / 2))
    area = second = 0.0
    for p, q in zip(verts, verts[1:] + verts[:1]):
        a = abs(p[0] * q[1] - p[1] * q[0]) / 2
        area += a
        second += a * (p @ p + q @ q + p @ q) / 6
    return second / (2 * area ** 2)


def test_hexagon_oracle_value():
    assert hexagon_oracle() == pytest.approx(0.0801875, abs=5e-8)
    assert hexagon_oracle() == pytest.approx(5 / (36 * math.sqrt(3)), rel=1e-12)


@pytest.mark.parametrize(
    "L, exact",
    [
        (catalog.integer_lattice(1), 1 / 12),
        (catalog.hexagonal(), hexagon_oracle()),
        (catalog.get("B14", a="opt"), 0.069261778717),
    ],
    ids=["Z1", "A2", "B14-opt"],
)
def test_estimate_nsm_within_four_sigma(L, exact):
    rep = estimate_nsm(L, 10**6, seed=11)
    assert abs(rep.G_hat - exact) < 4 * rep.G_stderr


def test_integer_lattice_second_moment_is_scalar():
    rep = estimate_second_moment_matrix(catalog.integer_lattice(1), 200_000, seed=2)
    assert rep.U_hat.shape == (1, 1)
    assert abs(rep.U_hat[0, 0] - 1 / 12) < 4 * rep.U_stderr[0, 0]


def test_trace_identity_same_samples():
    rep = estimate_second_moment_matrix(catalog.b13_unit(), 100_000, seed=5)
    assert rep.G_from_trace == pytest.approx(rep.G_hat, rel=1e-13)
    assert np.array_equal(rep.U_hat, rep.U_hat.T)


def test_determinism_across_workers():
    L = catalog.get("B13", a="opt")
    r1 = estimate_second_moment_matrix(L, 150_000, seed=9, workers=1)
    r3 = estimate_second_moment_matrix(L, 150_000, seed=9, workers=3)
    assert r1.G_hat == r3.G_hat and r1.G_stderr == r3.G_stderr
    assert np.array_equal(r1.U_hat, r3.U_hat)
    assert np.array_equal(r1.batch_U, r3.batch_U)


@pytest.mark.parametrize("c", [Fraction(2), Fraction(1, 4), Fraction(8)])
def test_scale_invariance_is_bit_identical(c):
    L = catalog.b14(Fraction(25, 19))
    assert estimate_nsm(L, 50_000, seed=3).G_hat == estimate_nsm(L.scaled(c), 50_000, seed=3).G_hat


def test_scale_invariance_general_factor():
    L = catalog.b14(Fraction(25, 19))
    g1 = estimate_nsm(L, 50_000, seed=3).G_hat
    g3 = estimate_nsm(L.scaled(Fraction(3)), 50_000, seed=3).G_hat
    assert g3 == pytest.approx(g1, rel=1e-12)


def _synthetic(U, stderr):
    n = U.shape[0]
    return MomentReport(
        lattice="synthetic", params={}, n=n, volume=1.0, samples=1, seed=0,
        G_hat=float(np.trace(U)) / n, G_stderr=stderr, U_hat=U, U_stderr=np.full((n, n), stderr),
        batch_sizes=np.array([1]), batch_U=U[None], max_error2=0.0,
    )


def test_diagnostic_isotropic_input():
    d = zamir_feder_diagnostic(_synthetic(np.eye(4) / 12, 1e-6))
    assert d["traceless_norm"] == 0
    assert d["verdict"] == "consistent with local optimality"


def test_diagnostic_rejects_unit_scale_matrix():
    abg = exact_nsm.abg13_at_unit()
    U = np.array(structured_U13(*(float(x) for x in abg.as_tuple())))
    d = zamir_feder_diagnostic(_synthetic(U, 1e-9))
    assert d["verdict"] == "inconsistent with local optimality"


def test_b14_off_optimum_blocks_differ():
    a = Fraction(13, 10)
    ab = exact_nsm.alpha_beta_14(a)
    nf = exact_nsm.volume14(a).rational_power(Fraction(1, 7))
    alpha, beta = float((ab.alpha / nf).value), float((ab.beta / nf).value)
    rep = estimate_second_moment_matrix(catalog.b14(1.30), 10**6, seed=4)
    pooled = pooled_statistics(rep, b14_groups())
    assert abs(pooled["alpha"]["z"]) > 4 and abs(pooled["beta"]["z"]) > 4
    # block means agree with the exact prediction, sign included
    assert abs(pooled["alpha"]["mean"] - alpha) < 4 * pooled["alpha"]["stderr"]
    assert abs(pooled["beta"]["mean"] - beta) < 4 * pooled["beta"]["stderr"]
    assert (pooled["alpha"]["mean"] > pooled["beta"]["mean"]) == (alpha > beta)


def test_b14_at_optimum_is_isotropic():
    rep = estimate_second_moment_matrix(catalog.get("B14", a="opt"), 10**6, seed=6)
    assert zamir_feder_diagnostic(rep)["max_abs_z"] < 4


@pytest.mark.parametrize("a", [1.30, Fraction(25, 19)])
def test_mc_agrees_with_exact_14(a):
    rep = estimate_nsm(catalog.b14(a), 400_000, seed=8)
    assert abs(rep.G_hat - float(exact_nsm.g14(a).value)) < 4 * rep.G_stderr


def test_mc_agrees_with_exact_13_phase_b():
    a2, a3 = Fraction(1004, 1000), Fraction(1008, 1000)
    rep = estimate_nsm(catalog.b13(1, a2, a3), 400_000, seed=8)
    assert abs(rep.G_hat - float(exact_nsm.gB13(a2, a3).value)) < 4 * rep.G_stderr


def test_paired_difference_of_identical_lattices_is_zero():
    L = catalog.checkerboard(4)
    d = paired_nsm_difference(L, L, 20_000, seed=1)
    assert d["difference"] == 0.0


@pytest.mark.parametrize("n, delta", [(1, 1.0), (2, math.pi / 4), (3, math.pi / 6)])
def test_packing_density_of_integer_lattices(n, delta):
    g = geometry_report(catalog.integer_lattice(n), mc_samples=10_000)
    assert g.rho == pytest.approx(0.5)
    assert g.delta == pytest.approx(delta, rel=1e-12)
    assert g.R is None
    assert g.R_lower <= math.sqrt(n) / 2 + 1e-12


@pytest.mark.parametrize("name", ["B14", "B13"])
def test_sampled_errors_never_exceed_covering_radius(name):
    L = catalog.get(name, a="opt")
    g = geometry_report(L, mc_samples=100_000, seed=21)
    assert g.R_lower <= g.R


def test_geometry_13_dim_optimum():
    g = geometry_report(catalog.get("B13", a="opt"), mc_samples=1000)
    assert g.kissing == 56
    assert round(g.rho, 6) == 0.707107
    assert round(g.delta, 6) == 0.0097
    assert round(g.R, 6) == 1.236648
    assert round(g.theta, 6) == 13.88947
