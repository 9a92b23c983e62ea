"""End-to-end reproduction checks against stored reference values.

Each check returns a :class:`CheckResult`.  ``run_all`` executes them in
order and shares expensive intermediate results (the optimum lattices and
the large Monte Carlo runs) through a :class:`Context`.  Reference values
come from ``data/reference_values.json``; nothing else in the package reads
that file.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import mpmath
import numpy as np

from . import catalog, equivalence, exact_nsm, moments, optimizer
from .enumeration import phase_condition_i, relevant_vectors, shortest_vectors, theta_image
from .exact import linalg as xl
from .exact.bigfloat import BigFloat
from .lattice import dual, glue, glue_group, gram

FULL_SAMPLES = 10_000_000
QUICK_SAMPLES = 3_000_000
CROSSCHECK_SAMPLES = 1_000_000


def reference_values() -> dict:
    with resources.files("latquant").joinpath("data/reference_values.json").open(encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class CheckResult:
    key: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    skipped: bool = False

    @property
    def status(self) -> str:
        return "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")

    def line(self) -> str:
        return f"{self.status} [{self.key:2d}] {self.title} ({self.seconds:.1f}s): {self.detail}"


@dataclass
class Context:
    quick: bool = False
    seed: int = 20240601
    workers: int = 1
    ref: dict = field(default_factory=reference_values)
    _cache: dict = field(default_factory=dict)

    @property
    def big_samples(self) -> int:
        return QUICK_SAMPLES if self.quick else FULL_SAMPLES

    def memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def opt14(self):
        return self.memo("opt14", exact_nsm.optimize_g14)

    def opt13(self):
        return self.memo("opt13", exact_nsm.optimize_g13)

    def b14_opt(self):
        return catalog.b14(float(self.opt14().a_opt))

    def b13_opt(self):
        o = self.opt13()
        return catalog.b13(1.0, float(o.a2), float(o.a3))

    def b13_unit_report(self):
        return self.memo(
            "b13u",
            lambda: moments.estimate_second_moment_matrix(catalog.b13_unit(), self.big_samples, self.seed, self.workers),
        )


def _close(x: BigFloat, ref: str, tol: float) -> tuple[bool, float]:
    d = abs(float(x.value - mpmath.mpf(ref)))
    return d <= tol, d


# -- criteria ---------------------------------------------------------------------------------


def check_g14_optimum(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["g14_optimum"]
    o = ctx.opt14()
    ok_a, da = _close(o.a_opt, r["a_opt"], float(r["tol"]))
    ok_g, dg = _close(o.G_opt, r["G"], float(r["tol"]))
    return ok_a and ok_g, f"a_opt={o.a_opt.to_decimal(15)} (|d|={da:.1e}), G={o.G_opt.to_decimal(15)} (|d|={dg:.1e})"


def check_g13_optimum(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["g13_optimum"]
    o = ctx.opt13()
    tol = float(r["tol"])
    oks = [_close(o.a2, r["a2"], tol), _close(o.a3, r["a3"], tol), _close(o.G_opt, r["G"], tol)]
    return all(ok for ok, _ in oks), (
        f"a2={o.a2.to_decimal(15)} a3={o.a3.to_decimal(15)} G={o.G_opt.to_decimal(15)}; "
        f"max |d|={max(d for _, d in oks):.1e}; certified={o.certified}"
    )


def check_unit_rational(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["b13_unit"]
    G = exact_nsm.unit_nsm13()
    rendered = mpmath.nstr(mpmath.mpf(G.numerator) / G.denominator, 11, strip_zeros=False)
    ok_g = mpmath.mpf(rendered) == mpmath.mpf(r["G_12_digits"])
    abg = exact_nsm.abg13_at_unit()
    al, be, ga = (float(x) for x in abg.as_tuple())
    ok_abg = (round(al, 6), round(be, 6), round(ga, 6)) == (float(r["alpha"]), float(r["beta"]), float(r["gamma"]))
    eps = exact_nsm.epsilon_steps(*abg.as_tuple())
    e1, e2 = float(eps.eps1), float(eps.eps2)
    ok_eps = round(e1, 4) == float(r["eps1"]) and round(e2, 4) == float(r["eps2"])
    # the trace identity ties the three together exactly
    ok_tr = 5 * abg.alpha + 8 * abg.beta == 13 * G
    return ok_g and ok_abg and ok_eps and ok_tr, (
        f"G={rendered} alpha/beta/gamma={al:.6f}/{be:.6f}/{ga:.6f} eps1={e1:.4f} eps2={e2:.4f} trace-identity={ok_tr}"
    )


def check_phase_gap(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["phase_gap13"]
    o = ctx.opt13()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", exact_nsm.PhaseWarning)
        direct = exact_nsm.gA13(o.a2, o.a3, r["digits"]) - exact_nsm.gB13(o.a2, o.a3, r["digits"])
    closed = exact_nsm.phase_gap13(o.a2, o.a3, r["digits"])
    lo, hi = float(r["lo"]), float(r["hi"])
    v = float(closed.value)
    agree = abs(float(direct.value) - v) <= 1e-3 * v
    return lo <= v <= hi and agree, f"gap={mpmath.nstr(closed.value, 6)} (difference of the two forms agrees: {agree})"


def check_facets(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["facets"]
    n14 = relevant_vectors(catalog.b14(Fraction(25, 19)), workers=ctx.workers)
    n13 = relevant_vectors(ctx.b13_opt(), workers=ctx.workers)
    ok = len(n14) == r["B14(25/19)"] and len(n13) == r["B13(a_opt)"]
    return ok, f"B14(25/19): {len(n14)} (exact={n14.exact}), B13(a_opt): {len(n13)} (flagged {len(n13.flagged)})"


def _compare_steps(steps, ref, tol) -> tuple[bool, str]:
    got = [(r2, c) for r2, c in steps]
    if len(got) != len(ref):
        return False, f"{len(got)} steps vs {len(ref)} expected"
    worst = max(abs(g[0] - e[0]) for g, e in zip(got, ref))
    counts_ok = all(g[1] == e[1] for g, e in zip(got, ref))
    return counts_ok and worst <= tol, f"{len(got)} steps, counts {'match' if counts_ok else 'differ'}, max |dr2|={worst:.1e}"


def check_theta(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref["theta_det1"]
    rmax, tol = r["r2_max"], r["r2_tol"]
    parts, oks = [], []
    for key, L in (("B14(a_opt)", ctx.b14_opt()), ("B13'", catalog.b13_unit()), ("B13(a_opt)", ctx.b13_opt())):
        th = theta_image(L, rmax, det1=True)
        ok, msg = _compare_steps(th.steps, r[key], tol)
        oks.append(ok)
        parts.append(f"{key}: {msg}")
    return all(oks), "; ".join(parts)


def check_geometry(ctx: Context) -> tuple[bool, str]:
    r = ctx.ref
    k = r["kissing"]
    t14 = shortest_vectors(ctx.b14_opt()).kissing
    t13 = shortest_vectors(ctx.b13_opt()).kissing
    t13u = shortest_vectors(catalog.b13_unit()).kissing
    ok_k = (t14, t13, t13u) == (k["B14(a_opt)"], k["B13(a_opt)"], k["B13(1,1,1)"])
    g14 = moments.geometry_report(ctx.b14_opt(), mc_samples=20_000, seed=ctx.seed)
    g13 = moments.geometry_report(ctx.b13_opt(), mc_samples=20_000, seed=ctx.seed)

    def agree(x, ref):
        digits = len(ref.split(".")[1])
        return round(x, digits) == float(ref)

    p14, p13 = r["geometry"]["B14(a_opt)"], r["geometry"]["B13(a_opt)"]
    checks = {
        "rho14": agree(g14.rho, p14["rho"]),
        "Delta14": agree(g14.delta, p14["Delta"]),
        "R14^2": agree(g14.R**2, p14["R_squared_as_printed"]),
        "Theta14": agree(g14.theta, p14["Theta"]),
        "rho13": agree(g13.rho, p13["rho"]),
        "Delta13": agree(g13.delta, p13["Delta"]),
        "R13": agree(g13.R, p13["R"]),
        "Theta13": agree(g13.theta, p13["Theta"]),
        # sampled errors never exceed the covering radius
        "R>=sampled": g14.R >= g14.R_lower and g13.R >= g13.R_lower,
    }
    bad = [k for k, v in checks.items() if not v]
    return ok_k and not bad, (
        f"kissing {t14}/{t13}/{t13u}; B14 rho={g14.rho:.6f} Delta={g14.delta:.6f} R={g14.R:.6f} (R^2={g14.R ** 2:.6f}) "
        f"Theta={g14.theta:.6f}; B13 rho={g13.rho:.6f} Delta={g13.delta:.6f} R={g13.R:.6f} Theta={g13.theta:.6f}"
        + (f"; mismatches: {bad}" if bad else "")
    )


def check_mc_crosscheck(ctx: Context) -> tuple[bool, str]:
    sqrt3 = math.sqrt(3)
    cases = [
        ("B14(a_opt)", ctx.b14_opt(), float(ctx.opt14().G_opt.value)),
        ("B13(a_opt)", ctx.b13_opt(), float(ctx.opt13().G_opt.value)),
        ("Z1", catalog.integer_lattice(1), 1 / 12),
        ("Z8", catalog.integer_lattice(8), 1 / 12),
        ("A2", catalog.hexagonal(), 5 / (36 * sqrt3)),
    ]
    parts, ok = [], True
    for i, (name, L, G) in enumerate(cases):
        rep = moments.estimate_nsm(L, CROSSCHECK_SAMPLES, ctx.seed + i, ctx.workers)
        z = (rep.G_hat - G) / rep.G_stderr
        ok &= abs(z) < 4
        parts.append(f"{name} z={z:+.2f}")
    return ok, ", ".join(parts)


def check_zamir_feder(ctx: Context) -> tuple[bool, str]:
    rep_u = ctx.b13_unit_report()
    pu = moments.pooled_statistics(rep_u, moments.b13_groups())
    z_gamma = pu["gamma"]["z"]
    n = ctx.big_samples
    r14 = moments.estimate_second_moment_matrix(ctx.b14_opt(), n, ctx.seed + 1, ctx.workers)
    r13 = moments.estimate_second_moment_matrix(ctx.b13_opt(), n, ctx.seed + 2, ctx.workers)
    d14 = moments.zamir_feder_diagnostic(r14, groups=moments.b14_groups())
    d13 = moments.zamir_feder_diagnostic(r13, groups=moments.b13_groups())
    ok = z_gamma < -4 and d14["max_abs_z"] < 4 and d13["max_abs_z"] < 4
    return ok, (
        f"{n:.0e} samples; B13' pooled off-diagonal z={z_gamma:+.1f}; "
        f"B14(a_opt) max|z|={d14['max_abs_z']:.2f}; B13(a_opt) max|z|={d13['max_abs_z']:.2f}"
    )


def check_one_step(ctx: Context) -> tuple[bool, str]:
    rep = ctx.b13_unit_report()
    p = optimizer.pooled_abg13(rep)
    x = np.array([p["alpha"], p["beta"], p["gamma"]])
    est, cov = optimizer.delta_method(lambda v: optimizer.one_step_scales(*v), x, p["cov"])
    abg = exact_nsm.abg13_at_unit()
    eps_exact = exact_nsm.epsilon_steps(*abg.as_tuple()).eps1
    target = np.array([float(s) for s in exact_nsm.perturbed_scales(*abg.as_tuple(), eps_exact)])
    sig = np.sqrt(np.diag(cov))
    zs = (est - target) / sig
    # apply the step to the generator itself and read the scales back
    Ubar = optimizer.traceless(optimizer.structured_U13(*x.tolist()))
    eps = exact_nsm.epsilon_steps(*x.tolist()).eps1
    L0 = catalog.b13_unit()
    B1 = L0.float_basis @ optimizer.perturbation(Ubar, eps)
    a1, a2, a3, dev = optimizer.scales_from_b13_generator(B1)
    readback = float(np.max(np.abs(np.array([a1, a2, a3]) - est)))
    L1 = catalog.b13(a1, a2, a3)
    diff = moments.paired_nsm_difference(L0, L1, ctx.big_samples, ctx.seed + 3, ctx.workers)
    ok = bool(np.all(np.abs(zs) < 4)) and dev < 1e-12 and readback < 1e-12 and diff["z"] >= 3
    return ok, (
        f"eps1={eps:.4f}; scales {est[0]:.6f}/{est[1]:.6f}/{est[2]:.6f} vs {target[0]:.6f}/{target[1]:.6f}/{target[2]:.6f} "
        f"(z {zs[0]:+.2f}/{zs[1]:+.2f}/{zs[2]:+.2f}); form deviation {dev:.1e}; "
        f"G {diff['G1']:.7f} -> {diff['G2']:.7f}, paired decrease {diff['difference']:.2e} (z={diff['z']:.1f})"
    )


def check_phase_test(ctx: Context) -> tuple[bool, str]:
    inside = phase_condition_i("B14", [Fraction(13, 10), Fraction(25, 19), Fraction(34, 25)], ctx.workers)
    across = phase_condition_i("B14", [Fraction(32, 25), Fraction(25, 19)], ctx.workers)
    ok = inside.stable and not across.stable
    msg = (
        f"{{1.30, 25/19, 1.36}} stable={inside.stable} (facets {inside.counts}); "
        f"{{1.28, 25/19}} stable={across.stable} (facets {across.counts})"
    )
    if across.stable:
        msg += "; the facet set does not change at the phase boundary, so this test cannot separate the phases"
    return ok, msg


def check_appendix(ctx: Context) -> tuple[bool, str]:
    report = equivalence.appendix_checks()
    survivors = equivalence.mutation_survivors()
    ok = all(report.values()) and not survivors
    msg = f"{sum(report.values())}/{len(report)} certificate checks pass"
    if survivors:
        msg += (
            f"; single-entry mutations that still verify: {survivors} "
            "(each equals the original matrix composed with a lattice reflection, so it is a valid certificate)"
        )
    else:
        msg += "; every single-entry mutation breaks verification"
    return ok, msg


def check_structural(ctx: Context) -> tuple[bool, str]:
    out = {}
    for spec in (catalog.b14_glue(Fraction(25, 19)), catalog.b13_glue(1, Fraction(3, 2), Fraction(5, 4))):
        P = spec.product_lattice()
        G = glue(spec)
        out[f"glue law {spec.name}"] = G.volume_exact() * len(glue_group(spec)) == P.volume_exact()
    for L in (catalog.b14(Fraction(25, 19)), catalog.b13(1, Fraction(3, 2), Fraction(5, 4)), catalog.checkerboard(4)):
        out[f"dual involution {L.name}"] = gram(dual(dual(L))) == gram(L)
    o14 = ctx.opt14()
    ab = exact_nsm.alpha_beta_14(o14.a_opt)
    vol = exact_nsm.volume14(o14.a_opt)
    lhs14 = 10 * ab.alpha + 4 * ab.beta
    rhs14 = 14 * vol.rational_power(Fraction(1, 7)) * o14.G_opt
    out["10 alpha + 4 beta = 14 G V^(1/7)"] = abs(float((lhs14 - rhs14).value)) < 1e-60
    u = exact_nsm.abg13_at_unit()
    out["5 alpha + 8 beta = 13 G (unit, exact)"] = 5 * u.alpha + 8 * u.beta == 13 * exact_nsm.unit_nsm13()
    try:
        exact_nsm.f14()
        out["stationarity coefficients = derivative of moment polynomial"] = True
    except RuntimeError:
        out["stationarity coefficients = derivative of moment polynomial"] = False
    try:
        d2, d3 = exact_nsm.fB_derivations()
        out["fB degree 14 / 14"] = (d2.poly.degree(), d3.poly.degree()) == (14, 14)
        out["fractional powers cancel"] = not (d2.residual_a2 or d2.residual_a3 or d3.residual_a2 or d3.residual_a3)
    except RuntimeError:
        out["fractional powers cancel"] = False
    # the K'10 Gram is integral with 4 on the diagonal
    g10 = gram(catalog.k10prime())
    out["K'10 Gram integral"] = xl.is_integer_matrix(g10) and all(g10[i][i] == 4 for i in range(10))
    bad = [k for k, v in out.items() if not v]
    return not bad, f"{len(out) - len(bad)}/{len(out)} pass" + (f"; failing: {bad}" if bad else "")


CHECKS = [
    (1, "14-dim optimum", check_g14_optimum, False),
    (2, "13-dim optimum", check_g13_optimum, False),
    (3, "exact rational at unit scales", check_unit_rational, False),
    (4, "phase-gap magnitude", check_phase_gap, False),
    (5, "facet counts", check_facets, False),
    (6, "theta steps", check_theta, False),
    (7, "kissing/packing/covering", check_geometry, False),
    (8, "MC cross-validation", check_mc_crosscheck, False),
    (9, "isotropy discrimination", check_zamir_feder, True),
    (10, "one-step descent", check_one_step, True),
    (11, "phase test", check_phase_test, False),
    (12, "equivalence certificates", check_appendix, False),
    (13, "structural invariants", check_structural, False),
]


def run_check(key: int, ctx: Context) -> CheckResult:
    for k, title, fn, _ in CHECKS:
        if k == key:
            t0 = time.perf_counter()
            try:
                ok, detail = fn(ctx)
            except Exception as exc:  # a crash is a failure, reported with its message
                ok, detail = False, f"error: {type(exc).__name__}: {exc}"
            return CheckResult(k, title, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(key)


def run_all(quick: bool = False, workers: int = 1, seed: int = 20240601, only=None, on_result=None) -> list[CheckResult]:
    """Run the checks in order.  ``quick`` lowers the large Monte Carlo
    budgets to 3 x 10^6 samples (the results line says so)."""
    ctx = Context(quick=quick, seed=seed, workers=workers)
    results = []
    for k, title, _, heavy in CHECKS:
        if only and k not in only:
            continue
        res = run_check(k, ctx)
        if heavy and quick:
            res.detail = f"[reduced budget] {res.detail}"
        results.append(res)
        if on_result:
            on_result(res)
    return results
