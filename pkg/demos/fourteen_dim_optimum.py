"""Find the best member of the one-parameter 14-dimensional family twice:
once exactly, by isolating a root of the stationarity polynomial, and once
by sampling the Voronoi cell.  Then show that the second-moment matrix is a
multiple of the identity only at the optimum.

    python demos/fourteen_dim_optimum.py
"""

from fractions import Fraction

from latquant import catalog, exact_nsm
from latquant.moments import b14_groups, estimate_nsm, estimate_second_moment_matrix, pooled_statistics

opt = exact_nsm.optimize_g14()
print(f"certified optimum  a = {opt.a_opt.to_decimal(20)}")
print(f"                   G = {opt.G_opt.to_decimal(20)}")
print(f"root {opt.root_index} of {opt.positive_roots} positive roots, bracket width "
      f"{float(opt.v_bracket[1] - opt.v_bracket[0]):.1e}")

for a in (Fraction(13, 10), Fraction(25, 19), Fraction(27, 20)):
    print(f"G({a}) = {exact_nsm.g14(a).to_decimal(12)}")

# a Monte Carlo estimate at the optimum should agree within a few standard errors
L = catalog.b14(float(opt.a_opt))
rep = estimate_nsm(L, 400_000, seed=1)
z = (rep.G_hat - float(opt.G_opt.value)) / rep.G_stderr
print(f"\nMonte Carlo G = {rep.G_hat:.7f} +- {rep.G_stderr:.1e}  (z = {z:+.2f})")

# the two diagonal blocks of U separate away from the optimum
for label, lat in (("optimum", L), ("a = 1.30", catalog.b14(1.30))):
    pooled = pooled_statistics(estimate_second_moment_matrix(lat, 400_000, seed=2), b14_groups())
    print(f"{label:9s} block z-scores: alpha {pooled['alpha']['z']:+6.2f}  beta {pooled['beta']['z']:+6.2f}")
