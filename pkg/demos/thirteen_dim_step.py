"""Take a single gradient step from the unit-scale 13-dimensional lattice and
check that it lands exactly on another member of the three-scale family.

Everything here is rational arithmetic: the second-moment parameters at unit
scales, the step size that removes the off-diagonal term, and the new scales.

    python demos/thirteen_dim_step.py
"""

from latquant import catalog, exact_nsm
from latquant.exact import linalg as xl
from latquant.optimizer import structured_U13, traceless

abg = exact_nsm.abg13_at_unit()
al, be, ga = abg.as_tuple()
G0 = exact_nsm.unit_nsm13()
print(f"G at unit scales   = {float(G0):.12f}  (exact rational, denominator {G0.denominator.bit_length()} bits)")
print(f"alpha, beta, gamma = {float(al):.6f}, {float(be):.6f}, {float(ga):.2e}")

steps = exact_nsm.epsilon_steps(al, be, ga)
print(f"step zeroing gamma      eps1 = {float(steps.eps1):.4f}")
print(f"step equalizing blocks  eps2 = {float(steps.eps2):.4f}")

eps = steps.eps1
Ub = traceless(structured_U13(al, be, ga))
A = xl.to_matrix([[int(i == j) - eps * Ub[i][j] for j in range(13)] for i in range(13)])
stepped = xl.matmul(catalog.b13_unit().basis, A)
scales = exact_nsm.perturbed_scales(al, be, ga, eps)
print("\nnew scales:", ", ".join(f"{float(s):.6f}" for s in scales))
print("stepped generator equals the rescaled family member:", stepped == catalog.b13(*scales).basis)

a1, a2, a3 = scales
# the step lands on the phase-A side of the interface, so use that closed form
G_new = exact_nsm.gA13(a2 / a1, a3 / a1)
G_best = exact_nsm.optimize_g13().G_opt
print(f"\nG after one step = {G_new.to_decimal(12)}")
print(f"certified best   = {G_best.to_decimal(12)}")
