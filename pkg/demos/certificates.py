"""Check the shipped integral congruence certificates, then perturb each
entry of each transform by +-1 and see which perturbations still verify.

A surviving perturbation is not a bug in the checker: it is the original
transform followed by a reflection that maps the lattice to itself.

    python demos/certificates.py
"""

from latquant.equivalence import appendix_checks, mutation_survivors, shipped_certificates, verify_congruence

for cert in shipped_certificates():
    print(f"{cert.label:28s} {verify_congruence(cert)}")

print()
for name, ok in appendix_checks().items():
    print(f"{name:40s} {ok}")

print("\nsingle-entry changes that still verify:", mutation_survivors() or "none")
