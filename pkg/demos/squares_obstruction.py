"""Atoms at (n^2, 1): a Carleson measure that admits no bounded factorization.

The squares measure has a finite Carleson constant, yet a factorization into a
bounded density and a Carleson measure would force N <= C0 * C1 for every N.
"""
from laplace_carleson.counterexamples import (FactorizationCandidate, audit_factorization,
                                              infeasibility_certificate,
                                              squares_measure_carleson)

rep = squares_measure_carleson(100, beta=0.5)
print(f"Carleson sup at beta=0.5: {rep.sup_ratio:.12f} on [{rep.argmax.a:g}, {rep.argmax.b:g}]")

for N in (1, 4, 10, 40):
    r = audit_factorization(FactorizationCandidate.uniform(N), caps=(2, 2))
    cert = infeasibility_certificate(N, 2, 2)
    w = cert.get("witness")
    found = f"witness t={w['t']:g}" if w else "no witness"
    print(f"N={N:3d}  equal weights: C0={r.C0:6.2f} C1={r.C1:4.2f}  "
          f"caps (2, 2): {cert['status']}, {found}")
