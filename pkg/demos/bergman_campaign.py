"""Search for a large Bergman embedding quotient over the default test family.

Runs the Bergman campaign at p = q = 4 on two refinement levels and prints the
largest quotient found and how much it moved between levels.
"""
import sys

from laplace_carleson.theorems import run_theorem

n = int(sys.argv[1]) if len(sys.argv) > 1 else 20
rep, _ = run_theorem("1.2", p=4.0, q=4.0, n=n, levels=(9, 10))
best = max(rep.rows, key=lambda r: r["ratio"])
print(f"{len(rep.rows)} functions, sup quotient {rep.sup_ratio:.6f} "
      f"({best['function_id']}), drift {rep.drift:.2e}")
print(rep.statement)
