"""Sobolev norms of annulus-supported functions shrink as the annulus moves out.

The target norm stays bounded while the source norm grows, which is what rules
out the embedding at the excluded exponent.
"""
from laplace_carleson.theorems import run_theorem

rep, _ = run_theorem("annulus", p=4.0)
for row in rep.rows:
    print(f"{row['function_id']:>7}  Sobolev norm {row['target_norm']:.6f}")
print(f"final/initial {rep.extra['final_over_initial']:.6f}, "
      f"strictly decreasing: {rep.extra['strictly_decreasing']}")
