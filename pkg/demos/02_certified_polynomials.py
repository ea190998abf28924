"""Certified polynomial constructions for every transform family.

Each constructor certifies its own output on a dense grid: sup error against
the target on the certified interval, plus the global bound on [-1, 1] that
eigenvalue transforms require.  The printed table shows degrees staying near
the 1/delta * log(1/eps) formulas.
"""

import numpy as np

from blockenc import (approx_interior_indicator, approx_negative_power,
                      approx_positive_power, approx_sqrt_neglog,
                      approx_support_indicator, approx_threshold)

print(f"{'family':<22} {'degree':>6} {'certified err':>14} {'global max':>11}")
for name, poly in [
    ("pos-power c=1/2", approx_positive_power(0.5, 0.05, 1e-3)),
    ("neg-power c=1/2", approx_negative_power(0.5, 0.05, 1e-3)),
    ("threshold t=1/2", approx_threshold(0.5, 0.05, 1e-3)),
    ("support-indicator", approx_support_indicator(0.05, 1e-3)),
    ("interior-indicator", approx_interior_indicator(0.05, 1e-3)),
    ("sqrt-neglog", approx_sqrt_neglog(0.05, 1e-3)),
]:
    print(f"{name:<22} {poly.degree:>6} {poly.certified_error:>14.3e} "
          f"{poly.global_bound:>11.4f}")

p = approx_negative_power(0.5, 0.1, 0.01)
print("\nnegative power at the window edges:")
print("  P(delta)  =", f"{p(0.1):.4f}", "(target 1/2)")
print("  P(1)      =", f"{p(1.0):.4f}", "(target delta^c/2 =",
      f"{np.sqrt(0.1) / 2:.4f})")

s = approx_sqrt_neglog(0.1, 0.01)
print("\nscaled sqrt(-ln x):")
print("  P(delta') =", f"{s(0.1):.4f}", "(target 1/2)")
print("  P(0.9)    =", f"{s(0.9):.4f}",
      "(target", f"{np.sqrt(-np.log(0.9)) / (2 * np.sqrt(np.log(10))):.4f})")

print("\ndegree growth of the support indicator under halving delta:")
for delta in (0.2, 0.1, 0.05, 0.025):
    poly = approx_support_indicator(delta, 1e-2)
    print(f"  delta = {delta:<6} degree = {poly.degree}")
