"""
Sharp constants and the identities between them
================================================

Tabulates the Sobolev, HLS, trace and composed trace-Sobolev constants
for a few dimensions, and checks that the composed constant at
``m = 1, alpha = 1`` is half of Escobar's constant.
"""

import numpy as np

from fractrace.constants import FracIndex, composed_constant, constants_record, escobar_constant

# Escobar's boundary Sobolev constant against the composed one
print(" n   escobar      2*composed   rel. gap")
for n in range(3, 9):
    esc = escobar_constant(n)
    comp = composed_constant(FracIndex(n, 1, 1.0))
    print(f"{n:2d}  {esc:.10f}  {2 * comp:.10f}  {abs(2 * comp - esc) / esc:.1e}")

# every identity the record checks, over a sweep of orders in dimension 5
print("\nalpha  max identity residual (n=5, m=1)")
for alpha in np.linspace(0.55, 2.45, 8):
    rec = constants_record(FracIndex(5, 1, float(alpha)))
    print(f"{alpha:.3f}  {rec.max_residual:.1e}  {sorted(rec.identity_residuals)}")
