"""
How close does a sampled optimizer get to the sharp Sobolev constant?
======================================================================

The power-law optimizer ``(gamma^2 + x^2)^{-1/4}`` of the one-dimensional
inequality with ``alpha = 1/4`` decays too slowly for a periodic box, so it is
truncated to a ball of radius ``L/4`` first. The ratio to the sharp constant
then depends on how well the grid resolves the scale ``gamma``.
"""

from fractrace.constants import FracIndex
from fractrace.families import extremizer_field, gaussian
from fractrace.field import BoxGrid
from fractrace.verify import sobolev_quotient

idx = FracIndex(1, 0, 0.25)

# refine the grid at fixed box size: the ratio settles once gamma is resolved
print("   N     gamma=0.1  gamma=1")
for N in (1024, 2048, 4096, 8192, 16384):
    grid = BoxGrid.cube(1, N, 400.0)
    r = [sobolev_quotient(extremizer_field("sobolev", idx, grid, gam), idx).ratio for gam in (0.1, 1.0)]
    print(f"{N:6d}  {r[0]:.6f}   {r[1]:.6f}")

# a Gaussian is a smooth competitor that is not in the optimal family
grid = BoxGrid.cube(1, 8192, 400.0)
print(f"\nGaussian ratio: {sobolev_quotient(gaussian(grid), idx).ratio:.4f}")
