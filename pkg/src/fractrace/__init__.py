"""Sharp fractional Sobolev, HLS and trace inequalities on periodic grids.

Modules
-------
specfun       log-gamma and friends
constants     closed-form sharp constants and the identities linking them
field         sampled fields, transforms, D_alpha and L^p norms
operators     fractional Laplacian, Riesz potential, traces, Riesz double sums
extremizers   closed-form and quadrature optimizers
families      reproducible test fields
verify        Rayleigh quotients and reports
optimize      projected gradient ascent and conformal fits
cli           command-line entry point
"""

__version__ = "0.1.0"

from .constants import FracIndex, composed_constant, hls_constant, sobolev_constant, trace_constant
from .field import BoxGrid, SpectralField

__all__ = [
    "__version__",
    "FracIndex",
    "BoxGrid",
    "SpectralField",
    "sobolev_constant",
    "hls_constant",
    "trace_constant",
    "composed_constant",
]
