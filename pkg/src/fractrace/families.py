"""Reproducible test fields for the verification and optimization harnesses.

Optimizers decay like a power of ``|x|``, so a plain sample on a periodic box
overlaps its own images and leaks mass into the zero mode, which ``D_alpha``
cannot see. :func:`truncate_radial` turns such a sample into a compactly
supported field ``(f - f(R))_+`` with ``R`` a quarter of the shortest side. The
periodic images then stay at least half a box apart and the lattice
``D_alpha`` sum is a Riemann sum of the continuum integrand.
"""

from __future__ import annotations

import numpy as np

from .constants import FracIndex
from .extremizers import (
    ExtremizerSpec,
    fourier_trace_extremizer_field,
    sample_extremizer,
    sample_trace_extremizer,
)
from .field import BoxGrid, SpectralField
from .specfun import DomainError

__all__ = [
    "FIELD_FAMILIES",
    "DEFAULT_GAMMA",
    "truncate_radial",
    "gaussian",
    "mean_zero_gaussian_pair",
    "band_limited_noise",
    "extremizer_field",
    "test_field",
]

FIELD_FAMILIES = ("extremizer", "gaussian", "random")

# optimizer scale per quotient kind; see extremizer_field
DEFAULT_GAMMA = {"sobolev": 0.1, "hls": 1.0, "trace_norm": 2.0, "trace_sobolev": 1.0}


def truncate_radial(f: SpectralField, radius: float | None = None) -> SpectralField:
    """``(f - c)_+`` with ``c`` the largest value of real ``f`` on ``|x| >= radius``.

    ``radius`` defaults to a quarter of the shortest box side. For fields
    decreasing in ``|x|`` the result vanishes outside the ball.
    """
    g = f.grid
    R = min(g.lengths) / 4 if radius is None else float(radius)
    v = np.asarray(f.values).real
    outside = g.radius_sq() >= R * R
    if not outside.any():
        raise DomainError("radius leaves no lattice points outside the ball")
    return SpectralField(g, np.clip(v - v[outside].max(), 0.0, None))


def gaussian(grid: BoxGrid, width: float = 1.0) -> SpectralField:
    """``exp(-pi |x|^2 / width^2)``, a product of one-dimensional Gaussians."""
    return SpectralField(grid, np.exp(-np.pi * grid.radius_sq() / width**2))


def mean_zero_gaussian_pair(grid: BoxGrid) -> SpectralField:
    """``exp(-pi |x|^2) - 2^{-n} exp(-pi |x/2|^2)``: smooth with vanishing integral.

    Its transform is ``exp(-pi |k|^2) - exp(-4 pi |k|^2)``.
    """
    r2 = grid.radius_sq()
    return SpectralField(grid, np.exp(-np.pi * r2) - 2.0 ** (-grid.n) * np.exp(-np.pi * r2 / 4))


def band_limited_noise(grid: BoxGrid, seed: int, bandwidth: float | None = None) -> SpectralField:
    """Real white noise filtered by ``exp(-|k|^2 / (2 bandwidth^2))``, zero mode removed.

    ``bandwidth`` (frequency units) defaults to a tenth of the Nyquist
    frequency. The field is a deterministic function of ``seed``.
    """
    rng = np.random.default_rng(seed)
    kmax = min(N / (2 * L) for N, L in zip(grid.sizes, grid.lengths))
    bw = 0.1 * kmax if bandwidth is None else bandwidth
    c = SpectralField(grid, rng.standard_normal(grid.shape)).coeffs * np.exp(-0.5 * (grid.kmag() / bw) ** 2)
    c[(0,) * grid.n] = 0.0
    return SpectralField(grid, SpectralField.from_coefficients(grid, c).values.real)


def extremizer_field(kind: str, idx: FracIndex, grid: BoxGrid, gamma: float | None = None) -> SpectralField:
    """The optimizer matching a quotient kind, prepared for evaluation on ``grid``.

    * ``sobolev``: sampled power-law optimizer, truncated with :func:`truncate_radial`.
    * ``hls``: sampled HLS optimizer; it decays fast enough to use as is.
    * ``trace_norm``: lattice field ``g^(k1) / |k|^{2 alpha}``.
    * ``trace_sobolev``: quadrature-sampled trace optimizer, truncated.
    """
    if kind not in DEFAULT_GAMMA:
        raise DomainError(f"unknown kind {kind!r}")
    gam = DEFAULT_GAMMA[kind] if gamma is None else gamma
    if kind == "sobolev":
        return truncate_radial(sample_extremizer(ExtremizerSpec("sobolev", idx, gamma=gam), grid))
    if kind == "hls":
        return sample_extremizer(ExtremizerSpec("hls", idx, gamma=gam), grid)
    if kind == "trace_norm":
        return fourier_trace_extremizer_field(idx, gam, grid)
    return truncate_radial(sample_trace_extremizer(ExtremizerSpec("trace", idx, gamma=gam), grid))


def test_field(kind: str, family: str, idx: FracIndex, grid: BoxGrid, seed: int = 0, gamma: float | None = None):
    """Field of ``family`` (extremizer, gaussian or random) for quotient ``kind``."""
    if family == "extremizer":
        return extremizer_field(kind, idx, grid, gamma)
    if family == "gaussian":
        return gaussian(grid)
    if family == "random":
        return band_limited_noise(grid, seed)
    raise DomainError(f"family must be one of {FIELD_FAMILIES}, got {family!r}")


# keep pytest from collecting the builder as a test
test_field.__test__ = False
