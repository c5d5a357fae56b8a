"""Fractional Laplacian, Riesz potential and hyperplane traces on fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .constants import riesz_constant
from .field import BoxGrid, SpectralField, _multiplier_power, dalpha_weight
from .specfun import DomainError

__all__ = [
    "TraceSlice",
    "trace_slice",
    "frac_laplacian",
    "riesz_potential",
    "cell_kernel_integral",
    "riesz_double_sum",
    "riesz_double_sum_direct",
    "riesz_equivalence_terms",
    "riesz_equivalence_check",
    "trace_physical",
    "trace_fourier",
]


class DegenerateInputError(ValueError):
    """Input for which a quotient or residual has a vanishing denominator."""


def frac_laplacian(f: SpectralField, alpha: float) -> SpectralField:
    """``(-Delta)^alpha f``: multiply coefficients by ``|2 pi k|^{2 alpha}``."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    return SpectralField.from_coefficients(f.grid, f.coeffs * dalpha_weight(f.grid, alpha))


def riesz_potential(g: SpectralField, alpha: float) -> SpectralField:
    """Coefficients ``g^(k) / |k|^{2 alpha}``; the k = 0 coefficient is set to 0.

    In the continuum this equals ``riesz_constant(n, alpha) * (|x|^{-(n-2 alpha)} * g)``.
    The zero mode has no periodic counterpart, so inputs should be (close to)
    mean-zero.
    """
    alpha = float(alpha)
    if not 0 < alpha < g.n / 2:
        raise DomainError(f"riesz_potential needs 0 < alpha < n/2, got alpha={alpha}, n={g.n}")
    mult = _multiplier_power(g.grid.kmag(), -2 * alpha, 0.0)
    return SpectralField.from_coefficients(g.grid, g.coeffs * mult)


@lru_cache(maxsize=64)
def cell_kernel_integral(spacing: tuple[float, ...], power: float) -> float:
    """``int_cell |z|^{-power} dz`` over the centred cell ``prod [-h_j/2, h_j/2]``.

    Splits the cell into cones over its faces: each face at distance ``a``
    contributes ``a / (n - power) * int_face |y|^{-power} dA``. Requires
    ``power < n``.
    """
    half = [h / 2 for h in spacing]
    n = len(half)
    if not power < n:
        raise DomainError(f"kernel |z|^-{power} is not integrable in dimension {n}")
    total = 0.0
    for i, a in enumerate(half):
        rest = half[:i] + half[i + 1:]
        if n == 1:
            face = 1.0 * a ** (-power)
        elif n == 2:
            (b,) = rest
            face = 2 * integrate.quad(lambda t: (a * a + t * t) ** (-power / 2), 0, b, epsabs=0, epsrel=1e-13)[0]
        else:
            b, c = rest
            face = 4 * integrate.dblquad(
                lambda t, s: (a * a + s * s + t * t) ** (-power / 2), 0, b, 0, c, epsabs=0, epsrel=1e-12
            )[0]
        # two opposite faces per axis
        total += 2 * a * face
    return total / (n - power)


_NEAR_CELLS = 3
_GAUSS_POINTS = 24


@lru_cache(maxsize=64)
def _near_field_averages(spacing: tuple[float, ...], power: float) -> dict:
    """Cell averages of ``|z|^{-power}`` for cells with ``max |d_j| <= _NEAR_CELLS``.

    Keyed by the tuple of ``|d_j|``; the kernel is even in every coordinate.
    """
    n = len(spacing)
    x, w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    out = {}
    ranges = [range(_NEAR_CELLS + 1)] * n
    for d in np.ndindex(*[len(r) for r in ranges]):
        if not any(d):
            out[d] = cell_kernel_integral(spacing, power) / math.prod(spacing)
            continue
        nodes = [dj * h + 0.5 * h * x for dj, h in zip(d, spacing)]
        mesh = np.meshgrid(*nodes, indexing="ij")
        wmesh = np.ones([_GAUSS_POINTS] * n)
        for j in range(n):
            shape = [1] * n
            shape[j] = -1
            wmesh = wmesh * (0.5 * w).reshape(shape)
        r2 = sum(m**2 for m in mesh)
        out[d] = float(np.sum(wmesh * r2 ** (-power / 2)))
    return out


def _min_image_kernel(grid: BoxGrid, power: float) -> np.ndarray:
    """Cell-averaged ``|z|^{-power}`` at minimum-image displacements, FFT order.

    Cells within ``_NEAR_CELLS`` of the origin are averaged by quadrature (the
    origin cell exactly); farther cells use the midpoint value plus the
    second-order term ``sum_j h_j^2 / 24 d_j^2 K``.
    """
    n = grid.n
    comps = []
    idx = []
    for j, (N, h) in enumerate(zip(grid.sizes, grid.spacing)):
        d = np.arange(N)
        d = np.where(d < N // 2, d, d - N)
        shape = [1] * n
        shape[j] = -1
        comps.append((d * h).reshape(shape))
        idx.append(np.abs(d))
    r2 = sum(c**2 for c in comps) + np.zeros(grid.shape)
    zero = (0,) * n
    r2[zero] = 1.0
    p = power
    ker = r2 ** (-p / 2)
    lap = np.zeros(grid.shape)
    for c, h in zip(comps, grid.spacing):
        lap = lap + (h * h / 24) * (-p * r2 ** (-p / 2 - 1) + p * (p + 2) * c**2 * r2 ** (-p / 2 - 2))
    ker = ker + lap
    near = _near_field_averages(grid.spacing, float(power))
    for d, val in near.items():
        if any(dj > N // 2 for dj, N in zip(d, grid.sizes)):
            continue
        for signs in np.ndindex(*([2] * n)):
            pos = tuple((dj if s == 0 else -dj) % N for dj, s, N in zip(d, signs, grid.sizes))
            ker[pos] = val
    return ker


def riesz_double_sum(g: SpectralField, alpha: float) -> complex:
    """``dx^2 sum_{x,y} conj(g(x)) g(y) |x - y|^{-(n - 2 alpha)}`` with minimum images.

    The kernel entry for each pair of cells is the average of the kernel over
    the source cell (exact on the diagonal, see :func:`_min_image_kernel`).
    Evaluated as a circular convolution through the FFT.
    """
    alpha = float(alpha)
    if not 0 < alpha < g.n / 2:
        raise DomainError(f"need 0 < alpha < n/2, got alpha={alpha}, n={g.n}")
    grid = g.grid
    ker = _min_image_kernel(grid, g.n - 2 * alpha)
    v = g.values
    conv = np.fft.ifftn(np.fft.fftn(ker) * np.fft.fftn(v))
    return complex(grid.dx**2 * np.vdot(v, conv))


def riesz_double_sum_direct(g: SpectralField, alpha: float, chunk: int = 256) -> complex:
    """Pair-by-pair evaluation of :func:`riesz_double_sum`; quadratic cost, for cross-checks."""
    grid = g.grid
    ker = _min_image_kernel(grid, g.n - 2 * alpha)
    lab = np.stack([i.ravel() for i in np.indices(grid.shape)], axis=1)
    sizes = np.array(grid.sizes)
    v = g.values.ravel()
    total = 0.0 + 0.0j
    for start in range(0, len(lab), chunk):
        d = (lab[start:start + chunk, None, :] - lab[None, :, :]) % sizes
        block = ker[tuple(d[..., j] for j in range(grid.n))]
        total += np.vdot(v[start:start + chunk], block @ v)
    return complex(grid.dx**2 * total)


def riesz_equivalence_terms(g: SpectralField, alpha: float) -> tuple[float, float]:
    """Fourier side ``dk sum_{k != 0} |g^|^2 / |k|^{2 alpha}`` and the scaled real-space double sum."""
    alpha = float(alpha)
    if not 0 < alpha < g.n / 2:
        raise DomainError(f"need 0 < alpha < n/2, got alpha={alpha}, n={g.n}")
    mult = _multiplier_power(g.grid.kmag(), -2 * alpha, 0.0)
    lhs = float(g.grid.dk * np.sum(np.abs(g.coeffs) ** 2 * mult))
    rhs = riesz_constant(g.n, alpha) * riesz_double_sum(g, alpha).real
    return lhs, rhs


def riesz_equivalence_check(g: SpectralField, alpha: float) -> float:
    """Relative gap between the two sides of the Riesz energy identity."""
    lhs, rhs = riesz_equivalence_terms(g, alpha)
    if not lhs > 0:
        raise DegenerateInputError("Fourier side of the Riesz identity is not positive")
    return abs(lhs - rhs) / abs(lhs)


@dataclass(frozen=True)
class TraceSlice:
    """Restriction to ``x_{n-m+1} = ... = x_n = 0``; the target keeps the first ``n - m`` axes."""

    source_grid: BoxGrid
    target_grid: BoxGrid
    m: int


def trace_slice(grid: BoxGrid, m: int) -> TraceSlice:
    if not 1 <= m < grid.n:
        raise DomainError(f"trace needs 1 <= m < n, got m={m}, n={grid.n}")
    return TraceSlice(grid, grid.sub_grid(range(grid.n - m)), m)


def trace_physical(f: SpectralField, m: int) -> SpectralField:
    """Samples ``f(x_1, .., x_{n-m}, 0, .., 0)``; the origin is always a lattice point."""
    ts = trace_slice(f.grid, m)
    idx = (slice(None),) * (f.n - m) + f.grid.origin_index[f.n - m:]
    return SpectralField(ts.target_grid, f.values[idx])


def trace_fourier(f: SpectralField, m: int) -> SpectralField:
    """``(tau_m f)^(k_1) = dk_2 sum_{k_2} f^(k_1, k_2)`` on the retained frequency axes."""
    ts = trace_slice(f.grid, m)
    dk2 = math.prod(1.0 / L for L in f.grid.lengths[f.n - m:])
    coeffs = dk2 * f.coeffs.sum(axis=tuple(range(f.n - m, f.n)))
    return SpectralField.from_coefficients(ts.target_grid, coeffs)
