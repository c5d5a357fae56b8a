"""Closed-form optimizers of the sharp inequalities, sampled pointwise or on grids.

Families (``A (gamma^2 + |x - a|^2)^{-p}`` unless noted):

* ``sobolev``: ``p = (n - 2 alpha)/2``, equality in the Sobolev inequality.
* ``hls``: ``p = (n + 2 alpha)/2``, equality in the HLS inequality.
* ``escobar``: ``A ((gamma + t)^2 + |x - a|^2)^{-(n-2)/2}`` on the half-space.
* ``trace``: the Riesz-type convolution

      f(x1, x2) = int_{R^{n-m}} (|x2|^2 + |x1 - y|^2)^{-(n - 2 alpha)/2}
                               (gamma^2 + |y - a|^2)^{-(n + 2 alpha - 2m)/2} dy

  with ``x1, a`` in R^{n-m} and ``x2`` in R^m, the inverse transform of
  ``g^(k1) / |k|^{2 alpha}`` for the HLS optimizer ``g`` in dimension n - m.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .constants import FracIndex, hls_constant
from .field import BoxGrid, SpectralField
from .specfun import DomainError, log_gamma

__all__ = [
    "FAMILIES",
    "QuadratureError",
    "ExtremizerSpec",
    "sobolev_extremizer",
    "hls_extremizer",
    "escobar_extremizer",
    "trace_extremizer",
    "sample_extremizer",
    "sample_trace_extremizer",
    "hls_transform",
    "fourier_trace_extremizer",
    "fourier_trace_extremizer_field",
    "riesz_convolution",
    "hls_euler_lagrange_ratio",
    "hls_euler_lagrange_constant",
]

FAMILIES = ("sobolev", "hls", "trace", "escobar")

QUAD_RTOL = 1e-6


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance; ``diagnostics`` says where."""

    def __init__(self, msg: str, diagnostics: dict):
        super().__init__(f"{msg}: {diagnostics}")
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ExtremizerSpec:
    """Parameters of one optimizer: amplitude ``A``, scale ``gamma``, centre ``a``.

    ``a`` lives in R^n for the sobolev/hls families, in R^{n-m} for trace, and
    in R^{n-1} (boundary coordinates) for escobar. It defaults to the origin.
    """

    family: str
    idx: FracIndex
    gamma: float = 1.0
    A: complex = 1.0
    a: tuple[float, ...] = field(default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not (math.isfinite(self.gamma) and self.gamma != 0):
            raise DomainError("gamma must be finite and non-zero")
        idx = self.idx
        if self.family in ("sobolev", "hls") and idx.m != 0:
            raise DomainError(f"{self.family} extremizers need m = 0")
        if self.family == "hls" and not idx.alpha > 0:
            raise DomainError("hls extremizers need alpha > 0")
        if self.family == "trace" and idx.m < 1:
            raise DomainError("trace extremizers need m >= 1")
        if self.family == "escobar" and idx.n < 3:
            raise DomainError("escobar extremizers need n >= 3")
        dim = self.center_dim
        a = np.zeros(dim) if self.a is None else np.atleast_1d(np.asarray(self.a, dtype=float))
        if a.shape != (dim,):
            raise DomainError(f"a must have {dim} components for family {self.family!r}")
        object.__setattr__(self, "a", tuple(float(v) for v in a))

    @property
    def center_dim(self) -> int:
        n, m = self.idx.n, self.idx.m
        return {"sobolev": n, "hls": n, "trace": n - m, "escobar": n - 1}[self.family]

    @property
    def exponent(self) -> float:
        """Power ``p`` in ``(gamma^2 + |x - a|^2)^{-p}`` (sobolev/hls families)."""
        n, a = self.idx.n, self.idx.alpha
        if self.family == "sobolev":
            return (n - 2 * a) / 2
        if self.family == "hls":
            return (n + 2 * a) / 2
        raise AttributeError(f"family {self.family!r} has no single exponent")


def _points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != d:
        raise ValueError(f"points must have trailing dimension {d}, got shape {x.shape}")
    return x


def _bump(spec: ExtremizerSpec, x) -> np.ndarray:
    x = _points(x, spec.center_dim)
    r2 = np.sum((x - np.array(spec.a)) ** 2, axis=-1)
    return spec.A * (spec.gamma**2 + r2) ** (-spec.exponent)


def sobolev_extremizer(spec: ExtremizerSpec, x):
    """``A (gamma^2 + |x - a|^2)^{-(n - 2 alpha)/2}`` at points ``x`` (trailing axis = coordinates)."""
    if spec.family != "sobolev":
        raise DomainError("spec.family must be 'sobolev'")
    return _bump(spec, x)


def hls_extremizer(spec: ExtremizerSpec, x):
    """``A (gamma^2 + |x - a|^2)^{-(n + 2 alpha)/2}``."""
    if spec.family != "hls":
        raise DomainError("spec.family must be 'hls'")
    return _bump(spec, x)


def escobar_extremizer(spec: ExtremizerSpec, x, t):
    """Half-space optimizer ``A ((gamma + t)^2 + |x - a|^2)^{-(n-2)/2}``, ``x`` in R^{n-1}, ``t >= 0``."""
    if spec.family != "escobar":
        raise DomainError("spec.family must be 'escobar'")
    x = _points(x, spec.idx.n - 1)
    r2 = np.sum((x - np.array(spec.a)) ** 2, axis=-1)
    return spec.A * ((abs(spec.gamma) + np.asarray(t, dtype=float)) ** 2 + r2) ** (-(spec.idx.n - 2) / 2)


def sample_extremizer(spec: ExtremizerSpec, grid: BoxGrid) -> SpectralField:
    """Sample a sobolev or hls extremizer on ``grid``."""
    if spec.family not in ("sobolev", "hls"):
        raise DomainError("use sample_trace_extremizer for the trace family")
    if grid.n != spec.idx.n:
        raise DomainError("grid dimension must equal idx.n")
    r2 = grid.radius_sq(spec.a)
    return SpectralField(grid, spec.A * (spec.gamma**2 + r2) ** (-spec.exponent))


# --- convolutions with a radial bump ------------------------------------------------


def _sphere_area(d: int) -> float:
    return 2 * math.pi ** (d / 2) / math.exp(log_gamma(d / 2))


def _shell_sum(d: int, r: float, rho: float, gamma2: float, q: float) -> float:
    """``int_{S^{d-1}} (gamma^2 + |x + r w - a|^2)^{-q} dw`` with ``rho = |x - a|``."""
    if d == 1:
        return (gamma2 + (rho + r) ** 2) ** (-q) + (gamma2 + (rho - r) ** 2) ** (-q)
    if d == 2:
        def ang(th):
            return (gamma2 + r * r + rho * rho - 2 * r * rho * math.cos(th)) ** (-q)
        val, _ = integrate.quad(ang, 0.0, math.pi, epsabs=0.0, epsrel=1e-11, limit=200)
        return 2 * val
    if d == 3:
        lo = gamma2 + (r - rho) ** 2
        hi = gamma2 + (r + rho) ** 2
        if r * rho == 0.0:
            return 4 * math.pi * (gamma2 + r * r + rho * rho) ** (-q)
        if q == 1.0:
            prim = math.log(hi) - math.log(lo)
        else:
            prim = (hi ** (1 - q) - lo ** (1 - q)) / (1 - q)
        return 2 * math.pi * prim / (2 * r * rho)
    raise DomainError(f"convolutions supported for 1 <= d <= 3, got d={d}")


def _radial_pieces(rho: float, gamma: float, R: float) -> list[float]:
    pts = {0.0, R}
    for v in (rho - 4 * gamma, rho - gamma, rho, rho + gamma, rho + 4 * gamma, 4 * gamma):
        if 0.0 < v < R:
            pts.add(v)
    return sorted(pts)


def _tail_bound(d: int, q: float, R: float) -> float:
    # for R >= 2 rho: |y - a| >= r/2 and the kernel is <= r^{-2p}; 2p + 2q = 2d
    return _sphere_area(d) * 2 ** (2 * q) * R ** (-d) / d


def _conv_scalar(d, p, q, gamma, rho, x2sq, rtol, where):
    """``int_{R^d} (x2sq + |x - y|^2)^{-p} (gamma^2 + |y - a|^2)^{-q} dy`` with ``|x - a| = rho``."""
    gamma2 = gamma * gamma
    c = 1.0 / (d - 2 * p)  # r = u^c removes the r^{d-1-2p} endpoint behaviour

    def integrand(u):
        # Gauss-Kronrod nodes are interior, so u > 0 here
        r = u**c
        return c * u ** (c - 1) * r ** (d - 1) * (x2sq + r * r) ** (-p) * _shell_sum(d, r, rho, gamma2, q)

    total = 0.0
    R = max(2 * rho, 8 * abs(gamma), 1.0)
    edges = _radial_pieces(rho, abs(gamma), R)
    while True:
        for lo, hi in zip(edges[:-1], edges[1:]):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, err = integrate.quad(
                        integrand, lo ** (1 / c), hi ** (1 / c), epsabs=0.0, epsrel=rtol * 1e-2, limit=400
                    )
                except integrate.IntegrationWarning as exc:
                    raise QuadratureError(
                        "trace quadrature did not converge",
                        {"point": where, "interval_r": (lo, hi), "warning": str(exc)},
                    ) from exc
            total += val
        if _tail_bound(d, q, R) <= rtol * total:
            return total
        edges = [R, 8 * R]
        R *= 8


def trace_extremizer(spec: ExtremizerSpec, x1, x2, rtol: float = QUAD_RTOL) -> float:
    """Evaluate the trace-family optimizer at one point ``(x1, x2)``.

    Adaptive quadrature over ``y`` in R^{n-m} in polar coordinates around
    ``x1``; the radial range is cut once the power-law tail bound drops below
    ``rtol`` times the accumulated integral. The amplitude ``A`` multiplies the
    result.
    """
    if spec.family != "trace":
        raise DomainError("spec.family must be 'trace'")
    n, m, alpha = spec.idx.n, spec.idx.m, spec.idx.alpha
    d = n - m
    x1 = _points(x1, d).reshape(d)
    x2 = _points(x2, m).reshape(m)
    rho = float(np.linalg.norm(x1 - np.array(spec.a)))
    x2sq = float(np.dot(x2, x2))
    p = (n - 2 * alpha) / 2
    q = (n + 2 * alpha - 2 * m) / 2
    val = _conv_scalar(d, p, q, spec.gamma, rho, x2sq, rtol, where=(x1.tolist(), x2.tolist()))
    return spec.A * val


def sample_trace_extremizer(spec: ExtremizerSpec, grid: BoxGrid, rtol: float = QUAD_RTOL) -> SpectralField:
    """Quadrature samples of the trace optimizer on an n-dimensional grid.

    For each retained-axes point ``x1`` the integral is computed at once for
    every distinct ``|x2|`` on the lattice with ``scipy.integrate.quad_vec``
    (same substitution and tail rule as :func:`trace_extremizer`).
    """
    if spec.family != "trace":
        raise DomainError("spec.family must be 'trace'")
    n, m, alpha = spec.idx.n, spec.idx.m, spec.idx.alpha
    if grid.n != n:
        raise DomainError("grid dimension must equal idx.n")
    d = n - m
    p = (n - 2 * alpha) / 2
    q = (n + 2 * alpha - 2 * m) / 2
    c = 1.0 / (d - 2 * p)
    gamma = abs(spec.gamma)
    gamma2 = gamma * gamma
    a = np.array(spec.a)

    g1 = grid.sub_grid(range(d))
    g2 = grid.sub_grid(range(d, n))
    x2sq_mesh = g2.radius_sq()
    x2sq_vals, inverse = np.unique(np.round(x2sq_mesh, 12), return_inverse=True)
    x1_mesh = np.stack([mm.ravel() for mm in g1.mesh()], axis=1)
    rhos = np.linalg.norm(x1_mesh - a, axis=1)
    rho_vals, rho_inv = np.unique(np.round(rhos, 12), return_inverse=True)

    table = np.empty((len(rho_vals), len(x2sq_vals)))
    for i, rho in enumerate(rho_vals):
        def integrand(u, rho=rho):
            r = u**c
            shell = _shell_sum(d, r, rho, gamma2, q)
            with np.errstate(divide="ignore"):
                ker = (x2sq_vals + r * r) ** (-p)
            return c * u ** (c - 1) * r ** (d - 1) * ker * shell

        total = np.zeros(len(x2sq_vals))
        R = max(2 * rho, 8 * gamma, 1.0)
        edges = _radial_pieces(rho, gamma, R)
        while True:
            for lo, hi in zip(edges[:-1], edges[1:]):
                val, err = integrate.quad_vec(
                    integrand, lo ** (1 / c), hi ** (1 / c), epsabs=0.0, epsrel=rtol * 1e-2, norm="max"
                )
                total += val
            if _tail_bound(d, q, R) <= rtol * total.min():
                break
            edges = [R, 8 * R]
            R *= 8
        table[i] = total

    vals = table[rho_inv][:, inverse.ravel()]
    vals = vals.reshape(g1.shape + g2.shape)
    return SpectralField(grid, spec.A * vals)


def riesz_convolution(spec: ExtremizerSpec, x, rtol: float = 1e-9) -> float:
    """``int g(y) |x - y|^{-(n - 2 alpha)} dy`` for an hls-family ``g`` at one point ``x``."""
    if spec.family != "hls":
        raise DomainError("spec.family must be 'hls'")
    n, alpha = spec.idx.n, spec.idx.alpha
    x = _points(x, n).reshape(n)
    rho = float(np.linalg.norm(x - np.array(spec.a)))
    val = _conv_scalar(n, (n - 2 * alpha) / 2, (n + 2 * alpha) / 2, spec.gamma, rho, 0.0, rtol, where=x.tolist())
    return spec.A * val


def hls_euler_lagrange_ratio(spec: ExtremizerSpec, xs) -> np.ndarray:
    """``(|.|^{-(n-2 alpha)} * g)(x) / g(x)^{r-1}`` at each point; constant for an optimizer."""
    n, alpha = spec.idx.n, spec.idx.alpha
    r = 2 * n / (n + 2 * alpha)
    pts = _points(xs, n).reshape(-1, n)
    conv = np.array([riesz_convolution(spec, x) for x in pts])
    g = np.abs(hls_extremizer(spec, pts))
    return conv / g ** (r - 1)


def hls_euler_lagrange_constant(spec: ExtremizerSpec) -> float:
    """Value of :func:`hls_euler_lagrange_ratio` forced by equality: ``H ||g||_r^{2 - r}``.

    Uses ``int (gamma^2 + |x|^2)^{-n} dx = pi^{n/2} Gamma(n/2) / (Gamma(n) gamma^n)``.
    """
    n, alpha = spec.idx.n, spec.idx.alpha
    r = 2 * n / (n + 2 * alpha)
    g_r_pow_r = abs(spec.A) ** r * math.exp(
        (n / 2) * math.log(math.pi) + log_gamma(n / 2) - log_gamma(n) - n * math.log(abs(spec.gamma))
    )
    return hls_constant(n, alpha) * g_r_pow_r ** ((2 - r) / r)


# --- Fourier-side construction ------------------------------------------------------


def hls_transform(idx: FracIndex, gamma: float, a, grid1: BoxGrid) -> SpectralField:
    """HLS optimizer of dimension ``n - m`` and order ``alpha - m/2`` sampled on ``grid1``, with its transform."""
    d = idx.n - idx.m
    if grid1.n != d:
        raise DomainError(f"grid must have dimension n - m = {d}")
    g_idx = FracIndex(d, 0, idx.trace_alpha)
    spec = ExtremizerSpec("hls", g_idx, gamma=gamma, a=a)
    g = sample_extremizer(spec, grid1)
    g.coeffs  # noqa: B018 - populate the cache
    return g


def fourier_trace_extremizer(idx: FracIndex, gamma: float, a, k1, k2, ghat: SpectralField | None = None):
    """``g^(k1) / (|k1|^2 + |k2|^2)^alpha`` at lattice frequencies ``k1`` of ``ghat``.

    ``ghat`` defaults to :func:`hls_transform` on a 1024-point-per-axis box of
    side 64. The trace zero mode ``k1 = 0`` maps to 0: a periodic box carries
    no counterpart of the continuum zero frequency.
    """
    d = idx.n - idx.m
    if ghat is None:
        ghat = hls_transform(idx, gamma, a, BoxGrid.cube(d, 1024, 64.0))
    k1 = _points(k1, d).reshape(d)
    k2 = _points(k2, idx.m).reshape(idx.m)
    if not np.any(k1):
        return 0.0 + 0.0j
    g = ghat.coeffs[ghat.grid.freq_position(k1)]
    return g / (np.dot(k1, k1) + np.dot(k2, k2)) ** idx.alpha


def fourier_trace_extremizer_field(idx: FracIndex, gamma: float, grid: BoxGrid, a=None) -> SpectralField:
    """Lattice field with coefficients ``g^(k1) / (|k1|^2 + |k2|^2)^alpha`` (zero on ``k1 = 0``).

    ``g^`` is the discrete transform of the HLS optimizer sampled on the
    retained axes of ``grid``.
    """
    d = idx.n - idx.m
    if grid.n != idx.n:
        raise DomainError("grid dimension must equal idx.n")
    a = np.zeros(d) if a is None else a
    g = hls_transform(idx, gamma, a, grid.sub_grid(range(d)))
    ghat = np.array(g.coeffs)
    k1_zero = tuple([0] * d)
    ghat[k1_zero] = 0.0
    k2 = grid.kmag() ** 2
    shape = ghat.shape + (1,) * idx.m
    with np.errstate(divide="ignore"):
        mult = np.where(k2 > 0, k2 ** (-idx.alpha), 0.0)
    return SpectralField.from_coefficients(grid, ghat.reshape(shape) * mult)
