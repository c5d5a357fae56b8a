"""Numerical re-discovery of optimizers by projected gradient ascent.

The quotient ``Q(f) = ||f||_s^2 / ||f||_{D_alpha}^2`` is maximised over the
Fourier coefficients of a real field. Iterates live on the unit sphere of the
``D_alpha`` norm; the variable ``u = |2 pi k|^alpha f^`` turns that sphere into
an ordinary Euclidean one, so the denominator never needs a line search. The
zero mode is held at 0 because ``D_alpha`` cannot see it and the quotient is
unbounded along it.

Gradients are taken with respect to the real and imaginary parts of every
coefficient and packed as ``dQ/dRe c + i dQ/dIm c``, so that
``dQ = Re sum conj(G) dc``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize as _sopt

from .constants import FracIndex
from .extremizers import ExtremizerSpec
from .families import band_limited_noise
from .field import SpectralField, dalpha_weight, sobolev_exponent
from .operators import DegenerateInputError, trace_physical
from .specfun import DomainError

__all__ = [
    "ASCENT_KINDS",
    "AscentConfig",
    "AscentTrace",
    "NumericalError",
    "FitError",
    "quotient",
    "quotient_gradient",
    "projected_gradient_norm",
    "random_start",
    "ascend",
    "fit_extremizer",
]

ASCENT_KINDS = ("sobolev", "trace_sobolev")


class NumericalError(RuntimeError):
    """Non-finite value met during ascent; ``trace`` holds the iterations so far."""

    def __init__(self, msg: str, trace: "AscentTrace | None" = None):
        super().__init__(msg)
        self.trace = trace


class FitError(ValueError):
    """The field has no clear peak to anchor a fit."""


@dataclass(frozen=True)
class AscentConfig:
    max_iters: int = 2000
    step: float = 1.0
    step_decay: float = 0.5
    grad_tol: float = 1e-9
    seed: int = 0
    constraint: str = "unit_dalpha_norm"
    # relative quotient gain below which ``stall_iters`` quiet steps end the run
    stall_tol: float = 1e-10
    stall_iters: int = 50

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not 0 < self.step_decay < 1:
            raise ValueError("step_decay must lie in (0, 1)")
        if not self.grad_tol >= 0:
            raise ValueError("grad_tol must be non-negative")
        if self.constraint != "unit_dalpha_norm":
            raise ValueError(f"unknown constraint {self.constraint!r}")


@dataclass
class AscentTrace:
    quotients: list[float]
    grad_norms: list[float]
    steps: list[float]
    field: SpectralField
    converged: bool
    iterations_used: int
    reason: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def final_quotient(self) -> float:
        return self.quotients[-1]

    def to_csv(self, path) -> None:
        """Write ``iter,quotient,grad_norm,step`` rows (UTF-8, LF endings)."""
        with open(Path(path), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "quotient", "grad_norm", "step"])
            for i, row in enumerate(zip(self.quotients, self.grad_norms, self.steps)):
                w.writerow([i, *(repr(float(v)) for v in row)])


# --- objective and gradient ----------------------------------------------------------


def _check(f: SpectralField, idx: FracIndex, kind: str) -> None:
    if kind not in ASCENT_KINDS:
        raise DomainError(f"kind must be one of {ASCENT_KINDS}, got {kind!r}")
    if f.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    if kind == "sobolev" and idx.m != 0:
        raise DomainError("kind 'sobolev' needs m = 0")
    if kind == "trace_sobolev" and idx.m < 1:
        raise DomainError("kind 'trace_sobolev' needs m >= 1")


def _numerator_and_gradient(f: SpectralField, idx: FracIndex, kind: str):
    """``P = ||f||_s^2`` (or of the trace) and ``dP/dc`` in packed form."""
    s = sobolev_exponent(idx)
    g = f.grid
    if kind == "sobolev":
        vals, dx = f.values, g.dx
    else:
        tr = trace_physical(f, idx.m)
        vals, dx = tr.values, tr.grid.dx
    a = np.abs(vals)
    peak = a.max()
    if peak == 0:
        raise DegenerateInputError("numerator vanishes")
    # scale by the peak so |f|^s stays finite for large s
    rel = a / peak
    mass = dx * np.sum(rel**s)
    P = peak**2 * mass ** (2 / s)
    # dP/df_j = 2 mass^{2/s - 1} dx |f_j|^{s-2} f_j, rescaled to absolute units
    w = 2 * mass ** (2 / s - 1) * dx * rel ** (s - 2) * vals
    if kind == "sobolev":
        v = w
    else:
        v = np.zeros(g.shape, dtype=complex)
        v[(slice(None),) * (idx.n - idx.m) + g.origin_index[idx.n - idx.m:]] = w
    # adjoint of c -> values is (dk/dx) * forward transform
    G = (g.dk / g.dx) * g.dx * g._phase() * np.fft.fftn(v)
    return P, G


def quotient(f: SpectralField, idx: FracIndex, kind: str = "sobolev") -> float:
    """Raw (unnormalised) quotient used by the ascent."""
    _check(f, idx, kind)
    P, _ = _numerator_and_gradient(f, idx, kind)
    D = float(f.grid.dk * np.sum(dalpha_weight(f.grid, idx.alpha) * np.abs(f.coeffs) ** 2))
    if not D > 0:
        raise DegenerateInputError("||f||_{D_alpha} vanishes")
    return P / D


def quotient_gradient(f: SpectralField, idx: FracIndex, kind: str = "sobolev") -> SpectralField:
    """Gradient of the quotient with respect to the Fourier coefficients of ``f``."""
    _check(f, idx, kind)
    w = dalpha_weight(f.grid, idx.alpha)
    c = f.coeffs
    D = float(f.grid.dk * np.sum(w * np.abs(c) ** 2))
    if not D > 0:
        raise DegenerateInputError("||f||_{D_alpha} vanishes")
    P, gP = _numerator_and_gradient(f, idx, kind)
    gD = 2 * f.grid.dk * w * c
    return SpectralField.from_coefficients(f.grid, (gP * D - P * gD) / D**2)


# --- ascent on the unit D_alpha sphere ---------------------------------------------------


class _Sphere:
    """Coordinates ``u = sqrt(w) c`` with inner product ``dk Re sum conj(u) v``."""

    def __init__(self, f0: SpectralField, idx: FracIndex):
        self.grid = f0.grid
        w = dalpha_weight(self.grid, idx.alpha)
        self.active = w > 0
        self.sqrt_w = np.sqrt(w)
        self.inv_sqrt_w = np.where(self.active, 1.0 / np.where(self.active, self.sqrt_w, 1.0), 0.0)

    def norm(self, u) -> float:
        return math.sqrt(self.grid.dk * float(np.sum(np.abs(u) ** 2)))

    def dot(self, u, v) -> float:
        return self.grid.dk * float(np.sum((np.conj(u) * v).real))

    def to_u(self, f: SpectralField) -> np.ndarray:
        return np.where(self.active, self.sqrt_w * f.coeffs, 0.0)

    def to_field(self, u) -> SpectralField:
        c = self.inv_sqrt_w * u
        # keep the physical field real (Hermitian symmetry of c)
        return SpectralField(self.grid, SpectralField.from_coefficients(self.grid, c).values.real)

    def project(self, u) -> np.ndarray:
        return u / self.norm(u)


def projected_gradient_norm(f: SpectralField, idx: FracIndex, kind: str = "sobolev") -> float:
    """Norm of the quotient gradient tangent to the ``D_alpha`` sphere through ``f``.

    Measured in the ``u`` coordinates of the ascent and scaled to a unit-norm ``f``,
    so it is invariant under ``f -> c f``.
    """
    sph = _Sphere(f, idx)
    u = sph.to_u(f)
    r = sph.norm(u)
    if r == 0:
        raise DegenerateInputError("||f||_{D_alpha} vanishes")
    g = quotient_gradient(f, idx, kind).coeffs
    gu = np.where(sph.active, g * sph.inv_sqrt_w, 0.0) / sph.grid.dk
    un = u / r
    tang = gu - sph.dot(gu, un) * un
    # Q is homogeneous of degree 0, so the gradient scales like 1/|f|
    return sph.norm(tang) * r


def random_start(grid, seed: int, bandwidth: float | None = None) -> SpectralField:
    """Band-limited random start, reproducible from ``seed``."""
    return band_limited_noise(grid, seed, bandwidth)


def ascend(f0: SpectralField, idx: FracIndex, kind: str = "sobolev", cfg: AscentConfig | None = None) -> AscentTrace:
    """Maximise the quotient by projected gradient ascent with backtracking.

    A trial step ``u + t g`` (``g`` the tangent gradient) is projected back to
    the sphere and accepted only if the quotient does not decrease; otherwise
    ``t`` shrinks by ``step_decay``. Accepted steps let ``t`` grow back by the
    same factor. The run stops when the tangent gradient falls below
    ``grad_tol`` (relative to the quotient), when the quotient stalls, or at
    ``max_iters``.
    """
    cfg = cfg or AscentConfig()
    _check(f0, idx, kind)
    sph = _Sphere(f0, idx)
    u = sph.to_u(f0)
    if sph.norm(u) == 0:
        raise DegenerateInputError("starting field has zero D_alpha norm")
    u = sph.project(u)
    f = sph.to_field(u)

    def evaluate(f):
        P, gP = _numerator_and_gradient(f, idx, kind)
        gu = np.where(sph.active, gP * sph.inv_sqrt_w, 0.0) / sph.grid.dk
        return P, gu

    P, gu = evaluate(f)
    tang = gu - sph.dot(gu, u) * u
    gn = sph.norm(tang)
    quotients, grad_norms, steps = [P], [gn], [0.0]
    t = cfg.step
    converged, reason, quiet = False, "max_iters", 0
    it = 0
    while it < cfg.max_iters:
        if not math.isfinite(gn):
            raise NumericalError("non-finite gradient", _trace(quotients, grad_norms, steps, f, False, it, "nan"))
        if gn <= cfg.grad_tol * P:
            converged, reason = True, "grad_tol"
            break
        it += 1
        accepted = False
        while t * gn > 1e-14 * P:
            u_try = sph.project(u + (t / P) * tang)
            f_try = sph.to_field(u_try)
            P_try, gu_try = evaluate(f_try)
            if not math.isfinite(P_try):
                raise NumericalError("non-finite quotient", _trace(quotients, grad_norms, steps, f, False, it, "nan"))
            if P_try >= P:
                accepted = True
                break
            t *= cfg.step_decay
        if not accepted:
            converged, reason = True, "step_underflow"
            break
        gain = (P_try - P) / P
        f, P, gu = f_try, P_try, gu_try
        u = sph.project(sph.to_u(f))
        tang = gu - sph.dot(gu, u) * u
        gn = sph.norm(tang)
        quotients.append(P)
        grad_norms.append(gn)
        steps.append(t)
        t = min(t / cfg.step_decay, 1e3 * cfg.step)
        quiet = quiet + 1 if gain < cfg.stall_tol else 0
        if quiet >= cfg.stall_iters:
            converged, reason = True, "stall"
            break
    return _trace(quotients, grad_norms, steps, f, converged, it, reason)


def _trace(quotients, grad_norms, steps, f, converged, it, reason) -> AscentTrace:
    return AscentTrace(list(quotients), list(grad_norms), list(steps), f, converged, it, reason)


# --- fitting the conformal family ------------------------------------------------------


def fit_extremizer(f: SpectralField, idx: FracIndex) -> tuple[ExtremizerSpec, float]:
    """Fit ``A (gamma^2 + |x - a|^2)^{-(n - 2 alpha)/2} + c`` to ``f``.

    The peak gives ``a`` and ``A gamma^{-2p}``; the radius where ``f`` drops
    to ``2^{-p}`` of its peak gives ``gamma``. A least-squares polish then
    refines ``(A, gamma, a, c)``; the offset ``c`` absorbs the mean removed
    with the zero mode. Returns the fitted spec and the relative L2 residual.
    """
    if idx.m != 0:
        raise DomainError("fit_extremizer fits the m = 0 family")
    if f.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    g = f.grid
    v = np.asarray(f.values)
    j = np.unravel_index(int(np.argmax(np.abs(v))), v.shape)
    peak = v[j]
    if peak == 0:
        raise FitError("field vanishes")
    y = (v * (np.conj(peak) / abs(peak))).real
    # centre the peak when it sits in the outer half of the box; periodic fields allow it
    shift = tuple(
        o - jj if abs(o - jj) > N // 4 else 0 for o, jj, N in zip(g.origin_index, j, g.sizes)
    )
    y = np.roll(y, shift, axis=tuple(range(g.n)))
    j = tuple((jj + s) % N for jj, s, N in zip(j, shift, g.sizes))
    offset = np.array([s * h for s, h in zip(shift, g.spacing)])
    mesh = g.mesh()
    p = (idx.n - 2 * idx.alpha) / 2
    base = float(np.median(y))
    height = y[j] - base
    if not height > 0 or height < 1e-6 * np.max(np.abs(y)) or np.sum(y - base > 0.5 * height) > 0.5 * y.size:
        raise FitError("no clear peak")
    a0 = np.array([ax[j] for ax in mesh], dtype=float)
    r2 = sum((ax - ai) ** 2 for ax, ai in zip(mesh, a0))
    # gamma: radius where y - base falls to 2^{-p} of its height
    mask = (y - base) >= height * 2.0 ** (-p)
    gam0 = max(math.sqrt(float(r2[mask].max())), 0.5 * min(g.spacing))
    A0 = height * gam0 ** (2 * p)
    scale = abs(peak)

    def model(theta):
        A, gam, c = theta[:3]
        rr = sum((ax - ai) ** 2 for ax, ai in zip(mesh, theta[3:]))
        return A * (gam**2 + rr) ** (-p) + c

    def resid(theta):
        return ((model(theta) - y) / scale).ravel()

    theta0 = np.concatenate([[A0, gam0, base], a0])
    sol = _sopt.least_squares(resid, theta0, x_scale="jac", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
    A, gam = sol.x[:2]
    a = sol.x[3:] - offset
    # report the centre inside the box
    a = np.array([(ai + L / 2) % L - L / 2 for ai, L in zip(a, g.lengths)])
    res = float(np.linalg.norm(model(sol.x) - y) / np.linalg.norm(y))
    spec = ExtremizerSpec("sobolev", idx, gamma=abs(float(gam)), A=float(A), a=tuple(float(x) for x in a))
    return spec, res
