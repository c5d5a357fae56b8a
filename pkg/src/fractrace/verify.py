"""Rayleigh quotients of the sharp inequalities on sampled fields.

Each quotient is the left side of an inequality over its right-side norm,
divided by the sharp constant to give ``ratio``; ``ratio <= 1`` up to
discretisation error for every field, with ``ratio -> 1`` for optimizers.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import FracIndex, composed_constant, hls_constant, sobolev_constant, trace_constant
from .field import SpectralField, dalpha_norm_sq, lp_norm, sobolev_exponent
from .operators import DegenerateInputError, riesz_double_sum, trace_fourier, trace_physical
from .specfun import DomainError, log_gamma

__all__ = [
    "KINDS",
    "RayleighReport",
    "lp_tail_bound",
    "sobolev_quotient",
    "trace_norm_quotient",
    "trace_sobolev_quotient",
    "hls_quotient",
]

KINDS = ("sobolev", "trace_norm", "trace_sobolev", "hls")


@dataclass
class RayleighReport:
    kind: str
    quotient: float
    sharp_constant: float
    ratio: float
    grid: dict
    idx: FracIndex
    tail_budget: float = 0.0
    notes: list[str] = field(default_factory=list)
    wall_time_ms: float = 0.0

    def within_bound(self, slack: float = 0.0) -> bool:
        return self.ratio <= 1.0 + self.tail_budget + slack

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.idx.n,
            "m": self.idx.m,
            "alpha": self.idx.alpha,
            "L": self.grid["L"],
            "N": self.grid["N"],
            "quotient": self.quotient,
            "sharp_constant": self.sharp_constant,
            "ratio": self.ratio,
            "tail_budget": self.tail_budget,
            "notes": list(self.notes),
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def lp_tail_bound(f: SpectralField, p: float, decay: float) -> float:
    """Relative mass of ``|f|^p`` outside the box under the model ``|f(x)| <= C |x|^{-decay}``.

    ``C`` is fitted to the largest sample on the outer shell
    ``R/2 <= |x| <= R`` (``R`` = half the shortest side). Returns ``inf`` when
    the model tail is not integrable.
    """
    n = f.n
    if not decay * p > n:
        return math.inf
    R = min(f.grid.lengths) / 2
    r = np.sqrt(f.grid.radius_sq())
    shell = (r >= R / 2) & (r <= R)
    C = float(np.max(np.abs(f.values[shell]) * r[shell] ** decay))
    area = 2 * math.pi ** (n / 2) / math.exp(log_gamma(n / 2))
    tail = C**p * area * R ** (n - decay * p) / (decay * p - n)
    total = lp_norm(f, p) ** p
    return tail / total


def _notes_zero_mode(f: SpectralField) -> list[str]:
    c0 = abs(f.coeffs[(0,) * f.n])
    l2 = math.sqrt(f.grid.dk * float(np.sum(np.abs(f.coeffs) ** 2)))
    if l2 == 0:
        return []
    frac = c0 * math.sqrt(f.grid.dk) / l2
    if frac > 1e-3:
        return [f"zero mode carries {frac:.3g} of the L2 norm and is invisible to D_alpha"]
    return []


def _budget(f: SpectralField, p: float, decay: float | None, notes: list[str]) -> float:
    if decay is None:
        notes.append("no decay model given; tail budget not estimated")
        return 0.0
    tail = lp_tail_bound(f, p, decay)
    # ||f||_p^2 grows by (1 + tail)^{2/p} once the tail is restored
    return (1 + tail) ** (2 / p) - 1


def _positive(x: float, what: str) -> float:
    if not x > 0:
        raise DegenerateInputError(f"{what} is {x}; quotient undefined")
    return x


def _report(kind, q, sharp, f, idx, budget, notes, t0) -> RayleighReport:
    return RayleighReport(
        kind=kind,
        quotient=q,
        sharp_constant=sharp,
        ratio=q / sharp,
        grid=f.grid.summary(),
        idx=idx,
        tail_budget=budget,
        notes=notes,
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )


def sobolev_quotient(f: SpectralField, idx: FracIndex, decay: float | None = None) -> RayleighReport:
    """``||f||_s^2 / ||f||_{D_alpha}^2`` against ``sobolev_constant(n, alpha)``.

    ``decay`` is the power-law decay rate of ``|f|`` used for the tail budget.
    """
    t0 = time.perf_counter()
    if idx.m != 0:
        raise DomainError("sobolev_quotient needs m = 0")
    if f.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    s = sobolev_exponent(idx)
    den = _positive(dalpha_norm_sq(f, idx.alpha), "||f||_{D_alpha}^2")
    notes = _notes_zero_mode(f) if idx.alpha > 0 else []
    budget = _budget(f, s, decay, notes)
    q = lp_norm(f, s) ** 2 / den
    return _report("sobolev", q, sobolev_constant(idx.n, idx.alpha), f, idx, budget, notes, t0)


def trace_norm_quotient(f: SpectralField, idx: FracIndex) -> RayleighReport:
    """``||tau_m f||^2_{D_{alpha - m/2}} / ||f||^2_{D_alpha}`` against ``trace_constant(m, alpha)``."""
    t0 = time.perf_counter()
    if idx.m < 1:
        raise DomainError("trace_norm_quotient needs m >= 1")
    if f.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    den = _positive(dalpha_norm_sq(f, idx.alpha), "||f||_{D_alpha}^2")
    num = dalpha_norm_sq(trace_fourier(f, idx.m), idx.trace_alpha)
    notes = ["tail budget: quotient is computed in Fourier space; k2 truncation bias is downward"]
    return _report("trace_norm", num / den, trace_constant(idx.m, idx.alpha), f, idx, 0.0, notes, t0)


def trace_sobolev_quotient(f: SpectralField, idx: FracIndex, decay: float | None = None) -> RayleighReport:
    """``||tau_m f||^2_{L^q} / ||f||^2_{D_alpha}``, ``q = 2(n-m)/(n-2 alpha)``, against C_{m,alpha,n}."""
    t0 = time.perf_counter()
    if idx.m < 1:
        raise DomainError("trace_sobolev_quotient needs m >= 1")
    if f.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    qexp = sobolev_exponent(idx)
    den = _positive(dalpha_norm_sq(f, idx.alpha), "||f||_{D_alpha}^2")
    tr = trace_physical(f, idx.m)
    notes = _notes_zero_mode(f)
    budget = _budget(tr, qexp, decay, notes)
    q = lp_norm(tr, qexp) ** 2 / den
    return _report("trace_sobolev", q, composed_constant(idx), f, idx, budget, notes, t0)


def hls_quotient(g: SpectralField, idx: FracIndex, decay: float | None = None) -> RayleighReport:
    """``sum sum g(x) g(y) |x - y|^{-(n-2 alpha)} / ||g||_r^2``, ``r = 2n/(n + 2 alpha)``, against H(n, alpha)."""
    t0 = time.perf_counter()
    if idx.m != 0:
        raise DomainError("hls_quotient needs m = 0")
    if g.n != idx.n:
        raise DomainError("field dimension must equal idx.n")
    r = 2 * idx.n / (idx.n + 2 * idx.alpha)
    den = _positive(lp_norm(g, r) ** 2, "||g||_r^2")
    num = riesz_double_sum(g, idx.alpha).real
    notes: list[str] = []
    budget = _budget(g, r, decay, notes)
    return _report("hls", num / den, hls_constant(idx.n, idx.alpha), g, idx, budget, notes, t0)
