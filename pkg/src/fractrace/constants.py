"""Sharp constants of the fractional Sobolev, HLS and trace inequalities.

All constants bound ratios of *squared* norms, e.g.

    ||tau_m f||^2_{L^q(R^{n-m})} <= composed_constant(idx) * ||f||^2_{D_alpha(R^n)}

with ``q = 2(n-m)/(n-2 alpha)``. Each constant is assembled in log space from
:func:`fractrace.specfun.log_gamma`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .specfun import DomainError, log_gamma

__all__ = [
    "FracIndex",
    "ConstantsRecord",
    "escobar_constant",
    "sobolev_constant",
    "hls_constant",
    "riesz_constant",
    "trace_constant",
    "composed_constant",
    "xiao_constant",
    "xiao_reduction_factor",
    "constants_record",
]

_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)


@dataclass(frozen=True)
class FracIndex:
    """Dimension ``n``, codimension ``m`` and order ``alpha`` of one inequality.

    With ``m >= 1`` the trace range ``m/2 < alpha < n/2`` is enforced; with
    ``m == 0`` (plain Sobolev) ``0 <= alpha < n/2``.
    """

    n: int
    m: int = 0
    alpha: float = 0.0

    def __post_init__(self):
        n, m, alpha = self.n, self.m, float(self.alpha)
        if int(n) != n or n < 1:
            raise DomainError(f"n must be a positive integer, got {n!r}")
        if int(m) != m or not 0 <= m < n:
            raise DomainError(f"m must be an integer with 0 <= m < n, got m={m!r}, n={n}")
        if not math.isfinite(alpha):
            raise DomainError(f"alpha must be finite, got {alpha!r}")
        if not alpha < n / 2:
            raise DomainError(f"need alpha < n/2 = {n / 2}, got {alpha}")
        if m == 0 and alpha < 0:
            raise DomainError(f"need alpha >= 0, got {alpha}")
        if m >= 1 and not alpha > m / 2:
            raise DomainError(f"need alpha > m/2 = {m / 2}, got {alpha}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "alpha", alpha)

    @property
    def trace_dim(self) -> int:
        """Dimension ``n - m`` of the hyperplane receiving the trace."""
        return self.n - self.m

    @property
    def trace_alpha(self) -> float:
        """Order ``alpha - m/2`` of the traced function."""
        return self.alpha - self.m / 2


def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def _int_dim(n, lower: int, name: str = "n") -> int:
    _require(int(n) == n and n >= lower, f"{name} must be an integer >= {lower}, got {n!r}")
    return int(n)


def escobar_constant(n: int) -> float:
    """Escobar's constant for the half-space gradient trace inequality (n >= 3)."""
    n = _int_dim(n, 3)
    log_ratio = log_gamma(n - 1) - log_gamma((n - 1) / 2)
    return math.exp(log_ratio / (n - 1)) / (math.sqrt(math.pi) * (n - 2))


def _log_sobolev(n: int, alpha: float) -> float:
    if alpha == 0.0:
        return 0.0
    return (
        -2 * alpha * _LOG_2
        - alpha * _LOG_PI
        + log_gamma(n / 2 - alpha)
        - log_gamma(n / 2 + alpha)
        + (2 * alpha / n) * (log_gamma(n) - log_gamma(n / 2))
    )


def sobolev_constant(n: int, alpha: float) -> float:
    """Sharp S(n, alpha) in ``||f||_s^2 <= S ||f||_{D_alpha}^2``, s = 2n/(n - 2 alpha)."""
    n = _int_dim(n, 1)
    alpha = float(alpha)
    _require(0 <= alpha < n / 2, f"sobolev_constant needs 0 <= alpha < n/2, got n={n}, alpha={alpha}")
    return math.exp(_log_sobolev(n, alpha))


def hls_constant(n: int, alpha: float) -> float:
    """Sharp HLS constant for the kernel ``|x - y|^{-(n - 2 alpha)}`` and ``r = 2n/(n + 2 alpha)``."""
    n = _int_dim(n, 1)
    alpha = float(alpha)
    _require(0 < alpha < n / 2, f"hls_constant needs 0 < alpha < n/2, got n={n}, alpha={alpha}")
    return math.exp(
        (n / 2 - alpha) * _LOG_PI
        + log_gamma(alpha)
        - log_gamma(n / 2 + alpha)
        + (2 * alpha / n) * (log_gamma(n) - log_gamma(n / 2))
    )


def riesz_constant(n: int, alpha: float) -> float:
    """Prefactor c with ``int |g^(k)|^2 |k|^{-2 alpha} dk = c * (g, |x|^{-(n-2 alpha)} * g)``.

    Also the kernel normalisation of the inverse transform of ``|k|^{-2 alpha}``.
    """
    n = _int_dim(n, 1)
    alpha = float(alpha)
    _require(0 < alpha < n / 2, f"riesz_constant needs 0 < alpha < n/2, got n={n}, alpha={alpha}")
    return math.exp((-n / 2 + 2 * alpha) * _LOG_PI + log_gamma(n / 2 - alpha) - log_gamma(alpha))


def trace_constant(m: int, alpha: float) -> float:
    """Sharp T(m, alpha) in ``||tau_m f||^2_{D_{alpha - m/2}} <= T ||f||^2_{D_alpha}``."""
    m = _int_dim(m, 1, "m")
    alpha = float(alpha)
    _require(alpha > m / 2, f"trace_constant needs alpha > m/2, got m={m}, alpha={alpha}")
    return math.exp(
        -m * _LOG_2 - (m / 2) * _LOG_PI + log_gamma(alpha - m / 2) - log_gamma(alpha)
    )


def composed_constant(idx: FracIndex) -> float:
    """Sharp trace-Sobolev constant C_{m, alpha, n} for ``m >= 1``."""
    _require(idx.m >= 1, "composed_constant needs m >= 1")
    n, m, a = idx.n, idx.m, idx.alpha
    return math.exp(
        -2 * a * _LOG_2
        - a * _LOG_PI
        + log_gamma(n / 2 - a)
        + log_gamma(a - m / 2)
        - log_gamma(a)
        - log_gamma(n / 2 + a - m)
        + ((2 * a - m) / (n - m)) * (log_gamma(n - m) - log_gamma((n - m) / 2))
    )


def xiao_constant(n: int, alpha: float) -> float:
    """Sharp constant of the weighted-extension inequality on the half-space (0 < alpha < 1)."""
    n = _int_dim(n, 2)
    alpha = float(alpha)
    _require(
        0 < alpha < 1 and alpha < (n - 1) / 2,
        f"xiao_constant needs 0 < alpha < min(1, (n-1)/2), got n={n}, alpha={alpha}",
    )
    k = (n - 1) / 2
    return math.exp(
        (1 - 4 * alpha) * _LOG_2
        - alpha * _LOG_PI
        - log_gamma(2 - 2 * alpha)
        + log_gamma(k - alpha)
        - log_gamma(k + alpha)
        + (2 * alpha / (n - 1)) * (log_gamma(n - 1) - log_gamma(k))
    )


def xiao_reduction_factor(alpha: float) -> float:
    """2^{2 alpha - 1} Gamma(2 - 2 alpha): weighted Dirichlet energy over (g, (-Delta)^alpha g)."""
    return math.exp((2 * alpha - 1) * _LOG_2 + log_gamma(2 - 2 * alpha))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


@dataclass
class ConstantsRecord:
    """Every constant defined at one index plus the residuals of their identities.

    Constants not defined at the index are ``None``.
    """

    idx: FracIndex
    escobar: float | None
    sobolev: float
    hls: float | None
    trace: float | None
    composed: float | None
    xiao: float | None
    identity_residuals: dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.identity_residuals.values(), default=0.0)

    def as_dict(self) -> dict:
        return {
            "n": self.idx.n,
            "m": self.idx.m,
            "alpha": self.idx.alpha,
            "escobar": self.escobar,
            "sobolev": self.sobolev,
            "hls": self.hls,
            "trace": self.trace,
            "composed": self.composed,
            "xiao": self.xiao,
            **{f"residual_{k}": v for k, v in self.identity_residuals.items()},
        }


def constants_record(idx: FracIndex) -> ConstantsRecord:
    """Evaluate all constants at ``idx`` and check the exact identities linking them.

    Residuals (relative) are reported for:

    * ``composition``: C_{m,a,n} = T(m, a) * S(n - m, a - m/2)
    * ``escobar``: 2 C_{1,1,n} = C_n (only at m = 1, alpha = 1)
    * ``xiao``: xiao(n, a) * 2^{2a-1} Gamma(2 - 2a) = S(n - 1, a)
    * ``hls``: S(n, a) = (2 pi)^{-2a} * riesz(n, a) * H(n, a)
    """
    n, m, a = idx.n, idx.m, idx.alpha
    res: dict[str, float] = {}
    sob = sobolev_constant(n, a)
    esc = escobar_constant(n) if n >= 3 else None

    hls = None
    if a > 0:
        hls = hls_constant(n, a)
        rebuilt = (2 * math.pi) ** (-2 * a) * riesz_constant(n, a) * hls
        res["hls"] = _rel(rebuilt, sob)

    trace = composed = None
    if m >= 1:
        trace = trace_constant(m, a)
        composed = composed_constant(idx)
        res["composition"] = _rel(trace * sobolev_constant(n - m, idx.trace_alpha), composed)
        if m == 1 and a == 1.0 and esc is not None:
            res["escobar"] = _rel(2 * composed, esc)

    xiao = None
    if n >= 2 and 0 < a < 1 and a < (n - 1) / 2:
        xiao = xiao_constant(n, a)
        res["xiao"] = _rel(xiao * xiao_reduction_factor(a), sobolev_constant(n - 1, a))

    return ConstantsRecord(idx, esc, sob, hls, trace, composed, xiao, res)
