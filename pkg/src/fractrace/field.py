"""Sampled functions on periodic boxes standing in for R^n.

A :class:`BoxGrid` samples ``x_j = -L/2 + L i / N`` on every axis, so the
origin is always the sample with index ``N/2``. Frequencies are ``k = q / L``
for ``q = -N/2 .. N/2 - 1``, stored in standard FFT order; use
:meth:`BoxGrid.freq_axes` rather than raw indices.

The continuum transform ``f^(k) = int f(x) exp(-2 pi i x.k) dx`` is
approximated by ``dx * sum_j f(x_j) exp(-2 pi i x_j.k)`` and inverted with
``dk * sum_k``. With these weights discrete Plancherel reads
``dx sum |f|^2 = dk sum |f^|^2`` exactly.

Snapshot files
--------------
``save_field_csv`` writes one header comment line followed by ``index,re,im``
rows, where ``index`` is the C-order flat index into the physical lattice
(``view=physical``) or the FFT-ordered frequency lattice (``view=fourier``)::

    # fractrace-field n=2 sizes=64,64 lengths=10.0,10.0 view=physical
    index,re,im
    0,0.0,0.0
    ...

``save_field_npz`` stores the same data as arrays ``sizes``, ``lengths``,
``values`` in a numpy ``.npz`` archive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .constants import FracIndex
from .specfun import DomainError

__all__ = [
    "BoxGrid",
    "SpectralField",
    "forward_ft",
    "inverse_ft",
    "dalpha_norm_sq",
    "lp_norm",
    "sobolev_exponent",
    "save_field_csv",
    "load_field_csv",
    "save_field_npz",
    "load_field_npz",
]

MAX_FIELD_DIM = 3


@dataclass(frozen=True)
class BoxGrid:
    """Uniform periodic lattice on ``prod_j [-L_j/2, L_j/2)``."""

    sizes: tuple[int, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in np.atleast_1d(self.sizes))
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if len(lengths) == 1 and len(sizes) > 1:
            lengths = lengths * len(sizes)
        if not 1 <= len(sizes) <= MAX_FIELD_DIM:
            raise DomainError(f"fields support 1 <= n <= {MAX_FIELD_DIM}, got n={len(sizes)}")
        if len(lengths) != len(sizes):
            raise DomainError("sizes and lengths must have the same number of axes")
        if any(s < 2 or s % 2 for s in sizes):
            raise DomainError(f"sample counts must be even and >= 2, got {sizes}")
        if any(not (v > 0 and math.isfinite(v)) for v in lengths):
            raise DomainError(f"box lengths must be positive, got {lengths}")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def cube(cls, n: int, size: int, length: float) -> "BoxGrid":
        return cls((size,) * n, (length,) * n)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.sizes

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / N for L, N in zip(self.lengths, self.sizes))

    @property
    def dx(self) -> float:
        """Physical cell volume."""
        return float(np.prod(self.spacing))

    @property
    def dk(self) -> float:
        """Frequency cell volume."""
        return float(np.prod([1.0 / L for L in self.lengths]))

    @property
    def origin_index(self) -> tuple[int, ...]:
        return tuple(N // 2 for N in self.sizes)

    def axes(self) -> list[np.ndarray]:
        return [-L / 2 + L * np.arange(N) / N for L, N in zip(self.lengths, self.sizes)]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def radius_sq(self, center=None) -> np.ndarray:
        center = np.zeros(self.n) if center is None else np.atleast_1d(center)
        r2 = np.zeros(self.shape)
        for j, x in enumerate(self.axes()):
            shape = [1] * self.n
            shape[j] = -1
            r2 = r2 + ((x - center[j]) ** 2).reshape(shape)
        return r2

    def freq_index_axes(self) -> list[np.ndarray]:
        """Integer lattice labels ``q`` (``k = q / L``) in FFT order."""
        return [np.rint(np.fft.fftfreq(N) * N).astype(int) for N in self.sizes]

    def freq_axes(self) -> list[np.ndarray]:
        return [q / L for q, L in zip(self.freq_index_axes(), self.lengths)]

    def freq_mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.freq_axes(), indexing="ij")

    def kmag(self) -> np.ndarray:
        """``|k|`` on the frequency lattice, FFT order."""
        k2 = np.zeros(self.shape)
        for j, k in enumerate(self.freq_axes()):
            shape = [1] * self.n
            shape[j] = -1
            k2 = k2 + (k**2).reshape(shape)
        return np.sqrt(k2)

    def freq_position(self, k) -> tuple[int, ...]:
        """Array position of the lattice frequency ``k`` (must lie on the lattice)."""
        pos = []
        for kj, L, N in zip(np.atleast_1d(k), self.lengths, self.sizes):
            q = kj * L
            if abs(q - round(q)) > 1e-9 or not -N // 2 <= round(q) < N // 2:
                raise DomainError(f"frequency {kj} is not on the lattice")
            pos.append(int(round(q)) % N)
        return tuple(pos)

    def _phase(self) -> np.ndarray:
        # exp(-2 pi i x_0 k) with x_0 = -L/2 gives (-1)^q per axis
        ph = np.ones(self.shape)
        for j, q in enumerate(self.freq_index_axes()):
            shape = [1] * self.n
            shape[j] = -1
            ph = ph * np.where(q % 2, -1.0, 1.0).reshape(shape)
        return ph

    def sub_grid(self, axes) -> "BoxGrid":
        axes = list(axes)
        return BoxGrid(tuple(self.sizes[a] for a in axes), tuple(self.lengths[a] for a in axes))

    def summary(self) -> dict:
        return {"n": self.n, "L": list(self.lengths), "N": list(self.sizes)}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


class SpectralField:
    """Complex samples on a :class:`BoxGrid` with a lazily computed Fourier view.

    Build from physical samples (``SpectralField(grid, values)``), from a
    callable (:meth:`from_function`) or from coefficients
    (:meth:`from_coefficients`). Arrays are read-only; operations return new
    fields.
    """

    def __init__(self, grid: BoxGrid, values=None, *, coeffs=None):
        if values is None and coeffs is None:
            raise ValueError("need values or coeffs")
        self.grid = grid
        if values is not None:
            values = np.asarray(values)
            if values.shape != grid.shape:
                raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
            self.__dict__["values"] = _frozen(values)
        if coeffs is not None:
            coeffs = np.asarray(coeffs)
            if coeffs.shape != grid.shape:
                raise ValueError(f"coeffs shape {coeffs.shape} != grid shape {grid.shape}")
            self.__dict__["coeffs"] = _frozen(coeffs)

    @classmethod
    def from_function(cls, grid: BoxGrid, func) -> "SpectralField":
        """Sample ``func(*mesh)`` on the physical lattice."""
        return cls(grid, func(*grid.mesh()))

    @classmethod
    def from_coefficients(cls, grid: BoxGrid, coeffs) -> "SpectralField":
        return cls(grid, coeffs=coeffs)

    @cached_property
    def values(self) -> np.ndarray:
        g = self.grid
        v = np.fft.ifftn(g._phase() * self.coeffs) / g.dx
        return _frozen(v)

    @cached_property
    def coeffs(self) -> np.ndarray:
        g = self.grid
        return _frozen(g.dx * g._phase() * np.fft.fftn(self.values))

    @property
    def n(self) -> int:
        return self.grid.n

    def real(self) -> "SpectralField":
        return SpectralField(self.grid, self.values.real)

    def scale(self, c) -> "SpectralField":
        out = SpectralField.__new__(SpectralField)
        out.grid = self.grid
        for name in ("values", "coeffs"):
            if name in self.__dict__:
                out.__dict__[name] = _frozen(c * self.__dict__[name])
        return out

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if other.grid != self.grid:
            raise ValueError("grids differ")
        return SpectralField(self.grid, self.values + other.values)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self + other.scale(-1.0)

    def __repr__(self):
        return f"SpectralField(n={self.n}, sizes={self.grid.sizes}, lengths={self.grid.lengths})"


def forward_ft(f: SpectralField) -> SpectralField:
    """Field carrying its Fourier coefficients ``f^(k) ~ dx sum f(x_j) e^{-2 pi i x_j.k}``."""
    out = SpectralField(f.grid, f.values)
    out.coeffs  # noqa: B018 - populate the cache
    return out


def inverse_ft(f: SpectralField) -> SpectralField:
    """Field rebuilt from coefficients alone (drops any cached physical samples)."""
    return SpectralField.from_coefficients(f.grid, f.coeffs)


def _multiplier_power(kmag: np.ndarray, power: float, zero_value: float) -> np.ndarray:
    out = np.empty_like(kmag)
    nz = kmag > 0
    out[nz] = kmag[nz] ** power
    out[~nz] = zero_value
    return out


def dalpha_weight(grid: BoxGrid, alpha: float) -> np.ndarray:
    """``|2 pi k|^{2 alpha}`` in FFT order, with ``0^0 = 1``."""
    return _multiplier_power(2 * np.pi * grid.kmag(), 2 * alpha, 1.0 if alpha == 0 else 0.0)


def dalpha_norm_sq(f: SpectralField, alpha: float) -> float:
    """``||f||_{D_alpha}^2 = dk sum |f^(k)|^2 |2 pi k|^{2 alpha}``."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    w = dalpha_weight(f.grid, alpha)
    return float(f.grid.dk * np.sum(w * np.abs(f.coeffs) ** 2))


def lp_norm(f: SpectralField, p: float) -> float:
    """``(dx sum |f(x_j)|^p)^{1/p}`` for ``p >= 1``."""
    p = float(p)
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    a = np.abs(f.values)
    peak = a.max()
    if peak == 0:
        return 0.0
    # factor out the peak to keep |f|^p finite for large p
    return float(peak * (f.grid.dx * np.sum((a / peak) ** p)) ** (1.0 / p))


def sobolev_exponent(idx: FracIndex) -> float:
    """``2n/(n - 2 alpha)`` for m = 0, ``2(n - m)/(n - 2 alpha)`` for the trace target."""
    return 2 * (idx.n - idx.m) / (idx.n - 2 * idx.alpha)


def save_field_csv(f: SpectralField, path, view: str = "physical") -> None:
    if view not in ("physical", "fourier"):
        raise ValueError("view must be 'physical' or 'fourier'")
    data = (f.values if view == "physical" else f.coeffs).ravel()
    g = f.grid
    header = (
        f"# fractrace-field n={g.n} sizes={','.join(map(str, g.sizes))} "
        f"lengths={','.join(repr(v) for v in g.lengths)} view={view}\n"
    )
    lines = [header, "index,re,im\n"]
    lines += [f"{i},{float(z.real)!r},{float(z.imag)!r}\n" for i, z in enumerate(data)]
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")


def load_field_csv(path) -> SpectralField:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    meta = dict(tok.split("=", 1) for tok in text[0].lstrip("# ").split()[1:])
    grid = BoxGrid(
        tuple(int(s) for s in meta["sizes"].split(",")),
        tuple(float(s) for s in meta["lengths"].split(",")),
    )
    rows = np.loadtxt(text[2:], delimiter=",", ndmin=2)
    data = np.zeros(int(np.prod(grid.shape)), dtype=complex)
    data[rows[:, 0].astype(int)] = rows[:, 1] + 1j * rows[:, 2]
    data = data.reshape(grid.shape)
    if meta["view"] == "fourier":
        return SpectralField.from_coefficients(grid, data)
    return SpectralField(grid, data)


def save_field_npz(f: SpectralField, path) -> None:
    g = f.grid
    np.savez(path, sizes=np.array(g.sizes), lengths=np.array(g.lengths), values=f.values)


def load_field_npz(path) -> SpectralField:
    with np.load(path) as z:
        grid = BoxGrid(tuple(z["sizes"]), tuple(z["lengths"]))
        return SpectralField(grid, z["values"])
