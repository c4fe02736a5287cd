"""Periodic grid, complex fields and Fourier-multiplier operators.

The plane is truncated to the periodic box ``[-L, L)^2`` sampled on ``N x N``
points; arrays are indexed ``[ix, iy]``.  For a fixed spectral point ``k``
(``Im k != 0``) the complex coordinates are

    z    =  (x - k y) / (conj(k) - k)
    zbar = -(x - conj(k) y) / (conj(k) - k)

so that ``d/dzbar = d/dy + k d/dx`` and ``d/dz = d/dy + conj(k) d/dx``.

Normalization
-------------
``dft_forward`` returns the coefficients ``c(p)`` of the trigonometric
interpolant ``f(x) = sum_p c(p) exp(i p.x)`` with ``p`` in
``(pi/L) * {-N/2, ..., N/2-1}^2``.  The continuum transform with the
symmetric ``1/(2 pi)`` convention is recovered as ``fhat(p) ~ A c(p) / (2 pi)``
with ``A = (2L)^2`` the box area, and continuum integrals ``dx dy`` become
sums with weight ``dx^2``.  Hence ``||f||_{L^2}^2 = A sum |c|^2`` and
``max |f| <= sum |c|``.

Zero mode
---------
Inverse operators (``dzbar_inv``, ``dx_inv``) and ``pi_op`` annihilate the
mean.  The fields that get inverted decay at infinity, and mean removal is
the periodic stand-in for that decay.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid2D",
    "ComplexField",
    "SpectralParam",
    "PotentialSpec",
    "dft_forward",
    "dft_inverse",
    "derivative",
    "dzbar_inv",
    "dzbar_inv_dx",
    "pi_op",
    "dx_inv",
    "x_mean_free",
    "dealias",
    "sobolev_norm",
    "sample_potential",
]


@dataclass(frozen=True)
class Grid2D:
    """Periodic ``N x N`` truncation of the plane with half-width ``L``."""

    N: int = 256
    L: float = 12.0

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 8, got {self.N!r}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def area(self) -> float:
        return (2.0 * self.L) ** 2

    @cached_property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates ``(X, Y)``, each of shape ``(N, N)``."""
        return np.meshgrid(self.x, self.x, indexing="ij")

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode numbers in FFT order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N)

    @cached_property
    def p(self) -> np.ndarray:
        """1-D wavenumbers ``(pi/L) m`` in FFT order."""
        return np.pi / self.L * self.modes

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray]:
        """``(PX, PY)`` on the FFT-ordered spectral grid."""
        return np.meshgrid(self.p, self.p, indexing="ij")

    @cached_property
    def zero_mode(self) -> np.ndarray:
        px, py = self.wavenumbers
        return (px == 0) & (py == 0)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keeps ``|m_x|, |m_y| < N/3``."""
        keep = np.abs(self.modes) < self.N / 3.0
        return np.outer(keep, keep)

    @cached_property
    def _phase(self) -> np.ndarray:
        # exp(i p.L) = (-1)^(m_x + m_y): shifts the FFT origin to x = y = 0
        m = self.modes.astype(np.int64)
        sign = np.where(m % 2 == 0, 1.0, -1.0)
        return np.outer(sign, sign)

    def complex_coords(self, k: complex | "SpectralParam") -> tuple[np.ndarray, np.ndarray]:
        """Return ``(z, zbar)`` sampled on the grid for the spectral point ``k``."""
        kk = _as_k(k)
        X, Y = self.mesh
        d = np.conj(kk) - kk
        return (X - kk * Y) / d, -(X - np.conj(kk) * Y) / d

    def index_of(self, x: float, y: float) -> tuple[int, int]:
        """Grid indices of the node at ``(x, y)``; off-grid points are rejected."""
        out = []
        for c in (x, y):
            s = (c + self.L) / self.dx
            i = int(round(s))
            if abs(s - i) > 1e-9 or not 0 <= i < self.N:
                raise ValueError(f"{c!r} is not a grid coordinate")
            out.append(i)
        return out[0], out[1]

    def interior(self, half_width: float) -> np.ndarray:
        X, Y = self.mesh
        return (np.abs(X) <= half_width) & (np.abs(Y) <= half_width)

    def boundary_ring(self, fraction: float = 0.9) -> np.ndarray:
        X, Y = self.mesh
        return np.maximum(np.abs(X), np.abs(Y)) >= fraction * self.L


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Immutable complex samples of a function on a :class:`Grid2D`."""

    grid: Grid2D
    values: np.ndarray
    name: str = ""

    # let ``ndarray * field`` fall through to the reflected operators
    __array_ufunc__ = None

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != (self.grid.N, self.grid.N):
            raise ValueError(f"field shape {v.shape} does not match grid N={self.grid.N}")
        if not np.all(np.isfinite(v)):
            raise FloatingPointError(f"non-finite values in field {self.name!r}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid2D, name: str = "") -> "ComplexField":
        return cls(grid, np.zeros((grid.N, grid.N)), name)

    @classmethod
    def constant(cls, grid: Grid2D, c: complex, name: str = "") -> "ComplexField":
        return cls(grid, np.full((grid.N, grid.N), c, dtype=np.complex128), name)

    def renamed(self, name: str) -> "ComplexField":
        return ComplexField(self.grid, self.values, name)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def sup(self, mask: np.ndarray | None = None) -> float:
        v = np.abs(self.values)
        return float(v[mask].max() if mask is not None else v.max())

    def mean(self) -> complex:
        return complex(self.values.mean())

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)) * self.grid.dx)

    def conj(self) -> "ComplexField":
        return ComplexField(self.grid, np.conj(self.values), self.name)

    def _other(self, other):
        if isinstance(other, ComplexField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return ComplexField(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ComplexField(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return ComplexField(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return ComplexField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ComplexField(self.grid, self.values / self._other(other))

    def __rtruediv__(self, other):
        return ComplexField(self.grid, self._other(other) / self.values)

    def __neg__(self):
        return ComplexField(self.grid, -self.values, self.name)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _as_k(k) -> complex:
    return k.k if isinstance(k, SpectralParam) else complex(k)


@dataclass(frozen=True)
class SpectralParam:
    """A spectral point ``k`` off the real axis."""

    k: complex

    def __post_init__(self) -> None:
        k = complex(self.k)
        if not np.isfinite(k) or k.imag == 0.0:
            raise ValueError(f"spectral point must have Im k != 0, got {k!r}")
        object.__setattr__(self, "k", k)

    @property
    def im(self) -> float:
        return abs(self.k.imag)

    @property
    def kbar_minus_k(self) -> complex:
        return self.k.conjugate() - self.k

    def contraction_ratio(self, u_norm: float, alpha: float = 1.0) -> float:
        """``2 alpha ||u|| / |Im k|^2``; below 1 the Hopf iteration is certified."""
        return 2.0 * alpha * u_norm / self.im**2

    @staticmethod
    def semiplane_bound(u_norm: float, alpha: float = 1.0, C: float = 0.49) -> float:
        """Lower bound ``D`` on ``Im k`` of the semi-plane where the inversion is certified."""
        if not 0 < C < 1:
            raise ValueError("C must lie in (0, 1)")
        return float(np.sqrt(2.0 * alpha * u_norm / C))

    @classmethod
    def covering_bound(cls, u_norm: float, alpha: float = 1.0, C: float = 0.49) -> float:
        """``D (1 + C)``: every ``lambda`` above this height has a preimage ``k``."""
        return cls.semiplane_bound(u_norm, alpha, C) * (1.0 + C)


# --- transforms --------------------------------------------------------------------


def _fft(v: np.ndarray) -> np.ndarray:
    return sfft.fft2(v)


def _ifft(v: np.ndarray) -> np.ndarray:
    return sfft.ifft2(v)


def _apply(values: np.ndarray, multiplier: np.ndarray) -> np.ndarray:
    return _ifft(multiplier * _fft(values))


def dft_forward(f: ComplexField) -> np.ndarray:
    """Fourier coefficients ``c(p)`` (FFT order) of the trigonometric interpolant."""
    g = f.grid
    return _fft(f.values) * g._phase / g.N**2


def dft_inverse(coeffs: np.ndarray, grid: Grid2D, name: str = "") -> ComplexField:
    return ComplexField(grid, _ifft(np.asarray(coeffs) * grid._phase * grid.N**2), name)


# --- multipliers ---------------------------------------------------------------------


@lru_cache(maxsize=32)
def _multipliers(grid: Grid2D, k: complex) -> dict[str, np.ndarray]:
    px, py = grid.wavenumbers
    kb = k.conjugate()
    dzb = 1j * (py + k * px)
    dz = 1j * (py + kb * px)
    nz = ~grid.zero_mode
    # p_y + k p_x vanishes on the real lattice only at p = 0 when Im k != 0
    inv = np.zeros_like(dzb)
    inv[nz] = 1.0 / dzb[nz]
    return {
        "dzbar": dzb,
        "dz": dz,
        "dzbar_inv": inv,
        "pi": dz * inv,
        "dzbar_inv_dx": 1j * px * inv,
    }


def multipliers(grid: Grid2D, k: complex | SpectralParam) -> dict[str, np.ndarray]:
    """Spectral symbols of the k-dependent operators, cached per ``(grid, k)``."""
    return _multipliers(grid, SpectralParam(_as_k(k)).k)


def derivative(f: ComplexField, which: str, k: complex | SpectralParam | None = None) -> ComplexField:
    """Spectral ``d/dx``, ``d/dy``, ``d/dz`` or ``d/dzbar`` of ``f``.

    ``which`` is one of ``"x"``, ``"y"``, ``"z"``, ``"zbar"``; the latter two need ``k``.
    """
    g = f.grid
    px, py = g.wavenumbers
    if which == "x":
        m = 1j * px
    elif which == "y":
        m = 1j * py
    elif which in ("z", "zbar"):
        if k is None:
            raise ValueError(f"d/d{which} needs a spectral point k")
        m = multipliers(g, k)["dz" if which == "z" else "dzbar"]
    else:
        raise ValueError(f"unknown derivative {which!r}")
    return ComplexField(g, _apply(f.values, m))


def dzbar_inv(f: ComplexField, k: complex | SpectralParam) -> ComplexField:
    """Mean-free inverse of ``d/dzbar``: symbol ``1/(i(p_y + k p_x))`` off the zero mode."""
    g = f.grid
    return ComplexField(g, _apply(f.values, multipliers(g, k)["dzbar_inv"]))


def dzbar_inv_dx(f: ComplexField, k: complex | SpectralParam) -> ComplexField:
    """``dzbar^{-1} d/dx``, symbol ``p_x / (p_y + k p_x)``; bounded by ``1/|Im k|``.

    Equals ``(Pi - 1)/(conj(k) - k)`` away from the zero mode.
    """
    g = f.grid
    return ComplexField(g, _apply(f.values, multipliers(g, k)["dzbar_inv_dx"]))


def pi_op(f: ComplexField, k: complex | SpectralParam) -> ComplexField:
    """``Pi = d/dz dzbar^{-1}``, symbol ``(p_y + conj(k) p_x)/(p_y + k p_x)``, unimodular."""
    g = f.grid
    return ComplexField(g, _apply(f.values, multipliers(g, k)["pi"]))


def dx_inv(f: ComplexField, order: int = 1) -> ComplexField:
    """``d/dx^{-order}`` with symbol ``(i p_x)^{-order}``; modes with ``p_x = 0`` are dropped."""
    g = f.grid
    px, _ = g.wavenumbers
    m = np.zeros_like(px, dtype=np.complex128)
    nz = px != 0
    m[nz] = (1j * px[nz]) ** (-order)
    return ComplexField(g, _apply(f.values, m))


def x_mean_free(f: ComplexField) -> ComplexField:
    """``dx^{-1} dx f``: ``f`` minus its mean along each line of constant ``y``."""
    return ComplexField(f.grid, f.values - f.values.mean(axis=0, keepdims=True))


def dealias(values: np.ndarray, grid: Grid2D) -> np.ndarray:
    """2/3-rule truncation of a sampled array."""
    return _ifft(_fft(values) * grid.dealias_mask)


def sobolev_norm(f: ComplexField, l: int = 4) -> float:
    """Discrete ``H^l`` norm: ``sqrt(A sum |c(p)|^2 (1 + |p|^2)^l)``."""
    if l < 0:
        raise ValueError("Sobolev order must be non-negative")
    g = f.grid
    px, py = g.wavenumbers
    c = _fft(f.values) / g.N**2
    w = (1.0 + px**2 + py**2) ** l
    return float(np.sqrt(g.area * np.sum(np.abs(c) ** 2 * w)))


# --- potentials ------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """Recipe for a real decaying potential ``u(x, y)``.

    kind:
      ``gaussian``     ``A exp(-|r - c|^2 / sigma^2)``
      ``gaussians``    sum of ``bumps``, each ``(A, sigma, cx, cy)``
      ``gaussian_dx``  ``A d^m/dx^m exp(-|r - c|^2 / sigma^2)``, ``m = order``;
                       its x-antiderivatives up to order ``m`` decay
      ``file``         field read with :func:`dkpeig.io.deserialize_field`
    """

    kind: str = "gaussian"
    amplitude: float = 0.1
    sigma: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    order: int = 0
    bumps: tuple[tuple[float, float, float, float], ...] = field(default_factory=tuple)
    path: str | None = None

    @classmethod
    def gaussian(cls, amplitude=0.1, sigma=1.0, center=(0.0, 0.0)) -> "PotentialSpec":
        return cls("gaussian", amplitude, sigma, tuple(center))

    @classmethod
    def gaussians(cls, bumps: Sequence[Sequence[float]]) -> "PotentialSpec":
        return cls("gaussians", bumps=tuple(tuple(map(float, b)) for b in bumps))

    @classmethod
    def gaussian_dx(cls, order=3, amplitude=0.1, sigma=1.0, center=(0.0, 0.0)) -> "PotentialSpec":
        return cls("gaussian_dx", amplitude, sigma, tuple(center), order=order)

    @classmethod
    def from_file(cls, path) -> "PotentialSpec":
        return cls("file", path=str(path))

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind in ("gaussian", "gaussian_dx"):
            d.update(amplitude=self.amplitude, sigma=self.sigma, center=list(self.center))
            if self.kind == "gaussian_dx":
                d["order"] = self.order
        elif self.kind == "gaussians":
            d["bumps"] = [list(b) for b in self.bumps]
        else:
            d["path"] = self.path
        return d


def _gaussian(X, Y, A, s, cx, cy):
    return A * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / s**2)


def sample_potential(spec: PotentialSpec, grid: Grid2D, threshold: float = 1e-10) -> ComplexField:
    """Sample ``spec`` on ``grid``; warns if ``|u|`` on the box edge exceeds ``threshold``."""
    X, Y = grid.mesh
    cx, cy = spec.center
    if spec.kind == "gaussian":
        v = _gaussian(X, Y, spec.amplitude, spec.sigma, cx, cy)
    elif spec.kind == "gaussians":
        v = np.zeros_like(X)
        for A, s, bx, by in spec.bumps:
            v = v + _gaussian(X, Y, A, s, bx, by)
    elif spec.kind == "gaussian_dx":
        # d^m/dx^m exp(-t^2) = (-1)^m H_m(t) exp(-t^2), t = (x - cx)/sigma
        t = (X - cx) / spec.sigma
        coef = np.zeros(spec.order + 1)
        coef[-1] = 1.0
        herm = np.polynomial.hermite.hermval(t, coef)
        v = (
            spec.amplitude
            * (-1.0 / spec.sigma) ** spec.order
            * herm
            * np.exp(-(t**2) - ((Y - cy) / spec.sigma) ** 2)
        )
    elif spec.kind == "file":
        from .io import deserialize_field

        f = deserialize_field(spec.path)
        if f.grid != grid:
            raise ValueError(f"potential file grid {f.grid} does not match {grid}")
        v = f.values.real
    else:
        raise ValueError(f"unknown potential kind {spec.kind!r}")

    edge = np.concatenate([v[0], v[-1], v[:, 0], v[:, -1]])
    edge_max = float(np.abs(edge).max())
    if edge_max > threshold:
        warnings.warn(
            f"potential reaches {edge_max:.3e} on the box edge (threshold {threshold:.1e}); "
            "periodic images will contaminate the solution",
            RuntimeWarning,
            stacklevel=2,
        )
    return ComplexField(grid, v.astype(np.complex128), "u")

