"""Inversion of ``lambda = Lambda_1(x, y, k)`` and the eigenfunctions ``Psi_1``, ``Psi_2``.

For fixed ``(x, y)`` the map ``k -> k + phi(x, y, k)`` is a small perturbation
of the identity in the upper semi-plane, so ``k_{n+1} = lambda - phi(x, y, k_n)``
contracts.  Then ``Psi_1 = k`` and ``Psi_2 = -Lambda_2 / Xi``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence, OutsideCertifiedRegion
from .hopf import HopfSolution, SolverConfig, solve_phi
from .linearized import solve_linearized, solve_xi1
from .spectral import ComplexField, SpectralParam, derivative, dx_inv, sobolev_norm

_QUANTUM = 1e-12


class KState:
    """Solutions at one spectral point; the linearized part is built on first use."""

    def __init__(self, hopf: HopfSolution, cfg: SolverConfig):
        self.hopf = hopf
        self._cfg = cfg
        self._lock = threading.Lock()
        self._xi1: ComplexField | None = None
        self._lin = None

    @property
    def xi1(self) -> ComplexField:
        with self._lock:
            if self._xi1 is None:
                self._xi1 = self._lin[1].xi1 if self._lin else solve_xi1(self.hopf.phi, self.hopf.k, self._cfg)
            return self._xi1

    @property
    def linearized(self):
        """``(BeltramiSolution, LinearizedSolution)``."""
        with self._lock:
            if self._lin is None:
                self._lin = solve_linearized(self.hopf, self._cfg)
                self._xi1 = self._lin[1].xi1
            return self._lin


class KCache:
    """Insert-only memo of :class:`KState` keyed by ``k`` rounded to 1e-12."""

    def __init__(self, u: ComplexField, cfg: SolverConfig | None = None):
        self.u = u
        self.cfg = cfg or SolverConfig()
        self._store: dict[tuple[int, int], KState] = {}
        self._lock = threading.Lock()
        self.solves = 0

    @staticmethod
    def key(k: complex) -> tuple[int, int]:
        return int(round(k.real / _QUANTUM)), int(round(k.imag / _QUANTUM))

    def get(self, k: complex) -> KState:
        key = self.key(complex(k))
        st = self._store.get(key)
        if st is None:
            kq = complex(key[0] * _QUANTUM, key[1] * _QUANTUM)
            st = KState(solve_phi(self.u, kq, self.cfg), self.cfg)
            with self._lock:
                st = self._store.setdefault(key, st)
                self.solves += 1
        return st

    def __len__(self) -> int:
        return len(self._store)


@dataclass(frozen=True)
class EigenSample:
    x: float
    y: float
    lam: complex
    k: complex
    psi1: complex
    psi2: complex
    iterations: int
    roundtrip: float
    steps: tuple[float, ...] = field(default_factory=tuple)
    in_semiplane: bool = True

    @property
    def ratios(self) -> tuple[float, ...]:
        s = [v for v in self.steps if v > 0]
        return tuple(b / a for a, b in zip(s, s[1:]))


def certified_heights(u: ComplexField, cfg: SolverConfig) -> tuple[float, float]:
    """``(D, D (1 + C))``: semi-plane height and covering height for ``u``."""
    n = sobolev_norm(u, cfg.sobolev_order)
    D = SpectralParam.semiplane_bound(n, cfg.alpha_l, cfg.contraction_C)
    return D, D * (1.0 + cfg.contraction_C)


def invert_k(
    lam: complex,
    x: float,
    y: float,
    u: ComplexField,
    cfg: SolverConfig | None = None,
    cache: KCache | None = None,
    newton: bool = False,
    enforce_region: bool = True,
    tol: float = 1e-12,
    max_iter: int = 100,
    with_psi2: bool = True,
) -> EigenSample:
    """Solve ``Lambda_1(x, y, k) = lam`` for ``k`` starting from ``k_0 = lam``.

    ``(x, y)`` must be a grid node.  With ``newton=True`` the update divides
    by ``Xi = d Lambda_1/dk``.
    """
    cfg = cfg or (cache.cfg if cache else SolverConfig())
    cache = cache or KCache(u, cfg)
    lam = complex(lam)
    ix, iy = u.grid.index_of(x, y)
    D, cover = certified_heights(u, cfg)
    if enforce_region and abs(lam.imag) < cover:
        raise OutsideCertifiedRegion(
            f"|Im lambda| = {abs(lam.imag):.4g} is below the covering height {cover:.4g}"
        )

    k = lam
    steps = []
    for n in range(1, max_iter + 1):
        st = cache.get(k)
        F = k + st.hopf.phi.values[ix, iy] - lam
        if newton:
            k_new = k - F / (1.0 + st.xi1.values[ix, iy])
        else:
            k_new = k - F
        steps.append(abs(k_new - k))
        k = k_new
        if steps[-1] < tol:
            break
    else:
        raise NonConvergence(
            f"k-inversion at lambda={lam} did not converge in {max_iter} steps",
            {"lambda": lam, "x": x, "y": y, "last_step": steps[-1]},
        )

    st = cache.get(k)
    lam1 = st.hopf.lambda1.values[ix, iy]
    psi2 = complex("nan")
    if with_psi2:
        _, lin = st.linearized
        psi2 = complex(-lin.lambda2.values[ix, iy] / lin.xi.values[ix, iy])
    return EigenSample(
        x=float(x),
        y=float(y),
        lam=lam,
        k=complex(st.hopf.k.k),
        psi1=complex(st.hopf.k.k),
        psi2=psi2,
        iterations=n,
        roundtrip=float(abs(lam1 - lam)),
        steps=tuple(steps),
        in_semiplane=abs(st.hopf.k.k.imag) >= D,
    )


def psi2_direct(sample: EigenSample, cache: KCache) -> complex:
    """``-(k - conj(k)) w / (1 - a)`` at the sample, without dividing by ``Xi``."""
    belt, _ = cache.get(sample.k).linearized
    ix, iy = cache.u.grid.index_of(sample.x, sample.y)
    k = sample.k
    return complex(-(k - k.conjugate()) * belt.w.values[ix, iy] / (1.0 - belt.affine))


def asymptotic_psi1(u: ComplexField, lam: complex, order: int = 3) -> ComplexField:
    """``lam + u/lam - dx^{-1} u_y/lam^2 + (dx^{-2} u_yy - u^2/2)/lam^3`` truncated at ``order``."""
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    lam = complex(lam)
    out = ComplexField.constant(u.grid, lam, "psi1_series")
    if order >= 1:
        out = out + u / lam
    if order >= 2:
        out = out - dx_inv(derivative(u, "y")) / lam**2
    if order >= 3:
        uyy = derivative(derivative(u, "y"), "y")
        out = out + (dx_inv(uyy, 2) - u * u * 0.5) / lam**3
    return out.renamed("psi1_series")


def asymptotic_psi2(u: ComplexField, lam: complex, order: int = 3) -> ComplexField:
    """``x - lam y - y u/lam + d_y dx^{-1}(y u)/lam^2 + (y u^2/2 - d_y^2 dx^{-2}(y u))/lam^3``."""
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    lam = complex(lam)
    X, Y = u.grid.mesh
    out = ComplexField(u.grid, X - lam * Y)
    yu = Y * u
    if order >= 1:
        out = out - yu / lam
    if order >= 2:
        out = out + derivative(dx_inv(yu), "y") / lam**2
    if order >= 3:
        d2 = derivative(derivative(dx_inv(yu, 2), "y"), "y")
        out = out + (yu * u * 0.5 - d2) / lam**3
    return out.renamed("psi2_series")


# central first-derivative weights for offsets 1..m (antisymmetric)
_FD = {
    6: np.array([3 / 4, -3 / 20, 1 / 60]),
    8: np.array([4 / 5, -1 / 5, 4 / 105, -1 / 280]),
}


@dataclass(frozen=True)
class VectorFieldReport:
    which: str
    max_residual: float
    max_truncation: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def vector_field_residual(
    u: ComplexField,
    lambdas,
    points,
    which: str = "psi1",
    cfg: SolverConfig | None = None,
    cache: KCache | None = None,
    h_lambda: float = 1e-2,
    enforce_region: bool = True,
) -> VectorFieldReport:
    """Finite-difference check of ``Psi_y + lam Psi_x - u_x Psi_lam = 0``.

    ``Psi`` is sampled on an 8th-order stencil in ``x`` and ``y`` (grid
    neighbours) and a 4th-order stencil in ``Re lam``.  The truncation
    estimate is the gap between 6th- and 8th-order spatial derivatives plus
    the 2nd/4th-order gap in ``lam``.
    """
    if which not in ("psi1", "psi2"):
        raise ValueError("which must be 'psi1' or 'psi2'")
    cache = cache or KCache(u, cfg)
    grid = u.grid
    dx = grid.dx
    ux = derivative(u, "x").values
    gx = grid.x

    def psi(lam, ix, iy):
        s = invert_k(
            lam, gx[ix % grid.N], gx[iy % grid.N], u, cache=cache,
            enforce_region=enforce_region, with_psi2=(which == "psi2"),
        )
        return s.psi1 if which == "psi1" else s.psi2

    worst = 0.0
    trunc = 0.0
    count = 0
    for lam in lambdas:
        lam = complex(lam)
        for x, y in points:
            ix, iy = grid.index_of(x, y)
            derivs = {}
            for axis in ("x", "y"):
                vals = {}
                for j in range(1, 5):
                    for sgn in (1, -1):
                        o = sgn * j
                        vals[o] = psi(lam, ix + o, iy) if axis == "x" else psi(lam, ix, iy + o)
                d = {
                    m: sum(w * (vals[j + 1] - vals[-(j + 1)]) for j, w in enumerate(_FD[m])) / dx
                    for m in (6, 8)
                }
                derivs[axis] = d
            fl = {o: psi(lam + o * h_lambda, ix, iy) for o in (-2, -1, 1, 2)}
            dl4 = (8 * (fl[1] - fl[-1]) - (fl[2] - fl[-2])) / (12 * h_lambda)
            dl2 = (fl[1] - fl[-1]) / (2 * h_lambda)
            r = derivs["y"][8] + lam * derivs["x"][8] - ux[ix, iy] * dl4
            est = (
                abs(derivs["y"][8] - derivs["y"][6])
                + abs(lam) * abs(derivs["x"][8] - derivs["x"][6])
                + abs(ux[ix, iy]) * abs(dl4 - dl2)
            )
            worst = max(worst, abs(r))
            trunc = max(trunc, est)
            count += 1
    return VectorFieldReport(
        which=which,
        max_residual=float(worst),
        max_truncation=float(trunc),
        tolerance=max(1e-6, float(trunc)),
        samples=count,
    )
