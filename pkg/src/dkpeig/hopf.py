"""Contraction solve of the complex forced Hopf equation for ``Lambda_1 = k + phi``.

``phi`` solves ``phi_y + k phi_x + phi phi_x = -u_x``, equivalently the fixed
point ``phi = F(phi)`` with

    F(phi) = -dzbar^{-1} d/dx (phi^2 / 2 + u)

``dzbar^{-1} d/dx`` is the mean-free version of ``(Pi - 1)/(conj(k) - k)``;
its symbol ``p_x/(p_y + k p_x)`` is holomorphic in ``k`` and bounded by
``1/|Im k|``, so ``F`` contracts on small balls of ``H^l`` once ``|Im k|`` is
large enough.  The iteration starts from ``phi_0 = 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergence
from .spectral import (
    ComplexField,
    SpectralParam,
    _fft,
    _ifft,
    derivative,
    dx_inv,
    dzbar_inv_dx,
    multipliers,
    sobolev_norm,
    x_mean_free,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    tol_fixed_point: float = 1e-12
    tol_residual: float = 1e-8
    max_iter: int = 200
    alpha_l: float = 1.0
    sobolev_order: int = 4
    dealias: bool = True
    # contraction constant C < 1/2 used by the covering bound of the k-inversion
    contraction_C: float = 0.49
    series_max_terms: int = 500

    def __post_init__(self) -> None:
        if self.tol_fixed_point <= 0 or self.tol_residual <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.alpha_l <= 0:
            raise ValueError("alpha_l must be positive")
        if self.sobolev_order < 0:
            raise ValueError("sobolev_order must be >= 0")
        if not 0 < self.contraction_C < 0.5:
            raise ValueError("contraction_C must lie in (0, 1/2)")


@dataclass(frozen=True, eq=False)
class HopfSolution:
    k: SpectralParam
    u: ComplexField
    phi: ComplexField
    lambda1: ComplexField
    iterations: int
    residual: float
    h4_norm: float
    contraction_ratio: float
    u_norm: float
    ball_radius: float
    iterate_norms: tuple[float, ...] = field(default_factory=tuple)

    @property
    def sup_phi(self) -> float:
        return self.phi.sup()

    @property
    def measured_C(self) -> float:
        """``max|phi| / |Im k|``, the constant that bounds ``phi`` pointwise."""
        return self.sup_phi / self.k.im


def _param(k) -> SpectralParam:
    return k if isinstance(k, SpectralParam) else SpectralParam(k)


def hopf_residual(phi: ComplexField, u: ComplexField, k) -> ComplexField:
    """Pointwise residual of the Hopf equation written in ``z, zbar``."""
    k = _param(k)
    dzb_phi = derivative(phi, "zbar", k)
    dz_phi = derivative(phi, "z", k)
    dzb_u = derivative(u, "zbar", k)
    dz_u = derivative(u, "z", k)
    return dzb_phi + (phi * (dz_phi - dzb_phi) + (dz_u - dzb_u)) / k.kbar_minus_k


def fixed_point_map(phi: ComplexField, u: ComplexField, k) -> ComplexField:
    """One application of ``F`` without dealiasing."""
    return -dzbar_inv_dx(phi * phi * 0.5 + u, k)


def quadratic_map(phi: ComplexField, k) -> ComplexField:
    """``G(phi) = dzbar^{-1} d/dx (phi^2) / 2``, the nonlinear part of ``F``."""
    return dzbar_inv_dx(phi * phi, k) * 0.5


def _h_norm_hat(coef_hat: np.ndarray, weight: np.ndarray, area: float, n: int) -> float:
    c = coef_hat / n**2
    return float(np.sqrt(area * np.sum(np.abs(c) ** 2 * weight)))


def solve_phi(u: ComplexField, k, cfg: SolverConfig | None = None) -> HopfSolution:
    """Iterate ``phi_{j+1} = F(phi_j)`` from zero until both stopping tests hold.

    Stops when the relative ``H^l`` step is below ``tol_fixed_point``; the
    sup-norm differential residual must then be below ``tol_residual``.
    Raises :class:`NonConvergence` when the budget runs out, the steps stop
    shrinking, or the residual is resolution-limited.
    """
    cfg = cfg or SolverConfig()
    k = _param(k)
    grid = u.grid
    n = grid.N
    px, py = grid.wavenumbers
    weight = (1.0 + px**2 + py**2) ** cfg.sobolev_order
    mult = multipliers(grid, k)["dzbar_inv_dx"]
    mask = grid.dealias_mask
    u_hat = _fft(u.values)

    u_norm = sobolev_norm(u, cfg.sobolev_order)
    radius = 2.0 * u_norm / k.im
    diag = {
        "k": k.k,
        "u_norm": u_norm,
        "certified_ratio": k.contraction_ratio(u_norm, cfg.alpha_l),
    }

    phi_hat = np.zeros_like(u_hat)
    phi = np.zeros_like(u.values)
    norms = [0.0]
    prev_step = None
    ratio = 0.0
    growing = 0
    residual = np.inf
    for j in range(1, cfg.max_iter + 1):
        if cfg.dealias:
            pt = _ifft(phi_hat * mask)
            sq_hat = _fft(pt * pt) * mask
        else:
            sq_hat = _fft(phi * phi)
        new_hat = -mult * (0.5 * sq_hat + u_hat)
        step = _h_norm_hat(new_hat - phi_hat, weight, grid.area, n)
        norm = _h_norm_hat(new_hat, weight, grid.area, n)
        phi_hat = new_hat
        phi = _ifft(phi_hat)
        norms.append(norm)
        if prev_step is not None and prev_step > 0:
            ratio = step / prev_step
        prev_step = step
        rel = step / norm if norm > 0 else step
        if rel < cfg.tol_fixed_point:
            residual = hopf_residual(ComplexField(grid, phi), u, k).sup()
            if residual <= cfg.tol_residual:
                break
            # further iterations cannot reduce a resolution-limited residual
            raise NonConvergence(
                f"fixed point reached at k={k.k} but the differential residual is "
                f"{residual:.3g} > {cfg.tol_residual:.1g}; the grid under-resolves phi",
                {**diag, "iterations": j, "residual": residual},
            )
        if ratio >= 1.0 and rel > 1e3 * cfg.tol_fixed_point:
            growing += 1
            if growing >= 3:
                raise NonConvergence(
                    f"Hopf iteration stopped contracting at k={k.k} (ratio {ratio:.3g}); "
                    "|Im k| is too small for this potential",
                    {**diag, "iterations": j, "ratio": ratio},
                )
        else:
            growing = 0
        if not np.isfinite(norm):
            raise NonConvergence(f"Hopf iteration diverged at k={k.k}", {**diag, "iterations": j})
    else:
        raise NonConvergence(
            f"Hopf iteration did not converge in {cfg.max_iter} steps at k={k.k} "
            f"(residual {residual:.3g}, last ratio {ratio:.3g})",
            {**diag, "iterations": cfg.max_iter, "ratio": ratio, "residual": residual},
        )

    phi_f = ComplexField(grid, phi, "phi")
    log.debug("k=%s converged in %d iterations, residual %.3g", k.k, j, residual)
    return HopfSolution(
        k=k,
        u=u,
        phi=phi_f,
        lambda1=(phi_f + k.k).renamed("lambda1"),
        iterations=j,
        residual=float(residual),
        h4_norm=norms[-1],
        contraction_ratio=float(ratio),
        u_norm=u_norm,
        ball_radius=radius,
        iterate_norms=tuple(norms),
    )


def asymptotic_lambda1(u: ComplexField, k, order: int = 3, project: bool = False) -> ComplexField:
    """Large-``k`` series ``k - u/k + D1 u/k^2 - (D2 u + u^2/2)/k^3`` truncated at ``order``.

    ``D1 = d_y dx^{-1}`` and ``D2 = d_y^2 dx^{-2}`` use mean-free spectral
    inversion.  With ``project=True`` the ``u`` and ``u^2`` terms are replaced
    by their x-mean-free parts ``dx^{-1} dx (.)``, which is how they arise from
    expanding ``dzbar^{-1} d/dx``; on the periodic grid this matters for
    potentials with a nonzero x-integral.
    """
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    kk = _param(k).k
    grid = u.grid
    P = x_mean_free if project else (lambda f: f)
    out = ComplexField.constant(grid, kk, "lambda1_series")
    if order >= 1:
        out = out - P(u) / kk
    if order >= 2:
        out = out + derivative(dx_inv(u), "y") / kk**2
    if order >= 3:
        d2 = derivative(derivative(dx_inv(u, 2), "y"), "y")
        out = out - (d2 + P(u * u) * 0.5) / kk**3
    return out.renamed("lambda1_series")


@dataclass(frozen=True)
class ContractionReport:
    ratio: float
    u_norm: float
    alpha_l: float
    ball_radius: float
    empirical_lipschitz: float
    bound_fraction: float
    samples: int

    @property
    def certified(self) -> bool:
        return self.ratio < 1.0


def _random_smooth(grid, rng, width: float = 2.0) -> np.ndarray:
    px, py = grid.wavenumbers
    noise = rng.standard_normal((grid.N, grid.N)) + 1j * rng.standard_normal((grid.N, grid.N))
    return _ifft(_fft(noise) * np.exp(-(px**2 + py**2) / (2 * width**2)))


def contraction_diagnostic(
    u: ComplexField, k, cfg: SolverConfig | None = None, samples: int = 8, seed: int = 0
) -> ContractionReport:
    """Certified ratio ``2 alpha ||u||/|Im k|^2`` plus an empirical Lipschitz probe of ``G``.

    Random smooth pairs are drawn inside the ball of radius ``2||u||/|Im k|``;
    ``bound_fraction`` is the largest observed
    ``||G(a) - G(b)|| / (alpha (||a|| + ||b||) ||a - b|| / |Im k|)``.
    """
    cfg = cfg or SolverConfig()
    k = _param(k)
    l = cfg.sobolev_order
    u_norm = sobolev_norm(u, l)
    radius = 2.0 * u_norm / k.im
    lip = 0.0
    frac = 0.0
    rng = np.random.default_rng(seed)
    grid = u.grid
    if radius > 0:
        for _ in range(samples):
            pair = []
            for _ in range(2):
                f = ComplexField(grid, _random_smooth(grid, rng))
                r = radius * rng.uniform(0.05, 1.0)
                pair.append(f * (r / sobolev_norm(f, l)))
            a, b = pair
            diff = sobolev_norm(a - b, l)
            gd = sobolev_norm(quadratic_map(a, k) - quadratic_map(b, k), l)
            na, nb = sobolev_norm(a, l), sobolev_norm(b, l)
            lip = max(lip, gd / diff)
            frac = max(frac, gd / (cfg.alpha_l * (na + nb) * diff / k.im))
    return ContractionReport(
        ratio=k.contraction_ratio(u_norm, cfg.alpha_l),
        u_norm=u_norm,
        alpha_l=cfg.alpha_l,
        ball_radius=radius,
        empirical_lipschitz=lip,
        bound_fraction=frac,
        samples=samples if radius > 0 else 0,
    )
