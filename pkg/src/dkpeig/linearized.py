"""Linearized Hopf equation: ``Xi = 1 + Xi_1`` and the second level-set function ``Lambda_2``.

Any solution of ``Lambda_y + (Lambda_1 Lambda)_x = 0`` has the form
``Xi * p(w)`` with ``p`` holomorphic.  ``Xi`` solves it with ``Xi -> 1`` at
infinity and ``Lambda_2`` is the multiple that grows like ``-(x - k y)``::

    Xi_1 = -T(phi Xi_1 + phi),        T = dzbar^{-1} d/dx
    Lambda_2 = (k - conj(k)) Xi w / (1 - a)

``a`` is the affine coefficient of ``w`` (see :mod:`dkpeig.beltrami`).
Dividing by ``1 - a`` fixes the coefficient of ``z`` in the far field at
exactly one, which keeps ``Lambda_2`` holomorphic in ``k`` on the torus.
"""

from __future__ import annotations

from dataclasses import dataclass

from .beltrami import BeltramiSolution, compute_q, solve_w
from .errors import SeriesDivergence
from .hopf import HopfSolution, SolverConfig, _param, solve_phi
from .spectral import ComplexField, derivative, dx_inv, dzbar_inv_dx


@dataclass(frozen=True, eq=False)
class LinearizedSolution:
    k: object
    xi1: ComplexField
    xi: ComplexField
    lambda2: ComplexField
    residual: float
    xi1_residual: float
    normalization: complex
    term_norms: tuple[float, ...]


def solve_xi1(phi: ComplexField, k, cfg: SolverConfig | None = None) -> ComplexField:
    """Neumann series for ``Xi_1 = -T(phi Xi_1) - T(phi)``."""
    cfg = cfg or SolverConfig()
    k = _param(k)
    term = -dzbar_inv_dx(phi, k)
    xi1 = term
    norms = [term.l2_norm()]
    rising = 0
    while norms[-1] > 0 and len(norms) < cfg.series_max_terms:
        term = -dzbar_inv_dx(phi * term, k)
        tn = term.l2_norm()
        norms.append(tn)
        xi1 = xi1 + term
        if tn < cfg.tol_fixed_point * xi1.l2_norm():
            break
        rising = rising + 1 if tn >= norms[-2] else 0
        if rising >= 3:
            raise SeriesDivergence(f"Xi_1 series stopped contracting at k={k.k}; |Im k| too small")
    else:
        if norms[-1] > 0:
            raise SeriesDivergence(f"Xi_1 series not converged in {cfg.series_max_terms} terms")
    return xi1.renamed("xi1")


def xi1_substitution_residual(xi1: ComplexField, phi: ComplexField, k) -> float:
    """Sup of ``Xi_1 + T(phi Xi_1) + T(phi)``."""
    k = _param(k)
    return (xi1 + dzbar_inv_dx(phi * xi1 + phi, k)).sup()


def linear_residual(
    lam: ComplexField, lam_x: ComplexField, lam_y: ComplexField, hopf: HopfSolution
) -> ComplexField:
    """``Lambda_y + (Lambda_1 Lambda)_x`` from supplied derivatives of ``Lambda``."""
    phi_x = derivative(hopf.phi, "x")
    return lam_y + phi_x * lam + hopf.lambda1 * lam_x


def assemble_lambda2(xi: ComplexField, belt: BeltramiSolution, k) -> ComplexField:
    k = _param(k)
    c = (k.k - k.k.conjugate()) / (1.0 - belt.affine)
    return (xi * belt.w * c).renamed("lambda2")


def lambda2_derivatives(
    xi1: ComplexField, belt: BeltramiSolution, k
) -> tuple[ComplexField, ComplexField]:
    """``(Lambda_2)_x, (Lambda_2)_y`` by the product rule on ``Xi`` and ``w``."""
    k = _param(k)
    c = (k.k - k.k.conjugate()) / (1.0 - belt.affine)
    xi = xi1 + 1.0
    w = belt.w
    wx, wy = belt.gradient()
    lx = (derivative(xi1, "x") * w + xi * wx) * c
    ly = (derivative(xi1, "y") * w + xi * wy) * c
    return lx, ly


def solve_linearized(
    hopf: HopfSolution, cfg: SolverConfig | None = None, belt: BeltramiSolution | None = None
) -> tuple[BeltramiSolution, LinearizedSolution]:
    """Beltrami coordinate, ``Xi`` and ``Lambda_2`` at the spectral point of ``hopf``."""
    cfg = cfg or SolverConfig()
    k = hopf.k
    if belt is None:
        belt = solve_w(compute_q(hopf.phi, k), k, cfg)
    xi1 = solve_xi1(hopf.phi, k, cfg)
    xi = (xi1 + 1.0).renamed("xi")
    lam2 = assemble_lambda2(xi, belt, k)
    lx, ly = lambda2_derivatives(xi1, belt, k)
    res = linear_residual(lam2, lx, ly, hopf).sup()
    return belt, LinearizedSolution(
        k=k,
        xi1=xi1,
        xi=xi,
        lambda2=lam2,
        residual=float(res),
        xi1_residual=float(xi1_substitution_residual(xi1, hopf.phi, k)),
        normalization=complex(1.0 - belt.affine),
        term_norms=(),
    )


def pipeline(u: ComplexField, k, cfg: SolverConfig | None = None):
    """``(HopfSolution, BeltramiSolution, LinearizedSolution)`` at ``k``."""
    hopf = solve_phi(u, k, cfg)
    belt, lin = solve_linearized(hopf, cfg)
    return hopf, belt, lin


def asymptotic_lambda2(u: ComplexField, k, order: int = 3) -> ComplexField:
    """Large-``k`` series of ``Lambda_2`` truncated at ``order``::

        -(x - k y) + y u/k - (x u + dx^{-1}(2 y u_y + u))/k^2
          + (x dx^{-1} u_y + dx^{-1}(x u_y) + 3/2 y u^2 + 3 d_y dx^{-2}(y u_y))/k^3
    """
    if not 0 <= order <= 3:
        raise ValueError("order must be in 0..3")
    kk = _param(k).k
    grid = u.grid
    X, Y = grid.mesh
    out = ComplexField(grid, -(X - kk * Y))
    if order >= 1:
        out = out + Y * u / kk
    uy = derivative(u, "y")
    if order >= 2:
        out = out - (X * u + dx_inv(Y * uy * 2.0 + u)) / kk**2
    if order >= 3:
        t3 = (
            X * dx_inv(uy)
            + dx_inv(X * uy)
            + Y * u * u * 1.5
            + derivative(dx_inv(Y * uy, 2), "y") * 3.0
        )
        out = out + t3 / kk**3
    return out.renamed("lambda2_series")
