"""Beltrami coefficient of ``phi`` and the adapted coordinate ``w``.

``w`` is a first integral of ``d/dy + Lambda_1 d/dx``; in ``z, zbar`` this is
the Beltrami equation ``dzbar w = q dz w``.  With ``f = sum_m (q Pi)^m q`` one
gets ``dzbar w = f`` and ``dz w = 1 + Pi f``.

On the torus ``dzbar`` of a periodic function has zero mean, so the mean of
``f`` cannot come from the periodic part.  It is carried by an affine term::

    w = z + a zbar + dzbar^{-1}(f - a),      a = mean(f)

which solves the Beltrami equation exactly on the grid.  ``a`` shrinks like
the inverse box area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoefficient, SeriesDivergence
from .hopf import SolverConfig, _param
from .spectral import ComplexField, derivative, dzbar_inv, pi_op


@dataclass(frozen=True, eq=False)
class BeltramiSolution:
    k: object
    q: ComplexField
    f: ComplexField
    w_minus_z: ComplexField
    affine: complex
    periodic: ComplexField
    sup_q: float
    jacobian_min: float
    residual: float
    dz_w: ComplexField
    pi_identity_error: float
    term_norms: tuple[float, ...]

    @property
    def terms(self) -> int:
        return len(self.term_norms)

    @property
    def series_ratio(self) -> float:
        """Largest ratio of successive term norms (0 for a single term)."""
        t = np.asarray(self.term_norms)
        t = t[t > 0]
        return float((t[1:] / t[:-1]).max()) if len(t) > 1 else 0.0

    @property
    def w(self) -> ComplexField:
        z, _ = self.q.grid.complex_coords(self.k)
        return (self.w_minus_z + z).renamed("w")

    @property
    def dzbar_w(self) -> ComplexField:
        return derivative(self.periodic, "zbar", self.k) + self.affine

    def gradient(self) -> tuple[ComplexField, ComplexField]:
        """``(w_x, w_y)`` from the affine part and spectral derivatives of the periodic part."""
        k = self.k.k
        d = k.conjugate() - k
        a = self.affine
        wx = derivative(self.periodic, "x") + (1.0 - a) / d
        wy = derivative(self.periodic, "y") + (a * k.conjugate() - k) / d
        return wx, wy

    @property
    def constant(self) -> float:
        """Measured ``C``: bounds ``|q|`` and half of ``|f|`` and ``|Pi f|``."""
        return max(self.sup_q, 0.5 * self.f.sup(), 0.5 * (self.dz_w - 1.0).sup())


def compute_q(phi: ComplexField, k, margin: float = 1e-3) -> ComplexField:
    """``q = s/(1 + s)`` with ``s = phi/(k - conj(k))``."""
    k = _param(k)
    s = phi / (k.k - k.k.conjugate())
    smax = s.sup()
    if smax >= 1.0 - margin:
        raise DegenerateCoefficient(
            f"sup|phi|/(2|Im k|) = {smax:.3g} is not below 1 - {margin}; "
            "the Beltrami coefficient is degenerate"
        )
    return (s / (s + 1.0)).renamed("q")


def jacobian_lower_bound(C: float) -> float:
    return (1.0 - 2.0 * C) ** 2 * (1.0 - C**2)


def solve_w(q: ComplexField, k, cfg: SolverConfig | None = None) -> BeltramiSolution:
    """Neumann series for ``f`` and the coordinate ``w = z + w_minus_z``.

    Summation stops once a term's L2 norm drops below ``tol_fixed_point``
    times the partial sum's, capped at ``series_max_terms``.
    """
    cfg = cfg or SolverConfig()
    k = _param(k)
    sup_q = q.sup()
    if sup_q >= 1.0:
        raise DegenerateCoefficient(f"sup|q| = {sup_q:.3g} >= 1")
    grid = q.grid

    f = q
    term = q
    norms = [q.l2_norm()]
    rising = 0
    while norms[-1] > 0 and len(norms) < cfg.series_max_terms:
        term = q * pi_op(term, k)
        tn = term.l2_norm()
        norms.append(tn)
        f = f + term
        if tn < cfg.tol_fixed_point * f.l2_norm():
            break
        rising = rising + 1 if tn >= norms[-2] else 0
        if rising >= 3:
            raise SeriesDivergence(
                f"Beltrami series stopped contracting after {len(norms)} terms (sup|q| = {sup_q:.3g})"
            )
    else:
        if norms[-1] > 0:
            raise SeriesDivergence(f"Beltrami series not converged in {cfg.series_max_terms} terms")

    a = f.mean()
    g = dzbar_inv(f - a, k).renamed("w_periodic")
    _, zbar = grid.complex_coords(k)
    w_minus_z = (g + a * zbar).renamed("w_minus_z")

    dz_w = (derivative(g, "z", k) + 1.0).renamed("dz_w")
    pi_err = (dz_w - 1.0 - pi_op(f, k)).sup()
    dzbar_w = derivative(g, "zbar", k) + a
    residual = (dzbar_w - q * dz_w).sup()
    jac = np.abs(dz_w.values) ** 2 * (1.0 - np.abs(q.values) ** 2)

    return BeltramiSolution(
        k=k,
        q=q,
        f=f.renamed("f"),
        w_minus_z=w_minus_z,
        affine=complex(a),
        periodic=g,
        sup_q=sup_q,
        jacobian_min=float(jac.min()),
        residual=float(residual),
        dz_w=dz_w,
        pi_identity_error=float(pi_err),
        term_norms=tuple(norms),
    )


def jacobian_diagnostic(sol: BeltramiSolution) -> float:
    """Minimum over the grid of ``|dz w|^2 (1 - |q|^2)``; must be positive."""
    jac = np.abs(sol.dz_w.values) ** 2 * (1.0 - np.abs(sol.q.values) ** 2)
    m = float(jac.min())
    if not m > 0:
        raise DegenerateCoefficient(f"Jacobian of z -> w is not positive (min {m:.3g})")
    return m


def beltrami_residual(sol: BeltramiSolution) -> ComplexField:
    """``dzbar w - q dz w`` from spectral derivatives of ``w``."""
    return sol.dzbar_w - sol.q * sol.dz_w


def vector_field_residual(sol: BeltramiSolution, phi: ComplexField) -> ComplexField:
    """``dzbar w + phi (dz - dzbar) w / (conj(k) - k)``: ``w`` as a first integral."""
    k = sol.k
    return sol.dzbar_w + phi * (sol.dz_w - sol.dzbar_w) / k.kbar_minus_k
