import numpy as np
import pytest

from dkpeig.hopf import solve_phi
from dkpeig.linearized import (
    asymptotic_lambda2,
    linear_residual,
    pipeline,
    solve_xi1,
    xi1_substitution_residual,
)
from dkpeig.spectral import ComplexField, PotentialSpec, derivative, dx_inv, pi_op, sample_potential


def test_zero_potential(zero):
    hopf, belt, lin = pipeline(zero, 1 + 2j)
    X, Y = zero.grid.mesh
    assert lin.xi1.sup() == 0.0
    assert (lin.xi - 1.0).sup() == 0.0
    assert np.abs(lin.lambda2.values + (X - (1 + 2j) * Y)).max() < 1e-13


def test_xi1_equation(gauss_k4):
    hopf, _, lin = gauss_k4
    assert lin.xi1_residual <= 1e-10
    assert xi1_substitution_residual(lin.xi1, hopf.phi, hopf.k) <= 1e-10
    # differential form: Xi solves the homogeneous linearized equation
    xi = lin.xi
    r = linear_residual(xi, derivative(xi, "x"), derivative(xi, "y"), hopf)
    assert r.sup() < 1e-12


def test_xi1_off_zero_mode_matches_pi_form(gauss_k4):
    # away from the mean, T = (Pi - 1)/(conj k - k)
    hopf, _, lin = gauss_k4
    k = hopf.k
    g = hopf.phi * lin.xi1 + hopf.phi
    gm = g - g.mean()
    lhs = lin.xi1 + (pi_op(gm, k) - gm) / k.kbar_minus_k
    assert lhs.sup() < 1e-10


def test_sup_xi1_bounded_by_2C(gauss_k4):
    hopf, _, lin = gauss_k4
    assert lin.xi1.sup() <= 2 * hopf.measured_C < 1


def test_xi_is_dk_lambda1(gauss):
    k, d = 3 + 4j, 1e-4
    lam = lambda kk: solve_phi(gauss, kk).lambda1.values
    dk = 0.5 * ((lam(k + d) - lam(k - d)) - 1j * (lam(k + 1j * d) - lam(k - 1j * d))) / (2 * d)
    xi = solve_xi1(solve_phi(gauss, k).phi, k) + 1.0
    assert np.abs(dk - xi.values).max() < 1e-6


def test_linearized_residual(gauss_k4):
    _, _, lin = gauss_k4
    assert lin.residual <= 1e-8


@pytest.mark.parametrize("power", [1, 2])
def test_product_structure(gauss_k4, power):
    # Xi * w^n solves the same linear equation
    hopf, belt, lin = gauss_k4
    w = belt.w
    wx, wy = belt.gradient()
    xi = lin.xi
    wn = w.values**power
    dwn = power * w.values ** (power - 1)
    lam = ComplexField(w.grid, xi.values * wn)
    lx = ComplexField(w.grid, derivative(xi, "x").values * wn + xi.values * dwn * wx.values)
    ly = ComplexField(w.grid, derivative(xi, "y").values * wn + xi.values * dwn * wy.values)
    r = linear_residual(lam, lx, ly, hopf)
    scale = np.abs(lam.values).max()
    assert r.sup() <= 1e-12 * max(scale, 1.0)


def test_series_low_orders(gauss):
    k = 4 + 6j
    X, Y = gauss.grid.mesh
    s0 = asymptotic_lambda2(gauss, k, 0)
    s1 = asymptotic_lambda2(gauss, k, 1)
    assert np.abs(s0.values + (X - k * Y)).max() < 1e-13
    assert np.abs(s1.values - (-(X - k * Y) + Y * gauss.values / k)).max() < 1e-13
    uy = derivative(gauss, "y")
    s2 = asymptotic_lambda2(gauss, k, 2)
    t2 = (X * gauss + dx_inv(Y * uy * 2.0 + gauss)) / k**2
    assert (s2 - s1 + t2).sup() < 1e-13


def test_series_order_doubling(grid):
    u = sample_potential(PotentialSpec.gaussian_dx(3, 0.1, 1.0), grid)
    mask = grid.interior(4.0)
    errs = [(pipeline(u, k)[2].lambda2 - asymptotic_lambda2(u, k)).sup(mask) for k in (8j, 16j)]
    assert 8 <= errs[0] / errs[1] <= 32


def test_holomorphic_in_k(gauss):
    k, d = 4j, 1e-4
    f = lambda kk: pipeline(gauss, kk)[2].lambda2.values
    dkb = 0.5 * ((f(k + d) - f(k - d)) + 1j * (f(k + 1j * d) - f(k - 1j * d))) / (2 * d)
    assert np.abs(dkb[gauss.grid.interior(4.0)]).max() < 1e-6
