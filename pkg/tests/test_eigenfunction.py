import numpy as np
import pytest

from dkpeig.eigenfunction import (
    KCache,
    asymptotic_psi1,
    asymptotic_psi2,
    certified_heights,
    invert_k,
    psi2_direct,
    vector_field_residual,
)
from dkpeig.errors import OutsideCertifiedRegion
from dkpeig.hopf import SolverConfig
from dkpeig.spectral import derivative, dx_inv

POINTS = [(0.0, 0.0), (0.375, -0.75), (1.5, 3.0), (-2.25, 0.9375)]


@pytest.fixture(scope="module")
def cache(gauss):
    return KCache(gauss)


def test_zero_potential(zero):
    for x, y in POINTS:
        s = invert_k(6j, x, y, zero)
        assert s.psi1 == 6j
        assert abs(s.psi2 - (x - 6j * y)) < 1e-13
        assert s.iterations == 1


@pytest.mark.parametrize("x,y", POINTS)
def test_roundtrip(gauss, cache, x, y):
    s = invert_k(6j, x, y, gauss, cache=cache)
    assert s.roundtrip <= 1e-10
    assert s.in_semiplane


def test_step_ratio_bounded(gauss, cache):
    s = invert_k(6j, 0.375, -0.75, gauss, cache=cache)
    C = max(cache.get(k).hopf.measured_C for k in (6j, s.k))
    assert s.ratios and max(s.ratios) <= 2 * C + 1e-3


def test_newton_agrees(gauss, cache):
    a = invert_k(6j, 1.5, 3.0, gauss, cache=cache)
    b = invert_k(6j, 1.5, 3.0, gauss, cache=cache, newton=True)
    assert abs(a.k - b.k) < 1e-11
    assert b.iterations <= a.iterations


def test_level_set_identity(gauss, cache):
    # Psi_1(x, y, Lambda_1(x, y, k)) = k
    k = 0.3 + 6.5j
    hopf = cache.get(k).hopf
    for x, y in POINTS:
        ix, iy = gauss.grid.index_of(x, y)
        lam = hopf.lambda1.values[ix, iy]
        s = invert_k(lam, x, y, gauss, cache=cache, with_psi2=False)
        assert abs(s.psi1 - k) < 1e-10


def test_psi2_two_assemblies(gauss, cache):
    for x, y in POINTS:
        s = invert_k(6j, x, y, gauss, cache=cache)
        assert abs(s.psi2 - psi2_direct(s, cache)) < 1e-10


def test_psi1_holomorphic_in_lambda(gauss, cache):
    d = 1e-4
    lam0 = 0.2 + 6j

    def p(lam):
        return invert_k(lam, 0.375, -0.75, gauss, cache=cache, with_psi2=False).psi1

    dbar = 0.5 * ((p(lam0 + d) - p(lam0 - d)) + 1j * (p(lam0 + 1j * d) - p(lam0 - 1j * d))) / (2 * d)
    assert abs(dbar) < 1e-6


def test_outside_certified_region(gauss):
    D, cover = certified_heights(gauss, SolverConfig())
    assert D < cover < 6
    with pytest.raises(OutsideCertifiedRegion):
        invert_k(complex(0, 0.9 * cover), 0.0, 0.0, gauss)


def test_off_grid_point_rejected(gauss, cache):
    with pytest.raises(ValueError):
        invert_k(6j, 0.1, 0.0, gauss, cache=cache)


def test_cache_quantization(gauss):
    c = KCache(gauss)
    a = c.get(6j)
    assert c.get(6j + 1e-14) is a
    assert c.get(6j + 1e-11) is not a
    assert len(c) == 2 and c.solves == 2


def test_series_low_orders(gauss):
    lam = 3 + 7j
    X, Y = gauss.grid.mesh
    assert (asymptotic_psi1(gauss, lam, 0) - lam).sup() == 0.0
    assert (asymptotic_psi1(gauss, lam, 1) - (lam + gauss / lam)).sup() < 1e-16
    p1 = asymptotic_psi1(gauss, lam, 2) - asymptotic_psi1(gauss, lam, 1)
    assert (p1 + dx_inv(derivative(gauss, "y")) / lam**2).sup() < 1e-14
    assert np.abs(asymptotic_psi2(gauss, lam, 0).values - (X - lam * Y)).max() == 0.0
    d1 = asymptotic_psi2(gauss, lam, 1).values - (X - lam * Y)
    assert np.abs(d1 + Y * gauss.values / lam).max() < 1e-14


def test_series_zero_potential(zero):
    X, Y = zero.grid.mesh
    assert (asymptotic_psi1(zero, 5j) - 5j).sup() == 0.0
    assert np.abs(asymptotic_psi2(zero, 5j).values - (X - 5j * Y)).max() == 0.0


def test_vector_field_zero_potential(zero):
    for which in ("psi1", "psi2"):
        rep = vector_field_residual(zero, [6j], [(1.5, 3.0)], which)
        assert rep.passed and rep.max_residual < 1e-12


@pytest.mark.parametrize("which", ["psi1", "psi2"])
def test_vector_field_gaussian(gauss, cache, which):
    rep = vector_field_residual(gauss, [6j], [(0.375, -0.75)], which, cache=cache)
    assert rep.passed, rep
