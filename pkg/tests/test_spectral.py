import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkpeig.spectral import (
    ComplexField,
    Grid2D,
    PotentialSpec,
    SpectralParam,
    derivative,
    dft_forward,
    dft_inverse,
    dx_inv,
    dzbar_inv,
    dzbar_inv_dx,
    multipliers,
    pi_op,
    sample_potential,
    sobolev_norm,
    x_mean_free,
)


def plane_wave(grid, mx, my):
    X, Y = grid.mesh
    px = np.pi * mx / grid.L
    py = np.pi * my / grid.L
    return ComplexField(grid, np.exp(1j * (px * X + py * Y))), px, py


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid2D(255, 12.0)
    with pytest.raises(ValueError):
        Grid2D(256, -1.0)
    g = Grid2D(64, 12.0)
    assert g.dx == pytest.approx(24 / 64)
    assert g.x[0] == -12.0 and g.x[-1] < 12.0


def test_index_of_rejects_off_grid(small_grid):
    assert small_grid.index_of(0.0, -12.0) == (32, 0)
    with pytest.raises(ValueError):
        small_grid.index_of(0.1, 0.0)


def test_field_is_immutable(small_grid):
    f = ComplexField.zeros(small_grid)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        ComplexField(small_grid, np.zeros((3, 3)))
    with pytest.raises(FloatingPointError):
        ComplexField(small_grid, np.full((64, 64), np.nan))


def test_spectral_param_rejects_real_axis():
    with pytest.raises(ValueError):
        SpectralParam(2.0)


@pytest.mark.parametrize("k", [4j, 2 + 3j, -1 - 0.5j])
def test_plane_wave_symbols(small_grid, k):
    f, px, py = plane_wave(small_grid, 3, -5)
    kb = np.conj(k)
    vals = f.values
    assert np.allclose(derivative(f, "x").values, 1j * px * vals, atol=1e-12)
    assert np.allclose(derivative(f, "zbar", k).values, 1j * (py + k * px) * vals, atol=1e-12)
    assert np.allclose(derivative(f, "z", k).values, 1j * (py + kb * px) * vals, atol=1e-12)
    assert np.allclose(pi_op(f, k).values, (py + kb * px) / (py + k * px) * vals, atol=1e-12)
    assert np.allclose(dzbar_inv_dx(f, k).values, px / (py + k * px) * vals, atol=1e-12)


def test_inverse_kills_zero_mode(small_grid):
    c = ComplexField.constant(small_grid, 2.5)
    assert dzbar_inv(c, 4j).sup() == 0.0
    assert pi_op(c, 4j).sup() == 0.0
    assert dzbar_inv_dx(c, 4j).sup() == 0.0


def test_dzbar_inverse_roundtrip(small_grid, rng):
    v = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    f = ComplexField(small_grid, v - v.mean())
    back = derivative(dzbar_inv(f, 2 + 3j), "zbar", 2 + 3j)
    assert (back - f).sup() < 1e-12


def test_transform_operator_bound(grid):
    # |p_x / (p_y + k p_x)| <= 1/|Im k| on the lattice
    for k in (4j, 1 + 0.5j):
        m = np.abs(multipliers(grid, k)["dzbar_inv_dx"]).max()
        assert m <= 1 / abs(k.imag) + 1e-15


def test_pi_unimodular_symbol(grid):
    sym = multipliers(grid, 3 - 2j)["pi"]
    nz = ~grid.zero_mode
    assert np.allclose(np.abs(sym[nz]), 1.0, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(
    re=st.floats(-5, 5),
    im=st.floats(0.05, 10).flatmap(lambda v: st.sampled_from([v, -v])),
    seed=st.integers(0, 2**31),
)
def test_pi_preserves_l2_norm(re, im, seed):
    g = Grid2D(32, 5.0)
    r = np.random.default_rng(seed)
    v = r.standard_normal((32, 32)) + 1j * r.standard_normal((32, 32))
    f = ComplexField(g, v - v.mean())
    assert pi_op(f, complex(re, im)).l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)


def test_dx_inv(small_grid):
    f, px, _ = plane_wave(small_grid, 2, 1)
    assert np.allclose(dx_inv(f).values, f.values / (1j * px), atol=1e-13)
    assert np.allclose(dx_inv(f, 2).values, -f.values / px**2, atol=1e-13)
    g, _, _ = plane_wave(small_grid, 0, 4)
    assert dx_inv(g).sup() == 0.0


def test_x_mean_free(small_grid):
    X, Y = small_grid.mesh
    f = ComplexField(small_grid, np.cos(np.pi * X / 12) + Y)
    out = x_mean_free(f)
    assert np.abs(out.values.mean(axis=0)).max() < 1e-14
    assert np.allclose(out.values, np.cos(np.pi * X / 12), atol=1e-13)


def test_dft_roundtrip_and_phase(small_grid):
    f, _, _ = plane_wave(small_grid, 3, 2)
    c = dft_forward(f)
    # a single coefficient of modulus 1 at the mode (3, 2)
    i, j = np.unravel_index(np.abs(c).argmax(), c.shape)
    assert small_grid.modes[i] == 3 and small_grid.modes[j] == 2
    assert abs(c[i, j] - 1.0) < 1e-13
    assert (dft_inverse(c, small_grid) - f).sup() < 1e-13


def test_sobolev_norm_single_mode(small_grid):
    f, px, py = plane_wave(small_grid, 3, -2)
    for l in (0, 1, 4):
        expected = np.sqrt(small_grid.area * (1 + px**2 + py**2) ** l)
        assert sobolev_norm(f, l) == pytest.approx(expected, rel=1e-12)


def test_gaussian_sample_and_h0_norm(grid, gauss):
    # ||u||_L2^2 = A^2 pi sigma^2 / 2 for A exp(-r^2/sigma^2)
    assert sobolev_norm(gauss, 0) == pytest.approx(np.sqrt(0.01 * np.pi / 2), rel=1e-10)
    assert gauss.values[128, 128] == pytest.approx(0.1)


def test_gaussian_dx_matches_spectral_derivative(grid, gauss):
    d3 = sample_potential(PotentialSpec.gaussian_dx(3, 0.1, 1.0), grid)
    ref = derivative(derivative(derivative(gauss, "x"), "x"), "x")
    assert (d3 - ref).sup() < 1e-10


def test_edge_warning():
    with pytest.warns(RuntimeWarning, match="box edge"):
        sample_potential(PotentialSpec.gaussian(0.1, 6.0), Grid2D(64, 12.0))
