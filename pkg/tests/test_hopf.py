import numpy as np
import pytest

from dkpeig.errors import NonConvergence
from dkpeig.hopf import (
    SolverConfig,
    asymptotic_lambda1,
    contraction_diagnostic,
    fixed_point_map,
    hopf_residual,
    solve_phi,
)
from dkpeig.spectral import ComplexField, PotentialSpec, derivative, sample_potential


def test_zero_potential_single_iteration(zero):
    sol = solve_phi(zero, 2 + 3j)
    assert sol.iterations == 1
    assert sol.phi.sup() == 0.0
    assert sol.residual == 0.0
    assert (sol.lambda1 - (2 + 3j)).sup() == 0.0


def test_gaussian_residual_and_fixed_point(gauss):
    sol = solve_phi(gauss, 4j)
    assert sol.residual <= 1e-8
    assert sol.iterations <= 50
    assert (sol.phi - fixed_point_map(sol.phi, gauss, 4j)).sup() < 1e-10


def test_phi_is_mean_free(gauss):
    sol = solve_phi(gauss, 3 + 5j)
    assert abs(sol.phi.mean()) < 1e-15


def test_residual_in_xy_form(gauss):
    # phi_y + (k + phi) phi_x + u_x = 0 written directly in x, y
    k = 1 + 4j
    sol = solve_phi(gauss, k)
    phi = sol.phi
    r = derivative(phi, "y") + (phi + k) * derivative(phi, "x") + derivative(gauss, "x")
    assert r.sup() < 1e-12
    assert hopf_residual(phi, gauss, k).sup() < 1e-12


def test_conjugate_symmetry(gauss):
    # u real: phi(conj k) = conj(phi(k))
    a = solve_phi(gauss, 1.5 + 4j).phi
    b = solve_phi(gauss, 1.5 - 4j).phi
    assert (b - a.conj()).sup() < 1e-13


def test_ball_and_certified_ratio(gauss):
    sol = solve_phi(gauss, 4j)
    assert max(sol.iterate_norms) <= sol.ball_radius + 1e-12
    assert sol.k.contraction_ratio(sol.u_norm) < 1


def test_contraction_diagnostic(gauss):
    rep = contraction_diagnostic(gauss, 4j, samples=4)
    assert rep.certified
    assert 0 < rep.bound_fraction <= 1.0
    assert rep.empirical_lipschitz <= rep.ratio


def test_nonconvergence_for_small_im_k(grid):
    u = sample_potential(PotentialSpec.gaussian(3.0, 1.0), grid)
    with pytest.raises(NonConvergence) as info:
        solve_phi(u, 0.2j, SolverConfig(max_iter=60))
    assert info.value.diagnostic["certified_ratio"] > 1


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol_fixed_point=0)
    with pytest.raises(ValueError):
        SolverConfig(contraction_C=0.5)


def test_series_first_order_terms(gauss):
    k = 5 + 7j
    s0 = asymptotic_lambda1(gauss, k, order=0)
    s1 = asymptotic_lambda1(gauss, k, order=1)
    assert (s0 - k).sup() == 0.0
    assert (s1 - (k - gauss / k)).sup() < 1e-16


def test_series_of_zero_potential(zero):
    assert (asymptotic_lambda1(zero, 4j) - 4j).sup() == 0.0


def test_projected_series_order_gaussian(gauss):
    # for a potential with a nonzero x-integral the x-mean-free projection restores O(k^-4)
    mask = gauss.grid.interior(4.0)
    errs = [
        (solve_phi(gauss, k).lambda1 - asymptotic_lambda1(gauss, k, project=True)).sup(mask)
        for k in (4j, 8j)
    ]
    assert 8 <= errs[0] / errs[1] <= 32


def test_series_order_doubling_high(grid):
    u = sample_potential(PotentialSpec.gaussian_dx(3, 0.1, 1.0), grid)
    mask = grid.interior(4.0)
    errs = [(solve_phi(u, k).lambda1 - asymptotic_lambda1(u, k)).sup(mask) for k in (8j, 16j)]
    assert 8 <= errs[0] / errs[1] <= 32


def test_dealias_off_still_converges(gauss):
    a = solve_phi(gauss, 4j, SolverConfig(dealias=False))
    b = solve_phi(gauss, 4j)
    assert a.residual < 1e-8
    assert (a.phi - b.phi).sup() < 1e-10


def test_under_resolved_grid_fails_fast():
    from dkpeig.spectral import Grid2D

    u = sample_potential(PotentialSpec.gaussian(0.1, 1.0), Grid2D(64, 12.0))
    with pytest.raises(NonConvergence, match="under-resolves") as info:
        solve_phi(u, 4j)
    assert info.value.diagnostic["iterations"] < 20


def test_reflection_symmetry_for_even_potential(gauss):
    # u even in x: phi(-conj k)(x, y) = -conj(phi(k))(-x, y)
    k = 1.5 + 4j
    a = solve_phi(gauss, k).phi.values
    b = solve_phi(gauss, -np.conj(k)).phi.values
    ref = -np.conj(np.roll(a[::-1], 1, axis=0))  # x -> -x on the periodic grid
    assert np.abs(b - ref).max() < 1e-13
    # without the reflection the relation does not hold
    assert np.abs(b - np.conj(a)).max() > 1e-3
