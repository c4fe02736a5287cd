import numpy as np
import pytest

import dkpeig._kernels as kernels
from dkpeig._kernels import python_backend
from dkpeig.characteristics import ForceField, StepConfig, integrate, jost
from dkpeig.errors import TrajectoryEscaped
from dkpeig.spectral import ComplexField, derivative


@pytest.fixture(scope="module")
def ridge(grid):
    X, _ = grid.mesh
    return ComplexField(grid, 0.1 * np.exp(-(X**2)), "u")


def test_free_motion(zero):
    tr = integrate(zero, 0.3, 0.5, 1.0, -8.0)
    assert np.all(tr.lam == 0.5)
    assert np.abs(tr.x - (0.3 + 0.5 * (tr.y - 1.0))).max() < 1e-12
    j = jost(zero, 0.3, 0.5, 1.0, 10.0)
    assert abs(j.phi1 - 0.5) == 0.0
    assert abs(j.phi2 - (0.3 - 0.5)) < 1e-12


def test_default_step(gauss):
    tr = integrate(gauss, 0.3, 0.5, 0.0, -10.0)
    assert tr.h == pytest.approx(-10.0 / np.ceil(10.0 / 0.024))
    assert len(tr.y) == 418


def test_roundtrip(gauss):
    fwd = integrate(gauss, 0.3, 0.5, 0.0, -10.0)
    back = integrate(gauss, fwd.x[-1], fwd.lam[-1], fwd.y[-1], 0.0)
    assert abs(back.x[-1] - 0.3) <= 1e-8
    assert abs(back.lam[-1] - 0.5) <= 1e-8
    assert fwd.error_estimate < 1e-8


def test_energy_conservation(ridge):
    tr = integrate(ridge, 0.3, 0.2, -10.0, 10.0)
    assert tr.hamiltonian_drift <= 1e-8


def test_energy_drift_fourth_order_spectral(ridge):
    drift = [
        integrate(ridge, 0.3, 0.2, -10.0, 10.0, StepConfig(h=h, interpolation="spectral", estimate_error=False)).hamiltonian_drift
        for h in (0.096, 0.048)
    ]
    assert 12 <= drift[0] / drift[1] <= 20


def test_energy_drift_decreases_bicubic(ridge):
    # the bicubic force is only continuous across cells, so the rate is below h^4
    drift = [
        integrate(ridge, 0.3, 0.2, -10.0, 10.0, StepConfig(h=h, estimate_error=False)).hamiltonian_drift
        for h in (0.096, 0.048, 0.024)
    ]
    assert drift[0] / drift[1] > 4 and drift[1] / drift[2] > 4


def test_jost_constant_along_flow(gauss):
    a = jost(gauss, 0.3, 0.5, 0.0, 10.0)
    mid = integrate(gauss, 0.3, 0.5, 0.0, -3.0)
    b = jost(gauss, mid.x[-1], mid.lam[-1], mid.y[-1], 10.0)
    assert abs(a.phi1 - b.phi1) < 1e-8
    assert abs(a.phi2 - b.phi2) < 1e-8


def test_jost_doubling(gauss):
    a = jost(gauss, 0.3, 0.5, 0.0, 5.0)
    b = jost(gauss, 0.3, 0.5, 0.0, 10.0)
    assert max(abs(a.phi1 - b.phi1), abs(a.phi2 - b.phi2)) <= 1e-8


def test_escape_reports_partial(gauss):
    with pytest.raises(TrajectoryEscaped) as info:
        integrate(gauss, 0.3, 2.0, 0.0, -10.0)
    tr = info.value.trajectory
    assert tr.escaped
    assert np.all(np.abs(tr.x) <= 12.0)
    assert tr.y[-1] > -10.0


def test_interpolant_reproduces_nodes(gauss):
    ff = ForceField(gauss)
    g = gauss.grid
    ux = derivative(gauss, "x").values.real
    xs = g.x[100:110]
    ys = np.full(10, g.x[131])
    u, f = ff.evaluate(xs, ys)
    assert np.allclose(u, gauss.values.real[100:110, 131], atol=1e-15)
    assert np.allclose(f, ux[100:110, 131], atol=1e-14)


def test_bicubic_close_to_spectral(gauss):
    a = ForceField(gauss)
    b = ForceField(gauss, "spectral")
    r = np.random.default_rng(0)
    xs, ys = r.uniform(-3, 3, 50), r.uniform(-3, 3, 50)
    ua, fa = a.evaluate(xs, ys)
    ub, fb = b.evaluate(xs, ys)
    assert np.abs(ua - ub).max() < 1e-6
    assert np.abs(fa - fb).max() < 1e-4


def test_backends_agree(gauss):
    ff = ForceField(gauss)
    ref = python_backend.rk4_bicubic(ff.tables, 12.0, 0.3, 0.5, 0.0, -0.024, 200)
    out = kernels.rk4_bicubic(ff.tables, 12.0, 0.3, 0.5, 0.0, -0.024, 200)
    for a, b in zip(ref[:3], out[:3]):
        assert np.abs(a - b).max() < 1e-13
    assert ref[3] == out[3]
    esc_ref = python_backend.rk4_bicubic(ff.tables, 12.0, 11.9, 2.0, 0.0, 0.024, 50)
    esc_out = kernels.rk4_bicubic(ff.tables, 12.0, 11.9, 2.0, 0.0, 0.024, 50)
    assert esc_ref[3] and esc_out[3] and len(esc_ref[0]) == len(esc_out[0])


def test_step_config_validation():
    with pytest.raises(ValueError):
        StepConfig(h=-1.0)
    with pytest.raises(ValueError):
        StepConfig(interpolation="linear")


def test_env_forces_python_backend():
    import os
    import subprocess
    import sys

    env = dict(os.environ, DKPEIG_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import dkpeig._kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
