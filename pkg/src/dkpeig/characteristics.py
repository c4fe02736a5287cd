"""Characteristics of ``d/dy + lam d/dx - u_x d/dlam`` for real ``lam``.

The flow ``x' = lam``, ``lam' = -u_x(x, y)`` is Hamiltonian with
``H = lam^2/2 + u``.  Its first integrals are eigenfunctions of the vector
field; the Jost pair is fixed by free motion ``x = x_- + lam_- y`` as
``y -> -inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import TrajectoryEscaped
from .spectral import ComplexField, derivative, dft_forward


@dataclass(frozen=True)
class StepConfig:
    h: float | None = None  # default 1e-3 * 2L
    interpolation: str = "bicubic"
    estimate_error: bool = True

    def __post_init__(self) -> None:
        if self.h is not None and not self.h > 0:
            raise ValueError("step size must be positive")
        if self.interpolation not in ("bicubic", "spectral"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")


def _stack(*fields: ComplexField) -> np.ndarray:
    return np.ascontiguousarray(np.stack([f.values.real for f in fields]))


class ForceField:
    """Off-grid ``u`` and ``u_x`` from grid samples of a real potential."""

    def __init__(self, u: ComplexField, interpolation: str = "bicubic"):
        self.grid = u.grid
        self.L = u.grid.L
        self.interpolation = interpolation
        ux = derivative(u, "x")
        if interpolation == "bicubic":
            # nodal slopes from spectral derivatives; the force is the x-derivative
            # of the interpolant, which keeps the discrete flow Hamiltonian
            self.tables = _stack(u, ux, derivative(u, "y"), derivative(ux, "y"))
        elif interpolation == "spectral":
            self._coef = dft_forward(u)
            px, py = self.grid.wavenumbers
            self._px = px[:, 0]
            self._py = py[0, :]
        else:
            raise ValueError(f"unknown interpolation {interpolation!r}")

    def _spectral(self, x: float, y: float) -> tuple[float, float]:
        ex = np.exp(1j * self._px * x)
        ey = np.exp(1j * self._py * y)
        cy = self._coef @ ey
        return float((ex @ cy).real), float(((1j * self._px * ex) @ cy).real)

    def evaluate(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ys = np.atleast_1d(np.asarray(ys, dtype=float))
        if self.interpolation == "bicubic":
            return _kernels.bicubic_eval_many(self.tables, self.L, xs, ys)
        out = np.array([self._spectral(a, b) for a, b in zip(xs, ys)]).reshape(-1, 2)
        return out[:, 0], out[:, 1]

    def rk4(self, x0, lam0, y0, h, nsteps):
        if self.interpolation == "bicubic":
            return _kernels.rk4_bicubic(self.tables, self.L, x0, lam0, y0, h, nsteps)
        return _rk4_generic(self._spectral, self.L, x0, lam0, y0, h, nsteps)


def _rk4_generic(fn, L, x0, lam0, y0, h, nsteps):
    ys = [y0]
    xs = [x0]
    ls = [lam0]
    x, lam, y = x0, lam0, y0
    for n in range(1, nsteps + 1):
        k1x, k1l = lam, -fn(x, y)[1]
        k2x, k2l = lam + 0.5 * h * k1l, -fn(x + 0.5 * h * k1x, y + 0.5 * h)[1]
        k3x, k3l = lam + 0.5 * h * k2l, -fn(x + 0.5 * h * k2x, y + 0.5 * h)[1]
        k4x, k4l = lam + h * k3l, -fn(x + h * k3x, y + h)[1]
        xn = x + h * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
        ln = lam + h * (k1l + 2 * k2l + 2 * k3l + k4l) / 6.0
        yn = y0 + n * h
        if abs(xn) > L or abs(yn) > L:
            return np.array(ys), np.array(xs), np.array(ls), True
        x, lam, y = xn, ln, yn
        ys.append(y)
        xs.append(x)
        ls.append(lam)
    return np.array(ys), np.array(xs), np.array(ls), False


@dataclass(frozen=True, eq=False)
class Trajectory:
    y: np.ndarray
    x: np.ndarray
    lam: np.ndarray
    h: float
    hamiltonian_drift: float
    error_estimate: float
    escaped: bool
    backend: str

    @property
    def samples(self) -> np.ndarray:
        """``(n, 3)`` array of ``(y, x, lam)``."""
        return np.column_stack([self.y, self.x, self.lam])

    @property
    def end(self) -> tuple[float, float, float]:
        return float(self.y[-1]), float(self.x[-1]), float(self.lam[-1])

    @property
    def lambda_minus(self) -> float:
        return float(self.lam[-1])

    @property
    def x_minus(self) -> float:
        """Intercept of the free line through the endpoint: ``x - y lam``."""
        return float(self.x[-1] - self.y[-1] * self.lam[-1])


def integrate(
    u: ComplexField | ForceField,
    x0: float,
    lambda0: float,
    y0: float,
    y_end: float,
    step: StepConfig | None = None,
) -> Trajectory:
    """Fixed-step RK4 from ``y0`` to ``y_end``.

    The step is the largest ``h <= step.h`` that divides ``y_end - y0``.
    With ``estimate_error`` the run is repeated at ``h/2`` and the endpoint
    gap divided by 15 is reported.  Raises :class:`TrajectoryEscaped` with
    the in-box segment if the path leaves ``[-L, L]^2``.
    """
    step = step or StepConfig()
    if isinstance(u, ForceField):
        ff = u
    else:
        ff = ForceField(u, step.interpolation)
    L = ff.L
    lambda0 = float(lambda0)
    if abs(x0) > L or abs(y0) > L or abs(y_end) > L:
        raise ValueError("initial point and y_end must lie in the box")
    h0 = step.h if step.h is not None else 1e-3 * 2 * L
    span = y_end - y0
    n = max(1, math.ceil(abs(span) / h0 - 1e-9)) if span != 0 else 0
    h = span / n if n else 0.0

    ys, xs, ls, escaped = ff.rk4(float(x0), lambda0, float(y0), h, n)
    uu, _ = ff.evaluate(xs, ys)
    energy = 0.5 * ls**2 + uu
    drift = float(np.abs(energy - energy[0]).max())

    err = 0.0
    if step.estimate_error and n and not escaped:
        _, xs2, ls2, esc2 = ff.rk4(float(x0), lambda0, float(y0), h / 2, 2 * n)
        if not esc2:
            err = max(abs(xs2[-1] - xs[-1]), abs(ls2[-1] - ls[-1])) / 15.0

    backend = _kernels.BACKEND if ff.interpolation == "bicubic" else "numpy"
    traj = Trajectory(ys, xs, ls, h, drift, float(err), bool(escaped), backend)
    if escaped:
        raise TrajectoryEscaped(
            f"characteristic from (x={x0}, lam={lambda0}) left the box at y={ys[-1]:.4g}", traj
        )
    return traj


@dataclass(frozen=True, eq=False)
class JostData:
    phi1: float
    phi2: float
    trajectory: Trajectory


def jost(
    u: ComplexField | ForceField,
    x0: float,
    lambda0: float,
    y0: float,
    Y0: float,
    step: StepConfig | None = None,
) -> JostData:
    """``(lam_-, x_-)`` by integrating back to ``y = -Y0`` and reading off the free line."""
    if Y0 <= 0:
        raise ValueError("Y0 must be positive")
    traj = integrate(u, x0, lambda0, y0, -Y0, step)
    return JostData(traj.lambda_minus, traj.x_minus, traj)
