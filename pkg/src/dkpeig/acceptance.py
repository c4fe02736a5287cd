"""The acceptance checks, runnable from the CLI (``dkpeig selftest``) and pytest.

Every check runs at N = 256, L = 12.  The default potential is the gaussian
``0.1 exp(-(x^2 + y^2))``.  The asymptotic-order check uses
``0.1 d^3/dx^3 exp(-(x^2 + y^2))``, whose x-antiderivatives decay so that the
large-``k`` series is valid term by term.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .beltrami import jacobian_lower_bound
from .characteristics import StepConfig, integrate, jost
from .eigenfunction import KCache, asymptotic_psi1, asymptotic_psi2, invert_k
from .hopf import SolverConfig, asymptotic_lambda1, solve_phi
from .linearized import asymptotic_lambda2, pipeline
from .spectral import ComplexField, Grid2D, PotentialSpec, pi_op, sample_potential


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        info = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return f"[{mark}] {self.number:2d} {self.name}: {info} ({self.seconds:.1f}s)"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, complex):
        return f"{v.real:.3g}{v.imag:+.3g}i"
    return str(v)


GRID = Grid2D(256, 12.0)
K0 = 4j


def gaussian(grid: Grid2D = GRID) -> ComplexField:
    return sample_potential(PotentialSpec.gaussian(0.1, 1.0), grid)


def gaussian_dx3(grid: Grid2D = GRID) -> ComplexField:
    return sample_potential(PotentialSpec.gaussian_dx(3, 0.1, 1.0), grid)


def wirtinger(fn, k: complex, delta: float = 1e-4):
    """Central differences ``(d/dk, d/dkbar)`` of an array-valued function of ``k``."""
    fr = (fn(k + delta) - fn(k - delta)) / (2 * delta)
    fi = (fn(k + 1j * delta) - fn(k - 1j * delta)) / (2 * delta)
    return 0.5 * (fr - 1j * fi), 0.5 * (fr + 1j * fi)


def criterion_1() -> CriterionResult:
    g = GRID
    z0 = ComplexField.zeros(g, "u")
    k = 2.0 + 3.0j
    hopf, belt, lin = pipeline(z0, k)
    X, Y = g.mesh
    zc, _ = g.complex_coords(k)
    errs = {
        "phi": hopf.phi.sup(),
        "xi-1": (lin.xi - 1.0).sup(),
        "w-z": float(np.abs(belt.w.values - zc).max()),
        "lambda2": float(np.abs(lin.lambda2.values + (X - k * Y)).max()),
    }
    lam = 6j
    cache = KCache(z0)
    pe1 = pe2 = 0.0
    for x, y in [(0.0, 0.0), (1.5, -3.0), (-6.0, 4.5), (9.0, 9.0)]:
        s = invert_k(lam, x, y, z0, cache=cache)
        pe1 = max(pe1, abs(s.psi1 - lam))
        pe2 = max(pe2, abs(s.psi2 - (x - lam * y)))
    errs["psi1"] = pe1
    errs["psi2"] = pe2
    worst = max(errs.values())
    return CriterionResult(1, "zero potential exact", worst <= 1e-13, {"max_error": worst, **errs})


def criterion_2() -> CriterionResult:
    sol = solve_phi(gaussian(), K0)
    ok = sol.residual <= 1e-8 and sol.iterations <= 50
    return CriterionResult(
        2, "Hopf residual", ok, {"residual": sol.residual, "iterations": sol.iterations}
    )


def _ratio(e4, e8):
    return e4 / e8 if e8 > 0 else float("inf")


def criterion_3() -> CriterionResult:
    u = gaussian_dx3()
    g = u.grid
    mask = g.interior(4.0)
    cfg = SolverConfig()
    errs = {"lambda1": [], "lambda2": [], "psi1": [], "psi2": []}
    for k in (4j, 8j):
        hopf, _, lin = pipeline(u, k, cfg)
        errs["lambda1"].append((hopf.lambda1 - asymptotic_lambda1(u, k)).sup(mask))
        errs["lambda2"].append((lin.lambda2 - asymptotic_lambda2(u, k)).sup(mask))
    pts = [(g.x[i], g.x[j]) for i in range(86, 171, 21) for j in range(86, 171, 21)]
    for lam in (4j, 8j):
        s1 = asymptotic_psi1(u, lam)
        s2 = asymptotic_psi2(u, lam)
        cache = KCache(u, cfg)
        e1 = e2 = 0.0
        for x, y in pts:
            s = invert_k(lam, x, y, u, cache=cache, enforce_region=False)
            ix, iy = g.index_of(x, y)
            e1 = max(e1, abs(s.psi1 - s1.values[ix, iy]))
            e2 = max(e2, abs(s.psi2 - s2.values[ix, iy]))
        errs["psi1"].append(e1)
        errs["psi2"].append(e2)
    ratios = {name: _ratio(*v) for name, v in errs.items()}
    ok = all(8.0 <= r <= 32.0 for r in ratios.values())
    return CriterionResult(3, "asymptotic order", ok, {f"{n}_ratio": r for n, r in ratios.items()})


def criterion_4() -> CriterionResult:
    u = gaussian()
    mask = GRID.interior(4.0)
    cache = {}

    def run(k):
        if k not in cache:
            cache[k] = pipeline(u, k)
        return cache[k]

    dk1, dkb1 = wirtinger(lambda k: run(k)[0].lambda1.values, K0)
    _, dkb2 = wirtinger(lambda k: run(k)[2].lambda2.values, K0)
    xi = run(K0)[2].xi.values
    d = {
        "dkbar_lambda1": float(np.abs(dkb1[mask]).max()),
        "dkbar_lambda2": float(np.abs(dkb2[mask]).max()),
        "dk_lambda1_minus_xi": float(np.abs((dk1 - xi)[mask]).max()),
    }
    return CriterionResult(4, "holomorphy", max(d.values()) <= 1e-6, d)


def criterion_5() -> CriterionResult:
    _, belt, _ = pipeline(gaussian(), K0)
    C = belt.constant
    bound = jacobian_lower_bound(C)
    ok = belt.residual <= 1e-9 and belt.jacobian_min >= bound
    return CriterionResult(
        5,
        "Beltrami",
        ok,
        {"residual": belt.residual, "jacobian_min": belt.jacobian_min, "bound": bound, "C": C},
    )


def criterion_6(points: int = 100, seed: int = 0) -> CriterionResult:
    u = gaussian()
    g = u.grid
    lam = 6j
    cache = KCache(u)
    rng = np.random.default_rng(seed)
    idx = np.flatnonzero(g.interior(6.0).ravel())
    chosen = rng.choice(idx, size=points, replace=False)
    worst = 0.0
    max_ratio = 0.0
    for flat in chosen:
        ix, iy = divmod(int(flat), g.N)
        s = invert_k(lam, g.x[ix], g.x[iy], u, cache=cache, with_psi2=False)
        worst = max(worst, s.roundtrip)
        if s.ratios:
            max_ratio = max(max_ratio, max(s.ratios))
    # injectivity on a fixed sample of spectral points in the certified semi-plane
    ks = [6j, 6j + 0.5, 6.5j - 0.3, 7j + 1.0, 8j, 6j - 1.0]
    sols = [cache.get(k).hopf for k in ks]
    C = max(s.measured_C for s in sols)
    rows = np.unravel_index(chosen, (g.N, g.N))
    margin = np.inf
    for a, b in itertools.combinations(sols, 2):
        dl = np.abs(a.lambda1.values[rows] - b.lambda1.values[rows])
        margin = min(margin, float((dl / ((1 - 2 * C) * abs(a.k.k - b.k.k))).min()))
    ok = worst <= 1e-10 and margin >= 1.0
    return CriterionResult(
        6,
        "k-inversion",
        ok,
        {"roundtrip": worst, "injectivity_margin": margin, "C": C, "max_step_ratio": max_ratio},
    )


def criterion_7() -> CriterionResult:
    u = gaussian()
    _, _, lin = pipeline(u, K0)
    X, Y = GRID.mesh
    ring = GRID.boundary_ring(0.9)
    ring_val = float(np.abs(lin.lambda2.values + (X - K0 * Y))[ring].max())
    ok = lin.residual <= 1e-8 and ring_val <= 1e-7
    return CriterionResult(
        7, "linearized residual and far field", ok, {"residual": lin.residual, "ring": ring_val}
    )


def criterion_8() -> CriterionResult:
    g = GRID
    u = gaussian()
    X, _ = g.mesh
    fwd = integrate(u, 0.3, 0.5, 0.0, -10.0)
    back = integrate(u, fwd.x[-1], fwd.lam[-1], fwd.y[-1], 0.0)
    rt = max(abs(back.x[-1] - 0.3), abs(back.lam[-1] - 0.5))
    ux = ComplexField(g, 0.1 * np.exp(-(X**2)), "u")
    drift = integrate(ux, 0.3, 0.2, -10.0, 10.0, StepConfig(estimate_error=False)).hamiltonian_drift
    a = jost(u, 0.3, 0.5, 0.0, 5.0)
    b = jost(u, 0.3, 0.5, 0.0, 10.0)
    stab = max(abs(a.phi1 - b.phi1), abs(a.phi2 - b.phi2))
    z = jost(ComplexField.zeros(g), 0.3, 0.5, 1.0, 10.0)
    free = max(abs(z.phi1 - 0.5), abs(z.phi2 - (0.3 - 0.5 * 1.0)))
    ok = rt <= 1e-8 and drift <= 1e-8 and stab <= 1e-8 and free <= 1e-12
    return CriterionResult(
        8,
        "characteristics",
        ok,
        {"roundtrip": rt, "energy_drift": drift, "jost_Y0_doubling": stab, "free_jost": free},
    )


def criterion_9(seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in (4j, 2.0 + 3.0j, -1.5 - 0.7j):
        v = rng.standard_normal((GRID.N, GRID.N)) + 1j * rng.standard_normal((GRID.N, GRID.N))
        f = ComplexField(GRID, v - v.mean())
        worst = max(worst, abs(pi_op(f, k).l2_norm() / f.l2_norm() - 1.0))
    return CriterionResult(9, "Pi unitarity", worst <= 1e-12, {"relative_error": worst})


def criterion_10() -> CriterionResult:
    sol = solve_phi(gaussian(), K0)
    radius = sol.ball_radius
    top = max(sol.iterate_norms)
    return CriterionResult(
        10, "ball preservation", top <= radius + 1e-12, {"max_iterate_norm": top, "radius": radius}
    )


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_criterion(n: int) -> CriterionResult:
    t = time.perf_counter()
    res = CRITERIA[n]()
    res.seconds = time.perf_counter() - t
    return res


def run_all(numbers=None, out=None) -> list[CriterionResult]:
    results = []
    for n in numbers or sorted(CRITERIA):
        r = run_criterion(n)
        if out is not None:
            print(r.line(), file=out, flush=True)
        results.append(r)
    return results
