"""Command-line entry point ``dkpeig``.

Exit codes: 0 success, 1 solver error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import SolverError
from .io import ConfigError, RunConfig, load_config, serialize_field

log = logging.getLogger("dkpeig")

OUTPUT_ENV = "DKPEIG_OUTPUT_DIR"
COMMANDS = ("solve-hopf", "beltrami", "lambda2", "eigen", "jost", "asymptotics", "selftest")


def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _potential(cfg: RunConfig):
    from .spectral import Grid2D, PotentialSpec, sample_potential

    try:
        grid = Grid2D(cfg["N"], cfg["L"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    kind = cfg["potential"]
    center = (cfg["center_x"], cfg["center_y"])
    if kind == "gaussian":
        spec = PotentialSpec.gaussian(cfg["amplitude"], cfg["sigma"], center)
    elif kind == "gaussian_dx":
        spec = PotentialSpec.gaussian_dx(cfg["order"], cfg["amplitude"], cfg["sigma"], center)
    elif kind == "gaussians":
        if not cfg["bumps"] or any(len(b) != 4 for b in cfg["bumps"]):
            raise ConfigError("key 'bumps' needs 'A,sigma,cx,cy; ...' for potential = gaussians")
        spec = PotentialSpec.gaussians(cfg["bumps"])
    elif kind == "zero":
        spec = PotentialSpec.gaussian(0.0, 1.0)
    elif kind == "file":
        if not cfg["potential_file"]:
            raise ConfigError("key 'potential_file' is required for potential = file")
        spec = PotentialSpec.from_file(cfg["potential_file"])
    else:
        raise ConfigError(f"key 'potential': unknown kind {kind!r}")
    try:
        return grid, spec, sample_potential(spec, grid)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load potential: {exc}") from None


def _solver_config(cfg: RunConfig):
    from .hopf import SolverConfig

    try:
        return SolverConfig(
            tol_fixed_point=cfg["tol_fixed_point"],
            tol_residual=cfg["tol_residual"],
            max_iter=cfg["max_iter"],
            alpha_l=cfg["alpha_l"],
            sobolev_order=cfg["sobolev_order"],
            dealias=cfg["dealias"],
            contraction_C=cfg["contraction_C"],
            series_max_terms=cfg["series_max_terms"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


class Writer:
    def __init__(self, outdir: Path, binary: bool):
        self.outdir = outdir
        self.binary = binary
        self.files: list[str] = []
        outdir.mkdir(parents=True, exist_ok=True)

    def field(self, f, stem: str, k=None) -> None:
        p = serialize_field(f, self.outdir / f"{stem}.csv", k=k)
        self.files.append(p.name)
        if self.binary:
            p = serialize_field(f, self.outdir / f"{stem}.bin", k=k)
            self.files.append(p.name)

    def table(self, name: str, header: list[str], rows) -> None:
        with open(self.outdir / name, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
        self.files.append(name)


def _cmd_solve_hopf(cfg, u, scfg, out: Writer) -> list[dict]:
    from .hopf import solve_phi

    results = []
    for i, k in enumerate(cfg["k"]):
        sol = solve_phi(u, k, scfg)
        out.field(sol.phi, f"phi_k{i}", k)
        out.field(sol.lambda1, f"lambda1_k{i}", k)
        results.append(
            {
                "k": _cx(k),
                "iterations": sol.iterations,
                "residual": sol.residual,
                "h4_norm": sol.h4_norm,
                "u_norm": sol.u_norm,
                "ball_radius": sol.ball_radius,
                "certified_ratio": sol.k.contraction_ratio(sol.u_norm, scfg.alpha_l),
                "measured_ratio": sol.contraction_ratio,
                "sup_phi": sol.sup_phi,
            }
        )
    return results


def _cmd_beltrami(cfg, u, scfg, out: Writer) -> list[dict]:
    from .beltrami import compute_q, jacobian_lower_bound, solve_w
    from .hopf import solve_phi

    results = []
    for i, k in enumerate(cfg["k"]):
        hopf = solve_phi(u, k, scfg)
        belt = solve_w(compute_q(hopf.phi, k), k, scfg)
        out.field(belt.q, f"q_k{i}", k)
        out.field(belt.w, f"w_k{i}", k)
        results.append(
            {
                "k": _cx(k),
                "hopf_iterations": hopf.iterations,
                "sup_q": belt.sup_q,
                "terms": belt.terms,
                "residual": belt.residual,
                "affine": _cx(belt.affine),
                "jacobian_min": belt.jacobian_min,
                "jacobian_bound": jacobian_lower_bound(belt.constant),
                "C": belt.constant,
            }
        )
    return results


def _cmd_lambda2(cfg, u, scfg, out: Writer) -> list[dict]:
    from .linearized import pipeline

    results = []
    for i, k in enumerate(cfg["k"]):
        hopf, belt, lin = pipeline(u, k, scfg)
        out.field(lin.xi, f"xi_k{i}", k)
        out.field(lin.lambda2, f"lambda2_k{i}", k)
        results.append(
            {
                "k": _cx(k),
                "hopf_residual": hopf.residual,
                "beltrami_residual": belt.residual,
                "xi1_residual": lin.xi1_residual,
                "linearized_residual": lin.residual,
                "sup_xi1": lin.xi1.sup(),
            }
        )
    return results


def _cmd_eigen(cfg, u, scfg, out: Writer) -> list[dict]:
    from .eigenfunction import KCache, invert_k

    cache = KCache(u, scfg)
    rows = []
    results = []
    for lam in cfg["lambda"]:
        for pt in cfg["points"]:
            if len(pt) != 2:
                raise ConfigError("key 'points' needs 'x,y; x,y; ...'")
            try:
                u.grid.index_of(*pt)
            except ValueError as exc:
                raise ConfigError(f"key 'points': {exc}") from None
            s = invert_k(
                lam, pt[0], pt[1], u, cache=cache,
                newton=cfg["newton"], enforce_region=cfg["enforce_region"],
            )
            rows.append([s.x, s.y, s.lam.real, s.lam.imag, s.psi1.real, s.psi1.imag,
                         s.psi2.real, s.psi2.imag, s.iterations, s.roundtrip])
            results.append(
                {
                    "lambda": _cx(lam),
                    "x": s.x,
                    "y": s.y,
                    "k": _cx(s.k),
                    "psi2": _cx(s.psi2),
                    "iterations": s.iterations,
                    "roundtrip": s.roundtrip,
                    "step_ratios": list(s.ratios),
                    "in_semiplane": s.in_semiplane,
                }
            )
    out.table(
        "eigen.csv",
        ["x", "y", "lambda_re", "lambda_im", "psi1_re", "psi1_im", "psi2_re", "psi2_im",
         "iterations", "roundtrip"],
        rows,
    )
    return results


def _cmd_jost(cfg, u, scfg, out: Writer) -> list[dict]:
    from .characteristics import StepConfig, jost

    try:
        step = StepConfig(h=cfg["step"], interpolation=cfg["interpolation"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    j = jost(u, cfg["x0"], cfg["lambda0"], cfg["y0"], cfg["Y0"], step)
    t = j.trajectory
    out.table("trajectory.csv", ["y", "x", "lambda"], t.samples.tolist())
    return [
        {
            "x0": cfg["x0"],
            "lambda0": cfg["lambda0"],
            "y0": cfg["y0"],
            "Y0": cfg["Y0"],
            "phi1": j.phi1,
            "phi2": j.phi2,
            "step": t.h,
            "steps": len(t.y) - 1,
            "error_estimate": t.error_estimate,
            "hamiltonian_drift": t.hamiltonian_drift,
            "backend": t.backend,
        }
    ]


def _cmd_asymptotics(cfg, u, scfg, out: Writer) -> list[dict]:
    from .eigenfunction import asymptotic_psi1, asymptotic_psi2
    from .hopf import asymptotic_lambda1
    from .linearized import asymptotic_lambda2, pipeline

    order = cfg["series_order"]
    if not 0 <= order <= 3:
        raise ConfigError("key 'series_order' must be in 0..3")
    mask = u.grid.interior(u.grid.L / 3)
    results = []
    for i, k in enumerate(cfg["k"]):
        s1 = asymptotic_lambda1(u, k, order)
        s2 = asymptotic_lambda2(u, k, order)
        out.field(s1, f"lambda1_series_k{i}", k)
        out.field(s2, f"lambda2_series_k{i}", k)
        hopf, _, lin = pipeline(u, k, scfg)
        results.append(
            {
                "k": _cx(k),
                "order": order,
                "lambda1_error": (hopf.lambda1 - s1).sup(mask),
                "lambda2_error": (lin.lambda2 - s2).sup(mask),
            }
        )
    for i, lam in enumerate(cfg["lambda"]):
        out.field(asymptotic_psi1(u, lam, order), f"psi1_series_l{i}", lam)
        out.field(asymptotic_psi2(u, lam, order), f"psi2_series_l{i}", lam)
        results.append({"lambda": _cx(lam), "order": order})
    return results


HANDLERS = {
    "solve-hopf": _cmd_solve_hopf,
    "beltrami": _cmd_beltrami,
    "lambda2": _cmd_lambda2,
    "eigen": _cmd_eigen,
    "jost": _cmd_jost,
    "asymptotics": _cmd_asymptotics,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dkpeig", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("-c", "--config", help="flat 'key = value' configuration file")
    p.add_argument(
        "-s", "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a configuration key (repeatable)",
    )
    p.add_argument("-o", "--output-dir", help=f"output directory (overrides ${OUTPUT_ENV})")
    p.add_argument("--only", type=int, action="append", help="selftest: run only this criterion")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _json_default(o):
    if isinstance(o, complex):
        return _cx(o)
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "selftest":
        from .acceptance import run_all

        results = run_all(args.only, out=sys.stdout)
        return 0 if all(r.passed for r in results) else 1

    cfg = load_config(args.config, args.set)
    outdir = Path(args.output_dir or os.environ.get(OUTPUT_ENV) or cfg["output_dir"])
    grid, spec, u = _potential(cfg)
    scfg = _solver_config(cfg)
    writer = Writer(outdir, cfg["binary"])
    t = time.perf_counter()
    results = HANDLERS[args.command](cfg, u, scfg, writer)
    manifest = {
        "command": args.command,
        "grid": {"N": grid.N, "L": grid.L},
        "potential": spec.to_dict(),
        "config": cfg.to_dict(),
        "backend": _kernels.BACKEND,
        "results": results,
        "files": writer.files,
        "wall_time": time.perf_counter() - t,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    print(outdir / "manifest.json")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"dkpeig: configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"dkpeig: solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
