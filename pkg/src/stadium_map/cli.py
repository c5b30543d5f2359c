"""Command-line front end.

Data goes to ``--out`` (or stdout); diagnostics and the run manifest go to
stderr, or to ``<out>.manifest.json`` when an output file is named, so the
data files themselves stay byte-stable across identical runs.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__
from .conformal_map import DiskMap, write_mesh_csv
from .errors import ConvergenceError, DomainError, SolverError
from .geometry import DomainGeometry
from .monte_carlo import McConfig, run as run_mc
from .rect_exact import rect_end_measure
from .symm_solver import CollocationConfig, solve

log = logging.getLogger("stadium_map")

DEFAULT_NU = 256
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_H = 1e-3
DEFAULT_N = 10**6


def _fmt(x: float) -> str:
    return f"{x:.15g}"


def _geometry(shape: str, L: float) -> DomainGeometry:
    return DomainGeometry.stadium(L) if shape == "stadium" else DomainGeometry.rectangle(L)


def _nu_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty nu list")
    return values


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_manifest(args, params: dict, started: float) -> None:
    manifest = {
        "command": args.command,
        "parameters": params,
        "version": __version__,
        "duration_s": round(time.perf_counter() - started, 6),
    }
    out = getattr(args, "out", None)
    if out and out != "-":
        with open(f"{out}.manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    else:
        print(json.dumps(manifest), file=sys.stderr)


def _collocation(args) -> CollocationConfig:
    return CollocationConfig(nu=args.nu, quadrature_tol=args.quadrature_tol)


# --- commands -------------------------------------------------------------------

def cmd_solve(args) -> dict:
    geom = _geometry(args.shape, args.L)
    sol = solve(geom, _collocation(args))
    log.info("nu=%d measure=%.12f residual=%.3e", sol.nu, sol.dome_measure, sol.residual_norm)
    with _output(args.out) as fh:
        json.dump(sol.to_dict(), fh)
        fh.write("\n")
    return {"shape": args.shape, "L": args.L, "nu": args.nu, "quadrature_tol": args.quadrature_tol}


def cmd_convergence(args) -> dict:
    geom = _geometry(args.shape, args.L)
    rows = []
    for nu in args.nu_list:
        sol = solve(geom, CollocationConfig(nu=nu, quadrature_tol=args.quadrature_tol))
        log.info("nu=%d p=%.12f residual=%.3e", nu, sol.dome_measure, sol.residual_norm)
        rows.append((nu, sol.dome_measure))
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("nu", "p"))
        for nu, p in rows:
            w.writerow((nu, _fmt(p)))
    return {"shape": args.shape, "L": args.L, "nu_list": args.nu_list,
            "quadrature_tol": args.quadrature_tol}


def cmd_sweep(args) -> dict:
    if not (0 < args.L_min <= args.L_max) or args.steps < 1:
        raise DomainError("need 0 < L-min <= L-max and steps >= 1")
    Ls = np.linspace(args.L_min, args.L_max, args.steps) if args.steps > 1 else np.array([args.L_min])
    rows = []
    for L in Ls:
        L = float(L)
        p_stadium = solve(DomainGeometry.stadium(L), _collocation(args)).dome_measure
        p_rect = rect_end_measure(L)
        if not p_rect > p_stadium:
            log.warning("L=%g: rectangle measure %.12g does not exceed stadium %.12g", L, p_rect, p_stadium)
        log.info("L=%g stadium=%.12f rect=%.12f", L, p_stadium, p_rect)
        rows.append((L, p_stadium, p_rect))
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("L", "p_stadium", "p_rect_exact"))
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return {"L_min": args.L_min, "L_max": args.L_max, "steps": args.steps, "nu": args.nu,
            "quadrature_tol": args.quadrature_tol}


def cmd_mc(args) -> dict:
    geom = _geometry(args.shape, args.L)
    cfg = McConfig(N=args.N, h=args.h, seed=args.seed)
    res = run_mc(geom, cfg)
    log.info("hits=%d/%d p_hat=%.6f +- %.6f (right %d, left %d)", res.hits_domes, res.trials,
             res.p_hat, res.std_error, res.hits_right, res.hits_left)
    with _output(args.out) as fh:
        json.dump(res.to_dict(geom), fh)
        fh.write("\n")
    return {"shape": args.shape, "L": args.L, "N": args.N, "h": args.h, "seed": args.seed}


def cmd_rect(args) -> dict:
    p = rect_end_measure(args.L)
    with _output(args.out) as fh:
        print(_fmt(p), file=fh)
    return {"L": args.L}


def cmd_mesh(args) -> dict:
    geom = _geometry(args.shape, args.L)
    sol = solve(geom, _collocation(args))
    rows = DiskMap(sol).export_mesh(args.rays, args.circles, args.samples)
    with _output(args.out) as fh:
        write_mesh_csv(rows, fh)
    return {"shape": args.shape, "L": args.L, "nu": args.nu, "circles": args.circles,
            "rays": args.rays, "samples": args.samples, "quadrature_tol": args.quadrature_tol}


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stadium-map",
                                     description="Conformal maps and harmonic measure of the stadium.")
    parser.add_argument("--version", action="version", version=__version__)
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        return subparsers.add_parser(name, parents=[verbosity], help=help)

    def common(p, nu_default=DEFAULT_NU, shape=True, nu=True):
        if shape:
            p.add_argument("--shape", choices=("stadium", "rect"), default="stadium")
            p.add_argument("--L", type=float, default=1.0)
        if nu:
            p.add_argument("--nu", type=int, default=nu_default)
            p.add_argument("--quadrature-tol", type=float, default=DEFAULT_QUAD_TOL)
        p.add_argument("--out", default=None, help="output file (default stdout)")

    common(add("solve", "solve Symm's equation, write solution JSON"))

    p = add("convergence", "dome measure for a list of nu, CSV")
    common(p, nu=False)
    p.add_argument("--nu-list", type=_nu_list, default=_nu_list("64,100,128,256,300,350,500,512"))
    p.add_argument("--quadrature-tol", type=float, default=DEFAULT_QUAD_TOL)

    p = add("sweep", "stadium vs exact rectangle measure over L, CSV")
    common(p, nu_default=200, shape=False)
    p.add_argument("--L-min", type=float, default=0.1)
    p.add_argument("--L-max", type=float, default=3.0)
    p.add_argument("--steps", type=int, default=30)

    p = add("mc", "walk-on-circles Monte Carlo estimate, JSON")
    common(p, nu=False)
    p.add_argument("--N", type=int, default=DEFAULT_N)
    p.add_argument("--h", type=float, default=DEFAULT_H)
    p.add_argument("--seed", type=int, default=0)

    p = add("rect", "exact end measure of the 2L x 2 rectangle")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--out", default=None)

    p = add("mesh", "images of level curves and rays, CSV")
    common(p)
    p.add_argument("--circles", type=int, default=8)
    p.add_argument("--rays", type=int, default=16)
    p.add_argument("--samples", type=int, default=64)
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "sweep": cmd_sweep,
    "mc": cmd_mc,
    "rect": cmd_rect,
    "mesh": cmd_mesh,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    started = time.perf_counter()
    try:
        params = COMMANDS[args.command](args)
    except (DomainError, SolverError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_manifest(args, params, started)
    return 0


if __name__ == "__main__":
    sys.exit(main())
