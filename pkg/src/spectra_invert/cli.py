"""Command-line interface: CSV data emission for the inversion pipelines.

Every subcommand writes its outputs atomically into --output-dir together
with a resolved_config.json echo of the settings actually used.  Values in
a --config JSON file override defaults; explicit command-line flags override
both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np

from . import constructive, functional
from .eigensolve import SolverConfig, ground_energy
from .errors import SpectraInvertError
from .kinetic import (default_v_grid, k_function_closed, kinetic_to_trajectory,
                      trajectory_to_kinetic)
from .runtime import thread_count
from .shapes import AnalyticShape, PotentialShape, exponential, harmonic, \
    sech_squared, shifted_power
from .trajectory import (NumericTrajectory, SechSquaredTrajectory,
                         analytic_trajectory, fit_head, import_trajectory_csv)

__all__ = ["main"]

_ANALYTIC_SHAPES = {
    "sech2": sech_squared,
    "harmonic": harmonic,
    "exponential": exponential,
}


def _fmt(value) -> str:
    return f"{value:.15g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if c is None else _fmt(c) for c in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_shape(spec: str) -> PotentialShape:
    if spec in _ANALYTIC_SHAPES:
        return _ANALYTIC_SHAPES[spec]()
    if spec.startswith("power:"):
        parts = spec.split(":")[1:]
        power = float(Fraction(parts[0]))
        mult = float(Fraction(parts[1])) if len(parts) > 1 else 1.0
        shift = float(Fraction(parts[2])) if len(parts) > 2 else -1.0
        return shifted_power(shift, mult, power)
    if spec.startswith("quadratic:"):
        mult = float(Fraction(spec.split(":", 1)[1]))
        return shifted_power(-1.0, mult, 2.0)
    raise argparse.ArgumentTypeError(f"unknown shape spec {spec!r}")


def _load_trajectory(args):
    if args.input:
        return import_trajectory_csv(args.input)
    if args.analytic:
        return analytic_trajectory(args.analytic)
    raise UsageError("one of --analytic or --input is required")


class UsageError(Exception):
    pass


def _v_grid(args) -> np.ndarray:
    return np.geomspace(args.v_min, args.v_max, args.v_points)


def _resolved(args, parser: argparse.ArgumentParser) -> dict:
    """Merge defaults, config-file values, and explicit flags."""
    merged = vars(args).copy()
    if args.config:
        with open(args.config) as fh:
            from_file = json.load(fh)
        explicit = _explicit_flags(parser)
        for key, value in from_file.items():
            key = key.replace("-", "_")
            if key not in merged:
                raise UsageError(f"unknown config key {key!r}")
            if key not in explicit:
                merged[key] = value
                setattr(args, key, value)
    merged["threads"] = thread_count()
    merged.pop("func", None)
    return merged


def _explicit_flags(parser) -> set[str]:
    # argv tokens that name a flag; good enough to give flags precedence
    out = set()
    for tok in sys.argv[1:]:
        if tok.startswith("--"):
            out.add(tok[2:].split("=")[0].replace("-", "_"))
    return out


def _emit_config(cfg: dict, outdir: str) -> None:
    _write_json(os.path.join(outdir, "resolved_config.json"), cfg)


# --- subcommands -------------------------------------------------------------

def cmd_forward(args, cfg):
    shape = _parse_shape(args.shape)
    traj = NumericTrajectory(shape)
    rows = []
    for v in _v_grid(args):
        rows.append((v, traj.F(v), traj.Fprime(v)))
    write_csv(os.path.join(args.output_dir, "forward.csv"),
              ["v", "F", "Fprime"], rows)


def cmd_trajectory(args, cfg):
    traj = _load_trajectory(args)
    rows = []
    for v in _v_grid(args):
        F = traj.F(v)
        Fp = traj.Fprime(v)
        rows.append((v, F, Fp, F / v, F - v * Fp))
    write_csv(os.path.join(args.output_dir, "trajectory.csv"),
              ["v", "F", "Fprime", "R", "s"], rows)


def cmd_head_fit(args, cfg):
    traj = _load_trajectory(args)
    head = fit_head(traj, v1=args.v1)
    out = {"kind": head.kind, "f0": head.f0, "b": head.b,
           "A": head.A, "q": head.q}
    print(json.dumps(out, indent=2, sort_keys=True))
    _write_json(os.path.join(args.output_dir, "head.json"), out)


def cmd_invert_constructive(args, cfg):
    traj = _load_trajectory(args)
    ccfg = constructive.ConstructiveConfig(
        v1=args.v1, sigma=args.sigma, h=args.h, steps=args.steps,
        bounded=args.bounded)
    report = constructive.run(traj, ccfg)
    report.write_csv(os.path.join(args.output_dir, "reconstruction.csv"))
    report.write_json(os.path.join(args.output_dir, "reconstruction.json"), ccfg)


def cmd_invert_functional(args, cfg):
    traj = _load_trajectory(args)
    seed = _parse_shape(args.seed)
    fcfg = functional.FunctionalConfig(
        x_grid=np.linspace(args.x_min, args.x_max, args.x_points),
        max_iterations=args.iterations)
    xs = fcfg.x_grid
    write_csv(os.path.join(args.output_dir, "iterate_0.csv"),
              ["x", "f"], zip(xs, seed(xs)))
    records = functional.run(traj, seed, fcfg)
    summary = []
    for rec in records:
        write_csv(os.path.join(args.output_dir, f"iterate_{rec.index}.csv"),
                  ["x", "f"], zip(xs, rec.values))
        summary.append((rec.index, rec.dist_prev, rec.dist_target))
    write_csv(os.path.join(args.output_dir, "summary.csv"),
              ["n", "dist_prev", "dist_target"], summary)


def cmd_kinetic(args, cfg):
    traj = _load_trajectory(args)
    kin = trajectory_to_kinetic(traj, _v_grid(args))
    write_csv(os.path.join(args.output_dir, "kinetic.csv"),
              ["s", "fbar"], zip(kin.s, kin.fbar))
    if args.k_closed:
        kf = k_function_closed(_parse_shape(args.k_closed))
        xs = np.linspace(args.x_min, args.x_max, args.x_points)
        write_csv(os.path.join(args.output_dir, "k_function.csv"),
                  ["x", "K"], ((x, kf.func(x)) for x in xs))


def cmd_figures(args, cfg):
    out = args.output_dir
    if args.name == "fig1":
        rows = []
        for n in range(4):
            traj = SechSquaredTrajectory(level=n)
            v_c = float(n * (n + 1))
            for v in np.linspace(v_c, 30.0, 120):
                # the level emerges from the continuum at v_c with F -> 0
                rows.append((n, v, 0.0 if v <= v_c else traj.F(v)))
        write_csv(os.path.join(out, "fig1.csv"), ["n", "v", "F"], rows)
    elif args.name == "fig4":
        exp_traj = NumericTrajectory(exponential())
        sech_traj = SechSquaredTrajectory()
        rows = []
        for v in np.geomspace(0.5, 100.0, 80):
            rows.append((v, exp_traj.F(v), sech_traj.F(v)))
        write_csv(os.path.join(out, "fig4.csv"),
                  ["v", "F_exponential", "F_sech2"], rows)
    elif args.name in ("fig3", "fig5", "fig6"):
        source = {"fig3": "power:1.5", "fig5": "exponential",
                  "fig6": "sech2"}[args.name]
        traj = analytic_trajectory(source) if source != "exponential" \
            else NumericTrajectory(exponential())
        report = constructive.run(traj)
        report.write_csv(os.path.join(out, f"{args.name}.csv"))
    elif args.name == "fig7":
        seed = shifted_power(-1.0, 1.0 / 20.0, 2.0)
        fcfg = functional.FunctionalConfig()
        xs = fcfg.x_grid
        write_csv(os.path.join(out, "fig7_iterate_0.csv"),
                  ["x", "f"], zip(xs, seed(xs)))
        for rec in functional.run(SechSquaredTrajectory(), seed, fcfg):
            write_csv(os.path.join(out, f"fig7_iterate_{rec.index}.csv"),
                      ["x", "f"], zip(xs, rec.values))
    else:
        raise UsageError(f"unknown figure {args.name!r}")


# --- parser ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectra-invert",
        description="Reconstruct potential shapes from ground-state energy "
                    "trajectories; emit figure data as CSV.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, trajectory_source=True):
        p.add_argument("--output-dir", "-o", default=".")
        p.add_argument("--config", help="JSON file with flag defaults")
        if trajectory_source:
            p.add_argument("--analytic",
                           help="sech2 | harmonic | exponential | power:q")
            p.add_argument("--input", help="trajectory CSV with columns v,F[,Fprime]")

    def vgrid(p, lo=1e-1, hi=1e4, n=100):
        p.add_argument("--v-min", type=float, default=lo)
        p.add_argument("--v-max", type=float, default=hi)
        p.add_argument("--v-points", type=int, default=n)

    p = sub.add_parser("forward", help="eigensolver trajectory of a shape")
    common(p, trajectory_source=False)
    p.add_argument("--shape", required=True,
                   help="sech2 | harmonic | exponential | power:q[:mult[:shift]]")
    vgrid(p)
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("trajectory", help="sample F, F', R, s on a grid")
    common(p)
    vgrid(p)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("head-fit", help="small-x shape model from large couplings")
    common(p)
    p.add_argument("--v1", type=float, default=1e4)
    p.set_defaults(func=cmd_head_fit)

    p = sub.add_parser("invert-constructive", help="node-by-node reconstruction")
    common(p)
    p.add_argument("--v1", type=float, default=1e4)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--h", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=40)
    p.add_argument("--bounded", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_invert_constructive)

    p = sub.add_parser("invert-functional", help="kinetic-potential iteration")
    common(p)
    p.add_argument("--seed", required=True,
                   help="quadratic:mult | power:p[:mult[:shift]]")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--x-min", type=float, default=0.02)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--x-points", type=int, default=80)
    p.set_defaults(func=cmd_invert_functional)

    p = sub.add_parser("kinetic", help="kinetic potential samples from a trajectory")
    common(p)
    vgrid(p, lo=1e-2, hi=1e6, n=400)
    p.add_argument("--k-closed",
                   help="also emit the closed-form K function of this shape")
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--x-points", type=int, default=80)
    p.set_defaults(func=cmd_kinetic)

    p = sub.add_parser("figures", help="emit data behind the reference figures")
    common(p, trajectory_source=False)
    p.add_argument("name", choices=["fig1", "fig3", "fig4", "fig5", "fig6", "fig7"])
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolved(args, parser)
        os.makedirs(args.output_dir, exist_ok=True)
        _emit_config(cfg, args.output_dir)
        args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SpectraInvertError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
