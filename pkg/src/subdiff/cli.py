"""Command-line interface: ``subdiff <command> [flags]``.

Every run writes CSV files and a ``manifest.txt`` under ``--out-dir``.
Exit status is 0 on success, 2 on usage errors and 1 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import shlex
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, PoleError, SubdiffError
from .ffpe import (
    FfpeProblem,
    cell_centred_grid,
    ffpe_oracle,
    gaussian_initial_profile,
    max_stable_dt,
    solve_ffpe,
)
from .parallel import run_blocks
from .pricing import ContractParams, map_real_params, subordinated_price_mc, subordinated_price_quadrature
from .quadrature import QuadConfig
from .specfun import (
    airy_ai,
    f_alpha,
    f_alpha_mode,
    gamma,
    inverse_subordinator_density,
    mittag_leffler_neg,
    probability_integral,
)
from .subdiffusion import ModelParams, sample_subordinated_paths, subordinated_density_grid
from .subordinator import SimConfig, sample_inverse_paths, sample_stable_increment

MANIFEST = "manifest.txt"


class UsageError(Exception):
    """Bad flag value; reported with exit status 2."""


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


# ---------------------------------------------------------------------------
# subcommands; each returns the list of files it wrote (relative to out_dir)


def _cmd_price(args, out):
    real = [args.rate, args.sigma, args.maturity]
    dimless = [args.beta, args.tau_dimless]
    if all(v is not None for v in real) and all(v is None for v in dimless):
        c = map_real_params(args.spot, args.strike, args.rate, args.sigma, args.maturity)
    elif all(v is not None for v in dimless) and all(v is None for v in real):
        c = ContractParams(args.spot, args.strike, args.beta, args.tau_dimless)
    else:
        raise UsageError("give either --rate/--sigma/--maturity or --beta/--tau-dimless")
    if not c.tau > 0:
        raise UsageError("--maturity / --tau-dimless must be positive")
    if args.method == "quad":
        quad = QuadConfig(abs_tol=args.tol * c.x, rel_tol=args.tol)
        price, se = subordinated_price_quadrature(args.alpha, c.tau, c, quad), 0.0
    else:
        cfg = SimConfig(seed=args.seed, n_paths=args.paths, dtau=args.dtau, t_max=c.tau)
        price, se = subordinated_price_mc(args.alpha, c.tau, c, cfg)
    write_csv(os.path.join(out, "price.csv"),
              ["alpha", "t", "spot", "strike", "beta", "method", "price", "std_error"],
              [[float(args.alpha), c.tau, float(c.x), float(c.K), float(c.beta), args.method, price, se]])
    print(_fmt(price))
    return ["price.csv"]


def _x_grid(args):
    if args.n_points < 2 or not args.x_max > args.x_min:
        raise UsageError("--x-min < --x-max and --n-points >= 2 required")
    return np.linspace(args.x_min, args.x_max, args.n_points)


def _cmd_density(args, out):
    params = ModelParams(args.alpha, args.D)
    x = _x_grid(args)
    quad = QuadConfig(abs_tol=args.tol, rel_tol=args.tol)
    dens = subordinated_density_grid(params, args.t, x, quad)
    write_csv(os.path.join(out, "density.csv"), ["x", "p"], zip(dens.x_grid, dens.values))
    return ["density.csv"]


def _stable_paths(alpha, grid, rng, n):
    steps = np.diff(grid, prepend=0.0)
    inc = np.zeros((n, grid.size))
    for j, h in enumerate(steps):
        if h > 0:
            inc[:, j] = sample_stable_increment(alpha, h, rng, size=n)
    return np.cumsum(inc, axis=1)


def _cmd_simulate(args, out):
    if args.n_times < 1 or not args.t_max > 0:
        raise UsageError("--t-max > 0 and --n-times >= 1 required")
    grid = np.linspace(0.0, args.t_max, args.n_times + 1)
    cfg = SimConfig(seed=args.seed, n_paths=args.paths, dtau=args.dtau, t_max=args.t_max)
    if args.process == "stable":
        fn = lambda rng, n: _stable_paths(args.alpha, grid, rng, n)  # noqa: E731
    elif args.process == "inverse":
        fn = lambda rng, n: sample_inverse_paths(args.alpha, grid, cfg, rng, n)  # noqa: E731
    else:
        params = ModelParams(args.alpha, args.D)
        fn = lambda rng, n: sample_subordinated_paths(params, grid, cfg, rng, n)  # noqa: E731
    paths = run_blocks(fn, cfg.n_paths, cfg.seed, cfg.block_size)
    rows = ((i, grid[j], paths[i, j]) for i in range(paths.shape[0]) for j in range(grid.size))
    write_csv(os.path.join(out, "paths.csv"), ["path_id", "t", "value"], rows)
    return ["paths.csv"]


_NEEDS_ALPHA = {"mittag_leffler", "f_alpha", "f_alpha_mode", "inverse_density"}


def _special_value(fn, alpha, z, t):
    if fn == "gamma":
        return gamma(z)
    if fn == "phi":
        return float(probability_integral(z))
    if fn == "airy":
        return airy_ai(z)
    if fn == "mittag_leffler":
        return mittag_leffler_neg(alpha, z)
    if fn == "f_alpha":
        return float(f_alpha(alpha, z))
    if fn == "inverse_density":
        return inverse_subordinator_density(alpha, t, z)
    raise UsageError(f"unknown function {fn!r}")


def _cmd_special(args, out):
    fn = args.function
    if fn in _NEEDS_ALPHA and args.alpha is None:
        raise UsageError(f"--alpha is required for {fn}")
    if fn == "f_alpha_mode":
        mode = f_alpha_mode(args.alpha)
        rows = [[fn, float(args.alpha), "", "" if mode is None else mode]]
    else:
        if not args.z:
            raise UsageError(f"--z is required for {fn}")
        rows = [[fn, "" if args.alpha is None else float(args.alpha), z,
                 _special_value(fn, args.alpha, z, args.t)] for z in args.z]
    write_csv(os.path.join(out, "special.csv"), ["function", "alpha", "z", "value"], rows)
    for r in rows:
        print(_fmt(r[-1]) if r[-1] != "" else "none")
    return ["special.csv"]


def _cmd_fpe(args, out):
    params = ModelParams(args.alpha, args.D)
    n = int(round(2.0 * args.half_width / args.dx))
    if n < 3:
        raise UsageError("--dx too large for --half-width")
    x = cell_centred_grid(args.half_width, n)
    dx = x[1] - x[0]
    dt = args.dt if args.dt is not None else args.safety * max_stable_dt(params.alpha, params.D, dx)
    n_steps = max(int(math.ceil(args.t_final / dt)), 1)
    t_grid = np.linspace(0.0, args.t_final, n_steps + 1)
    prob = FfpeProblem(params, x, t_grid, gaussian_initial_profile(x, params.D, args.tau0))
    every = max(n_steps // max(args.n_output, 1), 1)
    sol = solve_ffpe(prob, method=args.method, output_every=every)
    mass = sol.mass()
    write_csv(os.path.join(out, "fpe.csv"), ["t", "x", "p"],
              ((t, xi, pi) for t, row in zip(sol.t, sol.p) for xi, pi in zip(x, row)))
    summary = []
    for t, row, m in zip(sol.t, sol.p, mass):
        ref = ffpe_oracle(params, t, x, args.tau0) if t > 0 else prob.initial_profile
        summary.append([t, m - 1.0, float(np.max(np.abs(row - ref))), float(row.min())])
    write_csv(os.path.join(out, "fpe_summary.csv"),
              ["t", "mass_error", "oracle_max_error", "min_value"], summary)
    low = min(r[3] for r in summary)
    if low < -1e-8:
        print(f"warning: solution undershoots to {low:.3g}; reduce --safety", file=sys.stderr)
    print(f"steps={n_steps} dt={_fmt(prob.dt)} max_error_final={_fmt(summary[-1][2])}")
    return ["fpe.csv", "fpe_summary.csv"]


# ---------------------------------------------------------------------------
# parser


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default="out", help="output directory (default ./out)")

    p = argparse.ArgumentParser(prog="subdiff", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("price", parents=[common], help="European call under the subordinated clock")
    pr.add_argument("--alpha", type=float, required=True)
    pr.add_argument("--spot", type=float, default=100.0)
    pr.add_argument("--strike", type=float, default=100.0)
    pr.add_argument("--rate", type=float)
    pr.add_argument("--sigma", type=float)
    pr.add_argument("--maturity", type=float, help="maturity in years")
    pr.add_argument("--beta", type=float, help="2 r / sigma^2")
    pr.add_argument("--tau-dimless", type=float, help="sigma^2 t / 2")
    pr.add_argument("--method", choices=["quad", "mc"], default="quad")
    pr.add_argument("--paths", type=_positive_int, default=100_000)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--dtau", type=float, default=0.05, help="subordinator step for --method mc")
    pr.add_argument("--tol", type=float, default=1e-10, help="relative quadrature tolerance")
    pr.set_defaults(run=_cmd_price)

    de = sub.add_parser("density", parents=[common], help="density of B(S(t)) on a grid")
    de.add_argument("--alpha", type=float, required=True)
    de.add_argument("--D", type=float, default=1.0)
    de.add_argument("--t", type=float, default=1.0)
    de.add_argument("--x-min", type=float, default=-5.0)
    de.add_argument("--x-max", type=float, default=5.0)
    de.add_argument("--n-points", type=int, default=201)
    de.add_argument("--tol", type=float, default=1e-10)
    de.set_defaults(run=_cmd_density)

    si = sub.add_parser("simulate", parents=[common], help="sample paths as long-format CSV")
    si.add_argument("--process", choices=["stable", "inverse", "subdiffusion"], default="inverse")
    si.add_argument("--alpha", type=float, required=True)
    si.add_argument("--D", type=float, default=1.0)
    si.add_argument("--t-max", type=float, default=1.0)
    si.add_argument("--n-times", type=int, default=100)
    si.add_argument("--paths", type=_positive_int, default=10)
    si.add_argument("--seed", type=int, default=0)
    si.add_argument("--dtau", type=float, default=0.01)
    si.set_defaults(run=_cmd_simulate)

    sp = sub.add_parser("special", parents=[common], help="evaluate a special function")
    sp.add_argument("--function", required=True,
                    choices=["gamma", "phi", "mittag_leffler", "f_alpha", "f_alpha_mode",
                             "inverse_density", "airy"])
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--z", type=float, nargs="+", help="argument(s)")
    sp.add_argument("--t", type=float, default=1.0, help="time for inverse_density")
    sp.set_defaults(run=_cmd_special)

    fp = sub.add_parser("fpe", parents=[common], help="solve the fractional Fokker-Planck equation")
    fp.add_argument("--alpha", type=float, required=True)
    fp.add_argument("--D", type=float, default=1.0)
    fp.add_argument("--t-final", type=float, default=1.0)
    fp.add_argument("--half-width", type=float, default=8.0)
    fp.add_argument("--dx", type=float, default=0.2)
    fp.add_argument("--dt", type=float, help="time step (default: --safety times the stable step)")
    fp.add_argument("--safety", type=float, default=0.5)
    fp.add_argument("--tau0", type=float, default=0.1, help="operational age of the initial Gaussian")
    fp.add_argument("--n-output", type=int, default=10)
    fp.add_argument("--method", choices=["auto", "march", "fft"], default="auto")
    fp.set_defaults(run=_cmd_fpe)

    rp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    rp.add_argument("manifest")
    rp.add_argument("--out-dir", help="output directory (default: the manifest's directory)")
    return p


def _strip_out_dir(argv):
    keep, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out-dir":
            skip = True
        elif not a.startswith("--out-dir="):
            keep.append(a)
    return keep


def write_manifest(out, args, argv, files):
    lines = [f"subcommand = {args.command}", f"version = {__version__}",
             f"argv = {shlex.join(_strip_out_dir(argv))}"]
    if hasattr(args, "seed"):
        lines.append(f"seed = {args.seed}")
    for k, v in sorted(vars(args).items()):
        if k not in ("run", "command", "out_dir"):
            lines.append(f"param.{k} = {' '.join(map(repr, v)) if isinstance(v, list) else v!r}")
    lines += [f"artifact = {f}" for f in files]
    with open(os.path.join(out, MANIFEST), "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(path):
    """Parse ``key = value`` lines; repeated keys collect into lists."""
    data = {}
    with open(path) as fh:
        for line in fh:
            key, sep, val = line.rstrip("\n").partition(" = ")
            if not sep:
                continue
            if key == "artifact":
                data.setdefault(key, []).append(val)
            else:
                data[key] = val
    return data


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "replay":
        try:
            rec = read_manifest(args.manifest)
            inner = shlex.split(rec["argv"])
        except (OSError, KeyError) as exc:
            print(f"subdiff: cannot read manifest: {exc}", file=sys.stderr)
            return 2
        out = args.out_dir or os.path.dirname(os.path.abspath(args.manifest))
        return run(inner + ["--out-dir", out])
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        files = args.run(args, args.out_dir)
    except (UsageError, PoleError) as exc:
        print(f"subdiff {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except SubdiffError as exc:
        achieved = getattr(exc, "achieved", None)
        extra = f" (achieved tolerance {achieved:.3g})" if isinstance(exc, ConvergenceError) and achieved is not None else ""
        print(f"subdiff {args.command}: numerical failure: {exc}{extra}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"subdiff {args.command}: error: {exc}", file=sys.stderr)
        return 2
    write_manifest(args.out_dir, args, argv, files)
    return 0


def main():
    sys.exit(run())
