# cli.py
# Command-line front end.
#
# Subcommands:
#   simulate               draw a synthetic bimodal dataset to CSV
#   bandwidth              select a bandwidth, emit the (h, CV) curve as JSON
#   partition              partition samples into basins; JSON + CSV outputs
#   modes                  like partition but emit the merged modes only
#   ridge                  subspace-constrained iteration from the samples
#   experiment modecount   replicated mode-count frequencies
#   experiment rate        mode-set accuracy across sample sizes
#
# All randomness is seeded; a repeated invocation writes byte-identical
# output files.  CSV files carry a header row, comma separators and '.'
# decimals; JSON files have sorted keys.

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path


from .bandwidth import parse_grid_spec, select_bandwidth
from .data import Dataset, SimulationSpec, load_csv, simulate_bimodal, write_csv
from .estimators import fit
from .experiments import run_modecount, run_rate
from .kernels import get_kernel
from .modeseek import IterationConfig, partition_samples
from .scms import RidgeConfig, ridge_points
from .transforms import ResponseTransform


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        p.add_argument("--input", required=True, help="dataset CSV with header x1,...,xd,y")
    p.add_argument("--output-dir", default=".", help="directory for output files")
    p.add_argument("--kernel", choices=["gaussian", "biweight"], default="biweight")
    p.add_argument("--transform", choices=["t1", "t2"], default="t1")
    p.add_argument("--t1-scale", type=float, default=10.0)
    p.add_argument("--t1-offset", type=float, default=0.01)
    p.add_argument("--t2-c0", type=float, default=0.1)
    p.add_argument("--density-floor", type=float, default=None,
                   help="absolute density floor (default: 1e-8 of the max density)")


def _add_bandwidth_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h", type=float, default=None, help="fixed bandwidth")
    p.add_argument("--auto-h", action="store_true", help="select the bandwidth by gradient CV")
    p.add_argument("--h-grid", default=None, help="candidate grid as min:max:count[:log]")
    p.add_argument("--pilot-grid", default=None, help="pilot grid as min:max:count[:log]")


def _add_iteration_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--step-tol", type=float, default=None, help="stop when the step is below this (default 1e-6*h)")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--merge-radius", type=float, default=None, help="mode merging distance (default h/4)")


def _transform_from_args(args) -> ResponseTransform:
    return ResponseTransform(kind=args.transform, t1_scale=args.t1_scale,
                             t1_offset=args.t1_offset, t2_c0=args.t2_c0)


def _resolve_bandwidth(args, dataset: Dataset, transform, kernel, outdir: Path) -> float:
    if args.auto_h:
        grid = parse_grid_spec(args.h_grid) if args.h_grid else None
        pilot = parse_grid_spec(args.pilot_grid) if args.pilot_grid else None
        sel = select_bandwidth(dataset, transform, kernel, grid, pilot, args.density_floor)
        _write_json(outdir / "bandwidth.json", sel.to_payload())
        return sel.selected
    if args.h is None:
        raise ValueError("either --h or --auto-h is required")
    return args.h


def _prepare_partition(args):
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset = load_csv(args.input)
    transform = _transform_from_args(args)
    kernel = get_kernel(args.kernel)
    h = _resolve_bandwidth(args, dataset, transform, kernel, outdir)
    model = fit(dataset, transform, kernel, h, args.density_floor)
    config = IterationConfig.for_bandwidth(h, step_tol=args.step_tol, max_iter=args.max_iter,
                                           merge_radius=args.merge_radius)
    part = partition_samples(model, config, record_trajectories=args.trajectories)
    return outdir, model, part, h


def _write_modes_csv(outdir: Path, part, dim: int) -> None:
    header = ["mode_index"] + [f"x{i + 1}" for i in range(dim)] + ["count"]
    rows = [[i] + [_fmt(c) for c in m] + [int(cnt)]
            for i, (m, cnt) in enumerate(zip(part.modes, part.counts))]
    _write_rows(outdir / "modes.csv", header, rows)


def _write_trajectories_csv(outdir: Path, part, dim: int) -> None:
    header = ["start_index", "step"] + [f"x{i + 1}" for i in range(dim)]
    rows = []
    for idx, res in enumerate(part.results):
        if res.trajectory is None:
            continue
        for stepno, pt in enumerate(res.trajectory):
            rows.append([idx, stepno] + [_fmt(c) for c in pt])
    _write_rows(outdir / "trajectories.csv", header, rows)


def cmd_partition(args) -> int:
    outdir, model, part, h = _prepare_partition(args)
    _write_json(outdir / "partition.json", part.to_payload())
    _write_modes_csv(outdir, part, model.dim)
    if args.trajectories:
        _write_trajectories_csv(outdir, part, model.dim)
    print(f"h={h:g}: {len(part.modes)} basin(s); labels written to {outdir / 'partition.json'}")
    return 0


def cmd_modes(args) -> int:
    outdir, model, part, h = _prepare_partition(args)
    _write_modes_csv(outdir, part, model.dim)
    for i, (m, cnt) in enumerate(zip(part.modes, part.counts)):
        coords = ", ".join(f"{c:.6g}" for c in m)
        print(f"mode {i}: ({coords})  members={int(cnt)}")
    print(f"h={h:g}: {len(part.modes)} mode(s); written to {outdir / 'modes.csv'}")
    return 0


def cmd_bandwidth(args) -> int:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset = load_csv(args.input)
    transform = _transform_from_args(args)
    kernel = get_kernel(args.kernel)
    grid = parse_grid_spec(args.h_grid) if args.h_grid else None
    pilot = parse_grid_spec(args.pilot_grid) if args.pilot_grid else None
    sel = select_bandwidth(dataset, transform, kernel, grid, pilot, args.density_floor)
    _write_json(outdir / "bandwidth.json", sel.to_payload())
    print(f"selected h={sel.selected:g} (pilot {sel.pilot_bandwidth:g}); "
          f"curve written to {outdir / 'bandwidth.json'}")
    return 0


def cmd_ridge(args) -> int:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    dataset = load_csv(args.input)
    transform = _transform_from_args(args)
    kernel = get_kernel(args.kernel)
    h = _resolve_bandwidth(args, dataset, transform, kernel, outdir)
    model = fit(dataset, transform, kernel, h, args.density_floor)
    config = RidgeConfig.for_bandwidth(h, s=args.s, step_tol=args.step_tol, max_iter=args.max_iter)
    points = ridge_points(model, dataset.x, config)

    header = (["start_index"] + [f"x{i + 1}" for i in range(model.dim)]
              + ["converged", "projected_step_norm", "iterations"]
              + [f"eig{i + 1}" for i in range(model.dim)])
    rows = []
    for idx, rp in enumerate(points):
        rows.append([idx] + [_fmt(c) for c in rp.point]
                    + [int(rp.converged), _fmt(rp.projected_step_norm), rp.iterations]
                    + [_fmt(v) for v in rp.eigenvalues])
    _write_rows(outdir / "ridge.csv", header, rows)
    nconv = sum(1 for rp in points if rp.converged)
    print(f"h={h:g}, s={args.s}: {nconv}/{len(points)} starts converged; "
          f"written to {outdir / 'ridge.csv'}")
    return 0


def _csv_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def cmd_simulate(args) -> int:
    spec = SimulationSpec(
        n=args.n, seed=args.seed,
        mu1=_csv_floats(args.mu1), mu2=_csv_floats(args.mu2), mu3=_csv_floats(args.mu3),
        sigma1=_csv_floats(args.sigma1), sigma2=_csv_floats(args.sigma2),
        sigma3=_csv_floats(args.sigma3),
        noise_var=args.noise_var, truncation_box=args.box,
    )
    dataset = simulate_bimodal(spec)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(dataset, out)
    print(f"wrote {dataset.n} rows (d={dataset.d}) to {out}")
    return 0


def cmd_experiment_modecount(args) -> int:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    transform = _transform_from_args(args)
    kernel = get_kernel(args.kernel)
    if not args.auto_h and args.h is None:
        raise ValueError("either --h or --auto-h is required")
    sweep = _csv_floats(args.sweep) if args.sweep else ()
    report = run_modecount(
        n=args.n, reps=args.reps, transform=transform, kernel=kernel,
        base_seed=args.seed, h=None if args.auto_h else args.h,
        grid_spec=args.h_grid, pilot_spec=args.pilot_grid,
        density_floor=args.density_floor, sweep_values=sweep, jobs=args.jobs,
    )
    _write_json(outdir / "modecount.json", report.to_payload())
    print(f"exactly-2-mode frequency: {report.frequency_two:.4f} over {args.reps} replicates "
          f"({report.elapsed_seconds:.1f}s); report written to {outdir / 'modecount.json'}",
          file=sys.stderr)
    print(f"{report.frequency_two:.4f}")
    return 0


def cmd_experiment_rate(args) -> int:
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    transform = _transform_from_args(args)
    kernel = get_kernel(args.kernel)
    n_values = [int(v) for v in args.n_list.split(",")]
    rows = run_rate(n_values, args.reps, transform, kernel, base_seed=args.seed,
                    h_ref=args.h_ref, n_ref=args.n_ref,
                    density_floor=args.density_floor, jobs=args.jobs)
    _write_rows(outdir / "rate.csv", ["n", "h", "median_dh"],
                [[r.n, _fmt(r.h), _fmt(r.median_dh)] for r in rows])
    for r in rows:
        print(f"n={r.n}: h={r.h:.4g} median distance {r.median_dh:.5f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regshift",
        description="Mode seeking, basin partitioning and ridge extraction for regression surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a synthetic bimodal dataset")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--mu1", default="1,1")
    p.add_argument("--mu2", default="-1,-1")
    p.add_argument("--mu3", default="0,0")
    p.add_argument("--sigma1", default="0.5,0.5")
    p.add_argument("--sigma2", default="0.3,0.9")
    p.add_argument("--sigma3", default="1.5,1.5")
    p.add_argument("--noise-var", type=float, default=0.01)
    p.add_argument("--box", type=float, default=2.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("partition", help="partition samples into basins of attraction")
    _add_common(p)
    _add_bandwidth_opts(p)
    _add_iteration_opts(p)
    p.add_argument("--trajectories", action="store_true", help="also write per-start trajectories")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("modes", help="emit the merged modes only")
    _add_common(p)
    _add_bandwidth_opts(p)
    _add_iteration_opts(p)
    p.add_argument("--trajectories", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("bandwidth", help="select a bandwidth by gradient cross-validation")
    _add_common(p)
    p.add_argument("--h-grid", default=None, help="candidate grid as min:max:count[:log]")
    p.add_argument("--pilot-grid", default=None, help="pilot grid as min:max:count[:log]")
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("ridge", help="extract ridge points by the constrained iteration")
    _add_common(p)
    _add_bandwidth_opts(p)
    p.add_argument("--s", type=int, default=2, help="subspace index, 2 <= s <= d")
    p.add_argument("--step-tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=2000)
    p.set_defaults(func=cmd_ridge)

    pexp = sub.add_parser("experiment", help="replicated simulation studies")
    esub = pexp.add_subparsers(dest="experiment", required=True)

    p = esub.add_parser("modecount", help="frequency of recovering exactly two modes")
    _add_common(p, with_input=False)
    _add_bandwidth_opts(p)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep", default=None, help="extra fixed bandwidths h1,h2,... counted per replicate")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment_modecount)

    p = esub.add_parser("rate", help="mode-set accuracy across sample sizes")
    _add_common(p, with_input=False)
    p.add_argument("--n-list", default="200,500,1000")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h-ref", type=float, default=1.6)
    p.add_argument("--n-ref", type=int, default=200)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment_rate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
