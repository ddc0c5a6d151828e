"""Command line entry point: ``dsmreg {gen,solve,bench,cond-hilbert}``."""

import argparse
import json
import sys
from pathlib import Path

from . import bench, problems, regularization
from ._jit import backend


def _add_sweep_flags(p, defaults):
    p.add_argument("--family", choices=bench.FAMILIES, default=defaults)
    p.add_argument("--case", help="hilbert profile (sqrt/square/sine), heat profile, or deriv2 case (1/2/3)")
    p.add_argument("--delta-rel", type=float)
    p.add_argument("--seeds", type=bench.parse_int_list, help="e.g. 0,1,2 or 0-9")


def cmd_gen(args):
    n = args.n[0] if args.n else 100
    seed = args.seeds[0] if args.seeds else 0
    delta_rel = 0.01 if args.delta_rel is None else args.delta_rel
    case = args.case or bench.default_case(args.family)
    inst = bench.build_instance(args.family, case, n, delta_rel, seed)
    out = args.out or f"{inst.label}_n{n}_s{seed}.json"
    inst.to_json(out)
    print(out)
    return 0


def cmd_solve(args):
    inst = problems.ProblemInstance.from_json(args.instance)
    base = regularization.new_context(inst.A, inst.f_delta)
    found = regularization.find_a0(base, inst.delta, inst.delta_rel)
    ctx = base.fresh()
    u, res, a_final, status = bench.run_method(args.method, ctx, inst.delta, found.a0, args.q, args.itermax)
    count = ctx.n_linsol + (base.n_linsol if args.include_a0_cost else 0)
    report = {
        "label": inst.label,
        "n": inst.n,
        "method": args.method,
        "status": status,
        "a0": found.a0,
        "a0_solves": base.n_linsol,
        "a_final": a_final,
        "n_linsol": count,
        "residual": res,
        "delta": inst.delta,
        "rel_error": inst.rel_error(u),
    }
    print(json.dumps(report, indent=2))
    if args.profile_out:
        bench.emit_solution_profiles(inst, {args.method: u}, args.profile_out)
    return 0 if status != "failed" else 1


def cmd_bench(args):
    overrides = {
        "family": args.family,
        "case": args.case,
        "n_list": args.n,
        "delta_rel": args.delta_rel,
        "seeds": args.seeds,
        "methods": args.methods,
        "q": args.q,
        "itermax": args.itermax,
        "output_dir": args.out,
        "include_a0_cost": True if args.include_a0_cost else None,
        "timing": True if args.timing else None,
        "workers": args.workers,
        "audit": True if args.audit else None,
    }
    if args.config:
        cfg = bench.load_config(args.config, **overrides)
    else:
        cfg = bench.ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})
    rows = bench.run_and_write(cfg, args.name)
    for s in bench.summarize(rows):
        print(f"n={s['n']:4d} {s['method']:10s} N_linsol={s['n_linsol']:6.1f} rel_error={s['rel_error']:.4f}")
    if args.profiles:
        out = Path(cfg.output_dir)
        for n in cfg.n_list:
            _, inst, sols = bench.run_cell(cfg, n, cfg.seeds[0], keep_solutions=True)
            if sols and "_error" not in sols:
                t = bench.grid_points(cfg.family, n)
                bench.emit_solution_profiles(inst, sols, out / f"profile_{inst.label}_n{n}_s{cfg.seeds[0]}.csv", t)
    failed = sum(r.status == "failed" for r in rows)
    return 0 if failed == 0 else 1


def cmd_cond(args):
    print("n,cond")
    for n, c in bench.cond_table(args.n or bench.COND_TABLE_N):
        print(f"{n},{c:.4e}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="dsmreg", description=f"DSM regularization toolkit (kernels: {backend()})")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a problem instance as JSON")
    _add_sweep_flags(g, "hilbert")
    g.add_argument("--n", type=bench.parse_int_list)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one method on an instance JSON")
    s.add_argument("instance")
    s.add_argument("--method", choices=bench.METHODS, default="dsm")
    s.add_argument("--q", type=float, default=2.0)
    s.add_argument("--itermax", type=int, default=30)
    s.add_argument("--include-a0-cost", action="store_true")
    s.add_argument("--profile-out", help="write index,t,y_exact,u CSV here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a sweep and write CSVs")
    b.add_argument("--config", help="flat key = value config file")
    _add_sweep_flags(b, None)
    b.add_argument("--n", type=bench.parse_int_list, help="e.g. 10-100:10")
    b.add_argument("--methods", type=lambda s: s.split(","), help=f"subset of {','.join(bench.METHODS)}")
    b.add_argument("--q", type=float)
    b.add_argument("--itermax", type=int)
    b.add_argument("--out", help="output directory")
    b.add_argument("--name", help="CSV base name")
    b.add_argument("--include-a0-cost", action="store_true", help="fold find-a0 solves into n_linsol")
    b.add_argument("--timing", action="store_true", help="record wall times (makes output nondeterministic)")
    b.add_argument("--workers", type=int)
    b.add_argument("--audit", action="store_true", help="check every solve is attributed to a row")
    b.add_argument("--profiles", action="store_true", help="also write solution profiles for the first seed")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("cond-hilbert", help="print Hilbert condition numbers")
    c.add_argument("--n", type=bench.parse_int_list)
    c.set_defaults(func=cmd_cond)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"dsmreg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
