"""Command-line interface.

Subcommands: solve, sweep, compare, region, verify.  All output files
are deterministic for fixed inputs and seed; the SWIPTGRID_SEED
environment variable overrides the default seed used when a config
omits one.
"""

import argparse
import json
import sys

from .harness import (
    ExperimentConfig,
    run_compare,
    run_region,
    run_solve,
    run_sweep,
    run_verify,
)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="swiptgrid",
        description="Power allocation for SWIPT distributed antennas with grid energy trading",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance file")
    p_solve.add_argument("instance", help="instance JSON file")
    p_solve.add_argument("--out", help="result JSON path (default: stdout)")

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV")
    p_sweep.add_argument("--config", required=True, help="experiment config JSON")
    p_sweep.add_argument("--out", required=True, help="output CSV path")

    p_cmp = sub.add_parser("compare", help="paired policy comparison to CSV")
    p_cmp.add_argument("--config", required=True, help="experiment config JSON")
    p_cmp.add_argument("--out", required=True, help="output CSV path")

    p_reg = sub.add_parser("region", help="rate-energy curve of one instance")
    p_reg.add_argument("instance", help="instance JSON file")
    p_reg.add_argument("--points", type=int, default=100, help="samples of the split ratio")
    p_reg.add_argument("--out", required=True, help="output CSV path")
    p_reg.add_argument("--xi", type=float, default=0.5, help="energy conversion efficiency")
    p_reg.add_argument("--sigma2", type=float, default=1.0, help="RF noise power")
    p_reg.add_argument("--tau2", type=float, default=1.0, help="processing noise power")
    p_reg.add_argument("--qmin", type=float, help="report the split ratio meeting this harvest demand")

    p_ver = sub.add_parser("verify", help="audit the solver against the reference oracles")
    p_ver.add_argument("--config", required=True, help="experiment config JSON")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "solve":
        doc = run_solve(args.instance, out_path=args.out)
        if args.out is None:
            print(json.dumps(doc, indent=2))
        return 0
    if args.command == "sweep":
        run_sweep(ExperimentConfig.from_file(args.config), out_path=args.out)
        return 0
    if args.command == "compare":
        run_compare(ExperimentConfig.from_file(args.config), out_path=args.out)
        return 0
    if args.command == "region":
        _, rho = run_region(
            args.instance,
            args.points,
            out_path=args.out,
            xi=args.xi,
            sigma2=args.sigma2,
            tau2=args.tau2,
            q_min=args.qmin,
        )
        if rho is not None:
            print(f"qmin={args.qmin:.12g} rho={rho:.12g}")
        return 0
    if args.command == "verify":
        report = run_verify(ExperimentConfig.from_file(args.config))
        print(
            f"instances={report['instances']} grid_checked={report['grid_checked']} "
            f"ascent_checked={report['ascent_checked']}"
        )
        print(
            f"max_grid_gap={report['max_grid_gap']:.3e} "
            f"max_ascent_gap={report['max_ascent_gap']:.3e}"
        )
        for line in report["violations"]:
            print(f"VIOLATION {line}")
        print("result: " + ("FAIL" if report["violations"] else "OK"))
        return 1 if report["violations"] else 0
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
