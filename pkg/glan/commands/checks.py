"""Numerical self-check subcommand: gradcheck."""
import argparse

from glan.commands.common import add_output_flags, open_run
from glan.services.gradcheck_service import end_to_end_grad_check
from glan.utils.tables import format_table

GRADCHECK_FILE = "gradcheck.json"


def register(subparsers: argparse._SubParsersAction) -> None:
    gradcheck = subparsers.add_parser(
        "gradcheck", help="Finite-difference check of every model gradient"
    )
    gradcheck.add_argument("--seed", type=int, default=0)
    gradcheck.add_argument("--eps", type=float, default=1e-5)
    gradcheck.add_argument("--tolerance", type=float, default=1e-4)
    gradcheck.add_argument("--cascades", type=int, default=3)
    add_output_flags(gradcheck)
    gradcheck.set_defaults(handler=run_gradcheck)


def run_gradcheck(args: argparse.Namespace) -> int:
    """Exit 0 when the maximum relative error is within tolerance."""
    store = open_run(
        args, seed=args.seed, eps=args.eps, tolerance=args.tolerance, cascades=args.cascades
    )
    report = end_to_end_grad_check(
        seed=args.seed, eps=args.eps, tolerance=args.tolerance, n_cascades=args.cascades
    )
    store.write_json(GRADCHECK_FILE, report)
    if args.format == "records":
        print(report.model_dump_json())
    else:
        print(
            format_table(
                ["passed", "max_rel_error", "worst_entry", "checked", "flagged"],
                [
                    [
                        report.passed,
                        report.max_rel_error,
                        report.worst_entry,
                        report.checked,
                        len(report.flagged),
                    ]
                ],
            )
        )
        if report.reason:
            print(report.reason)
    return 0 if report.valid and report.passed else 1
