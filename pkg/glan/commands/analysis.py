"""Analysis subcommands: early, ablate and sweep."""
import argparse
from pathlib import Path

from glan.commands.common import (
    add_config_flags,
    add_corpus_flag,
    add_output_flags,
    open_run,
    resolve_config,
)
from glan.commands.training import print_reports
from glan.config import Ablation
from glan.services.corpus_service import ingest
from glan.services.evaluation_service import (
    DEFAULT_DELAYS_HOURS,
    SWEEP_AXES,
    EvaluationService,
    parse_delay,
    render_ablation,
    render_records,
    render_sweep,
)
from glan.services.training_service import load_bundle

EARLY_REPORT_FILE = "early_report.jsonl"
ABLATION_FILE = "ablation.jsonl"
SWEEP_FILE = "sweep.jsonl"


def ablation_modes(text: str) -> list[Ablation]:
    """Parse a comma-separated list of ablation modes for argparse."""
    names = [name.strip() for name in text.split(",") if name.strip()]
    known = [mode.value for mode in Ablation]
    unknown = [name for name in names if name not in known]
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown ablation mode(s) {', '.join(unknown)} (choose from {', '.join(known)})"
        )
    if not names:
        raise argparse.ArgumentTypeError("no ablation modes given")
    return [Ablation(name) for name in names]


def register(subparsers: argparse._SubParsersAction) -> None:
    early = subparsers.add_parser("early", help="Accuracy versus detection delay")
    add_corpus_flag(early)
    early.add_argument("--checkpoint", type=Path, required=True)
    early.add_argument(
        "--delays",
        default=",".join(f"{h}h" for h in DEFAULT_DELAYS_HOURS) + ",inf",
        help="Comma-separated ascending delays such as 0,1h,4h,inf (plain numbers are seconds)",
    )
    add_output_flags(early)
    early.set_defaults(handler=run_early)

    ablate = subparsers.add_parser("ablate", help="Train and compare ablation modes")
    add_corpus_flag(ablate)
    add_config_flags(ablate)
    ablate.add_argument(
        "--modes",
        type=ablation_modes,
        default=",".join(mode.value for mode in Ablation),
        help="Comma-separated subset of full,no_lre,no_gre,only_text",
    )
    add_output_flags(ablate)
    ablate.set_defaults(handler=run_ablate)

    sweep = subparsers.add_parser("sweep", help="Accuracy versus one hyper-parameter")
    add_corpus_flag(sweep)
    add_config_flags(sweep)
    sweep.add_argument("--axis", choices=list(SWEEP_AXES), required=True)
    sweep.add_argument(
        "--values",
        nargs="+",
        required=True,
        help="Values to try, e.g. 10 20 50, or kernel sizes 1 3 3,4,5",
    )
    add_output_flags(sweep)
    sweep.set_defaults(handler=run_sweep)


def run_early(args: argparse.Namespace) -> int:
    """Evaluate a checkpoint on test cascades truncated at each delay."""
    delays = [parse_delay(text) for text in args.delays.split(",") if text.strip()]
    store = open_run(args, inputs=[args.corpus, args.checkpoint], delays=args.delays)
    bundle = load_bundle(args.checkpoint)
    cascades, users = ingest(args.corpus)
    reports = EvaluationService(store).early_detection_sweep(bundle, cascades, users, delays)
    store.write_records(EARLY_REPORT_FILE, reports)
    print_reports(args, reports)
    return 0


def run_ablate(args: argparse.Namespace) -> int:
    """Train every requested ablation mode on the same split."""
    modes = args.modes
    config = resolve_config(args)
    store = open_run(
        args, inputs=[args.corpus, args.config], config=config, modes=[m.value for m in modes]
    )
    cascades, users = ingest(args.corpus)
    rows = EvaluationService(store).ablation_study(cascades, users, modes, config)
    store.write_records(ABLATION_FILE, rows)
    print(render_records(rows) if args.format == "records" else render_ablation(rows))
    return 0


def run_sweep(args: argparse.Namespace) -> int:
    """Train one model per value of the chosen axis."""
    config = resolve_config(args)
    store = open_run(
        args,
        inputs=[args.corpus, args.config],
        config=config,
        axis=args.axis,
        values=args.values,
    )
    cascades, users = ingest(args.corpus)
    rows = EvaluationService(store).sensitivity_sweep(
        cascades, users, args.axis, args.values, config
    )
    store.write_records(SWEEP_FILE, rows)
    print(render_records(rows) if args.format == "records" else render_sweep(rows))
    return 0
