"""Training subcommands: train and eval."""
import argparse
from pathlib import Path

from glan.commands.common import (
    add_config_flags,
    add_corpus_flag,
    add_output_flags,
    open_run,
    resolve_config,
)
from glan.config import Ablation
from glan.models.report import EvalReport
from glan.services.corpus_service import ingest
from glan.services.evaluation_service import EvaluationService, render_records, render_reports
from glan.services.training_service import (
    CHECKPOINT_FILE,
    TrainingService,
    load_bundle,
    save_bundle,
)

SPLITS_FILE = "splits.json"
TEST_REPORT_FILE = "test_report.jsonl"
EVAL_REPORT_FILE = "eval_report.jsonl"


def register(subparsers: argparse._SubParsersAction) -> None:
    train = subparsers.add_parser("train", help="Train a model and evaluate its test split")
    add_corpus_flag(train)
    add_config_flags(train)
    train.add_argument("--ablation", choices=[mode.value for mode in Ablation])
    add_output_flags(train)
    train.set_defaults(handler=run_train)

    evaluate = subparsers.add_parser("eval", help="Evaluate a checkpoint on its test split")
    add_corpus_flag(evaluate)
    evaluate.add_argument("--checkpoint", type=Path, required=True)
    add_output_flags(evaluate)
    evaluate.set_defaults(handler=run_eval)


def print_reports(args: argparse.Namespace, reports: list[EvalReport]) -> None:
    if args.format == "records":
        print(render_records(reports))
    else:
        print(render_reports(reports))


def run_train(args: argparse.Namespace) -> int:
    """Train, save the best-dev checkpoint, report test metrics."""
    config = resolve_config(args, ablation=args.ablation)
    store = open_run(args, inputs=[args.corpus, args.config], config=config)
    cascades, users = ingest(args.corpus)

    result = TrainingService(config, store).train(cascades, users)
    save_bundle(store.path(CHECKPOINT_FILE), result.bundle)
    store.write_json(
        SPLITS_FILE,
        {
            "train": result.bundle.train_ids,
            "dev": result.bundle.dev_ids,
            "test": result.bundle.test_ids,
        },
    )
    report = EvaluationService(store).evaluate(result.bundle, cascades, users)
    store.write_records(TEST_REPORT_FILE, [report])
    print(f"best dev accuracy {result.best_dev_accuracy:.4f} at epoch {result.best_epoch}")
    print_reports(args, [report])
    return 0


def run_eval(args: argparse.Namespace) -> int:
    """Score a saved checkpoint on the test split it was trained with."""
    store = open_run(args, inputs=[args.corpus, args.checkpoint])
    bundle = load_bundle(args.checkpoint)
    cascades, users = ingest(args.corpus)
    report = EvaluationService(store).evaluate(bundle, cascades, users)
    store.write_records(EVAL_REPORT_FILE, [report])
    print_reports(args, [report])
    return 0
