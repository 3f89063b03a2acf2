"""Corpus subcommands: prepare and synth."""
import argparse

from glan.commands.common import add_config_flags, add_corpus_flag, add_output_flags, open_run
from glan.models.cascade import Cascade, UserRecord
from glan.services.corpus_service import (
    corpus_statistics,
    ingest,
    split,
    split_sizes,
    write_corpus,
)
from glan.services.graph_service import build_graph
from glan.services.synthetic_service import SyntheticConfig, generate_synthetic
from glan.utils.tables import format_table

CORPUS_FILE = "corpus.jsonl"
STATS_FILE = "stats.json"


def register(subparsers: argparse._SubParsersAction) -> None:
    prepare = subparsers.add_parser("prepare", help="Validate a corpus and print its statistics")
    add_corpus_flag(prepare)
    add_config_flags(prepare)
    add_output_flags(prepare, formats=False)
    prepare.set_defaults(handler=run_prepare)

    synth = subparsers.add_parser("synth", help="Generate a synthetic corpus")
    synth.add_argument("--n-cascades", type=int, default=64)
    synth.add_argument("--n-users", type=int, default=40)
    synth.add_argument("--vocab-size", type=int, default=200)
    synth.add_argument(
        "--structure-signal", action=argparse.BooleanOptionalAction, default=True
    )
    synth.add_argument("--text-signal", action=argparse.BooleanOptionalAction, default=False)
    synth.add_argument("--n-classes", type=int, choices=[2, 4], default=2)
    synth.add_argument("--min-retweets", type=int, default=2)
    synth.add_argument("--max-retweets", type=int, default=8)
    synth.add_argument("--tokens-per-text", type=int, default=8)
    synth.add_argument("--time-scale-hours", type=float, default=6.0)
    synth.add_argument("--user-features", action="store_true")
    synth.add_argument("--seed", type=int, default=0)
    add_output_flags(synth, formats=False)
    synth.set_defaults(handler=run_synth)


def print_statistics(cascades: list[Cascade], users: list[UserRecord]) -> dict:
    stats = corpus_statistics(cascades, users)
    rows = [
        ["# of source tweets", stats.source_tweets],
        *[[f"# of {label}", count] for label, count in sorted(stats.labels.items())],
        ["# of users", stats.users],
        ["# of posts", stats.posts],
    ]
    print(format_table(["statistic", "value"], rows))
    return stats.model_dump()


def run_prepare(args: argparse.Namespace) -> int:
    """Ingest, check the split and the graph, print statistics."""
    seed = args.seed if args.seed is not None else 0
    store = open_run(args, inputs=[args.corpus, args.config], seed=seed)
    cascades, users = ingest(args.corpus)
    stats = print_statistics(cascades, users)
    train, dev, test = split(cascades, seed)
    graph = build_graph(cascades, users)
    n_train, n_dev, n_test = split_sizes(len(cascades))
    print(f"\nsplit train/dev/test: {n_train}/{n_dev}/{n_test}")
    print(f"graph: {len(graph.tweet_ids)} tweets, {len(graph.user_ids)} users, "
          f"{len(graph.edges)} edges")
    stats["split"] = {"train": len(train), "dev": len(dev), "test": len(test)}
    store.write_json(STATS_FILE, stats)
    return 0


def run_synth(args: argparse.Namespace) -> int:
    """Generate a corpus into the run directory."""
    config = SyntheticConfig(
        n_cascades=args.n_cascades,
        n_users=args.n_users,
        vocab_size=args.vocab_size,
        structure_signal=args.structure_signal,
        text_signal=args.text_signal,
        seed=args.seed,
        n_classes=args.n_classes,
        min_retweets=args.min_retweets,
        max_retweets=args.max_retweets,
        tokens_per_text=args.tokens_per_text,
        time_scale_hours=args.time_scale_hours,
        user_features=args.user_features,
    )
    store = open_run(args, seed=args.seed, synthetic=config.model_dump())
    cascades, users = generate_synthetic(config)
    write_corpus(store.path(CORPUS_FILE), cascades, users)
    store.write_json(STATS_FILE, print_statistics(cascades, users))
    print(f"\ncorpus written to {store.path(CORPUS_FILE)}")
    return 0
