"""Flags and run-directory plumbing shared by subcommands."""
import argparse
from pathlib import Path
from typing import Any, Iterable, Optional

from glan.config import TrainConfig, load_config
from glan.models.manifest import RunManifest
from glan.storage import RunStore
from glan.utils.hashing import git_blob_hash

DEFAULT_RUNS_DIR = Path("runs")


def add_corpus_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", type=Path, required=True, help="JSON-lines corpus file")


def add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Flat key=value configuration file")
    parser.add_argument("--seed", type=int, help="Random seed (overrides the config)")
    parser.add_argument(
        "--precision",
        type=int,
        choices=[32, 64],
        help="Floating-point width (overrides the config)",
    )


def add_output_flags(parser: argparse.ArgumentParser, formats: bool = True) -> None:
    parser.add_argument("--out", type=Path, help="Run directory (default runs/<command>)")
    if formats:
        parser.add_argument(
            "--format",
            choices=["table", "records"],
            default="table",
            help="Aligned table or JSON lines on stdout",
        )


def resolve_config(args: argparse.Namespace, **overrides: Any) -> TrainConfig:
    """Config file, environment and command-line flags, flags winning."""
    return load_config(args.config, seed=args.seed, precision=args.precision, **overrides)


def open_run(
    args: argparse.Namespace,
    inputs: Iterable[Optional[Path]] = (),
    config: Optional[TrainConfig] = None,
    seed: int = 0,
    **options: Any,
) -> RunStore:
    """Create the run directory and write its manifest before anything is computed."""
    store = RunStore(args.out or DEFAULT_RUNS_DIR / args.command).open()
    manifest = RunManifest(
        command=args.command,
        config=config.model_dump(mode="json") if config is not None else {},
        inputs={str(path): git_blob_hash(path) for path in inputs if path is not None},
        seed=config.seed if config is not None else seed,
        out_dir=str(store.root),
        options={key: _plain(value) for key, value in options.items()},
    )
    store.write_manifest(manifest)
    return store


def _plain(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value
