"""Run directory holding manifests, checkpoints and record files."""
import json
import logging
from pathlib import Path
from typing import Iterable, Type, TypeVar

from pydantic import BaseModel

from glan.models.manifest import RunManifest

logger = logging.getLogger(__name__)

T = TypeVar("T", bound=BaseModel)

MANIFEST_FILE = "manifest.json"


class RunStore:
    """Files of one command run under a single output directory."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def open(self) -> "RunStore":
        """Create the run directory if needed."""
        self.root.mkdir(parents=True, exist_ok=True)
        logger.info("Writing run outputs to %s", self.root)
        return self

    def path(self, name: str) -> Path:
        return self.root / name

    def write_manifest(self, manifest: RunManifest) -> Path:
        """Write the manifest; called before any computation starts."""
        return self.write_json(MANIFEST_FILE, manifest)

    def read_manifest(self) -> RunManifest:
        return RunManifest.model_validate_json(self.path(MANIFEST_FILE).read_text("utf-8"))

    def write_json(self, name: str, document: BaseModel | dict) -> Path:
        target = self.path(name)
        if isinstance(document, BaseModel):
            text = document.model_dump_json(indent=2)
        else:
            text = json.dumps(document, indent=2, sort_keys=True)
        target.write_text(text + "\n", encoding="utf-8")
        return target

    def write_records(self, name: str, records: Iterable[BaseModel]) -> Path:
        """Replace a line-delimited record file."""
        target = self.path(name)
        with open(target, "w", encoding="utf-8") as handle:
            for record in records:
                handle.write(record.model_dump_json() + "\n")
        return target

    def append_record(self, name: str, record: BaseModel) -> None:
        with open(self.path(name), "a", encoding="utf-8") as handle:
            handle.write(record.model_dump_json() + "\n")

    def read_records(self, name: str, model: Type[T]) -> list[T]:
        with open(self.path(name), encoding="utf-8") as handle:
            return [model.model_validate_json(line) for line in handle if line.strip()]
