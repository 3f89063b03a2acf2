"""Tests for the run directory store."""


class TestRunStore:
    """Tests for RunStore."""

    def test_open_creates_directory(self, tmp_path):
        """Test open creates nested run directories."""
        from glan.storage import RunStore

        store = RunStore(tmp_path / "runs" / "a").open()

        assert store.root.is_dir()
        assert store.path("x.json") == tmp_path / "runs" / "a" / "x.json"

    def test_manifest_round_trip(self, tmp_path):
        """Test a manifest is written as JSON and read back."""
        from glan.models.manifest import RunManifest
        from glan.storage import MANIFEST_FILE, RunStore

        store = RunStore(tmp_path).open()
        manifest = RunManifest(
            command="train", seed=3, out_dir=str(tmp_path), inputs={"corpus.jsonl": "ab12"}
        )

        store.write_manifest(manifest)

        assert (tmp_path / MANIFEST_FILE).exists()
        assert store.read_manifest() == manifest

    def test_records(self, tmp_path):
        """Test append adds lines and write_records replaces the file."""
        from glan.models.report import TrainLogRecord
        from glan.storage import RunStore

        store = RunStore(tmp_path).open()
        first = TrainLogRecord(
            epoch=1, train_loss=0.7, train_accuracy=0.5, dev_accuracy=0.5, lr=1e-3
        )
        second = first.model_copy(update={"epoch": 2, "best": True})

        store.append_record("log.jsonl", first)
        store.append_record("log.jsonl", second)
        assert store.read_records("log.jsonl", TrainLogRecord) == [first, second]

        store.write_records("log.jsonl", [second])
        assert store.read_records("log.jsonl", TrainLogRecord) == [second]

    def test_write_plain_dict(self, tmp_path):
        """Test dictionaries are written with sorted keys."""
        import json

        from glan.storage import RunStore

        path = RunStore(tmp_path).open().write_json("splits.json", {"train": ["t1"], "dev": []})

        assert json.loads(path.read_text()) == {"dev": [], "train": ["t1"]}
        assert path.read_text().index('"dev"') < path.read_text().index('"train"')
