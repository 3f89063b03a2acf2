"""Tests for the binary checkpoint format."""
import pytest
import torch


class TestCheckpoint:
    """Tests for save_checkpoint and load_checkpoint."""

    @pytest.mark.parametrize("precision,dtype", [(32, torch.float32), (64, torch.float64)])
    def test_round_trip_is_bit_exact(self, tmp_path, precision, dtype):
        """Test tensors and metadata survive a round trip unchanged."""
        from glan.numerics.checkpoint import load_checkpoint, save_checkpoint

        generator = torch.Generator().manual_seed(0)
        tensors = {
            "embedding.weight": torch.randn(5, 3, generator=generator, dtype=dtype),
            "gate_bias": torch.randn(1, generator=generator, dtype=dtype),
            "scalar": torch.tensor(1.5, dtype=dtype),
        }
        path = tmp_path / "model.glan"
        save_checkpoint(path, tensors, precision, {"vocab": ["<pad>", "<unk>"], "d": 3})
        loaded = load_checkpoint(path)

        assert loaded.precision == precision
        assert loaded.metadata == {"vocab": ["<pad>", "<unk>"], "d": 3}
        assert list(loaded.tensors) == list(tensors)
        for name, tensor in tensors.items():
            assert loaded.tensors[name].dtype == dtype
            assert torch.equal(loaded.tensors[name], tensor)

    def test_header_layout(self, tmp_path):
        """Test the file starts with the magic, version and precision."""
        from glan.numerics.checkpoint import MAGIC, save_checkpoint

        path = tmp_path / "model.glan"
        save_checkpoint(path, {"w": torch.zeros(2)}, 32)
        data = path.read_bytes()

        assert data[:8] == MAGIC
        assert data[8:10] == (1).to_bytes(2, "little")
        assert data[10] == 32

    def test_bad_magic(self, tmp_path):
        """Test a foreign file is rejected."""
        from glan.exceptions import CheckpointError
        from glan.numerics.checkpoint import load_checkpoint

        path = tmp_path / "other.bin"
        path.write_bytes(b"NOTACKPT" + b"\0" * 16)

        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_truncated_file(self, tmp_path):
        """Test a cut-off file is rejected."""
        from glan.exceptions import CheckpointError
        from glan.numerics.checkpoint import load_checkpoint, save_checkpoint

        path = tmp_path / "model.glan"
        save_checkpoint(path, {"w": torch.ones(4, 4)}, 64)
        path.write_bytes(path.read_bytes()[:-5])

        with pytest.raises(CheckpointError, match="Truncated"):
            load_checkpoint(path)

    def test_missing_file(self, tmp_path):
        """Test a missing file is a checkpoint error."""
        from glan.exceptions import CheckpointError
        from glan.numerics.checkpoint import load_checkpoint

        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "absent.glan")

    def test_integer_tensor_rejected(self, tmp_path):
        """Test only floating-point tensors can be saved."""
        from glan.exceptions import CheckpointError
        from glan.numerics.checkpoint import save_checkpoint

        with pytest.raises(CheckpointError):
            save_checkpoint(tmp_path / "x.glan", {"ids": torch.arange(3)}, 32)
