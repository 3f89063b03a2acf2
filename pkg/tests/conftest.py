"""Pytest configuration and fixtures."""
import pytest
import torch


@pytest.fixture
def float64():
    """
    Run a test with float64 as the default torch dtype.

    Restores the previous default afterwards.
    """
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield torch.float64
    torch.set_default_dtype(previous)


@pytest.fixture
def tiny_config():
    """Smallest model configuration (d=12, two heads, one layer, 64-bit)."""
    from glan.config import TrainConfig

    return TrainConfig.tiny(min_count=1)


@pytest.fixture
def small_config():
    """Desk-scale configuration used by training tests."""
    from glan.config import TrainConfig

    return TrainConfig.small()


@pytest.fixture
def make_cascade():
    """
    Build a cascade from compact arguments.

    Example: make_cascade("t1", "alice", "fake news", retweets=[("bob", "so fake", 60)])
    """
    from glan.models.cascade import Cascade, Label, Microblog

    def _make(source_id, author, text="", retweets=(), label=Label.FR, ts=1000.0):
        source = Microblog(id=source_id, author=author, tokens=text.split(), ts=ts)
        children = [
            Microblog(
                id=f"{source_id}-r{i}",
                author=user,
                tokens=body.split(),
                ts=ts + offset,
                parent=source_id,
            )
            for i, (user, body, offset) in enumerate(retweets)
        ]
        return Cascade(source=source, retweets=children, label=label)

    return _make


@pytest.fixture
def synthetic_corpus():
    """32 cascades over 16 users with both structure and text signal."""
    from glan.services.synthetic_service import SyntheticConfig, generate_synthetic

    return generate_synthetic(
        SyntheticConfig(
            n_cascades=32,
            n_users=16,
            vocab_size=60,
            structure_signal=True,
            text_signal=True,
            seed=0,
        )
    )


@pytest.fixture
def corpus_file(tmp_path, synthetic_corpus):
    """The synthetic corpus written as JSON lines."""
    from glan.services.corpus_service import write_corpus

    path = tmp_path / "corpus.jsonl"
    cascades, users = synthetic_corpus
    write_corpus(path, cascades, users)
    return path


@pytest.fixture
def small_config_file(tmp_path):
    """A key=value config file with fast desk-scale settings."""
    path = tmp_path / "small.cfg"
    path.write_text(
        "\n".join(
            [
                "D=12",
                "MAX_LEN=10",
                "KERNEL_SIZES=3,4,5",
                "FILTERS_PER_WIDTH=4",
                "LOCAL_HEADS=2",
                "GLOBAL_HEADS=2",
                "LAYERS=1",
                "USER_DIM=12",
                "MAX_EPOCHS=3",
                "BATCH_SIZE=8",
                "MIN_COUNT=1",
            ]
        )
        + "\n"
    )
    return path
