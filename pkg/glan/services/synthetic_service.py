"""Synthetic cascade generator for desk-scale experiments."""
import logging

import numpy as np
from pydantic import BaseModel, Field

from glan.exceptions import ConfigurationError
from glan.models.cascade import BINARY_LABELS, FOUR_LABELS, Cascade, Microblog, UserRecord

logger = logging.getLogger(__name__)

BASE_TIMESTAMP = 1_600_000_000.0
SOURCE_SPACING = 86_400.0  # one source tweet per simulated day
HOUR = 3600.0


class SyntheticConfig(BaseModel):
    """Generator settings."""

    n_cascades: int = Field(default=64, ge=8)
    n_users: int = Field(default=40, ge=4)
    vocab_size: int = Field(default=200, ge=8)
    structure_signal: bool = True
    text_signal: bool = False
    seed: int = 0
    n_classes: int = 2
    min_retweets: int = Field(default=2, ge=0)
    max_retweets: int = Field(default=8, ge=0)
    tokens_per_text: int = Field(default=8, ge=2)
    time_scale_hours: float = Field(default=6.0, gt=0)
    user_features: bool = False


def generate_synthetic(config: SyntheticConfig) -> tuple[list[Cascade], list[UserRecord]]:
    """
    Generate labeled cascades whose label is recoverable from chosen channels.

    With `structure_signal`, each class draws authors and retweeters from its
    own disjoint user pool; otherwise participants come from all users. With
    `text_signal`, most tokens of every text come from a class-specific slice
    of the vocabulary; otherwise tokens are uniform over the vocabulary.
    Retweet delays are exponential with mean `time_scale_hours`.

    Args:
        config: Generator settings

    Returns:
        (cascades, users), identical for identical configs

    Raises:
        ConfigurationError: If both signals are off or the settings are inconsistent
    """
    if not (config.structure_signal or config.text_signal):
        raise ConfigurationError("at least one of structure_signal and text_signal must be on")
    if config.n_classes not in (2, 4):
        raise ConfigurationError(f"n_classes must be 2 or 4, got {config.n_classes}")
    if config.max_retweets < config.min_retweets:
        raise ConfigurationError("max_retweets is smaller than min_retweets")
    if config.structure_signal and config.n_users < config.n_classes:
        raise ConfigurationError("need at least one user per class for the structure signal")
    if config.text_signal and config.vocab_size < 2 * (config.n_classes + 1):
        raise ConfigurationError("vocabulary too small for class-specific token slices")

    rng = np.random.default_rng(config.seed)
    labels = BINARY_LABELS if config.n_classes == 2 else FOUR_LABELS
    user_ids = [f"u{i:05d}" for i in range(config.n_users)]
    words = [f"w{i:05d}" for i in range(config.vocab_size)]

    if config.structure_signal:
        shuffled = rng.permutation(config.n_users)
        pools = [list(part) for part in np.array_split(shuffled, len(labels))]
    else:
        pools = [list(range(config.n_users))] * len(labels)

    # last slice holds neutral tokens shared by all classes
    slices = [list(part) for part in np.array_split(np.arange(config.vocab_size), len(labels) + 1)]
    n_neutral = config.tokens_per_text // 4

    def sample_text(class_index: int) -> list[str]:
        if not config.text_signal:
            ids = rng.integers(0, config.vocab_size, size=config.tokens_per_text)
        else:
            own = rng.choice(slices[class_index], size=config.tokens_per_text - n_neutral)
            neutral = rng.choice(slices[-1], size=n_neutral)
            ids = rng.permutation(np.concatenate([own, neutral]))
        return [words[i] for i in ids]

    class_of = rng.permutation([i % len(labels) for i in range(config.n_cascades)])
    cascades = []
    for i, class_index in enumerate(class_of):
        pool = pools[class_index]
        source_id = f"t{i:05d}"
        source_ts = BASE_TIMESTAMP + i * SOURCE_SPACING
        source = Microblog(
            id=source_id,
            author=user_ids[pool[rng.integers(len(pool))]],
            tokens=sample_text(class_index),
            ts=source_ts,
        )
        n_retweets = int(rng.integers(config.min_retweets, config.max_retweets + 1))
        offsets = np.sort(rng.exponential(config.time_scale_hours * HOUR, size=n_retweets))
        retweets = [
            Microblog(
                id=f"{source_id}-r{j:03d}",
                author=user_ids[pool[rng.integers(len(pool))]],
                tokens=sample_text(class_index),
                ts=source_ts + round(float(offset), 3),
                parent=source_id,
            )
            for j, offset in enumerate(offsets)
        ]
        cascades.append(Cascade(source=source, retweets=retweets, label=labels[class_index]))

    users = []
    for user_id in user_ids:
        features = None
        if config.user_features:
            # friends, followers, statuses counts, label independent
            features = [float(v) for v in np.round(rng.lognormal(5.0, 1.5, size=3))]
        users.append(UserRecord(id=user_id, features=features))

    logger.info(
        "Generated %d cascades over %d users (structure=%s, text=%s, seed=%d)",
        len(cascades),
        len(users),
        config.structure_signal,
        config.text_signal,
        config.seed,
    )
    return cascades, users
