"""Encoding service - turns cascades, users and the graph into model tensors."""
import logging
import zlib
from typing import Iterable, Optional

import numpy as np
import torch
from pydantic import BaseModel, ConfigDict

from glan.config import TrainConfig
from glan.exceptions import ConfigurationError, CorpusError
from glan.layers.global_encoding import edge_tensor
from glan.models.cascade import BINARY_LABELS, FOUR_LABELS, Cascade, Label, UserRecord
from glan.models.encoded import EncodedCorpus
from glan.models.graph import HeteroGraph
from glan.models.vocabulary import Vocabulary
from glan.services.corpus_service import split
from glan.services.graph_service import build_graph
from glan.utils.text import build_vocab, encode_text

logger = logging.getLogger(__name__)


class UserFeatureEncoder(BaseModel):
    """
    Static user vectors u_f of width `user_dim`.

    Profile counts are log1p-scaled and z-normalized with statistics of the
    training users, then zero-padded to `user_dim`. Users without features get
    a standard normal vector seeded by the run seed and their id.
    """

    user_dim: int
    seed: int = 0
    mean: Optional[list[float]] = None
    std: Optional[list[float]] = None

    def fit(self, users: Iterable[UserRecord]) -> "UserFeatureEncoder":
        """Return a copy normalized on the given (training) users."""
        rows = [user.features for user in users if user.features is not None]
        if not rows:
            return self.model_copy(update={"mean": None, "std": None})
        values = np.log1p(np.maximum(np.asarray(rows, dtype=np.float64), 0.0))
        if values.shape[1] > self.user_dim:
            raise ConfigurationError(
                f"{values.shape[1]} user features do not fit user_dim={self.user_dim}"
            )
        std = values.std(axis=0)
        std[std == 0] = 1.0
        return self.model_copy(update={"mean": values.mean(axis=0).tolist(), "std": std.tolist()})

    def encode(self, user: UserRecord) -> np.ndarray:
        if user.features is None or self.mean is None:
            rng = np.random.default_rng([self.seed, zlib.crc32(user.id.encode("utf-8"))])
            return rng.standard_normal(self.user_dim)
        if len(user.features) != len(self.mean):
            raise CorpusError(
                f"user {user.id} has {len(user.features)} features, expected {len(self.mean)}"
            )
        scaled = np.log1p(np.maximum(np.asarray(user.features, dtype=np.float64), 0.0))
        normalized = (scaled - np.asarray(self.mean)) / np.asarray(self.std)
        return np.concatenate([normalized, np.zeros(self.user_dim - len(normalized))])


def label_set(cascades: Iterable[Cascade]) -> tuple[Label, ...]:
    """Binary labels unless a cascade carries UR or TR."""
    present = {cascade.label for cascade in cascades}
    return FOUR_LABELS if present - set(BINARY_LABELS) else BINARY_LABELS


def encode_corpus(
    cascades: list[Cascade],
    users: Iterable[UserRecord],
    graph: HeteroGraph,
    vocab: Vocabulary,
    labels: tuple[Label, ...],
    feature_encoder: UserFeatureEncoder,
    config: TrainConfig,
) -> EncodedCorpus:
    """
    Tensorize every tweet node of `graph`.

    Each cascade keeps its `max_retweets` most recent retweets; retweet sets
    are padded to the longest one with a mask.
    """
    by_id = {cascade.id: cascade for cascade in cascades}
    users_by_id = {user.id: user for user in users}
    length = config.max_len

    kept = [by_id[tweet_id].retweets[-config.max_retweets:] for tweet_id in graph.tweet_ids]
    width = max((len(retweets) for retweets in kept), default=0)

    source_ids = torch.tensor(
        [encode_text(by_id[t].source.tokens, vocab, length) for t in graph.tweet_ids],
        dtype=torch.long,
    ).reshape(len(graph.tweet_ids), length)
    retweet_ids = torch.zeros(len(kept), width, length, dtype=torch.long)
    retweet_mask = torch.zeros(len(kept), width, dtype=torch.bool)
    for i, retweets in enumerate(kept):
        for j, retweet in enumerate(retweets):
            retweet_ids[i, j] = torch.tensor(encode_text(retweet.tokens, vocab, length))
            retweet_mask[i, j] = True

    features = [
        feature_encoder.encode(users_by_id.get(user_id, UserRecord(id=user_id)))
        for user_id in graph.user_ids
    ]
    user_features = torch.from_numpy(
        np.asarray(features, dtype=np.float64).reshape(len(features), feature_encoder.user_dim)
    )

    label_index = {label: i for i, label in enumerate(labels)}
    gold = torch.tensor(
        [label_index.get(by_id[t].label, -1) for t in graph.tweet_ids], dtype=torch.long
    )

    return EncodedCorpus(
        tweet_ids=list(graph.tweet_ids),
        user_ids=list(graph.user_ids),
        source_ids=source_ids,
        retweet_ids=retweet_ids,
        retweet_mask=retweet_mask,
        user_features=user_features,
        tweet_edges=edge_tensor(graph.capped_edges(config.neighbor_cap, "tweet")),
        user_edges=edge_tensor(graph.capped_edges(config.neighbor_cap, "user")),
        labels=gold,
    )


class PreparedCorpus(BaseModel):
    """Splits, vocabulary, graph and tensors of one training corpus."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    cascades: list[Cascade]
    users: list[UserRecord]
    train_ids: list[str]
    dev_ids: list[str]
    test_ids: list[str]
    labels: tuple[Label, ...]
    vocab: Vocabulary
    graph: HeteroGraph
    train_user_ids: list[str]
    feature_encoder: UserFeatureEncoder
    encoded: EncodedCorpus


def participants_of(cascades: Iterable[Cascade]) -> list[str]:
    """Distinct participating users in first-seen order."""
    seen: dict[str, None] = {}
    for cascade in cascades:
        for author in cascade.participants():
            seen.setdefault(author, None)
    return list(seen)


def prepare_corpus(
    cascades: list[Cascade],
    users: list[UserRecord],
    config: TrainConfig,
    splits: Optional[tuple[list[str], list[str], list[str]]] = None,
) -> PreparedCorpus:
    """
    Split the corpus and build everything fitted on its training part.

    Args:
        cascades: Every cascade; all of them become graph nodes
        users: User records
        config: Training configuration (seed, lengths, dimensions)
        splits: Optional fixed (train, dev, test) id lists, seeded split otherwise

    Returns:
        PreparedCorpus
    """
    if splits is None:
        train, dev, test = split(cascades, config.seed)
        train_ids = [c.id for c in train]
        dev_ids = [c.id for c in dev]
        test_ids = [c.id for c in test]
    else:
        train_ids, dev_ids, test_ids = (list(ids) for ids in splits)
        by_id = {c.id: c for c in cascades}
        missing = [i for i in [*train_ids, *dev_ids, *test_ids] if i not in by_id]
        if missing:
            raise CorpusError(f"split names unknown cascade {missing[0]}")
        train = [by_id[i] for i in train_ids]

    labels = label_set(cascades)
    vocab = build_vocab(train, config.min_count)
    graph = build_graph(cascades, users)
    train_user_ids = participants_of(train)
    users_by_id = {user.id: user for user in users}
    feature_encoder = UserFeatureEncoder(user_dim=config.user_dim, seed=config.seed).fit(
        users_by_id[user_id] for user_id in train_user_ids
    )
    encoded = encode_corpus(cascades, users, graph, vocab, labels, feature_encoder, config)
    logger.info(
        "Prepared %d/%d/%d train/dev/test cascades, vocabulary of %d",
        len(train_ids),
        len(dev_ids),
        len(test_ids),
        len(vocab),
    )
    return PreparedCorpus(
        cascades=cascades,
        users=users,
        train_ids=train_ids,
        dev_ids=dev_ids,
        test_ids=test_ids,
        labels=labels,
        vocab=vocab,
        graph=graph,
        train_user_ids=train_user_ids,
        feature_encoder=feature_encoder,
        encoded=encoded,
    )
