"""Full model: text encoder, local and global relation encoders, classifier head."""
import logging
from typing import Optional, Sequence

import torch
import torch.nn as nn

from glan.config import TrainConfig
from glan.exceptions import ConfigurationError, DomainError
from glan.layers.global_encoding import GlobalEncoder, NodeStore, compose_nodes
from glan.layers.local_encoding import LocalEncoder
from glan.layers.text_encoder import TextEncoder
from glan.models.encoded import EncodedCorpus
from glan.models.vocabulary import PAD_ID
from glan.numerics.functional import softmax

logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-12


def classify(m_tilde: torch.Tensor, m_global: torch.Tensor, head: nn.Linear) -> torch.Tensor:
    """softmax(W [m~; m_global] + b) over the classes."""
    return softmax(head(torch.cat([m_tilde, m_global], dim=-1)), dim=-1)


def cross_entropy(probs: torch.Tensor, gold: torch.Tensor, reduction: str = "mean") -> torch.Tensor:
    """
    Negative log probability of the gold class, reduced over the batch.

    Gold probabilities below 1e-12 are clamped before the log and logged.

    Args:
        probs: (B, C) probability rows
        gold: (B,) class indices
        reduction: "mean" or "sum"

    Raises:
        DomainError: On an empty batch or a class index outside [0, C)
    """
    if gold.numel() == 0:
        raise DomainError("loss of an empty batch")
    if int(gold.min()) < 0 or int(gold.max()) >= probs.shape[-1]:
        raise DomainError(f"gold class outside [0, {probs.shape[-1]})")
    gold_probs = probs.gather(-1, gold.unsqueeze(-1)).squeeze(-1)
    if bool((gold_probs < PROBABILITY_FLOOR).any()):
        logger.warning("Gold-class probability clamped at %g before the log", PROBABILITY_FLOOR)
    losses = -torch.log(gold_probs.clamp_min(PROBABILITY_FLOOR))
    return losses.mean() if reduction == "mean" else losses.sum()


class GlanModel(nn.Module):
    """
    Rumor classifier over source tweets.

    The ablation switch of the config decides which relation encoders run:
    without local encoding m~ is the CNN representation m, without global
    encoding m_global is a zero vector.
    """

    def __init__(
        self,
        config: TrainConfig,
        vocab_size: int,
        n_classes: int,
        tweet_ids: Sequence[str],
        user_ids: Sequence[str],
    ):
        super().__init__()
        if n_classes not in (2, 4):
            raise ConfigurationError(f"expected 2 or 4 classes, got {n_classes}")
        self.config = config
        self.text_encoder = TextEncoder(
            vocab_size, config.d, config.widths, config.filters_per_width, config.init_range
        )
        self.local_encoder = LocalEncoder(config.d, config.local_heads, config.scale_per_head)
        self.node_store = NodeStore(tweet_ids, user_ids, config.d, config.user_dim)
        self.global_encoder = GlobalEncoder(
            config.d, config.user_dim, config.global_heads, config.layers
        )
        self.classifier = nn.Linear(2 * config.d, n_classes)
        self.reset_parameters(config.init_range)
        self.to(config.dtype)

    def reset_parameters(self, init_range: float) -> None:
        with torch.no_grad():
            for param in self.parameters():
                param.uniform_(-init_range, init_range)
            self.text_encoder.embedding.weight[PAD_ID].zero_()

    def encode_text(
        self, corpus: EncodedCorpus, rows: Optional[torch.Tensor] = None
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """(m, m~) of the selected tweets (all when rows is None)."""
        source_ids = corpus.source_ids if rows is None else corpus.source_ids[rows]
        m = self.text_encoder(source_ids)
        if not self.config.ablation.uses_local or corpus.retweet_ids.shape[1] == 0:
            return m, m
        retweet_ids = corpus.retweet_ids if rows is None else corpus.retweet_ids[rows]
        mask = corpus.retweet_mask if rows is None else corpus.retweet_mask[rows]
        return m, self.local_encoder(m, self.text_encoder(retweet_ids), mask)

    def encode_graph(self, corpus: EncodedCorpus, m_tilde: torch.Tensor) -> torch.Tensor:
        """m_global of every tweet node, from m~ of every tweet node."""
        m_free, u_free = self.node_store.gather(corpus.tweet_ids, corpus.user_ids)
        m_prime, u_prime = compose_nodes(
            m_tilde, m_free, u_free, corpus.user_features.to(m_tilde.dtype)
        )
        m_global, _ = self.global_encoder(
            m_prime, u_prime, corpus.tweet_edges, corpus.user_edges
        )
        return m_global

    def forward(self, corpus: EncodedCorpus, rows: Optional[torch.Tensor] = None) -> torch.Tensor:
        """
        Class probabilities of the selected tweets.

        Args:
            corpus: Encoded corpus holding every graph node
            rows: Optional (B,) tweet row indices, all tweets by default

        Returns:
            (B, C) probabilities
        """
        if self.config.ablation.uses_global:
            _, m_tilde = self.encode_text(corpus)
            m_global = self.encode_graph(corpus, m_tilde)
            if rows is not None:
                m_tilde, m_global = m_tilde[rows], m_global[rows]
        else:
            _, m_tilde = self.encode_text(corpus, rows)
            m_global = torch.zeros_like(m_tilde)
        return classify(m_tilde, m_global, self.classifier)
