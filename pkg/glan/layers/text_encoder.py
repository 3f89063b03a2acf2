"""CNN microblog encoder: embedding lookup, multi-width convolution, max-over-time pooling."""
import logging
from typing import Sequence

import torch
import torch.nn as nn
import torch.nn.functional as F

from glan.exceptions import ConfigurationError, DomainError
from glan.models.vocabulary import PAD_ID, Vocabulary

logger = logging.getLogger(__name__)


class TextEncoder(nn.Module):
    """
    Maps (..., L) token ids to (..., d) microblog representations.

    Filters of every width produce `filters_per_width` features; outputs are
    concatenated in ascending width order, so widths x filters must equal d.
    Source tweets and retweets share this encoder.
    """

    def __init__(
        self,
        vocab_size: int,
        d: int,
        widths: Sequence[int],
        filters_per_width: int,
        init_range: float = 0.1,
    ):
        super().__init__()
        if len(widths) * filters_per_width != d:
            raise ConfigurationError(
                f"{len(widths)} widths x {filters_per_width} filters do not add up to d={d}"
            )
        self.d = d
        self.widths = tuple(sorted(widths))
        self.embedding = nn.Embedding(vocab_size, d, padding_idx=PAD_ID)
        self.convs = nn.ModuleList(
            nn.Conv1d(d, filters_per_width, kernel_size=width) for width in self.widths
        )
        self.reset_parameters(init_range)

    def reset_parameters(self, init_range: float) -> None:
        with torch.no_grad():
            for param in self.parameters():
                param.uniform_(-init_range, init_range)
            self.embedding.weight[PAD_ID].zero_()

    def load_pretrained(self, vectors: dict[str, list[float]], vocab: Vocabulary) -> int:
        """Copy known word vectors into the table; returns how many rows were set."""
        loaded = 0
        with torch.no_grad():
            for token, index in vocab.index.items():
                if index == PAD_ID or token not in vectors:
                    continue
                row = torch.tensor(vectors[token], dtype=self.embedding.weight.dtype)
                if row.numel() != self.d:
                    raise DomainError(
                        f"vector of '{token}' has {row.numel()} values, need {self.d}"
                    )
                self.embedding.weight[index] = row
                loaded += 1
        logger.info("Loaded %d of %d word vectors", loaded, len(vocab))
        return loaded

    def embed(self, ids: torch.Tensor) -> torch.Tensor:
        """(..., L) ids -> (..., L, d) embeddings; padding rows are zero."""
        if ids.numel() and (int(ids.min()) < 0 or int(ids.max()) >= self.embedding.num_embeddings):
            raise DomainError(f"token id outside [0, {self.embedding.num_embeddings})")
        return self.embedding(ids)

    def conv_maxpool(self, x: torch.Tensor) -> torch.Tensor:
        """(..., L, d) -> (..., d): ReLU feature maps, max over time, concatenated."""
        length = x.shape[-2]
        if length < max(self.widths):
            raise DomainError(f"sequence length {length} shorter than kernel {max(self.widths)}")
        batch_shape = x.shape[:-2]
        channels = x.reshape(-1, length, self.d).transpose(1, 2)
        pooled = [F.relu(conv(channels)).amax(dim=-1) for conv in self.convs]
        return torch.cat(pooled, dim=-1).reshape(*batch_shape, self.d)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        return self.conv_maxpool(self.embed(ids))
