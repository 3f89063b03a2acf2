"""Local relation encoding: retweet self-attention, source-retweet cross attention, gated fusion."""
from typing import Optional

import torch
import torch.nn as nn

from glan.layers.attention import MultiHeadAttention
from glan.numerics.functional import sigmoid, softmax


class LocalEncoder(nn.Module):
    """
    Refines a source tweet with the retweets of its own cascade.

    Works on padded batches: `retweets` is (B, n, d) and `mask` (B, n) marks
    real retweets. A cascade without retweets keeps its text representation.
    """

    def __init__(self, d: int, heads: int, scale_per_head: bool = True):
        super().__init__()
        self.d = d
        self.self_attention = MultiHeadAttention(d, heads, scale_per_head)
        self.bilinear = nn.Parameter(torch.empty(d, d))
        self.gate_source = nn.Parameter(torch.empty(d))
        self.gate_retweets = nn.Parameter(torch.empty(d))
        self.gate_bias = nn.Parameter(torch.empty(()))
        nn.init.uniform_(self.bilinear, -0.1, 0.1)
        nn.init.uniform_(self.gate_source, -0.1, 0.1)
        nn.init.uniform_(self.gate_retweets, -0.1, 0.1)
        nn.init.zeros_(self.gate_bias)

    def refine_retweets(
        self, retweets: torch.Tensor, mask: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        """Multi-head self-attention among the retweets: (..., n, d) -> (..., n, d)."""
        return self.self_attention(retweets, retweets, retweets, mask=mask)

    def cross_attend(
        self,
        source: torch.Tensor,
        refined: torch.Tensor,
        mask: Optional[torch.Tensor] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Bilinear attention of the source over its refined retweets.

        Args:
            source: (..., d) source representation m
            refined: (..., n, d) refined retweets
            mask: Optional (..., n) boolean, False for padding

        Returns:
            (weights s (..., n), summary r (..., d))
        """
        logits = torch.einsum("...nd,de,...e->...n", refined, self.bilinear, source)
        weights = softmax(logits, dim=-1, mask=mask)
        summary = (weights.unsqueeze(-1) * refined).sum(dim=-2)
        return weights, summary

    def fuse(
        self, source: torch.Tensor, summary: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Gated convex combination alpha*m + (1-alpha)*r; returns (fused, alpha)."""
        alpha = sigmoid(
            source @ self.gate_source + summary @ self.gate_retweets + self.gate_bias
        ).unsqueeze(-1)
        return alpha * source + (1 - alpha) * summary, alpha.squeeze(-1)

    def forward(
        self, source: torch.Tensor, retweets: torch.Tensor, mask: torch.Tensor
    ) -> torch.Tensor:
        """
        Args:
            source: (B, d) source representations
            retweets: (B, n, d) retweet representations, padded
            mask: (B, n) boolean, True for real retweets

        Returns:
            (B, d) locally refined sources
        """
        if retweets.shape[-2] == 0:
            return source
        has_retweets = mask.any(dim=-1)
        # rows without retweets attend to one padding slot; their result is discarded
        safe_mask = mask.clone()
        safe_mask[~has_retweets, 0] = True
        refined = self.refine_retweets(retweets, safe_mask)
        _, summary = self.cross_attend(source, refined, safe_mask)
        fused, _ = self.fuse(source, summary)
        return torch.where(has_retweets.unsqueeze(-1), fused, source)
