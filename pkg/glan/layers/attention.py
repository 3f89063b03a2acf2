"""Scaled dot-product and multi-head attention."""
import math
from typing import Optional

import torch
import torch.nn as nn

from glan.exceptions import ConfigurationError, DomainError
from glan.numerics.functional import softmax


def scaled_dot_attention(
    q: torch.Tensor,
    k: torch.Tensor,
    v: torch.Tensor,
    mask: Optional[torch.Tensor] = None,
    scale: Optional[float] = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    softmax(Q K^T / scale) V over the last two dimensions.

    Args:
        q: (..., n_q, d') queries
        k: (..., n_k, d') keys
        v: (..., n_k, d_v) values
        mask: Optional (..., n_k) boolean, False marks padded keys (zero weight)
        scale: Divisor of the scores, sqrt(d') by default

    Returns:
        (output (..., n_q, d_v), weights (..., n_q, n_k))

    Raises:
        DomainError: If there are no keys, a query row has every key masked, or K and V
            row counts differ
    """
    if k.shape[-2] == 0:
        raise DomainError("attention over an empty key set")
    if k.shape[-2] != v.shape[-2]:
        raise DomainError(f"{k.shape[-2]} keys but {v.shape[-2]} values")
    if scale is None:
        scale = math.sqrt(q.shape[-1])
    scores = q @ k.transpose(-1, -2) / scale
    weights = softmax(scores, dim=-1, mask=None if mask is None else mask.unsqueeze(-2))
    return weights @ v, weights


class MultiHeadAttention(nn.Module):
    """
    h heads of scaled dot-product attention, concatenated and projected by W_o.

    Column block i of each projection (width d/h) is the per-head W^Q_i, W^K_i, W^V_i.
    """

    def __init__(self, d: int, heads: int, scale_per_head: bool = True):
        super().__init__()
        if d % heads != 0:
            raise ConfigurationError(f"d={d} not divisible by {heads} heads")
        self.d = d
        self.heads = heads
        self.head_dim = d // heads
        self.scale = math.sqrt(self.head_dim if scale_per_head else d)
        self.w_q = nn.Linear(d, d, bias=False)
        self.w_k = nn.Linear(d, d, bias=False)
        self.w_v = nn.Linear(d, d, bias=False)
        self.w_o = nn.Linear(d, d, bias=False)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        # (..., n, d) -> (..., h, n, d/h)
        return x.reshape(*x.shape[:-1], self.heads, self.head_dim).transpose(-3, -2)

    def forward(
        self,
        q: torch.Tensor,
        k: torch.Tensor,
        v: torch.Tensor,
        mask: Optional[torch.Tensor] = None,
        return_weights: bool = False,
    ):
        """
        Args:
            q: (..., n_q, d)
            k, v: (..., n_k, d)
            mask: Optional (..., n_k) boolean key mask
            return_weights: Also return (..., h, n_q, n_k) attention weights

        Returns:
            (..., n_q, d) output, plus weights when requested
        """
        head_mask = None if mask is None else mask.unsqueeze(-2)
        z, weights = scaled_dot_attention(
            self._split(self.w_q(q)),
            self._split(self.w_k(k)),
            self._split(self.w_v(v)),
            mask=head_mask,
            scale=self.scale,
        )
        concatenated = z.transpose(-3, -2).reshape(*q.shape[:-1], self.d)
        output = self.w_o(concatenated)
        if return_weights:
            return output, weights
        return output
