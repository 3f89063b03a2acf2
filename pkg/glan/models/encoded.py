"""Tensorized corpus consumed by the model."""
import torch
from pydantic import BaseModel, ConfigDict


class EncodedCorpus(BaseModel):
    """
    Token ids, retweet masks, user features and graph edges of a corpus.

    Row i of every per-tweet tensor belongs to tweet_ids[i]; row j of
    user_features to user_ids[j]. Edge tensors hold user indices in row 0
    and tweet indices in row 1.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    tweet_ids: list[str]
    user_ids: list[str]
    source_ids: torch.Tensor  # (N, L) long
    retweet_ids: torch.Tensor  # (N, n, L) long
    retweet_mask: torch.Tensor  # (N, n) bool
    user_features: torch.Tensor  # (U, d_u) float64
    tweet_edges: torch.Tensor  # (2, E) edges read by tweet centers
    user_edges: torch.Tensor  # (2, E') edges read by user centers
    labels: torch.Tensor  # (N,) long, -1 when outside the label set

    def rows(self, ids: list[str]) -> torch.Tensor:
        index = {tweet_id: i for i, tweet_id in enumerate(self.tweet_ids)}
        return torch.tensor([index[i] for i in ids], dtype=torch.long)
