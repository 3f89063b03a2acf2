"""Global relation encoding over the user-tweet graph.

Messages flow along edge index tensors: row 0 holds user indices and row 1
tweet indices. Softmax over a center's neighbor set is a segment softmax
keyed by the center index of each edge.
"""
from typing import Optional, Sequence

import torch
import torch.nn as nn

from glan.exceptions import ConfigurationError, DomainError
from glan.numerics.functional import elu, leaky_relu


def compose_nodes(
    m_tilde: Optional[torch.Tensor],
    m_free: torch.Tensor,
    u_free: torch.Tensor,
    u_features: torch.Tensor,
) -> tuple[torch.Tensor, torch.Tensor]:
    """
    Add free vectors to text and feature vectors: m' = m0 + m~, u' = u0 + u_f.

    Raises:
        DomainError: If m~ is missing or shapes disagree
    """
    if m_tilde is None:
        raise DomainError("combined text representations are missing")
    if m_tilde.shape != m_free.shape:
        raise DomainError(f"m~ {tuple(m_tilde.shape)} vs m0 {tuple(m_free.shape)}")
    if u_features.shape != u_free.shape:
        raise DomainError(f"u_f {tuple(u_features.shape)} vs u0 {tuple(u_free.shape)}")
    return m_free + m_tilde, u_free + u_features


def project(x: torch.Tensor, weight: torch.Tensor) -> torch.Tensor:
    """Map (..., d_in) node vectors into the shared d-space with a (d_in, d) matrix."""
    if x.shape[-1] != weight.shape[0]:
        raise DomainError(f"cannot project width {x.shape[-1]} with {tuple(weight.shape)}")
    return x @ weight


def segment_softmax(logits: torch.Tensor, segment: torch.Tensor, n_segments: int) -> torch.Tensor:
    """
    Softmax of (E, K) edge logits within groups of edges sharing a segment id.

    Raises:
        DomainError: If there are no edges
    """
    if logits.shape[0] == 0:
        raise DomainError("attention over an empty neighbor set")
    index = segment.unsqueeze(-1).expand_as(logits)
    peak = torch.full(
        (n_segments, logits.shape[-1]), float("-inf"), dtype=logits.dtype, device=logits.device
    ).scatter_reduce(0, index, logits.detach(), reduce="amax", include_self=True)
    weights = torch.exp(logits - peak[segment])
    totals = torch.zeros_like(peak).index_add(0, segment, weights)
    return weights / totals[segment]


def edge_logits(center: torch.Tensor, neighbor: torch.Tensor, score: torch.Tensor) -> torch.Tensor:
    """LeakyReLU(score^T [center; neighbor]) for (E, d) rows and (K, 2d) score vectors."""
    return leaky_relu(torch.cat([center, neighbor], dim=-1) @ score.T)


def relation_attention(
    center: torch.Tensor, neighbors: torch.Tensor, score: torch.Tensor
) -> torch.Tensor:
    """
    Attention weights of one center node over its neighbors.

    Args:
        center: (d,) projected center
        neighbors: (n, d) projected neighbors
        score: (2d,) or (K, 2d) score vectors

    Returns:
        (n,) weights, or (n, K) with one column per head
    """
    if neighbors.shape[0] == 0:
        raise DomainError("attention over an empty neighbor set")
    single = score.dim() == 1
    scores = score.unsqueeze(0) if single else score
    logits = edge_logits(center.expand_as(neighbors), neighbors, scores)
    segment = torch.zeros(neighbors.shape[0], dtype=torch.long, device=neighbors.device)
    weights = segment_softmax(logits, segment, 1)
    return weights.squeeze(-1) if single else weights


def aggregate_edges(
    neighbor_rows: torch.Tensor,
    weights: torch.Tensor,
    transforms: torch.Tensor,
    segment: torch.Tensor,
    n_segments: int,
) -> torch.Tensor:
    """
    Per-head weighted neighbor sums, ELU, heads concatenated.

    Args:
        neighbor_rows: (E, d) neighbor vector of each edge
        weights: (E, K) attention weight of each edge per head
        transforms: (K, d, d/K) per-head matrices W^k
        segment: (E,) center index of each edge
        n_segments: Number of center nodes

    Returns:
        (n_segments, d) aggregated centers
    """
    if neighbor_rows.shape[-1] != transforms.shape[1]:
        raise DomainError(
            f"neighbor width {neighbor_rows.shape[-1]} vs transforms {tuple(transforms.shape)}"
        )
    heads, _, head_dim = transforms.shape
    messages = torch.einsum("ed,kdo->eko", neighbor_rows, transforms) * weights.unsqueeze(-1)
    summed = torch.zeros(
        n_segments, heads, head_dim, dtype=messages.dtype, device=messages.device
    ).index_add(0, segment, messages)
    return elu(summed).reshape(n_segments, heads * head_dim)


def aggregate(
    neighbors: torch.Tensor, weights: torch.Tensor, transforms: torch.Tensor
) -> torch.Tensor:
    """Aggregate one center from (n, d) neighbors with (n, K) weights; returns (d,)."""
    segment = torch.zeros(neighbors.shape[0], dtype=torch.long, device=neighbors.device)
    return aggregate_edges(neighbors, weights, transforms, segment, 1).squeeze(0)


class RelationLayer(nn.Module):
    """One synchronous round: tweets read their users, users read their tweets."""

    def __init__(self, d: int, heads: int):
        super().__init__()
        if d % heads != 0:
            raise ConfigurationError(f"d={d} not divisible by {heads} heads")
        self.tweet_score = nn.Parameter(torch.empty(heads, 2 * d))
        self.user_score = nn.Parameter(torch.empty(heads, 2 * d))
        self.user_transforms = nn.Parameter(torch.empty(heads, d, d // heads))
        self.tweet_transforms = nn.Parameter(torch.empty(heads, d, d // heads))
        for param in self.parameters():
            nn.init.uniform_(param, -0.1, 0.1)

    def forward(
        self,
        tweets: torch.Tensor,
        users: torch.Tensor,
        tweet_edges: torch.Tensor,
        user_edges: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """
        Args:
            tweets: (N, d) tweet vectors of the previous round
            users: (U, d) user vectors of the previous round
            tweet_edges: (2, E) edges read by tweet centers
            user_edges: (2, E') edges read by user centers

        Returns:
            (new tweets (N, d), new users (U, d))
        """
        user_idx, tweet_idx = tweet_edges
        alpha = segment_softmax(
            edge_logits(tweets[tweet_idx], users[user_idx], self.tweet_score),
            tweet_idx,
            tweets.shape[0],
        )
        new_tweets = aggregate_edges(
            users[user_idx], alpha, self.user_transforms, tweet_idx, tweets.shape[0]
        )

        user_idx, tweet_idx = user_edges
        beta = segment_softmax(
            edge_logits(users[user_idx], tweets[tweet_idx], self.user_score),
            user_idx,
            users.shape[0],
        )
        new_users = aggregate_edges(
            tweets[tweet_idx], beta, self.tweet_transforms, user_idx, users.shape[0]
        )
        return new_tweets, new_users


class GlobalEncoder(nn.Module):
    """Projects composed nodes into a shared space and runs `layers` relation rounds."""

    def __init__(self, d: int, user_dim: int, heads: int, layers: int):
        super().__init__()
        self.tweet_projection = nn.Parameter(torch.empty(d, d))
        self.user_projection = nn.Parameter(torch.empty(user_dim, d))
        nn.init.uniform_(self.tweet_projection, -0.1, 0.1)
        nn.init.uniform_(self.user_projection, -0.1, 0.1)
        self.layers = nn.ModuleList(RelationLayer(d, heads) for _ in range(layers))

    def forward(
        self,
        m_prime: torch.Tensor,
        u_prime: torch.Tensor,
        tweet_edges: torch.Tensor,
        user_edges: Optional[torch.Tensor] = None,
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Return (m_global (N, d), u_global (U, d)); user_edges defaults to tweet_edges."""
        if user_edges is None:
            user_edges = tweet_edges
        tweets = project(m_prime, self.tweet_projection)
        users = project(u_prime, self.user_projection)
        for layer in self.layers:
            tweets, users = layer(tweets, users, tweet_edges, user_edges)
        return tweets, users


def edge_tensor(edges: Sequence[tuple[int, int, int]]) -> torch.Tensor:
    """(user, tweet, weight) triples -> (2, E) long tensor of user and tweet indices."""
    if not edges:
        return torch.zeros(2, 0, dtype=torch.long)
    return torch.tensor([[u for u, _, _ in edges], [t for _, t, _ in edges]], dtype=torch.long)


class NodeStore(nn.Module):
    """
    Trainable free vectors m0 of known tweets and u0 of known users.

    Ids outside the store read as zero vectors.
    """

    def __init__(self, tweet_ids: Sequence[str], user_ids: Sequence[str], d: int, user_dim: int):
        super().__init__()
        self.tweet_index = {tweet_id: i for i, tweet_id in enumerate(tweet_ids)}
        self.user_index = {user_id: i for i, user_id in enumerate(user_ids)}
        self.tweet_free = nn.Parameter(torch.empty(len(self.tweet_index), d))
        self.user_free = nn.Parameter(torch.empty(len(self.user_index), user_dim))
        nn.init.uniform_(self.tweet_free, -0.1, 0.1)
        nn.init.uniform_(self.user_free, -0.1, 0.1)

    @staticmethod
    def _rows(table: torch.Tensor, index: dict[str, int], ids: Sequence[str]) -> torch.Tensor:
        positions = torch.tensor([index.get(i, -1) for i in ids], dtype=torch.long)
        if table.shape[0] == 0:
            return table.new_zeros(len(ids), table.shape[1])
        known = (positions >= 0).unsqueeze(-1).to(table.dtype)
        return table[positions.clamp(min=0)] * known

    def gather(
        self, tweet_ids: Sequence[str], user_ids: Sequence[str]
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """(m0 (N, d), u0 (U, d_u)) for the given node ids."""
        return (
            self._rows(self.tweet_free, self.tweet_index, tweet_ids),
            self._rows(self.user_free, self.user_index, user_ids),
        )
