"""Heterogeneous user-tweet graph model."""
from functools import cached_property
from pathlib import Path

from pydantic import BaseModel, ConfigDict, model_validator


class HeteroGraph(BaseModel):
    """
    Bipartite participation graph between users and source tweets.

    Edges are (user index, tweet index, interaction count) triples.
    User-user and tweet-tweet relations exist only as 2-hop paths.
    """

    model_config = ConfigDict(frozen=True)

    tweet_ids: list[str]
    user_ids: list[str]
    edges: list[tuple[int, int, int]]

    @model_validator(mode="after")
    def check_edges(self) -> "HeteroGraph":
        seen: set[tuple[int, int]] = set()
        covered = [False] * len(self.tweet_ids)
        for user, tweet, weight in self.edges:
            if not (0 <= user < len(self.user_ids) and 0 <= tweet < len(self.tweet_ids)):
                raise ValueError(f"Edge ({user}, {tweet}) out of range")
            if weight < 1:
                raise ValueError(f"Edge ({user}, {tweet}) has weight {weight}")
            if (user, tweet) in seen:
                raise ValueError(f"Duplicate edge ({user}, {tweet})")
            seen.add((user, tweet))
            covered[tweet] = True
        if not all(covered):
            isolated = self.tweet_ids[covered.index(False)]
            raise ValueError(f"Tweet node {isolated} has no user neighbor")
        return self

    @cached_property
    def tweet_index(self) -> dict[str, int]:
        return {tweet_id: i for i, tweet_id in enumerate(self.tweet_ids)}

    @cached_property
    def user_index(self) -> dict[str, int]:
        return {user_id: i for i, user_id in enumerate(self.user_ids)}

    @cached_property
    def user_adjacency(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in self.tweet_ids]
        for user, tweet, _ in self.edges:
            adjacency[tweet].append(user)
        return adjacency

    @cached_property
    def tweet_adjacency(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in self.user_ids]
        for user, tweet, _ in self.edges:
            adjacency[user].append(tweet)
        return adjacency

    def users_of(self, tweet_id: str) -> list[str]:
        """N(m): users who authored or retweeted within the tweet's cascade."""
        return [self.user_ids[u] for u in self.user_adjacency[self.tweet_index[tweet_id]]]

    def tweets_of(self, user_id: str) -> list[str]:
        """N(u): source tweets whose cascades the user took part in."""
        return [self.tweet_ids[t] for t in self.tweet_adjacency[self.user_index[user_id]]]

    def capped_edges(self, cap: int, center: str) -> list[tuple[int, int, int]]:
        """
        Edges kept when every center node reads at most `cap` neighbors.

        Neighbors are ranked by interaction count, then by id, most active first.

        Args:
            cap: Maximum neighbors per center node
            center: "tweet" or "user"

        Returns:
            Subset of edges, in the original edge order
        """
        if center not in ("tweet", "user"):
            raise ValueError(f"Unknown center type {center}")
        by_center: dict[int, list[tuple[int, int, int]]] = {}
        for edge in self.edges:
            key = edge[1] if center == "tweet" else edge[0]
            by_center.setdefault(key, []).append(edge)

        kept: set[tuple[int, int]] = set()
        for key, group in by_center.items():
            if center == "tweet":
                ranked = sorted(group, key=lambda e: (-e[2], self.user_ids[e[0]]))
            else:
                ranked = sorted(group, key=lambda e: (-e[2], self.tweet_ids[e[1]]))
            kept.update((user, tweet) for user, tweet, _ in ranked[:cap])
        return [edge for edge in self.edges if (edge[0], edge[1]) in kept]

    def export_edge_list(self, path: Path) -> None:
        """Write one "user_id tweet_id weight" line per edge."""
        with open(path, "w", encoding="utf-8") as handle:
            for user, tweet, weight in self.edges:
                handle.write(f"{self.user_ids[user]} {self.tweet_ids[tweet]} {weight}\n")
