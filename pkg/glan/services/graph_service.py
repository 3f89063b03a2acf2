"""Graph service - builds the heterogeneous user-tweet graph."""
import logging
from collections import Counter
from typing import Iterable

from glan.exceptions import CorpusError
from glan.models.cascade import Cascade, UserRecord
from glan.models.graph import HeteroGraph

logger = logging.getLogger(__name__)


def build_graph(cascades: list[Cascade], users: Iterable[UserRecord]) -> HeteroGraph:
    """
    Connect every user to the source tweets whose cascades they took part in.

    An edge (u, m) exists iff u authored m's source or one of its retweets;
    its weight counts those interactions. Tweet nodes follow cascade order,
    user nodes follow first participation.

    Args:
        cascades: Cascades to turn into tweet nodes
        users: Known users (every participant must be among them)

    Returns:
        HeteroGraph

    Raises:
        CorpusError: If a participant has no user record
    """
    known = {user.id for user in users}
    user_index: dict[str, int] = {}
    edges: list[tuple[int, int, int]] = []

    for tweet, cascade in enumerate(cascades):
        counts = Counter(cascade.participants())
        for author, weight in counts.items():
            if author not in known:
                raise CorpusError(f"user {author} of cascade {cascade.id} has no record")
            user = user_index.setdefault(author, len(user_index))
            edges.append((user, tweet, weight))

    graph = HeteroGraph(
        tweet_ids=[cascade.id for cascade in cascades],
        user_ids=list(user_index),
        edges=edges,
    )
    logger.debug(
        "Built graph: %d tweets, %d users, %d edges",
        len(graph.tweet_ids),
        len(graph.user_ids),
        len(graph.edges),
    )
    return graph
