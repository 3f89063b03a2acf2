"""Corpus service - ingestion, statistics, splitting and time filtering."""
import json
import logging
from pathlib import Path
from typing import Annotated, Iterable, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from glan.exceptions import CorpusError, DomainError, SplitError
from glan.models.cascade import Cascade, Label, Microblog, UserRecord
from glan.utils.text import tokenize

logger = logging.getLogger(__name__)

DEV_DIVISOR = 10  # 10% of the corpus goes to dev
TEST_SHARE = 4  # remainder splits train:test = 3:1


class TweetLine(BaseModel):
    """Corpus line describing a source tweet or retweet."""

    type: Literal["tweet"]
    id: str
    author: str
    text: str = ""
    ts: float
    parent: Optional[str] = None
    label: Optional[Label] = None


class UserLine(BaseModel):
    """Corpus line describing a user."""

    type: Literal["user"]
    id: str
    features: Optional[list[float]] = None


CorpusLine = TypeAdapter(Annotated[Union[TweetLine, UserLine], Field(discriminator="type")])


class CorpusStatistics(BaseModel):
    """Data set statistics in the layout of a corpus summary table."""

    source_tweets: int
    labels: dict[str, int]
    users: int
    posts: int


def ingest(path: Path) -> tuple[list[Cascade], list[UserRecord]]:
    """
    Read a JSON-lines corpus into cascades and users.

    Nested retweets are attached to the root source of their chain. Authors
    without a user line get a featureless user record.

    Args:
        path: Corpus file

    Returns:
        (cascades in source order, deduplicated users)

    Raises:
        CorpusError: On undecodable or malformed lines, duplicate tweet ids, dangling parents,
            unlabeled sources, retweets older than their source, or user
            feature vectors of differing lengths
    """
    tweets: dict[str, tuple[TweetLine, int]] = {}
    users: dict[str, UserRecord] = {}

    with open(path, "rb") as handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise CorpusError(f"invalid UTF-8 at byte {e.start}", line_number)
            if not line.strip():
                continue
            try:
                record = CorpusLine.validate_python(json.loads(line))
            except json.JSONDecodeError as e:
                raise CorpusError(f"invalid JSON ({e.msg})", line_number)
            except ValidationError as e:
                first = e.errors()[0]
                location = ".".join(str(part) for part in first["loc"])
                raise CorpusError(f"{location}: {first['msg']}", line_number)

            if isinstance(record, UserLine):
                if record.id in users:
                    if users[record.id].features != record.features:
                        logger.warning("Conflicting user records for %s", record.id)
                    continue
                try:
                    users[record.id] = UserRecord(id=record.id, features=record.features)
                except ValidationError:
                    raise CorpusError(f"user {record.id} has non-finite features", line_number)
            else:
                if record.id in tweets:
                    raise CorpusError(f"duplicate tweet id {record.id}", line_number)
                tweets[record.id] = (record, line_number)

    cascades = _assemble_cascades(tweets)

    for cascade in cascades:
        for author in cascade.participants():
            if author not in users:
                users[author] = UserRecord(id=author)

    lengths = {len(user.features) for user in users.values() if user.features is not None}
    if len(lengths) > 1:
        raise CorpusError(f"user feature vectors have differing lengths {sorted(lengths)}")

    logger.info("Ingested %d cascades and %d users from %s", len(cascades), len(users), path)
    return cascades, list(users.values())


def _root_of(tweet_id: str, tweets: dict[str, tuple[TweetLine, int]]) -> str:
    current = tweet_id
    for _ in range(len(tweets) + 1):
        record, line_number = tweets[current]
        if record.parent is None:
            return current
        if record.parent not in tweets:
            raise CorpusError(f"dangling parent id {record.parent}", line_number)
        current = record.parent
    raise CorpusError(f"retweet chain of {tweet_id} contains a cycle", tweets[tweet_id][1])


def _assemble_cascades(tweets: dict[str, tuple[TweetLine, int]]) -> list[Cascade]:
    retweets_of: dict[str, list[TweetLine]] = {}
    sources: list[TweetLine] = []
    for tweet_id, (record, line_number) in tweets.items():
        if record.parent is None:
            if record.label is None:
                raise CorpusError(f"source tweet {tweet_id} has no label", line_number)
            sources.append(record)
            continue
        root = _root_of(tweet_id, tweets)
        if record.ts < tweets[root][0].ts:
            raise CorpusError(f"retweet {tweet_id} predates its source {root}", line_number)
        retweets_of.setdefault(root, []).append(record)

    cascades = []
    for source in sources:
        retweets = sorted(retweets_of.get(source.id, []), key=lambda r: r.ts)
        cascades.append(
            Cascade(
                source=_to_microblog(source, None),
                retweets=[_to_microblog(r, source.id) for r in retweets],
                label=source.label,
            )
        )
    return cascades


def _to_microblog(record: TweetLine, root: Optional[str]) -> Microblog:
    return Microblog(
        id=record.id,
        author=record.author,
        tokens=tokenize(record.text),
        ts=record.ts,
        parent=root,
    )


def write_corpus(path: Path, cascades: Iterable[Cascade], users: Iterable[UserRecord]) -> None:
    """Write users and cascades as JSON lines readable by ingest."""
    with open(path, "w", encoding="utf-8") as handle:
        for user in users:
            line = UserLine(type="user", id=user.id, features=user.features)
            handle.write(line.model_dump_json(exclude_none=True) + "\n")
        for cascade in cascades:
            for blog in [cascade.source, *cascade.retweets]:
                line = TweetLine(
                    type="tweet",
                    id=blog.id,
                    author=blog.author,
                    text=" ".join(blog.tokens),
                    ts=blog.ts,
                    parent=blog.parent,
                    label=cascade.label if blog.is_source else None,
                )
                handle.write(line.model_dump_json(exclude_none=True) + "\n")


def corpus_statistics(cascades: list[Cascade], users: list[UserRecord]) -> CorpusStatistics:
    """Count source tweets, labels, users and posts."""
    labels: dict[str, int] = {}
    for cascade in cascades:
        labels[cascade.label.value] = labels.get(cascade.label.value, 0) + 1
    return CorpusStatistics(
        source_tweets=len(cascades),
        labels=labels,
        users=len(users),
        posts=sum(1 + len(cascade.retweets) for cascade in cascades),
    )


def split_sizes(n: int) -> tuple[int, int, int]:
    """(train, dev, test) sizes: dev is 10% rounded down, the rest splits 3:1."""
    dev = n // DEV_DIVISOR
    test = (n - dev) // TEST_SHARE
    return n - dev - test, dev, test


def split(
    cascades: list[Cascade], seed: int
) -> tuple[list[Cascade], list[Cascade], list[Cascade]]:
    """
    Stratified random split into train, dev and test.

    Each class is shuffled, then classes are interleaved by relative position,
    so every prefix of the ordering keeps the label proportions.

    Args:
        cascades: All cascades
        seed: Random seed

    Returns:
        (train, dev, test)

    Raises:
        SplitError: If there are fewer than 8 cascades or a split would be empty
    """
    n = len(cascades)
    if n < 8:
        raise SplitError(f"need at least 8 cascades to split, got {n}")
    n_train, n_dev, n_test = split_sizes(n)
    if min(n_train, n_dev, n_test) == 0:
        raise SplitError(f"split of {n} cascades leaves an empty partition")

    rng = np.random.default_rng(seed)
    by_label: dict[Label, list[int]] = {}
    for i, cascade in enumerate(cascades):
        by_label.setdefault(cascade.label, []).append(i)

    keyed: list[tuple[float, int, int]] = []
    for class_rank, label in enumerate(sorted(by_label, key=lambda lb: lb.value)):
        members = [by_label[label][j] for j in rng.permutation(len(by_label[label]))]
        size = len(members)
        for position, index in enumerate(members):
            keyed.append(((position + 0.5) / size, class_rank, index))
    order = [index for _, _, index in sorted(keyed)]

    dev = [cascades[i] for i in order[:n_dev]]
    test = [cascades[i] for i in order[n_dev:n_dev + n_test]]
    train = [cascades[i] for i in order[n_dev + n_test:]]
    return train, dev, test


def time_filter(cascade: Cascade, delay: float) -> Cascade:
    """
    Keep only retweets posted within `delay` seconds of the source.

    Raises:
        DomainError: If delay is negative
    """
    if delay < 0:
        raise DomainError(f"delay must be non-negative, got {delay}")
    kept = [r for r in cascade.retweets if r.ts - cascade.source.ts <= delay]
    if len(kept) == len(cascade.retweets):
        return cascade
    return Cascade(source=cascade.source, retweets=kept, label=cascade.label)
