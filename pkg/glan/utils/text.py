"""Tokenization, vocabulary and fixed-length text encoding utilities."""
from collections import Counter
from pathlib import Path
from typing import Iterable, Sequence

from glan.exceptions import CorpusError
from glan.models.cascade import Cascade
from glan.models.vocabulary import PAD, PAD_ID, UNK, Vocabulary


def tokenize(text: str) -> list[str]:
    """
    Split pre-tokenized text on whitespace.

    Examples:
        >>> tokenize("breaking  news\\tnow")
        ['breaking', 'news', 'now']
    """
    return text.split()


def build_vocab(train: Iterable[Cascade], min_count: int = 2) -> Vocabulary:
    """
    Build a vocabulary from source and retweet tokens of the training split.

    Tokens seen fewer than `min_count` times are dropped. Indices follow
    descending frequency, ties broken lexicographically.

    Args:
        train: Training cascades
        min_count: Minimum number of occurrences

    Returns:
        Vocabulary starting with the padding and unknown tokens

    Raises:
        CorpusError: If the training set is empty

    Examples:
        Counts {a: 3, b: 1} give [<pad>, <unk>, a].
    """
    counts: Counter[str] = Counter()
    n_cascades = 0
    for cascade in train:
        n_cascades += 1
        counts.update(cascade.source.tokens)
        for retweet in cascade.retweets:
            counts.update(retweet.tokens)
    if n_cascades == 0:
        raise CorpusError("Cannot build a vocabulary from an empty training set")

    frequent = [t for t, count in counts.items() if count >= min_count and t not in (PAD, UNK)]
    kept = sorted(
        frequent,
        key=lambda token: (-counts[token], token),
    )
    return Vocabulary(tokens=[PAD, UNK, *kept])


def encode_text(tokens: Sequence[str], vocab: Vocabulary, length: int) -> list[int]:
    """
    Map tokens to exactly `length` ids: truncate at the end, pad zeros at the start.

    Examples:
        ids [7, 9], length 5 -> [0, 0, 0, 7, 9]
        ids [4, 5, 6], length 2 -> [4, 5]
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    ids = [vocab.lookup(token) for token in tokens[:length]]
    return [PAD_ID] * (length - len(ids)) + ids


def read_embedding_file(path: Path, dim: int) -> dict[str, list[float]]:
    """
    Read a text embedding file: one token per line followed by `dim` reals.

    Fields may be separated by any whitespace. A first line holding only two
    integers (word2vec header) is skipped.

    Raises:
        CorpusError: If a line is not UTF-8, or a vector has the wrong length or is
            not numeric
    """
    vectors: dict[str, list[float]] = {}
    with open(path, "rb") as handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                parts = raw.decode("utf-8").split()
            except UnicodeDecodeError as e:
                raise CorpusError(f"invalid UTF-8 at byte {e.start}", line_number)
            if not parts:
                continue
            if line_number == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            if len(parts) != dim + 1:
                raise CorpusError(
                    f"expected {dim} values for '{parts[0]}', got {len(parts) - 1}", line_number
                )
            try:
                vectors[parts[0]] = [float(value) for value in parts[1:]]
            except ValueError:
                raise CorpusError(f"non-numeric value in vector of '{parts[0]}'", line_number)
    return vectors
