"""Tests for corpus ingestion, splitting and time filtering."""
import json

import pytest


def write_lines(path, records):
    path.write_text("".join(json.dumps(record) + "\n" for record in records))
    return path


def tweet(tweet_id, author, ts, parent=None, label=None, text="some words"):
    record = {"type": "tweet", "id": tweet_id, "author": author, "text": text, "ts": ts}
    if parent is not None:
        record["parent"] = parent
    if label is not None:
        record["label"] = label
    return record


class TestIngest:
    """Tests for ingest."""

    def test_cascades_and_users(self, tmp_path):
        """Test sources, retweets sorted by time, and implicit users."""
        from glan.models.cascade import Label
        from glan.services.corpus_service import ingest

        path = write_lines(
            tmp_path / "corpus.jsonl",
            [
                {"type": "user", "id": "alice", "features": [10, 200, 3]},
                tweet("t1", "alice", 100, label="FR"),
                tweet("r2", "carol", 300, parent="t1"),
                tweet("r1", "bob", 200, parent="t1"),
                tweet("t2", "bob", 50, label="NR"),
            ],
        )

        cascades, users = ingest(path)

        assert [c.id for c in cascades] == ["t1", "t2"]
        assert [r.id for r in cascades[0].retweets] == ["r1", "r2"]
        assert cascades[0].label == Label.FR
        assert cascades[0].source.tokens == ["some", "words"]
        assert {u.id: u.features for u in users} == {
            "alice": [10.0, 200.0, 3.0],
            "carol": None,
            "bob": None,
        }

    def test_nested_chain_attaches_to_root(self, tmp_path):
        """Test a retweet of a retweet belongs to the root source."""
        from glan.services.corpus_service import ingest

        path = write_lines(
            tmp_path / "corpus.jsonl",
            [
                tweet("t1", "alice", 100, label="NR"),
                tweet("r1", "bob", 200, parent="t1"),
                tweet("r2", "carol", 300, parent="r1"),
            ],
        )

        cascades, _ = ingest(path)

        assert len(cascades) == 1
        assert [r.parent for r in cascades[0].retweets] == ["t1", "t1"]

    def test_empty_file(self, tmp_path):
        """Test an empty corpus gives no cascades."""
        from glan.services.corpus_service import ingest

        path = tmp_path / "corpus.jsonl"
        path.write_text("")

        assert ingest(path) == ([], [])

    def test_invalid_json_names_line(self, tmp_path):
        """Test malformed JSON reports its line number."""
        from glan.exceptions import CorpusError
        from glan.services.corpus_service import ingest

        path = tmp_path / "corpus.jsonl"
        path.write_text(json.dumps(tweet("t1", "a", 1, label="FR")) + "\n{not json\n")

        with pytest.raises(CorpusError, match="line 2") as info:
            ingest(path)
        assert info.value.line == 2

    def test_invalid_utf8_names_line(self, tmp_path):
        """Test undecodable bytes are a corpus error on their line."""
        from glan.exceptions import CorpusError
        from glan.services.corpus_service import ingest

        path = tmp_path / "corpus.jsonl"
        first = json.dumps(tweet("t1", "a", 1, label="FR")) + "\n"
        path.write_bytes(first.encode("utf-8") + b"\xff\xfe\n")

        with pytest.raises(CorpusError, match="line 2: invalid UTF-8") as info:
            ingest(path)
        assert info.value.line == 2

    @pytest.mark.parametrize(
        "records,message",
        [
            ([tweet("t1", "a", 1)], "no label"),
            ([tweet("t1", "a", 1, label="FR"), tweet("t1", "b", 2, label="NR")], "duplicate"),
            ([tweet("t1", "a", 1, label="FR"), tweet("r1", "b", 2, parent="zz")], "dangling"),
            ([tweet("t1", "a", 10, label="FR"), tweet("r1", "b", 5, parent="t1")], "predates"),
            ([tweet("t1", "a", 1, label="XX")], "label"),
            ([{"type": "tweet", "id": "t1", "author": "a"}], "ts"),
        ],
    )
    def test_malformed_corpora(self, tmp_path, records, message):
        """Test each malformed corpus is rejected with a descriptive error."""
        from glan.exceptions import CorpusError
        from glan.services.corpus_service import ingest

        path = write_lines(tmp_path / "corpus.jsonl", records)

        with pytest.raises(CorpusError, match=message):
            ingest(path)

    def test_feature_lengths_must_agree(self, tmp_path):
        """Test users with differing feature lengths are rejected."""
        from glan.exceptions import CorpusError
        from glan.services.corpus_service import ingest

        path = write_lines(
            tmp_path / "corpus.jsonl",
            [
                {"type": "user", "id": "a", "features": [1, 2]},
                {"type": "user", "id": "b", "features": [1, 2, 3]},
            ],
        )

        with pytest.raises(CorpusError, match="differing lengths"):
            ingest(path)

    def test_write_then_ingest(self, tmp_path, synthetic_corpus):
        """Test a written corpus reads back unchanged."""
        from glan.services.corpus_service import ingest, write_corpus

        cascades, users = synthetic_corpus
        path = tmp_path / "corpus.jsonl"
        write_corpus(path, cascades, users)

        assert ingest(path) == (cascades, users)


class TestStatistics:
    """Tests for corpus_statistics."""

    def test_counts(self, make_cascade):
        """Test sources, labels, users and posts are counted."""
        from glan.models.cascade import Label, UserRecord
        from glan.services.corpus_service import corpus_statistics

        cascades = [
            make_cascade("t1", "a", retweets=[("b", "", 1), ("c", "", 2)]),
            make_cascade("t2", "b", label=Label.NR),
        ]
        users = [UserRecord(id=u) for u in "abc"]

        stats = corpus_statistics(cascades, users)

        assert stats.source_tweets == 2
        assert stats.labels == {"FR": 1, "NR": 1}
        assert stats.users == 3
        assert stats.posts == 4


class TestSplit:
    """Tests for split_sizes and split."""

    @pytest.mark.parametrize(
        "n,sizes",
        [(4664, (3149, 466, 1049)), (10, (7, 1, 2)), (100, (68, 10, 22)), (8, (6, 0, 2))],
    )
    def test_sizes(self, n, sizes):
        """Test dev is n // 10 and the rest splits 3:1."""
        from glan.services.corpus_service import split_sizes

        assert split_sizes(n) == sizes

    def test_partition(self, synthetic_corpus):
        """Test the split covers every cascade exactly once."""
        from glan.services.corpus_service import split

        cascades, _ = synthetic_corpus
        train, dev, test = split(cascades, seed=3)
        ids = [c.id for c in train + dev + test]

        assert sorted(ids) == sorted(c.id for c in cascades)
        assert (len(train), len(dev), len(test)) == (22, 3, 7)

    def test_deterministic(self, synthetic_corpus):
        """Test the same seed gives the same split and another seed differs."""
        from glan.services.corpus_service import split

        cascades, _ = synthetic_corpus

        def ids(seed):
            return [[c.id for c in part] for part in split(cascades, seed)]

        assert ids(1) == ids(1)
        assert ids(1) != ids(2)

    def test_stratified(self, make_cascade):
        """Test dev and test keep the class balance of a balanced corpus."""
        from glan.models.cascade import Label
        from glan.services.corpus_service import split

        cascades = [
            make_cascade(f"t{i}", "a", label=Label.FR if i % 2 else Label.NR) for i in range(40)
        ]
        _, dev, test = split(cascades, seed=0)

        assert sum(c.label == Label.FR for c in dev) == 2
        assert sum(c.label == Label.FR for c in test) == 5

    def test_too_small(self, make_cascade):
        """Test fewer than 8 cascades or an empty partition raise SplitError."""
        from glan.exceptions import SplitError
        from glan.services.corpus_service import split

        with pytest.raises(SplitError):
            split([make_cascade(f"t{i}", "a") for i in range(7)], seed=0)
        with pytest.raises(SplitError):
            split([make_cascade(f"t{i}", "a") for i in range(8)], seed=0)


class TestTimeFilter:
    """Tests for time_filter."""

    def test_keeps_retweets_within_delay(self, make_cascade):
        """Test offsets [60, 7200, 90000] at four hours keep the first two."""
        from glan.services.corpus_service import time_filter

        cascade = make_cascade(
            "t1", "a", retweets=[("b", "", 60), ("c", "", 7200), ("d", "", 90000)]
        )

        assert [r.author for r in time_filter(cascade, 4 * 3600).retweets] == ["b", "c"]
        assert time_filter(cascade, 0).retweets == []
        assert time_filter(cascade, 7200).retweets[-1].author == "c"

    def test_infinite_delay_is_identity(self, make_cascade):
        """Test an infinite delay keeps the whole cascade."""
        from glan.services.corpus_service import time_filter

        cascade = make_cascade("t1", "a", retweets=[("b", "", 10**9)])

        assert time_filter(cascade, float("inf")) == cascade

    def test_negative_delay(self, make_cascade):
        """Test a negative delay is a domain error."""
        from glan.exceptions import DomainError
        from glan.services.corpus_service import time_filter

        with pytest.raises(DomainError):
            time_filter(make_cascade("t1", "a"), -1)
