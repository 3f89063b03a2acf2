"""Tests for Pydantic models."""
import pytest
from pydantic import ValidationError


class TestMicroblogAndCascade:
    """Tests for Microblog and Cascade models."""

    def test_source_has_no_parent(self):
        """Test is_source follows the parent field."""
        from glan.models.cascade import Microblog

        source = Microblog(id="t1", author="alice", ts=0.0)
        retweet = Microblog(id="r1", author="bob", ts=5.0, parent="t1")

        assert source.is_source
        assert not retweet.is_source
        assert source.tokens == []

    def test_cascade_accepts_sorted_retweets(self, make_cascade):
        """Test a well-formed cascade and its participants."""
        cascade = make_cascade(
            "t1", "alice", "big news", retweets=[("bob", "wow", 10), ("bob", "again", 20)]
        )

        assert cascade.id == "t1"
        assert cascade.participants() == ["alice", "bob", "bob"]

    def test_cascade_rejects_retweet_before_source(self):
        """Test a retweet older than its source is rejected."""
        from glan.models.cascade import Cascade, Label, Microblog

        source = Microblog(id="t1", author="alice", ts=100.0)
        early = Microblog(id="r1", author="bob", ts=50.0, parent="t1")

        with pytest.raises(ValidationError):
            Cascade(source=source, retweets=[early], label=Label.NR)

    def test_cascade_rejects_foreign_retweet(self):
        """Test a retweet of another source is rejected."""
        from glan.models.cascade import Cascade, Label, Microblog

        source = Microblog(id="t1", author="alice", ts=0.0)
        other = Microblog(id="r1", author="bob", ts=1.0, parent="t2")

        with pytest.raises(ValidationError):
            Cascade(source=source, retweets=[other], label=Label.NR)

    def test_cascade_rejects_unsorted_retweets(self):
        """Test retweets must be sorted by time."""
        from glan.models.cascade import Cascade, Label, Microblog

        source = Microblog(id="t1", author="alice", ts=0.0)
        late = Microblog(id="r1", author="bob", ts=9.0, parent="t1")
        early = Microblog(id="r2", author="carol", ts=3.0, parent="t1")

        with pytest.raises(ValidationError):
            Cascade(source=source, retweets=[late, early], label=Label.FR)

    def test_label_values(self):
        """Test Label enum values and label sets."""
        from glan.models.cascade import BINARY_LABELS, FOUR_LABELS, Label

        assert [label.value for label in FOUR_LABELS] == ["NR", "FR", "UR", "TR"]
        assert BINARY_LABELS == (Label.NR, Label.FR)


class TestUserRecord:
    """Tests for UserRecord model."""

    def test_features_optional(self):
        """Test a user without features."""
        from glan.models.cascade import UserRecord

        assert UserRecord(id="u1").features is None

    def test_non_finite_features_rejected(self):
        """Test NaN features are rejected."""
        from glan.models.cascade import UserRecord

        with pytest.raises(ValidationError):
            UserRecord(id="u1", features=[1.0, float("nan")])


class TestVocabulary:
    """Tests for Vocabulary model."""

    def test_lookup_falls_back_to_unknown(self):
        """Test unknown tokens map to index 1."""
        from glan.models.vocabulary import PAD, UNK, UNK_ID, Vocabulary

        vocab = Vocabulary(tokens=[PAD, UNK, "rumor"])

        assert vocab.lookup("rumor") == 2
        assert vocab.lookup("missing") == UNK_ID
        assert len(vocab) == 3

    def test_reserved_tokens_required(self):
        """Test the vocabulary must start with padding and unknown."""
        from glan.models.vocabulary import Vocabulary

        with pytest.raises(ValidationError):
            Vocabulary(tokens=["rumor", "<pad>", "<unk>"])

    def test_duplicates_rejected(self):
        """Test duplicate tokens are rejected."""
        from glan.models.vocabulary import PAD, UNK, Vocabulary

        with pytest.raises(ValidationError):
            Vocabulary(tokens=[PAD, UNK, "a", "a"])


class TestHeteroGraph:
    """Tests for HeteroGraph model."""

    def test_neighbor_queries_are_transposes(self):
        """Test users_of and tweets_of agree on every edge."""
        from glan.models.graph import HeteroGraph

        graph = HeteroGraph(
            tweet_ids=["t1", "t2"],
            user_ids=["a", "b", "c"],
            edges=[(0, 0, 1), (1, 0, 2), (1, 1, 1), (2, 1, 1)],
        )

        for user, tweet, _ in graph.edges:
            assert graph.user_ids[user] in graph.users_of(graph.tweet_ids[tweet])
            assert graph.tweet_ids[tweet] in graph.tweets_of(graph.user_ids[user])
        assert graph.users_of("t1") == ["a", "b"]
        assert graph.tweets_of("b") == ["t1", "t2"]

    def test_isolated_tweet_rejected(self):
        """Test every tweet needs at least one user."""
        from glan.models.graph import HeteroGraph

        with pytest.raises(ValidationError):
            HeteroGraph(tweet_ids=["t1", "t2"], user_ids=["a"], edges=[(0, 0, 1)])

    def test_duplicate_and_out_of_range_edges_rejected(self):
        """Test malformed edges are rejected."""
        from glan.models.graph import HeteroGraph

        with pytest.raises(ValidationError):
            HeteroGraph(tweet_ids=["t1"], user_ids=["a"], edges=[(0, 0, 1), (0, 0, 1)])
        with pytest.raises(ValidationError):
            HeteroGraph(tweet_ids=["t1"], user_ids=["a"], edges=[(1, 0, 1)])
        with pytest.raises(ValidationError):
            HeteroGraph(tweet_ids=["t1"], user_ids=["a"], edges=[(0, 0, 0)])

    def test_capped_edges_keep_most_active(self):
        """Test the neighbor cap keeps the highest-weight neighbors."""
        from glan.models.graph import HeteroGraph

        graph = HeteroGraph(
            tweet_ids=["t1"],
            user_ids=["a", "b", "c"],
            edges=[(0, 0, 1), (1, 0, 3), (2, 0, 1)],
        )

        assert graph.capped_edges(2, "tweet") == [(0, 0, 1), (1, 0, 3)]
        assert graph.capped_edges(10, "user") == graph.edges

    def test_export_edge_list(self, tmp_path):
        """Test the debugging edge list format."""
        from glan.models.graph import HeteroGraph

        graph = HeteroGraph(tweet_ids=["t1"], user_ids=["a", "b"], edges=[(0, 0, 1), (1, 0, 2)])
        path = tmp_path / "edges.txt"
        graph.export_edge_list(path)

        assert path.read_text().splitlines() == ["a t1 1", "b t1 2"]


class TestReports:
    """Tests for report models."""

    def test_confusion_total_must_match(self):
        """Test the confusion matrix total is validated."""
        from glan.models.report import ClassMetrics, EvalReport

        per_class = [
            ClassMetrics(label="NR", precision=1.0, recall=1.0, f1=1.0, support=1),
            ClassMetrics(label="FR", precision=1.0, recall=1.0, f1=1.0, support=1),
        ]
        with pytest.raises(ValidationError):
            EvalReport(
                accuracy=1.0,
                labels=["NR", "FR"],
                per_class=per_class,
                confusion=[[1, 0], [0, 1]],
                total=3,
            )

    def test_metrics_for(self):
        """Test per-class lookup by label."""
        from glan.models.report import ClassMetrics, EvalReport

        report = EvalReport(
            accuracy=0.5,
            labels=["NR", "FR"],
            per_class=[
                ClassMetrics(label="NR", precision=0.5, recall=1.0, f1=2 / 3, support=1),
                ClassMetrics(label="FR", precision=0.0, recall=0.0, f1=0.0, support=1),
            ],
            confusion=[[1, 0], [1, 0]],
            total=2,
        )

        assert report.metrics_for("NR").recall == 1.0
        with pytest.raises(KeyError):
            report.metrics_for("UR")

    def test_manifest_round_trip(self):
        """Test the run manifest serializes without loss."""
        from glan.models.manifest import RunManifest

        manifest = RunManifest(
            command="train", config={"d": 12}, inputs={"c.jsonl": "abc"}, seed=3, out_dir="runs"
        )

        assert RunManifest.model_validate_json(manifest.model_dump_json()) == manifest
