from __future__ import annotations

import json

import pytest

from taxotrace.classifier import (
    Artifact,
    NodeEmbeddingTable,
    aggregate_artifact,
    classify,
    classify_dataset,
    option_reduction,
    prediction_to_dict,
    read_artifacts_jsonl,
    read_predictions_jsonl,
    write_predictions_jsonl,
)
from taxotrace.embedding import cosine_similarity
from taxotrace.taxonomy import Taxonomy, TaxonomyNode


class CountingProvider:
    """Wraps a provider, counting individual embed() calls."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def model_id(self):
        return self.inner.model_id

    @property
    def dimension(self):
        return self.inner.dimension

    def embed(self, text):
        self.calls += 1
        return self.inner.embed(text)

    def embed_batch(self, texts):
        return [self.embed(t) for t in texts]


# -- artifact aggregation -----------------------------------------------------


def test_aggregate_artifact_with_context():
    artifact = Artifact(
        id="r1",
        text="Crossing mark shall be painted",
        document_title="Signaling",
        section_title="Level crossings",
    )
    assert aggregate_artifact(artifact) == "Signaling. Level crossings. Crossing mark shall be painted"


def test_aggregate_artifact_without_titles():
    artifact = Artifact(id="r1", text="Plain requirement")
    assert aggregate_artifact(artifact) == "Plain requirement"


def test_aggregate_artifact_partial_context():
    artifact = Artifact(id="r1", text="Body", section_title="Crossings")
    assert aggregate_artifact(artifact) == "Crossings. Body"


def test_empty_text_rejected_at_construction():
    with pytest.raises(ValueError, match="empty text"):
        Artifact(id="r1", text="   ")


# -- classify -----------------------------------------------------------------


def test_classify_identity_text_scores_one(fig3, mock_provider):
    provider = mock_provider(dimension=32)
    target = fig3.aggregate_description("B")
    artifact = Artifact(id="r1", text=target)
    prediction = classify(artifact, fig3, provider, k=1)
    assert prediction.labels[0].node_id == "B"
    assert prediction.labels[0].score == pytest.approx(1.0, abs=1e-12)
    assert prediction.labels[0].rank == 1


def test_classify_k_at_least_total_returns_all(fig3, mock_provider):
    prediction = classify(Artifact(id="r1", text="anything"), fig3, mock_provider(), k=50)
    assert len(prediction.labels) == 7
    assert [lab.rank for lab in prediction.labels] == list(range(1, 8))
    scores = [lab.score for lab in prediction.labels]
    assert scores == sorted(scores, reverse=True)
    assert len({lab.node_id for lab in prediction.labels}) == 7


def test_classify_tie_breaks_by_ascending_node_id(mock_provider):
    # Two nodes with byte-identical aggregated text get identical scores.
    nodes = (
        TaxonomyNode(id="zz", label="same words", description="identical"),
        TaxonomyNode(id="aa", label="same words", description="identical"),
        TaxonomyNode(id="mm", label="other thing", description="different"),
    )
    tax = Taxonomy("ties", nodes)
    provider = mock_provider(dimension=32)
    prediction = classify(Artifact(id="r1", text="same words identical"), tax, provider, k=3)
    first_two = [lab.node_id for lab in prediction.labels[:2]]
    assert prediction.labels[0].score == prediction.labels[1].score
    assert first_two == ["aa", "zz"]
    again = classify(Artifact(id="r1", text="same words identical"), tax, provider, k=3)
    assert [lab.node_id for lab in again.labels] == [lab.node_id for lab in prediction.labels]


def test_classify_prefix_stability(fig3, mock_provider):
    provider = mock_provider(dimension=32)
    artifact = Artifact(id="r1", text="signal relay equipment")
    small = classify(artifact, fig3, provider, k=3)
    large = classify(artifact, fig3, provider, k=7)
    assert [lab.node_id for lab in large.labels[:3]] == [lab.node_id for lab in small.labels]


def test_classify_scores_match_recomputed_cosines(fig3, mock_provider):
    provider = mock_provider(dimension=32)
    artifact = Artifact(id="r1", text="relay interlocking")
    prediction = classify(artifact, fig3, provider, k=7)
    artifact_vec = provider.embed(aggregate_artifact(artifact))
    for label in prediction.labels:
        node_vec = provider.embed(fig3.aggregate_description(label.node_id))
        assert label.score == pytest.approx(
            cosine_similarity(artifact_vec, node_vec), abs=1e-12
        )


def test_classify_k_must_be_positive(fig3, mock_provider):
    with pytest.raises(ValueError, match="k must be"):
        classify(Artifact(id="r1", text="x"), fig3, mock_provider(), k=0)


def test_classify_never_returns_implicit_root(fig3, mock_provider):
    prediction = classify(Artifact(id="r1", text="signal"), fig3, mock_provider(), k=7)
    assert all(lab.node_id in fig3 for lab in prediction.labels)


# -- classify_dataset ---------------------------------------------------------


def test_dataset_empty_is_empty(fig3, mock_provider):
    result = classify_dataset([], fig3, mock_provider(), k=3)
    assert result.predictions == [] and result.failures == []


def test_dataset_identical_artifacts_identical_labels(fig3, mock_provider):
    artifacts = [Artifact(id="r1", text="relay"), Artifact(id="r2", text="relay")]
    result = classify_dataset(artifacts, fig3, mock_provider(), k=3)
    assert [l.node_id for l in result.predictions[0].labels] == [
        l.node_id for l in result.predictions[1].labels
    ]


def test_dataset_embeds_each_node_exactly_once(fig3, mock_provider):
    counting = CountingProvider(mock_provider(dimension=16))
    artifacts = [Artifact(id=f"r{i}", text=f"requirement {i}") for i in range(20)]
    result = classify_dataset(artifacts, fig3, counting, k=3)
    assert len(result.predictions) == 20
    assert all(len(p.labels) == 3 for p in result.predictions)
    # 7 node embeddings, then one embedding per artifact
    assert counting.calls == 7 + 20


def test_dataset_counter_at_250_node_scale(mock_provider):
    from conftest import CORPUS_DIR

    from taxotrace.taxonomy import load_taxonomy

    tax = load_taxonomy(CORPUS_DIR / "T.tsv")
    assert len(tax) == 250
    counting = CountingProvider(mock_provider(dimension=16))
    artifacts = [Artifact(id=f"r{i}", text=f"requirement about {i} signals") for i in range(20)]
    result = classify_dataset(artifacts, tax, counting, k=15)
    assert len(result.predictions) == 20
    assert all(len(p.labels) == 15 for p in result.predictions)
    assert counting.calls == 250 + 20


def test_dataset_preserves_input_order(fig3, mock_provider):
    artifacts = [Artifact(id=f"r{i}", text=f"text {i}") for i in range(5)]
    result = classify_dataset(artifacts, fig3, mock_provider(), k=2)
    assert [p.artifact_id for p in result.predictions] == [a.id for a in artifacts]


def test_dataset_records_and_skips_failures(fig3, mock_provider):
    class FlakyProvider(CountingProvider):
        def embed(self, text):
            if "poison" in text:
                raise ValueError("simulated failure")
            return super().embed(text)

    provider = FlakyProvider(mock_provider(dimension=16))
    artifacts = [
        Artifact(id="good-1", text="fine text"),
        Artifact(id="bad-1", text="poison pill"),
        Artifact(id="good-2", text="more fine text"),
    ]
    result = classify_dataset(artifacts, fig3, provider, k=2)
    assert [p.artifact_id for p in result.predictions] == ["good-1", "good-2"]
    assert len(result.failures) == 1
    assert result.failures[0].artifact_id == "bad-1"
    assert "simulated failure" in result.failures[0].error


def test_node_table_guard_against_mismatched_reuse(fig3, mock_provider):
    provider = mock_provider(dimension=16)
    table = NodeEmbeddingTable(fig3, provider)
    other = Taxonomy("other", (TaxonomyNode(id="x", label="x"),))
    with pytest.raises(ValueError, match="node table built for"):
        classify(Artifact(id="r1", text="t"), other, provider, k=1, node_table=table)


# -- reduction arithmetic -----------------------------------------------------


def test_option_reduction_values():
    assert option_reduction(15, 250) == pytest.approx(0.94)
    assert option_reduction(15, 1183) == pytest.approx(0.9873, abs=5e-5)


# -- file formats -------------------------------------------------------------


def test_artifacts_jsonl_roundtrip(tmp_path):
    path = tmp_path / "dataset.jsonl"
    records = [
        {"id": "r1", "text": "first", "document_title": "Doc", "section_title": None},
        {"id": "r2", "text": "second", "document_title": None, "section_title": "Sec"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    artifacts = read_artifacts_jsonl(path)
    assert [a.id for a in artifacts] == ["r1", "r2"]
    assert artifacts[0].document_title == "Doc" and artifacts[0].section_title is None


def test_artifacts_jsonl_bad_record_reports_line(tmp_path):
    path = tmp_path / "dataset.jsonl"
    path.write_text('{"id": "r1", "text": "ok"}\n{"id": "r2"}\n', encoding="utf-8")
    with pytest.raises(ValueError, match="line 2"):
        read_artifacts_jsonl(path)


def test_predictions_jsonl_roundtrip(tmp_path, fig3, mock_provider):
    artifacts = [Artifact(id="r1", text="relay"), Artifact(id="r2", text="track")]
    result = classify_dataset(artifacts, fig3, mock_provider(dimension=16), k=3)
    path = tmp_path / "predictions.jsonl"
    write_predictions_jsonl(path, result.predictions)
    loaded = read_predictions_jsonl(path)
    assert loaded == result.predictions
    first = json.loads(path.read_text().splitlines()[0])
    assert first == prediction_to_dict(result.predictions[0])
