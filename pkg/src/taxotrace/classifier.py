"""Zero-shot classification pipeline: aggregate, embed, score, select top-k.

For one artifact the pipeline embeds the context-aggregated requirement
text once, embeds every class's child-enriched description (built once
per run and reused across artifacts), scores each class by cosine
similarity, and returns the k best with deterministic tie-breaking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .embedding import EmbeddingError, EmbeddingProvider, cosine_similarity
from .taxonomy import Taxonomy

CONTEXT_SEP = ". "
DEFAULT_K = 15


@dataclass(frozen=True)
class Artifact:
    """A text item to classify: requirement body plus document context."""

    id: str
    text: str
    document_title: str | None = None
    section_title: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("artifact id must be non-empty")
        if not self.text or not self.text.strip():
            raise ValueError(f"artifact {self.id!r} has empty text")


@dataclass(frozen=True)
class RankedLabel:
    node_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class Prediction:
    artifact_id: str
    taxonomy_name: str
    model_id: str
    k: int
    labels: tuple[RankedLabel, ...]

    def label_ids(self) -> list[str]:
        return [lab.node_id for lab in self.labels]


@dataclass(frozen=True)
class ClassificationFailure:
    artifact_id: str
    error: str


@dataclass
class DatasetClassification:
    """Per-artifact predictions in input order, plus any skipped failures."""

    predictions: list[Prediction]
    failures: list[ClassificationFailure]


class NodeEmbeddingTable:
    """Embeddings of every real node's aggregated description, built once."""

    def __init__(self, taxonomy: Taxonomy, provider: EmbeddingProvider):
        self.taxonomy_name = taxonomy.name
        self.model_id = provider.model_id
        self.node_ids = taxonomy.node_ids()
        texts = [taxonomy.aggregate_description(nid) for nid in self.node_ids]
        self.vectors = provider.embed_batch(texts)


def aggregate_artifact(artifact: Artifact) -> str:
    """Requirement text prefixed with its document and section titles."""
    parts = [artifact.document_title, artifact.section_title, artifact.text]
    return CONTEXT_SEP.join(p for p in parts if p)


def classify(
    artifact: Artifact,
    taxonomy: Taxonomy,
    provider: EmbeddingProvider,
    k: int = DEFAULT_K,
    *,
    node_table: NodeEmbeddingTable | None = None,
) -> Prediction:
    """Rank every class against the artifact and keep the k best.

    Ties on score break by ascending node id so results are stable across
    runs. Pass a prebuilt `node_table` to avoid re-embedding the taxonomy.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if node_table is None:
        node_table = NodeEmbeddingTable(taxonomy, provider)
    if node_table.taxonomy_name != taxonomy.name or node_table.model_id != provider.model_id:
        raise ValueError(
            f"node table built for ({node_table.taxonomy_name}, {node_table.model_id}), "
            f"got ({taxonomy.name}, {provider.model_id})"
        )
    try:
        artifact_vec = provider.embed(aggregate_artifact(artifact))
    except (EmbeddingError, ValueError) as exc:
        raise exc.__class__(f"artifact {artifact.id!r}: {exc}") from exc

    scored = [
        (cosine_similarity(artifact_vec, vec), nid)
        for nid, vec in zip(node_table.node_ids, node_table.vectors)
    ]
    scored.sort(key=lambda pair: (-pair[0], pair[1]))
    top = scored[: min(k, len(scored))]
    labels = tuple(
        RankedLabel(node_id=nid, score=score, rank=rank)
        for rank, (score, nid) in enumerate(top, start=1)
    )
    return Prediction(
        artifact_id=artifact.id,
        taxonomy_name=taxonomy.name,
        model_id=provider.model_id,
        k=k,
        labels=labels,
    )


def classify_dataset(
    artifacts: Sequence[Artifact],
    taxonomy: Taxonomy,
    provider: EmbeddingProvider,
    k: int = DEFAULT_K,
) -> DatasetClassification:
    """Classify every artifact; node embeddings are computed exactly once.

    An artifact whose embedding fails is recorded and skipped so one bad
    item cannot abort a large run.
    """
    node_table = NodeEmbeddingTable(taxonomy, provider)
    predictions: list[Prediction] = []
    failures: list[ClassificationFailure] = []
    for artifact in artifacts:
        try:
            predictions.append(
                classify(artifact, taxonomy, provider, k, node_table=node_table)
            )
        except (EmbeddingError, ValueError) as exc:
            failures.append(ClassificationFailure(artifact_id=artifact.id, error=str(exc)))
    return DatasetClassification(predictions=predictions, failures=failures)


def option_reduction(k: int, total_nodes: int) -> float:
    """Fraction of classes a reviewer no longer has to look at under top-k."""
    if total_nodes <= 0:
        raise ValueError("total_nodes must be positive")
    return 1.0 - k / total_nodes


# -- JSON Lines file formats -------------------------------------------------


def read_artifacts_jsonl(path: str | Path) -> list[Artifact]:
    """One artifact per line: id, text, optional document/section titles."""
    artifacts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                artifacts.append(
                    Artifact(
                        id=str(obj["id"]),
                        text=str(obj["text"]),
                        document_title=obj.get("document_title") or None,
                        section_title=obj.get("section_title") or None,
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: bad artifact record at line {lineno}: {exc}") from exc
    return artifacts


def prediction_to_dict(prediction: Prediction) -> dict:
    return {
        "artifact_id": prediction.artifact_id,
        "taxonomy": prediction.taxonomy_name,
        "model": prediction.model_id,
        "k": prediction.k,
        "labels": [
            {"node_id": lab.node_id, "score": lab.score, "rank": lab.rank}
            for lab in prediction.labels
        ],
    }


def prediction_from_dict(obj: dict) -> Prediction:
    return Prediction(
        artifact_id=str(obj["artifact_id"]),
        taxonomy_name=str(obj["taxonomy"]),
        model_id=str(obj["model"]),
        k=int(obj["k"]),
        labels=tuple(
            RankedLabel(node_id=str(lab["node_id"]), score=float(lab["score"]), rank=int(lab["rank"]))
            for lab in obj["labels"]
        ),
    )


def write_predictions_jsonl(path: str | Path, predictions: Iterable[Prediction]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for prediction in predictions:
            fh.write(json.dumps(prediction_to_dict(prediction), ensure_ascii=False))
            fh.write("\n")


def read_predictions_jsonl(path: str | Path) -> list[Prediction]:
    predictions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                predictions.append(prediction_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: bad prediction record at line {lineno}: {exc}") from exc
    return predictions
