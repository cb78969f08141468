"""HTTP review service: suggestions, taxonomy neighborhoods, annotations.

The service adds no ranking logic of its own — suggestions are exactly
the offline classifier's output, enriched with each suggested class's
taxonomy neighborhood so a reviewer can pick nearby classes without
traversing the whole hierarchy.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from ..classifier import Artifact, NodeEmbeddingTable, Prediction, classify, read_artifacts_jsonl
from ..embedding import EmbeddingError, EmbeddingProviderConfig, create_provider
from ..taxonomy import Taxonomy, load_taxonomy
from .models import (
    AnnotationIn,
    AnnotationOut,
    ArtifactOut,
    NeighborOut,
    NodeOut,
    ProgressResponse,
    ProgressRow,
    SuggestionOut,
    SuggestionResponse,
)
from .store import AnnotationStore, StoreCorruptError

DEFAULT_RADIUS = 2


class ServeConfigError(ValueError):
    pass


@dataclass
class ServeConfig:
    taxonomies: dict[str, Path]
    dataset: Path
    provider: EmbeddingProviderConfig
    annotation_store: Path
    k: int = 15
    radius: int | None = None
    reports_dir: Path | None = None
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    static_dir: Path | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "ServeConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ServeConfigError(f"cannot read config {path}: {exc}") from exc
        base = path.parent

        def resolve(p: str) -> Path:
            candidate = Path(p)
            return candidate if candidate.is_absolute() else base / candidate

        try:
            provider = EmbeddingProviderConfig(**raw["provider"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ServeConfigError(f"bad provider config: {exc}") from exc
        try:
            return cls(
                taxonomies={name: resolve(p) for name, p in raw["taxonomies"].items()},
                dataset=resolve(raw["dataset"]),
                provider=provider,
                annotation_store=resolve(raw.get("annotation_store", "annotations.jsonl")),
                k=int(raw.get("k", 15)),
                radius=int(raw["radius"]) if raw.get("radius") is not None else None,
                reports_dir=resolve(raw["reports_dir"]) if raw.get("reports_dir") else None,
                cors_origins=list(raw.get("cors_origins", ["*"])),
                static_dir=resolve(raw["static_dir"]) if raw.get("static_dir") else None,
            )
        except KeyError as exc:
            raise ServeConfigError(f"config {path} is missing required field {exc}") from exc


def _radius_from_reports(reports_dir: Path) -> int | None:
    """round(D_a) of the most recent evaluation report, if any exists."""
    newest: tuple[float, Path] | None = None
    for report_path in reports_dir.rglob("report.json"):
        mtime = report_path.stat().st_mtime
        if newest is None or mtime > newest[0]:
            newest = (mtime, report_path)
    if newest is None:
        return None
    try:
        doc = json.loads(newest[1].read_text(encoding="utf-8"))
        distance = doc.get("distance")
        if distance and distance.get("d_abs") is not None:
            return max(0, round(float(distance["d_abs"])))
    except (OSError, json.JSONDecodeError, TypeError, ValueError):
        return None
    return None


class _State:
    def __init__(self, config: ServeConfig):
        self.config = config
        self.taxonomies: dict[str, Taxonomy] = {
            name: load_taxonomy(path, name=name) for name, path in sorted(config.taxonomies.items())
        }
        artifacts = read_artifacts_jsonl(config.dataset)
        self.artifacts: dict[str, Artifact] = {a.id: a for a in artifacts}
        self.provider = create_provider(config.provider)
        self.store = AnnotationStore(config.annotation_store)
        self.default_radius = config.radius
        if self.default_radius is None and config.reports_dir is not None:
            self.default_radius = _radius_from_reports(config.reports_dir)
        if self.default_radius is None:
            self.default_radius = DEFAULT_RADIUS
        self._node_tables: dict[str, NodeEmbeddingTable] = {}
        self._predictions: dict[tuple[str, str, int], Prediction] = {}
        self._lock = threading.Lock()

    def taxonomy(self, name: str) -> Taxonomy:
        try:
            return self.taxonomies[name]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown taxonomy {name!r}") from None

    def artifact(self, artifact_id: str) -> Artifact:
        try:
            return self.artifacts[artifact_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown artifact {artifact_id!r}") from None

    def node_table(self, taxonomy_name: str) -> NodeEmbeddingTable:
        with self._lock:
            table = self._node_tables.get(taxonomy_name)
            if table is None:
                table = NodeEmbeddingTable(self.taxonomies[taxonomy_name], self.provider)
                self._node_tables[taxonomy_name] = table
            return table

    def prediction(self, artifact: Artifact, taxonomy: Taxonomy, k: int) -> Prediction:
        key = (artifact.id, taxonomy.name, k)
        with self._lock:
            cached = self._predictions.get(key)
        if cached is not None:
            return cached
        prediction = classify(artifact, taxonomy, self.provider, k, node_table=self.node_table(taxonomy.name))
        with self._lock:
            self._predictions.setdefault(key, prediction)
        return prediction


def create_app(config: ServeConfig) -> FastAPI:
    state = _State(config)
    app = FastAPI(title="taxotrace review service", version="0.1.0")
    app.state.taxotrace = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def bad_request(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(StoreCorruptError)
    async def store_corrupt(_request: Request, exc: StoreCorruptError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/taxonomies", response_model=list[str])
    def list_taxonomies():
        return sorted(state.taxonomies)

    @app.get("/taxonomies/{name}/nodes", response_model=list[NodeOut])
    def list_nodes(name: str):
        tax = state.taxonomy(name)
        nodes = sorted(tax.nodes(), key=lambda n: n.id)
        return [
            NodeOut(id=n.id, label=n.label, description=n.description, parent_id=n.parent_id)
            for n in nodes
        ]

    @app.get("/taxonomies/{name}/stats")
    def taxonomy_stats(name: str):
        stats = state.taxonomy(name).stats()
        return {
            "depth": stats.depth,
            "total_nodes": stats.total_nodes,
            "category_nodes": stats.category_nodes,
            "leaf_nodes": stats.leaf_nodes,
            "mean_description_length": stats.mean_description_length,
        }

    @app.get("/artifacts", response_model=list[ArtifactOut])
    def list_artifacts():
        ordered = sorted(state.artifacts.values(), key=lambda a: a.id)
        return [
            ArtifactOut(
                id=a.id,
                text=a.text,
                document_title=a.document_title,
                section_title=a.section_title,
            )
            for a in ordered
        ]

    @app.get("/artifacts/{artifact_id}/suggestions", response_model=SuggestionResponse)
    def suggestions(
        artifact_id: str,
        taxonomy: str = Query(...),
        k: int = Query(default=config.k),
        radius: int | None = Query(default=None),
    ):
        if k < 1:
            raise HTTPException(status_code=400, detail=f"k must be >= 1, got {k}")
        effective_radius = state.default_radius if radius is None else radius
        if effective_radius < 0:
            raise HTTPException(status_code=400, detail=f"radius must be >= 0, got {radius}")
        artifact = state.artifact(artifact_id)
        tax = state.taxonomy(taxonomy)
        try:
            prediction = state.prediction(artifact, tax, k)
        except (EmbeddingError, ValueError) as exc:
            raise HTTPException(status_code=502, detail=f"embedding provider failed: {exc}") from exc
        cards = []
        for label in prediction.labels:
            neighbors = [
                NeighborOut(node_id=nid, label=tax.node(nid).label, distance=dist)
                for nid, dist in tax.neighborhood(label.node_id, effective_radius)
            ]
            cards.append(
                SuggestionOut(
                    node_id=label.node_id,
                    label=tax.node(label.node_id).label,
                    score=label.score,
                    rank=label.rank,
                    neighbors=neighbors,
                )
            )
        return SuggestionResponse(
            artifact_id=artifact.id,
            taxonomy_name=tax.name,
            model=state.provider.model_id,
            k=k,
            radius=effective_radius,
            suggestions=cards,
        )

    @app.post("/annotations", response_model=AnnotationOut, status_code=201)
    def post_annotation(body: AnnotationIn):
        state.artifact(body.artifact_id)
        tax = state.taxonomy(body.taxonomy_name)
        accepted, rejected = set(body.accepted), set(body.rejected)
        overlap = accepted & rejected
        if overlap:
            raise HTTPException(
                status_code=400,
                detail=f"labels both accepted and rejected: {sorted(overlap)}",
            )
        if not accepted and not rejected:
            raise HTTPException(status_code=400, detail="annotation carries no decisions")
        unknown = [nid for nid in sorted(accepted | rejected) if nid not in tax]
        if unknown:
            raise HTTPException(status_code=400, detail=f"unknown node ids: {unknown}")
        record = state.store.append(
            artifact_id=body.artifact_id,
            taxonomy_name=body.taxonomy_name,
            accepted=body.accepted,
            rejected=body.rejected,
            reviewer=body.reviewer,
        )
        return AnnotationOut(**record)

    @app.get("/annotations", response_model=list[AnnotationOut])
    def get_annotations(artifact_id: str | None = Query(default=None)):
        return [AnnotationOut(**record) for record in state.store.records(artifact_id)]

    @app.get("/annotations/export", response_class=PlainTextResponse)
    def export_accepted(taxonomy: str = Query(...)):
        tax = state.taxonomy(taxonomy)
        merged = state.store.accepted_labels(tax.name)
        lines = [
            json.dumps(
                {"artifact_id": artifact_id, "taxonomy": tax.name, "labels": sorted(labels)},
                ensure_ascii=False,
            )
            for artifact_id, labels in sorted(merged.items())
        ]
        body = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(content=body, media_type="application/x-ndjson")

    @app.get("/reports/progress", response_model=ProgressResponse)
    def progress():
        size = len(state.artifacts)
        rows = []
        for name in sorted(state.taxonomies):
            reviewed = len(state.store.reviewed_artifacts(name) & set(state.artifacts))
            rows.append(ProgressRow(taxonomy=name, reviewed=reviewed, pending=size - reviewed))
        return ProgressResponse(dataset_size=size, taxonomies=rows)

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(config.static_dir), html=True), name="ui")

    return app
