"""Pydantic request/response models for the review service API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class NodeOut(BaseModel):
    id: str
    label: str
    description: str
    parent_id: str | None


class ArtifactOut(BaseModel):
    id: str
    text: str
    document_title: str | None
    section_title: str | None


class NeighborOut(BaseModel):
    node_id: str
    label: str
    distance: int


class SuggestionOut(BaseModel):
    node_id: str
    label: str
    score: float
    rank: int
    neighbors: list[NeighborOut]


class SuggestionResponse(BaseModel):
    artifact_id: str
    taxonomy_name: str
    model: str
    k: int
    radius: int
    suggestions: list[SuggestionOut]


class AnnotationIn(BaseModel):
    artifact_id: str
    taxonomy_name: str
    accepted: list[str] = Field(default_factory=list)
    rejected: list[str] = Field(default_factory=list)
    reviewer: str = Field(min_length=1)


class AnnotationOut(BaseModel):
    artifact_id: str
    taxonomy_name: str
    accepted: list[str]
    rejected: list[str]
    reviewer: str
    timestamp: str


class ProgressRow(BaseModel):
    taxonomy: str
    reviewed: int
    pending: int


class ProgressResponse(BaseModel):
    dataset_size: int
    taxonomies: list[ProgressRow]
